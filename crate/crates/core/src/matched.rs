//! Search for a close pair of s-fold prime products from a narrow window.
//!
//! S(y) is the set of all products of exactly s primes (with repetition)
//! drawn from J = [y^(1/s), y^(1/s)(1 + 1/(2s))]. Partitioning S(y) by
//! D = the number of +1-sign factors and picking the largest class gives a
//! set whose elements pair up with sign-matched factorizations; the two
//! closest neighbors in that class become the numerator and denominator of
//! the next chain rung.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::primes_in_range;
use crate::rule::PrimeSignAssignment;

#[derive(Clone, Debug, Serialize)]
pub struct MatchedProductSpec {
    pub y: f64,
    pub s: u32,
    pub j_lo: f64,
    pub j_hi: f64,
    /// Number of +1-sign prime factors shared by every element of the
    /// selected class.
    pub d: u32,
    pub m1: u64,
    pub m2: u64,
    /// Factorizations aligned so that f(m1_factors[i]) = f(m2_factors[i]).
    pub m1_factors: Vec<u64>,
    pub m2_factors: Vec<u64>,
    /// |class| per D value, for reporting.
    pub class_sizes: BTreeMap<u32, usize>,
    pub s_y_size: usize,
}

/// s = ⌊√(log y)/4⌋, clamped to at least 1. The paper-mode choice; desk
/// runs usually pin s themselves.
pub fn paper_s(y: f64) -> u32 {
    ((y.ln().sqrt() / 4.0).floor() as u32).max(1)
}

/// The prime window J for given (y, s): [y^(1/s), y^(1/s)(1 + 1/(2s))].
pub fn j_window(y: f64, s: u32) -> (f64, f64) {
    let base = y.powf(1.0 / s as f64);
    (base, base * (1.0 + 1.0 / (2.0 * s as f64)))
}

/// Exact count of primes in J alongside the asymptotic floor
/// y^(1/s)/(3 log y). The comparison only binds for large y; callers
/// report it, they do not assert it.
pub fn prime_count_in_j(y: f64, s: u32) -> Result<(u64, f64)> {
    if y < 2.0 || s < 1 {
        return Err(Error::Contract(format!(
            "need y >= 2 and s >= 1, got y = {y}, s = {s}"
        )));
    }
    let (lo, hi) = j_window(y, s);
    let primes = primes_in_range(lo.ceil() as u64, hi.floor() as u64)?;
    Ok((primes.len() as u64, lo / (3.0 * y.ln())))
}

struct Classes {
    /// D → sorted list of (product, nondecreasing factor tuple).
    by_d: BTreeMap<u32, Vec<(u64, Vec<u64>)>>,
    s_y_size: usize,
    j_lo: f64,
    j_hi: f64,
}

/// The largest sign class of S(y), sorted by product, plus the context a
/// caller needs to turn an adjacent pair into a [`MatchedProductSpec`].
pub struct ClassView {
    pub y: f64,
    pub s: u32,
    pub j_lo: f64,
    pub j_hi: f64,
    pub d: u32,
    pub members: Vec<(u64, Vec<u64>)>,
    pub class_sizes: BTreeMap<u32, usize>,
    pub s_y_size: usize,
}

impl ClassView {
    /// Build the spec for the adjacent pair at `idx` (members[idx] and
    /// members[idx + 1]).
    pub fn pair_spec(&self, idx: usize, rule: &PrimeSignAssignment) -> MatchedProductSpec {
        let (m1, f1) = &self.members[idx];
        let (m2, f2) = &self.members[idx + 1];
        MatchedProductSpec {
            y: self.y,
            s: self.s,
            j_lo: self.j_lo,
            j_hi: self.j_hi,
            d: self.d,
            m1: *m1,
            m2: *m2,
            m1_factors: sign_aligned(f1, rule),
            m2_factors: sign_aligned(f2, rule),
            class_sizes: self.class_sizes.clone(),
            s_y_size: self.s_y_size,
        }
    }
}

/// Enumerate S(y), partition by D, and return the largest class
/// (ties by smallest D).
pub fn select_largest_class(rule: &PrimeSignAssignment, y: f64, s: u32) -> Result<ClassView> {
    if s < 1 {
        return Err(Error::Contract("s must be >= 1".into()));
    }
    let classes = enumerate_classes(rule, y, s)?;
    let class_sizes: BTreeMap<u32, usize> =
        classes.by_d.iter().map(|(&d, v)| (d, v.len())).collect();
    if classes.by_d.values().all(|v| v.len() < 2) {
        return Err(Error::Search(format!(
            "every sign class has < 2 elements; |S(y)| = {}, class sizes {:?}",
            classes.s_y_size, class_sizes
        )));
    }
    let (&d, _) = classes
        .by_d
        .iter()
        .max_by_key(|(&d, v)| (v.len(), std::cmp::Reverse(d)))
        .unwrap();
    let (j_lo, j_hi, s_y_size) = (classes.j_lo, classes.j_hi, classes.s_y_size);
    let members = classes.by_d.into_iter().find(|(k, _)| *k == d).unwrap().1;
    Ok(ClassView {
        y,
        s,
        j_lo,
        j_hi,
        d,
        members,
        class_sizes,
        s_y_size,
    })
}

/// Enumerate S(y) as nondecreasing prime tuples (combinations with
/// repetition, so no product is generated twice from the same multiset)
/// and split by D.
fn enumerate_classes(rule: &PrimeSignAssignment, y: f64, s: u32) -> Result<Classes> {
    let (lo, hi) = j_window(y, s);
    let primes = primes_in_range(lo.ceil() as u64, hi.floor() as u64)?;
    if primes.len() < 2 {
        return Err(Error::Search(format!(
            "J = [{lo:.3}, {hi:.3}] holds {} prime(s); need at least 2",
            primes.len()
        )));
    }
    let signs: Vec<i8> = primes.iter().map(|&p| rule.sign_at_prime(p)).collect();
    let mut by_d: BTreeMap<u32, Vec<(u64, Vec<u64>)>> = BTreeMap::new();
    let mut total = 0usize;

    // Depth-first over nondecreasing index tuples.
    let mut stack: Vec<usize> = Vec::with_capacity(s as usize);
    fn rec(
        primes: &[u64],
        signs: &[i8],
        s: u32,
        start: usize,
        prod: u64,
        d: u32,
        stack: &mut Vec<usize>,
        by_d: &mut BTreeMap<u32, Vec<(u64, Vec<u64>)>>,
        total: &mut usize,
    ) -> Result<()> {
        if stack.len() == s as usize {
            *total += 1;
            by_d.entry(d)
                .or_default()
                .push((prod, stack.iter().map(|&i| primes[i]).collect()));
            return Ok(());
        }
        for i in start..primes.len() {
            let next = prod
                .checked_mul(primes[i])
                .ok_or_else(|| Error::Resource("product of window primes overflows u64".into()))?;
            stack.push(i);
            rec(
                primes,
                signs,
                s,
                i,
                next,
                d + u32::from(signs[i] == 1),
                stack,
                by_d,
                total,
            )?;
            stack.pop();
        }
        Ok(())
    }
    rec(
        &primes, &signs, s, 0, 1, 0, &mut stack, &mut by_d, &mut total,
    )?;

    for class in by_d.values_mut() {
        class.sort();
    }
    Ok(Classes {
        by_d,
        s_y_size: total,
        j_lo: lo,
        j_hi: hi,
    })
}

/// Align two factor tuples from the same D-class so paired entries are
/// sign-matched: +1 factors first, then -1 factors, each run ascending.
fn sign_aligned(factors: &[u64], rule: &PrimeSignAssignment) -> Vec<u64> {
    let mut plus: Vec<u64> = factors
        .iter()
        .copied()
        .filter(|&p| rule.sign_at_prime(p) == 1)
        .collect();
    let mut minus: Vec<u64> = factors
        .iter()
        .copied()
        .filter(|&p| rule.sign_at_prime(p) == -1)
        .collect();
    plus.sort_unstable();
    minus.sort_unstable();
    plus.extend(minus);
    plus
}

/// Find the closest adjacent pair in the largest sign class with gap in
/// [gap_min, gap_cap]; ties by smallest D for the class and smallest m1
/// for the pair. `find_matched_products` is the gap_min = 1 case.
pub fn find_matched_products(
    rule: &PrimeSignAssignment,
    y: f64,
    s: u32,
    gap_cap: u64,
) -> Result<MatchedProductSpec> {
    let class = select_largest_class(rule, y, s)?;
    let mut best: Option<(u64, u64, usize)> = None; // (gap, m1, index)
    let mut achieved_min: Option<u64> = None;
    for (i, w) in class.members.windows(2).enumerate() {
        let (m1, m2) = (w[0].0, w[1].0);
        if m2 == m1 {
            continue; // same integer from two multisets; gap must be >= 1
        }
        let gap = m2 - m1;
        achieved_min = Some(achieved_min.map_or(gap, |g| g.min(gap)));
        if gap > gap_cap {
            continue;
        }
        match best {
            Some((bg, bm1, _)) if (gap, m1) >= (bg, bm1) => {}
            _ => best = Some((gap, m1, i)),
        }
    }
    let (_, _, idx) = best.ok_or(Error::Gap {
        achieved: achieved_min.unwrap_or(0),
        min: 1,
        cap: gap_cap,
    })?;
    let spec = class.pair_spec(idx, rule);
    debug_assert!(verify_spec(&spec, rule));
    Ok(spec)
}

/// Re-verify a spec from scratch: factor counts, window membership,
/// products, range [y, 2y], and the sign-matched pairing.
pub fn verify_spec(spec: &MatchedProductSpec, rule: &PrimeSignAssignment) -> bool {
    let s = spec.s as usize;
    if spec.m1_factors.len() != s || spec.m2_factors.len() != s {
        return false;
    }
    let prod = |fs: &[u64]| fs.iter().copied().try_fold(1u64, u64::checked_mul);
    if prod(&spec.m1_factors) != Some(spec.m1) || prod(&spec.m2_factors) != Some(spec.m2) {
        return false;
    }
    if !(spec.m1 < spec.m2) {
        return false;
    }
    let in_j = |p: u64| (p as f64) >= spec.j_lo && (p as f64) <= spec.j_hi;
    if !spec
        .m1_factors
        .iter()
        .chain(&spec.m2_factors)
        .all(|&p| crate::primes::is_prime(p) && in_j(p))
    {
        return false;
    }
    if !(spec.m1 as f64 >= spec.y && spec.m2 as f64 <= 2.0 * spec.y) {
        return false;
    }
    spec.m1_factors
        .iter()
        .zip(&spec.m2_factors)
        .all(|(&p, &q)| rule.sign_at_prime(p) == rule.sign_at_prime(q))
}
