//! Counting functionals over sign tables: consecutive sign changes, the
//! floor-ratio count Σ(I,α), shift sums, the exact integral of Σ over a
//! t-window, short-interval means, and the pigeonhole/sign-change witnesses.
//!
//! Every α, u0, u1 here is an exact rational and every ⌊α·n⌋ is exact
//! integer division; counts near breakpoints m/n are therefore exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::params::{paper_lower_bound, ExperimentParams};
use crate::primes::is_prime;
use crate::rat::{floor_mul, Rat};
use crate::table::SignTable;

/// Integer shift function δ(n) with its certified bound |δ(n)| ≤ B.
/// `h` and `theta` parameterize the floor-ratio corollary variant.
pub struct ShiftSpec<'a> {
    pub delta: Box<dyn Fn(u64) -> i64 + 'a>,
    pub bound: u64,
    pub h: Option<u64>,
    pub theta: Option<Rat>,
}

impl<'a> ShiftSpec<'a> {
    pub fn new(delta: impl Fn(u64) -> i64 + 'a, bound: u64) -> Self {
        ShiftSpec {
            delta: Box::new(delta),
            bound,
            h: None,
            theta: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillationReport {
    pub x: u64,
    /// #{n ≤ x-1 : f(n) = -f(n+1)}
    pub changes: u64,
    /// #{n ≤ x-1 : f(n) = f(n+1)}
    pub agreements: u64,
    /// x / L(x)^7, the asymptotic lower bound on `changes`. Vacuous (< 1)
    /// for any x a desk run can reach; reported, not asserted.
    pub paper_lower_bound: f64,
    pub bound_satisfied: bool,
}

/// Count sign changes f(n) = -f(n+1) for n ≤ x-1.
pub fn count_sign_changes(table: &SignTable, x: u64) -> Result<OscillationReport> {
    if x < 2 || x > table.limit() {
        return Err(Error::Range(format!(
            "x = {x} outside 2..={}",
            table.limit()
        )));
    }
    let mut changes = 0u64;
    let mut prev = table.sign(1);
    for n in 2..=x {
        let s = table.sign(n);
        if s != prev {
            changes += 1;
        }
        prev = s;
    }
    let bound = paper_lower_bound(x as f64);
    Ok(OscillationReport {
        x,
        changes,
        agreements: (x - 1) - changes,
        paper_lower_bound: bound,
        bound_satisfied: changes as f64 > bound,
    })
}

/// Σ(I,α) = #{n ∈ I : f(n) = -f(⌊αn⌋)}.
pub fn sigma(table: &SignTable, interval: &Interval, alpha: &Rat) -> Result<u64> {
    if !alpha.is_positive_rat() {
        return Err(Error::Contract(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    // Fast path: α = a/b with a·hi fitting u128, which is every real run.
    let fast = alpha.numer().to_u64().zip(alpha.denom().to_u64());
    let mut count = 0u64;
    match fast {
        Some((a, b)) => {
            for n in interval.iter() {
                let m = (a as u128 * n as u128 / b as u128) as u64;
                check_floor_range(table, n, m)?;
                if table.sign(n) == -table.sign(m) {
                    count += 1;
                }
            }
        }
        None => {
            for n in interval.iter() {
                let m = floor_mul(alpha, n)?;
                check_floor_range(table, n, m)?;
                if table.sign(n) == -table.sign(m) {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

fn check_floor_range(table: &SignTable, n: u64, m: u64) -> Result<()> {
    if m < 1 || m > table.limit() {
        return Err(Error::Range(format!(
            "⌊α·{n}⌋ = {m} outside sieved range 1..={}",
            table.limit()
        )));
    }
    Ok(())
}

trait RatSignExt {
    fn is_positive_rat(&self) -> bool;
}
impl RatSignExt for Rat {
    fn is_positive_rat(&self) -> bool {
        self.numer().sign() == num_bigint::Sign::Plus
    }
}

/// The pigeonhole pair: δ < δ' in {0,1,2} maximizing
/// #{j ≤ x/2 - 1 : f(2j+δ) = f(2j+δ')}, with that count. The count is
/// always ≥ ⌈(x/2-1)/3⌉ because among any three signs two agree.
pub fn pigeonhole_agreement_witness(table: &SignTable, x: u64) -> Result<(u8, u8, u64)> {
    if x < 6 {
        return Err(Error::Range(format!("x = {x} must be >= 6")));
    }
    if 2 * x > table.limit() {
        return Err(Error::Range(format!(
            "2x = {} exceeds sieved range {}",
            2 * x,
            table.limit()
        )));
    }
    let j_max = x / 2 - 1;
    let mut counts = [0u64; 3]; // pairs (0,1), (0,2), (1,2)
    for j in 1..=j_max {
        let s0 = table.sign(2 * j);
        let s1 = table.sign(2 * j + 1);
        let s2 = table.sign(2 * j + 2);
        if s0 == s1 {
            counts[0] += 1;
        }
        if s0 == s2 {
            counts[1] += 1;
        }
        if s1 == s2 {
            counts[2] += 1;
        }
    }
    let pairs = [(0u8, 1u8), (0, 2), (1, 2)];
    let best = (0..3)
        .max_by_key(|&i| (counts[i], std::cmp::Reverse(pairs[i])))
        .unwrap();
    Ok((pairs[best].0, pairs[best].1, counts[best]))
}

/// Given f(n) = -f(⌊pn/q⌋) with f(p) = f(q), locate the smallest m in
/// (pn-q, pn-1] with f(m) = -f(m+1). Such an m always exists: pn and
/// q⌊pn/q⌋ both lie in (pn-q, pn] and carry opposite signs.
pub fn locate_sign_change(table: &SignTable, n: u64, p: u64, q: u64) -> Result<u64> {
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::Contract(format!(
            "p = {p} and q = {q} must be prime"
        )));
    }
    let pn = p
        .checked_mul(n)
        .ok_or_else(|| Error::Range("p·n overflows".into()))?;
    if pn > table.limit() {
        return Err(Error::Range(format!(
            "p·n = {pn} exceeds sieved range {}",
            table.limit()
        )));
    }
    if table.sign(p) != table.sign(q) {
        return Err(Error::Contract(format!("f({p}) != f({q})")));
    }
    let m0 = pn / q;
    check_floor_range(table, n, m0)?;
    if table.sign(n) != -table.sign(m0) {
        return Err(Error::Contract(format!(
            "precondition f({n}) = -f(⌊{p}·{n}/{q}⌋) does not hold"
        )));
    }
    let lo = pn.saturating_sub(q) + 1;
    for m in lo..=pn - 1 {
        if table.sign(m) == -table.sign(m + 1) {
            return Ok(m);
        }
    }
    Err(Error::Internal(format!(
        "no sign change in ({}, {}] despite opposite endpoint signs",
        pn - q,
        pn
    )))
}

/// Σ_{B < n ≤ x-B} |f(n + δ(n)) - f(n)|; each term is 0 or 2.
pub fn shift_sum(table: &SignTable, x: u64, spec: &ShiftSpec) -> Result<u64> {
    let b = spec.bound;
    if b >= x {
        return Err(Error::Contract(format!("need B < x, got B = {b}, x = {x}")));
    }
    if x + b > table.limit() {
        return Err(Error::Range(format!(
            "x + B = {} exceeds sieved range {}",
            x + b,
            table.limit()
        )));
    }
    let mut sum = 0u64;
    for n in b + 1..=x - b {
        let d = (spec.delta)(n);
        if d.unsigned_abs() > b {
            return Err(Error::Contract(format!(
                "|δ({n})| = {} exceeds declared bound B = {b}",
                d.unsigned_abs()
            )));
        }
        let target = if d >= 0 {
            n + d as u64
        } else {
            n - (-d) as u64
        };
        if table.sign(target) != table.sign(n) {
            sum += 2;
        }
    }
    Ok(sum)
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioSigmaReport {
    pub count: u64,
    /// |I| / β₂², the asymptotic comparison target; present when params
    /// were supplied. Reported, never asserted: it only binds for large x.
    pub beta2_bound: Option<f64>,
    pub below_bound: Option<bool>,
}

/// Σ(I, p/q) for a sign-matched prime pair with p/q ∈ (1/2, 2).
pub fn ratio_floor_sigma(
    table: &SignTable,
    interval: &Interval,
    p: u64,
    q: u64,
    params: Option<&ExperimentParams>,
) -> Result<RatioSigmaReport> {
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::Contract(format!(
            "p = {p} and q = {q} must be prime"
        )));
    }
    if table.sign(p) != table.sign(q) {
        return Err(Error::Contract(format!("f({p}) != f({q})")));
    }
    if !(2 * p > q && p < 2 * q) {
        return Err(Error::Contract(format!("p/q = {p}/{q} outside (1/2, 2)")));
    }
    let count = sigma(table, interval, &crate::rat::rat_u(p, q))?;
    let (beta2_bound, below_bound) = match params {
        Some(pr) => {
            let bound = interval.len() as f64 / (pr.beta2 * pr.beta2);
            (Some(bound), Some((count as f64) < bound))
        }
        None => (None, None),
    };
    Ok(RatioSigmaReport {
        count,
        beta2_bound,
        below_bound,
    })
}

/// ∫_{u0}^{u1} Σ(I,t) dt, exactly. Uses the identity m = ⌊tn⌋ ⇔
/// m/n ≤ t < (m+1)/n: the integral equals
/// Σ_{n ∈ I} Σ_{m : f(m) = -f(n)} |[u0,u1] ∩ [m/n, (m+1)/n)|.
pub fn integral_sigma(
    table: &SignTable,
    interval: &Interval,
    u0: &Rat,
    u1: &Rat,
) -> Result<BigRational> {
    if !(u0 > &Rat::zero() && u1 > u0) {
        return Err(Error::Contract(format!(
            "need 0 < u0 < u1, got u0 = {u0}, u1 = {u1}"
        )));
    }
    let mut total = BigRational::zero();
    for n in interval.iter() {
        let m_lo = floor_mul(u0, n)?;
        let m_hi = floor_mul(u1, n)?;
        if m_lo < 1 {
            return Err(Error::Range(format!(
                "⌊u0·{n}⌋ = {m_lo} < 1: f would be evaluated below 1"
            )));
        }
        if m_hi + 1 > table.limit() {
            return Err(Error::Range(format!(
                "⌊u1·{n}⌋ + 1 = {} exceeds sieved range {}",
                m_hi + 1,
                table.limit()
            )));
        }
        let fn_sign = table.sign(n);
        let nb = BigInt::from(n);
        for m in m_lo..=m_hi {
            if table.sign(m) != -fn_sign {
                continue;
            }
            // |[u0,u1] ∩ [m/n, (m+1)/n)|
            let left = std::cmp::max(u0.clone(), Rat::new(BigInt::from(m), nb.clone()));
            let right = std::cmp::min(u1.clone(), Rat::new(BigInt::from(m + 1), nb.clone()));
            if right > left {
                total += right - left;
            }
        }
    }
    Ok(total)
}

/// (1/φ) Σ_{z-φ < n < z} f(n), both inequalities strict.
pub fn short_interval_mean(table: &SignTable, z: u64, phi: u64) -> Result<BigRational> {
    if phi < 3 || phi > z || z > table.limit() {
        return Err(Error::Range(format!(
            "need 3 <= phi <= z <= {}, got phi = {phi}, z = {z}",
            table.limit()
        )));
    }
    let mut sum: i64 = 0;
    for n in z - phi + 1..z {
        sum += table.sign(n) as i64;
    }
    Ok(BigRational::new(BigInt::from(sum), BigInt::from(phi)))
}

/// The integrand grid helper used by tests: Σ(I,t) at a rational t whose
/// parts fit in machine words, skipping the BigInt path entirely.
pub fn sigma_u128(table: &SignTable, interval: &Interval, num: u128, den: u128) -> Result<u64> {
    let mut count = 0u64;
    for n in interval.iter() {
        let m = (num * n as u128 / den) as u64;
        check_floor_range(table, n, m)?;
        if table.sign(n) == -table.sign(m) {
            count += 1;
        }
    }
    Ok(count)
}
