//! Sign-matched prime-ratio products: the elements of R(x). A product keeps
//! its factored form forever; the reduced rational value is carried
//! alongside and rebuilt from the factors whenever a product is
//! deserialized.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ExperimentParams;
use crate::primes::is_prime;
use crate::rat::{rat, rat_u, Rat};
use crate::rule::{PrimeSignAssignment, Sign};

/// One factor p/q: primes with ratio in (1/2, 2) and matching signs under
/// the ambient rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioFactor {
    pub p: u64,
    pub q: u64,
    pub sign: Sign,
}

impl RatioFactor {
    pub fn new(p: u64, q: u64, rule: &PrimeSignAssignment) -> Result<Self> {
        if !is_prime(p) || !is_prime(q) {
            return Err(Error::Contract(format!("{p} and {q} must both be prime")));
        }
        if !(2 * p > q && p < 2 * q) {
            return Err(Error::Contract(format!("{p}/{q} outside (1/2, 2)")));
        }
        let sp = rule.sign_at_prime(p);
        if sp != rule.sign_at_prime(q) {
            return Err(Error::Contract(format!("f({p}) != f({q})")));
        }
        Ok(RatioFactor { p, q, sign: sp })
    }

    pub fn ratio(&self) -> Rat {
        rat_u(self.p, self.q)
    }

    /// Range and primality checks only; sign validity needs the rule.
    pub fn is_well_formed(&self) -> bool {
        is_prime(self.p)
            && is_prime(self.q)
            && 2 * self.p > self.q
            && self.p < 2 * self.q
            && (self.sign == 1 || self.sign == -1)
    }
}

/// An ordered product Π p_i/q_i with its exact value.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioProduct {
    factors: Vec<RatioFactor>,
    value: Rat,
}

impl RatioProduct {
    /// The empty product, representing 1.
    pub fn one() -> Self {
        RatioProduct {
            factors: Vec::new(),
            value: Rat::one(),
        }
    }

    pub fn from_factors(factors: Vec<RatioFactor>) -> Self {
        let value = factors.iter().map(RatioFactor::ratio).product();
        RatioProduct { factors, value }
    }

    pub fn push(&mut self, f: RatioFactor) {
        self.value *= f.ratio();
        self.factors.push(f);
    }

    pub fn extend(&mut self, fs: &[RatioFactor]) {
        for &f in fs {
            self.push(f);
        }
    }

    pub fn factors(&self) -> &[RatioFactor] {
        &self.factors
    }

    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    /// Recompute the value from the factors and compare; the two can only
    /// disagree if a construction path bypassed `push`.
    pub fn value_consistent(&self) -> bool {
        let recomputed: Rat = self.factors.iter().map(RatioFactor::ratio).product();
        recomputed == self.value
    }
}

/// Serialized form: factors only, values rebuilt on load.
#[derive(Serialize, Deserialize)]
pub struct RatioProductFile {
    pub factors: Vec<[u64; 2]>,
}

impl RatioProduct {
    pub fn to_file(&self) -> RatioProductFile {
        RatioProductFile {
            factors: self.factors.iter().map(|f| [f.p, f.q]).collect(),
        }
    }

    pub fn from_file(file: &RatioProductFile, rule: &PrimeSignAssignment) -> Result<Self> {
        let mut out = RatioProduct::one();
        for &[p, q] in &file.factors {
            out.push(RatioFactor::new(p, q, rule)?);
        }
        Ok(out)
    }
}

/// Membership in R(x): value in (1/2, 2), all primes ≤ β₁, every factor
/// sign-matched under `rule` with ratio in (1/2, 2), and fewer than β₂
/// factor pairs. Total predicate: never errors.
pub fn in_rx(
    candidate: &RatioProduct,
    params: &ExperimentParams,
    rule: &PrimeSignAssignment,
) -> bool {
    let half = rat(1, 2);
    let two = rat(2, 1);
    if !(candidate.value() > &half && candidate.value() < &two) {
        return false;
    }
    if (candidate.k() as f64) >= params.beta2 {
        return false;
    }
    candidate.factors().iter().all(|f| {
        f.is_well_formed()
            && (f.p as f64) <= params.beta1
            && (f.q as f64) <= params.beta1
            && rule.sign_at_prime(f.p) == f.sign
            && rule.sign_at_prime(f.q) == f.sign
    })
}

/// Permute the factors so every prefix product stays in (1/2, 2).
/// Greedy: while the prefix is ≤ 1 append an unused factor > 1, otherwise
/// one < 1; unit factors fill in when the preferred kind is exhausted.
/// Falls back to a full backtracking search on a greedy stall.
pub fn reorder_prefix(product: &RatioProduct) -> Result<RatioProduct> {
    let half = rat(1, 2);
    let two = rat(2, 1);
    let one = Rat::one();
    if !(product.value() > &half && product.value() < &two) {
        return Err(Error::Contract(format!(
            "product value {} outside (1/2, 2)",
            product.value()
        )));
    }

    let factors = product.factors().to_vec();
    let mut used = vec![false; factors.len()];
    let mut order: Vec<usize> = Vec::with_capacity(factors.len());
    let mut prefix = Rat::one();
    let mut stalled = false;
    for _ in 0..factors.len() {
        let want_big = prefix <= one;
        let pick = (0..factors.len())
            .filter(|&i| !used[i])
            .find(|&i| {
                let r = factors[i].ratio();
                if want_big {
                    r >= one
                } else {
                    r <= one
                }
            })
            .or_else(|| (0..factors.len()).find(|&i| !used[i]));
        let i = pick.unwrap();
        let next = &prefix * factors[i].ratio();
        if !(next > half && next < two) {
            stalled = true;
            break;
        }
        prefix = next;
        used[i] = true;
        order.push(i);
    }

    let order = if stalled {
        backtrack_order(&factors, &half, &two)
            .ok_or_else(|| Error::Internal("no prefix-safe permutation exists".into()))?
    } else {
        order
    };

    let out = RatioProduct::from_factors(order.into_iter().map(|i| factors[i]).collect());
    debug_assert!(prefix_check(&out));
    Ok(out)
}

/// Exhaustive prefix-range scan.
pub fn prefix_check(product: &RatioProduct) -> bool {
    let half = rat(1, 2);
    let two = rat(2, 1);
    let mut prefix = Rat::one();
    for f in product.factors() {
        prefix *= f.ratio();
        if !(prefix > half && prefix < two) {
            return false;
        }
    }
    true
}

fn backtrack_order(factors: &[RatioFactor], half: &Rat, two: &Rat) -> Option<Vec<usize>> {
    fn go(
        factors: &[RatioFactor],
        used: &mut Vec<bool>,
        order: &mut Vec<usize>,
        prefix: &Rat,
        half: &Rat,
        two: &Rat,
    ) -> bool {
        if order.len() == factors.len() {
            return true;
        }
        for i in 0..factors.len() {
            if used[i] {
                continue;
            }
            // Skip duplicates at the same depth.
            if (0..i).any(|j| !used[j] && factors[j] == factors[i]) {
                continue;
            }
            let next = prefix * factors[i].ratio();
            if next > *half && next < *two {
                used[i] = true;
                order.push(i);
                if go(factors, used, order, &next, half, two) {
                    return true;
                }
                order.pop();
                used[i] = false;
            }
        }
        false
    }
    let mut used = vec![false; factors.len()];
    let mut order = Vec::new();
    if go(factors, &mut used, &mut order, &Rat::one(), half, two) {
        Some(order)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn desk_params() -> ExperimentParams {
        ExperimentParams::desk(1e6, 50.0, 8.0, Interval::new(10_000, 20_000).unwrap(), 1000)
            .unwrap()
    }

    #[test]
    fn empty_product_is_in_rx() {
        let rule = PrimeSignAssignment::Liouville;
        assert!(in_rx(&RatioProduct::one(), &desk_params(), &rule));
    }

    #[test]
    fn single_factor_membership() {
        let rule = PrimeSignAssignment::Liouville;
        let p = RatioProduct::from_factors(vec![RatioFactor::new(3, 2, &rule).unwrap()]);
        assert!(in_rx(&p, &desk_params(), &rule));
    }

    #[test]
    fn out_of_range_factor_rejected() {
        let rule = PrimeSignAssignment::Liouville;
        assert!(RatioFactor::new(5, 2, &rule).is_err());
        // Hand-built ill-formed factor is caught by in_rx.
        let bad = RatioProduct::from_factors(vec![RatioFactor {
            p: 5,
            q: 2,
            sign: -1,
        }]);
        assert!(!in_rx(&bad, &desk_params(), &rule));
    }

    #[test]
    fn beta1_and_k_limits() {
        let rule = PrimeSignAssignment::Liouville;
        let params =
            ExperimentParams::desk(1e6, 2.0, 2.0, Interval::new(1, 10).unwrap(), 10).unwrap();
        let f = RatioFactor::new(3, 2, &rule).unwrap();
        // 3 > beta1 = 2
        assert!(!in_rx(&RatioProduct::from_factors(vec![f]), &params, &rule));
        // k = 2 >= beta2 = 2
        let params2 =
            ExperimentParams::desk(1e6, 50.0, 2.0, Interval::new(1, 10).unwrap(), 10).unwrap();
        let two_factors =
            RatioProduct::from_factors(vec![f, RatioFactor::new(2, 3, &rule).unwrap()]);
        assert!(!in_rx(&two_factors, &params2, &rule));
    }

    #[test]
    fn reorder_interleaves_hand_example() {
        let rule = PrimeSignAssignment::Liouville;
        let f23 = RatioFactor::new(2, 3, &rule).unwrap();
        let f32 = RatioFactor::new(3, 2, &rule).unwrap();
        // [2/3, 2/3, 3/2, 3/2] has prefix 4/9 < 1/2.
        let bad = RatioProduct::from_factors(vec![f23, f23, f32, f32]);
        assert!(!prefix_check(&bad));
        let good = reorder_prefix(&bad).unwrap();
        assert!(prefix_check(&good));
        // Multiset equality.
        let mut a: Vec<_> = bad.factors().to_vec();
        let mut b: Vec<_> = good.factors().to_vec();
        a.sort_by_key(|f| (f.p, f.q));
        b.sort_by_key(|f| (f.p, f.q));
        assert_eq!(a, b);
    }

    #[test]
    fn reorder_single_factor_unchanged() {
        let rule = PrimeSignAssignment::Liouville;
        let p = RatioProduct::from_factors(vec![RatioFactor::new(3, 2, &rule).unwrap()]);
        let q = reorder_prefix(&p).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn reorder_rejects_out_of_range_value() {
        let rule = PrimeSignAssignment::Liouville;
        let f32 = RatioFactor::new(3, 2, &rule).unwrap();
        let big = RatioProduct::from_factors(vec![f32, f32]); // 9/4 >= 2
        assert!(matches!(reorder_prefix(&big), Err(Error::Contract(_))));
    }

    #[test]
    fn value_tracks_factors() {
        let rule = PrimeSignAssignment::Liouville;
        let mut p = RatioProduct::one();
        p.push(RatioFactor::new(3, 2, &rule).unwrap());
        p.push(RatioFactor::new(5, 7, &rule).unwrap());
        assert_eq!(p.value(), &rat(15, 14));
        assert!(p.value_consistent());
    }

    #[test]
    fn file_round_trip_rebuilds_value() {
        let rule = PrimeSignAssignment::Liouville;
        let p = RatioProduct::from_factors(vec![
            RatioFactor::new(3, 2, &rule).unwrap(),
            RatioFactor::new(5, 7, &rule).unwrap(),
        ]);
        let json = serde_json::to_string(&p.to_file()).unwrap();
        let file: RatioProductFile = serde_json::from_str(&json).unwrap();
        let q = RatioProduct::from_file(&file, &rule).unwrap();
        assert_eq!(p, q);
    }
}
