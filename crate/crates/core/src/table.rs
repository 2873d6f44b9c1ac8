//! Sieved sign tables: the values f(1..N) of a completely multiplicative
//! ±1 function, bit-packed, together with smallest-prime-factor data.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::rule::{PrimeSignAssignment, Sign};

/// Hard cap on the sieve range. spf is 4 bytes per integer, so this keeps
/// a single table around 1 GiB of spf plus 32 MiB of sign bits.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 28;

/// f(1..N) for one rule. Immutable after construction; all reads are pure,
/// so sharing across threads is safe.
///
/// Signs are stored one bit per integer, +1 ↔ 0 and -1 ↔ 1, with the bit
/// for n at position n-1 (LSB-first within 64-bit words).
#[derive(Clone, Debug)]
pub struct SignTable {
    rule: Option<PrimeSignAssignment>,
    rule_digest: [u8; 32],
    limit: u64,
    neg_bits: Vec<u64>,
    spf: Vec<u32>,
}

impl PartialEq for SignTable {
    fn eq(&self, other: &Self) -> bool {
        // spf is derived data; a table is its rule digest, limit and signs.
        self.rule_digest == other.rule_digest
            && self.limit == other.limit
            && self.neg_bits == other.neg_bits
    }
}
impl Eq for SignTable {}

/// Compute the smallest-prime-factor array for 0..=n (spf[0] = spf[1] = 0)
/// with a linear sieve; also returns the primes found, in order.
fn linear_spf(n: u64) -> (Vec<u32>, Vec<u32>) {
    let n = n as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let p = p as usize;
            if p > spf[i] as usize || i * p > n {
                break;
            }
            spf[i * p] = p as u32;
        }
    }
    (spf, primes)
}

/// Sieve f(1..N) for `rule`. Deterministic for fixed inputs.
pub fn sieve_signs(rule: &PrimeSignAssignment, limit: u64) -> Result<SignTable> {
    if limit < 1 {
        return Err(Error::Contract("sieve limit must be >= 1".into()));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds memory budget {MAX_SIEVE_LIMIT}"
        )));
    }
    let (spf, primes) = linear_spf(limit);
    let words = (limit as usize).div_ceil(64);
    let mut neg_bits = vec![0u64; words.max(1)];
    let mut set_neg = |n: u64| {
        let i = (n - 1) as usize;
        neg_bits[i >> 6] |= 1u64 << (i & 63);
    };
    // f(1) = +1 (bit stays clear). f(i) = f(spf) * f(i / spf), with i / spf < i
    // already filled in.
    let mut neg = vec![false; (limit + 1) as usize];
    for &p in &primes {
        neg[p as usize] = rule.sign_at_prime(p as u64) == -1;
    }
    for i in 2..=limit as usize {
        let p = spf[i] as usize;
        if p != i {
            neg[i] = neg[p] ^ neg[i / p];
        }
        if neg[i] {
            set_neg(i as u64);
        }
    }
    Ok(SignTable {
        rule: Some(rule.clone()),
        rule_digest: rule.digest(),
        limit,
        neg_bits,
        spf,
    })
}

impl SignTable {
    pub(crate) fn from_parts(
        rule_digest: [u8; 32],
        limit: u64,
        neg_bits: Vec<u64>,
        spf: Vec<u32>,
    ) -> Self {
        SignTable {
            rule: None,
            rule_digest,
            limit,
            neg_bits,
            spf,
        }
    }

    pub(crate) fn recompute_spf(limit: u64) -> Vec<u32> {
        linear_spf(limit).0
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// The rule this table was sieved from, if known. Tables loaded from a
    /// cache file carry only the rule digest until a rule is attached.
    pub fn rule(&self) -> Option<&PrimeSignAssignment> {
        self.rule.as_ref()
    }

    pub fn rule_digest(&self) -> &[u8; 32] {
        &self.rule_digest
    }

    /// Attach the originating rule to a loaded table; rejected unless its
    /// digest matches the one stored in the file header.
    pub fn attach_rule(&mut self, rule: PrimeSignAssignment) -> Result<()> {
        if rule.digest() != self.rule_digest {
            return Err(Error::Contract(
                "rule digest does not match the table's stored digest".into(),
            ));
        }
        self.rule = Some(rule);
        Ok(())
    }

    pub(crate) fn neg_bit_payload(&self, len_bytes: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len_bytes);
        for w in &self.neg_bits {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(len_bytes);
        out
    }

    /// f(n), unchecked. Panics in debug if out of range.
    #[inline]
    pub fn sign(&self, n: u64) -> Sign {
        debug_assert!(n >= 1 && n <= self.limit);
        let i = (n - 1) as usize;
        if (self.neg_bits[i >> 6] >> (i & 63)) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// f(n) with range checking.
    pub fn f_at(&self, n: u64) -> Result<Sign> {
        if n < 1 || n > self.limit {
            return Err(Error::Range(format!(
                "n = {n} outside sieved range 1..={}",
                self.limit
            )));
        }
        Ok(self.sign(n))
    }

    /// Smallest prime factor of n (n >= 2).
    pub fn spf(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit {
            return Err(Error::Range(format!(
                "n = {n} outside spf range 2..={}",
                self.limit
            )));
        }
        Ok(self.spf[n as usize] as u64)
    }

    /// (1/x) Σ_{n≤x} f(n) as an exact rational.
    pub fn mean_value(&self, x: u64) -> Result<BigRational> {
        if x < 1 || x > self.limit {
            return Err(Error::Range(format!(
                "x = {x} outside sieved range 1..={}",
                self.limit
            )));
        }
        let mut sum: i64 = 0;
        for n in 1..=x {
            sum += self.sign(n) as i64;
        }
        Ok(BigRational::new(BigInt::from(sum), BigInt::from(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn liouville(n: u64) -> SignTable {
        sieve_signs(&PrimeSignAssignment::Liouville, n).unwrap()
    }

    #[test]
    fn liouville_first_ten() {
        let t = liouville(10);
        let got: Vec<Sign> = (1..=10).map(|n| t.sign(n)).collect();
        assert_eq!(got, vec![1, -1, -1, 1, -1, 1, -1, -1, 1, 1]);
    }

    #[test]
    fn all_plus_one_rule() {
        let rule = PrimeSignAssignment::explicit(vec![], 1).unwrap();
        let t = sieve_signs(&rule, 6).unwrap();
        assert!((1..=6).all(|n| t.sign(n) == 1));
    }

    #[test]
    fn f_at_range_checked() {
        let t = liouville(10);
        assert_eq!(t.f_at(1).unwrap(), 1);
        assert_eq!(t.f_at(8).unwrap(), -1);
        assert_eq!(t.f_at(9).unwrap(), 1);
        assert!(matches!(t.f_at(0), Err(Error::Range(_))));
        assert!(matches!(t.f_at(11), Err(Error::Range(_))));
    }

    #[test]
    fn multiplicativity_exhaustive_small() {
        for rule in [
            PrimeSignAssignment::Liouville,
            PrimeSignAssignment::SeededRandom { seed: 7 },
        ] {
            let t = sieve_signs(&rule, 1000).unwrap();
            for m in 1..=1000u64 {
                for n in 1..=(1000 / m) {
                    assert_eq!(t.sign(m * n), t.sign(m) * t.sign(n), "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn mean_value_examples() {
        let t = liouville(10);
        assert_eq!(
            t.mean_value(10).unwrap(),
            BigRational::from(BigInt::from(0))
        );
        let ones = sieve_signs(&PrimeSignAssignment::explicit(vec![], 1).unwrap(), 100).unwrap();
        assert_eq!(
            ones.mean_value(100).unwrap(),
            BigRational::from(BigInt::from(1))
        );
        assert!(matches!(t.mean_value(11), Err(Error::Range(_))));
    }

    #[test]
    fn budget_error_names_budget() {
        let err = sieve_signs(&PrimeSignAssignment::Liouville, MAX_SIEVE_LIMIT + 1).unwrap_err();
        match err {
            Error::Resource(msg) => assert!(msg.contains(&MAX_SIEVE_LIMIT.to_string())),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn spf_is_smallest_prime_factor() {
        let t = liouville(100);
        assert_eq!(t.spf(2).unwrap(), 2);
        assert_eq!(t.spf(91).unwrap(), 7);
        assert_eq!(t.spf(97).unwrap(), 97);
        assert!(t.spf(1).is_err());
    }
}
