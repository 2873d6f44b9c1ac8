//! Rules assigning a sign to every prime. A rule determines a completely
//! multiplicative ±1 function: f(1) = 1 and f extends from primes by
//! f(mn) = f(m)f(n).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::primes::is_prime;

/// Either +1 or -1, stored as `i8` so products are plain multiplications.
pub type Sign = i8;

/// The seeded-random prime sign: mix (seed, p) through the splitmix64
/// finalizer and read the low bit. The mixer is pinned so seeded tables
/// are reproducible across platforms and languages:
///
/// ```text
/// z  = seed XOR (p * 0x9E3779B97F4A7C15)          (wrapping)
/// z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9          (wrapping)
/// z ^= z >> 27;  z *= 0x94D049BB133111EB          (wrapping)
/// z ^= z >> 31
/// sign = +1 if z is even, -1 if z is odd
/// ```
pub fn seeded_sign(seed: u64, p: u64) -> Sign {
    let mut z = seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    if z & 1 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeSignAssignment {
    /// Every prime gets -1, so f(n) = (-1)^Ω(n), the Liouville function.
    Liouville,
    /// Deterministic pseudo-random signs from a 64-bit seed (see [`seeded_sign`]).
    SeededRandom { seed: u64 },
    /// Signs listed per prime, with a default for unlisted primes.
    /// Entries are kept sorted by prime; construct via [`PrimeSignAssignment::explicit`].
    Explicit {
        signs: Vec<(u64, Sign)>,
        default: Sign,
    },
}

impl PrimeSignAssignment {
    /// Validated constructor for the explicit rule: rejects non-prime keys,
    /// duplicate keys, and signs other than ±1.
    pub fn explicit(mut signs: Vec<(u64, Sign)>, default: Sign) -> Result<Self> {
        if default != 1 && default != -1 {
            return Err(Error::Contract(format!(
                "default sign must be +1 or -1, got {default}"
            )));
        }
        for &(p, s) in &signs {
            if s != 1 && s != -1 {
                return Err(Error::Contract(format!("sign for {p} must be ±1, got {s}")));
            }
            if !is_prime(p) {
                return Err(Error::Contract(format!("explicit key {p} is not prime")));
            }
        }
        signs.sort_by_key(|&(p, _)| p);
        if signs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Contract(
                "duplicate prime key in explicit rule".into(),
            ));
        }
        Ok(PrimeSignAssignment::Explicit { signs, default })
    }

    /// The sign this rule assigns to the prime `p`. Caller guarantees
    /// primality; the value for a composite argument is meaningless.
    pub fn sign_at_prime(&self, p: u64) -> Sign {
        match self {
            PrimeSignAssignment::Liouville => -1,
            PrimeSignAssignment::SeededRandom { seed } => seeded_sign(*seed, p),
            PrimeSignAssignment::Explicit { signs, default } => signs
                .binary_search_by_key(&p, |&(q, _)| q)
                .map(|i| signs[i].1)
                .unwrap_or(*default),
        }
    }

    /// Canonical one-line description, the preimage of [`Self::digest`].
    pub fn descriptor(&self) -> String {
        match self {
            PrimeSignAssignment::Liouville => "liouville".to_string(),
            PrimeSignAssignment::SeededRandom { seed } => format!("seeded_random:{seed}"),
            PrimeSignAssignment::Explicit { signs, default } => {
                let body: Vec<String> = signs.iter().map(|&(p, s)| format!("{p}={s:+}")).collect();
                format!("explicit:default={default:+}:{}", body.join(","))
            }
        }
    }

    /// SHA-256 of the canonical descriptor; embedded in the table cache
    /// header so a cache file can be tied back to its rule.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.descriptor().as_bytes());
        h.finalize().into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn liouville_assigns_minus_one_everywhere() {
        let rule = PrimeSignAssignment::Liouville;
        for p in [2u64, 3, 5, 7, 997] {
            assert_eq!(rule.sign_at_prime(p), -1);
        }
    }

    #[test]
    fn seeded_is_deterministic_and_seed_sensitive() {
        let a = PrimeSignAssignment::SeededRandom { seed: 42 };
        let b = PrimeSignAssignment::SeededRandom { seed: 42 };
        let c = PrimeSignAssignment::SeededRandom { seed: 43 };
        let primes = crate::primes::sieve_primes(10_000);
        assert!(primes
            .iter()
            .all(|&p| a.sign_at_prime(p) == b.sign_at_prime(p)));
        assert!(primes
            .iter()
            .any(|&p| a.sign_at_prime(p) != c.sign_at_prime(p)));
    }

    #[test]
    fn explicit_rejects_bad_keys() {
        assert!(PrimeSignAssignment::explicit(vec![(4, 1)], 1).is_err());
        assert!(PrimeSignAssignment::explicit(vec![(3, 1), (3, -1)], 1).is_err());
        assert!(PrimeSignAssignment::explicit(vec![(3, 2)], 1).is_err());
        assert!(PrimeSignAssignment::explicit(vec![(3, 1)], 0).is_err());
        let ok = PrimeSignAssignment::explicit(vec![(5, -1), (3, 1)], 1).unwrap();
        assert_eq!(ok.sign_at_prime(3), 1);
        assert_eq!(ok.sign_at_prime(5), -1);
        assert_eq!(ok.sign_at_prime(7), 1);
    }

    #[test]
    fn digests_separate_rules() {
        let a = PrimeSignAssignment::Liouville.digest();
        let b = PrimeSignAssignment::SeededRandom { seed: 0 }.digest();
        assert_ne!(a, b);
    }
}
