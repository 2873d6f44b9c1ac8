//! Shared helpers for the integration tests: an independent sign oracle
//! built on plain Eratosthenes marking (a different algorithm from the
//! linear sieve inside the library) and a small deterministic generator so
//! "random" cases are reproducible.
#![allow(dead_code)]

use mfo_core::{PrimeSignAssignment, Sign};

/// Smallest-prime-factor table via classic Eratosthenes composite marking.
/// spf[n] = 0 means n is prime (or n < 2).
pub fn eratosthenes_spf(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut p = 2usize;
    while p * p <= n {
        if spf[p] == 0 {
            let mut m = p * p;
            while m <= n {
                if spf[m] == 0 {
                    spf[m] = p as u32;
                }
                m += p;
            }
        }
        p += 1;
    }
    spf
}

/// sign(n) for n in 0..=limit, propagated along the Eratosthenes table.
pub fn oracle_signs(rule: &PrimeSignAssignment, limit: u64) -> Vec<Sign> {
    let spf = eratosthenes_spf(limit);
    let mut s = vec![0i8; limit as usize + 1];
    if limit >= 1 {
        s[1] = 1;
    }
    for n in 2..=limit as usize {
        s[n] = if spf[n] == 0 {
            rule.sign_at_prime(n as u64)
        } else {
            s[spf[n] as usize] * s[n / spf[n] as usize]
        };
    }
    s
}

/// sign(n) by bare trial division, for spot checks.
pub fn trial_division_sign(rule: &PrimeSignAssignment, mut n: u64) -> Sign {
    let mut s: Sign = 1;
    let mut d = 2u64;
    while d * d <= n {
        while n % d == 0 {
            s *= rule.sign_at_prime(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        s *= rule.sign_at_prime(n);
    }
    s
}

/// Tiny fixed-seed generator so test case selection is reproducible.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}
