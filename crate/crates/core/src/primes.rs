//! Standalone prime utilities: deterministic Miller-Rabin for `u64`,
//! a plain Eratosthenes sieve, and segmented prime enumeration for windows
//! whose upper end is far beyond what a dense sieve should cover.

use crate::error::{Error, Result};

/// Largest upper endpoint accepted by [`primes_in_range`].
pub const PRIME_RANGE_BUDGET: u64 = 1 << 31;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the base set below is known to be exact
/// for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d & 1 == 0 {
        d >>= 1;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= limit` by plain Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Primes in `[lo, hi]`, sieved segment-wise so `hi` may be large as long
/// as it stays under [`PRIME_RANGE_BUDGET`].
pub fn primes_in_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if hi > PRIME_RANGE_BUDGET {
        return Err(Error::Resource(format!(
            "prime window upper end {hi} exceeds budget {PRIME_RANGE_BUDGET}"
        )));
    }
    if hi < lo || hi < 2 {
        return Ok(Vec::new());
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = sieve_primes(root);
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in &base {
        if p * p > hi {
            break;
        }
        let start = std::cmp::max(p * p, lo.div_ceil(p) * p);
        let mut j = start;
        while j <= hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    Ok((0..len)
        .filter(|&i| !composite[i])
        .map(|i| lo + i as u64)
        .filter(|&n| n >= 2)
        .collect())
}
