//! Exact-rational helpers used across the counting and approximation code.
//! All floor computations on α·n go through exact integer division; floats
//! only enter via explicit, capped conversion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_u(num: u64, den: u64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// ⌊α·n⌋ for α > 0, by exact integer division.
pub fn floor_mul(alpha: &Rat, n: u64) -> Result<u64> {
    let prod = alpha.numer() * BigInt::from(n);
    let q = prod.div_floor(alpha.denom());
    q.to_u64()
        .ok_or_else(|| Error::Range(format!("⌊α·{n}⌋ does not fit in u64")))
}

/// ⌊r⌋ as a BigInt (r may be negative).
pub fn floor_rat(r: &Rat) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// ⌈r⌉ as a BigInt.
pub fn ceil_rat(r: &Rat) -> BigInt {
    r.numer().div_ceil(r.denom())
}

/// Parse "p/q" or a plain decimal like "0.6875" into an exact rational.
/// Decimals convert exactly with a power-of-ten denominator.
pub fn parse_ratio(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Config(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    let digits = format!(
        "{}{}",
        if int_part.is_empty() { "0" } else { int_part },
        frac_part
    );
    let n: BigInt = digits
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse rational {s:?}")))?;
    let d = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(Rat::new(n, d))
}

/// Convert a float to an exact rational with denominator ≤ `max_den`, via
/// continued-fraction convergents. Config-supplied reals go through this
/// before any floor/interval logic sees them.
pub fn f64_to_rat(x: f64, max_den: u64) -> Result<Rat> {
    if !x.is_finite() {
        return Err(Error::Config(format!("cannot convert {x} to a rational")));
    }
    let negative = x < 0.0;
    let mut x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::from(1),
        BigInt::from(0),
        floor_int(x),
        BigInt::from(1),
    );
    x -= x.floor();
    let max_den = BigInt::from(max_den);
    for _ in 0..64 {
        if x == 0.0 || &q1 > &max_den {
            break;
        }
        x = 1.0 / x;
        let a = floor_int(x);
        x -= x.floor();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    let mut r = Rat::new(p1, q1);
    if negative {
        r = -r;
    }
    Ok(r)
}

fn floor_int(x: f64) -> BigInt {
    BigInt::from(x.floor() as i64)
}

/// Render a rational as "num/den" (always reduced, den > 0).
pub fn rat_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rationals emitted on the wire as `{num, den}` decimal strings so values
/// of any size survive JSON round trips.
pub fn rat_to_json(r: &Rat) -> serde_json::Value {
    serde_json::json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
    })
}

pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

pub fn rat_one() -> Rat {
    Rat::one()
}
