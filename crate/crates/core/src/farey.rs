//! Locating an interval near a target that avoids every rational with
//! small denominator, so ⌊tn⌋ is constant over the interval for all n up
//! to the denominator bound.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{ceil_rat, floor_rat, rat, rat_u, Rat};

/// Does [y1, y2] (closed) contain a rational a/n for any 1 ≤ n ≤ x?
/// True iff ⌈y1·n⌉ ≤ ⌊y2·n⌋ for some n.
pub fn contains_small_denominator(y1: &Rat, y2: &Rat, x: u64) -> bool {
    for n in 1..=x {
        let nr = rat_u(n, 1);
        let lo = ceil_rat(&(y1 * &nr));
        let hi = floor_rat(&(y2 * &nr));
        if lo <= hi {
            return true;
        }
    }
    false
}

/// Find [y1, y2] of the given width near theta_prime containing no
/// rational with denominator ≤ x. Candidate centers step outward from
/// theta_prime by width/2 until distance 1/x; the first hit wins, with
/// the candidate on the positive side tried first at each distance.
pub fn interval_avoiding_denominators(
    theta_prime: &Rat,
    x: u64,
    width: &Rat,
) -> Result<(Rat, Rat)> {
    if x < 1 {
        return Err(Error::Contract("x must be >= 1".into()));
    }
    if width <= &Rat::zero() {
        return Err(Error::Contract(format!(
            "width must be positive, got {width}"
        )));
    }
    if !(theta_prime > &Rat::zero() && theta_prime < &rat(1, 1)) {
        return Err(Error::Contract(format!(
            "theta' must lie in (0, 1), got {theta_prime}"
        )));
    }
    let step = width / rat(2, 1);
    let radius = rat_u(1, x);
    let half_width = width / rat(2, 1);
    let mut k: i64 = 0;
    loop {
        let offsets: &[i64] = if k == 0 { &[0] } else { &[k, -k] };
        let mut any_in_radius = false;
        for &o in offsets {
            let center = theta_prime + rat(o, 1) * &step;
            let dist = if o >= 0 {
                rat(o, 1) * &step
            } else {
                rat(-o, 1) * &step
            };
            if dist > radius {
                continue;
            }
            any_in_radius = true;
            let y1 = &center - &half_width;
            let y2 = &center + &half_width;
            if y1 <= Rat::zero() {
                continue;
            }
            if !contains_small_denominator(&y1, &y2, x) {
                return Ok((y1, y2));
            }
        }
        if !any_in_radius {
            return Err(Error::Search(format!(
                "no interval of width {width} within 1/{x} of {theta_prime} avoids denominators ≤ {x}"
            )));
        }
        k += 1;
    }
}
