//! Computational toolkit for ±1 completely multiplicative functions:
//! linear sign sieves with a binary cache, sign-change and floor-ratio
//! counting functionals, exact Σ-integrals, and rational approximation by
//! sign-matched prime-ratio products.

pub mod cache;
pub mod chain;
pub mod error;
pub mod farey;
pub mod interval;
pub mod matched;
pub mod oscillation;
pub mod params;
pub mod primes;
pub mod rat;
pub mod ratio;
pub mod rule;
pub mod table;

pub use error::{Error, Result};
pub use interval::Interval;
pub use params::{ExperimentParams, Mode};
pub use rat::Rat;
pub use ratio::{RatioFactor, RatioProduct};
pub use rule::{PrimeSignAssignment, Sign};
pub use table::{sieve_signs, SignTable};
