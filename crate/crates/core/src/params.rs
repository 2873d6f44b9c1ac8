//! Experiment parameter blocks. Paper mode derives everything from x with
//! the source formulas L(x) = exp((log log x)·√(log x)), β₁ = exp(10√(log x)),
//! β₂ = L³, I = [⌈x/(2β₁)⌉, ⌊x/β₁⌋]; desk mode takes explicit small values
//! so runs finish on a workstation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paper,
    Desk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub x: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub l: f64,
    /// None when the paper-mode formulas produce an empty interval, which
    /// they do for every x a desk machine can hold.
    pub interval: Option<Interval>,
    pub iteration_cap: u64,
    pub mode: Mode,
}

/// L(x) = exp((log log x)·√(log x)).
pub fn l_of(x: f64) -> f64 {
    let lx = x.ln();
    (lx.ln() * lx.sqrt()).exp()
}

/// The headline lower bound x / L(x)^7.
pub fn paper_lower_bound(x: f64) -> f64 {
    x / l_of(x).powi(7)
}

impl ExperimentParams {
    pub fn paper(x: f64, iteration_cap: u64) -> Result<Self> {
        if !(x > std::f64::consts::E) {
            return Err(Error::Config(format!(
                "paper mode needs x > e so log log x is defined, got {x}"
            )));
        }
        let l = l_of(x);
        let beta1 = (10.0 * x.ln().sqrt()).exp();
        let beta2 = l.powi(3);
        let lo_real = x / (2.0 * beta1);
        let lo = lo_real.ceil();
        let hi = (x / beta1).floor();
        // The interval only means anything when x/(2β₁) ≥ 1; below that
        // (every x a machine can hold) it degenerates and is reported empty.
        let interval = if lo_real >= 1.0 && hi >= lo && hi <= u64::MAX as f64 {
            Some(Interval::new(lo as u64, hi as u64)?)
        } else {
            None
        };
        Ok(ExperimentParams {
            x,
            beta1,
            beta2,
            l,
            interval,
            iteration_cap,
            mode: Mode::Paper,
        })
    }

    pub fn desk(
        x: f64,
        beta1: f64,
        beta2: f64,
        interval: Interval,
        iteration_cap: u64,
    ) -> Result<Self> {
        if !(beta2 > 1.0) {
            return Err(Error::Config(format!(
                "desk mode needs beta2 > 1, got {beta2}"
            )));
        }
        if !(x > 0.0) {
            return Err(Error::Config(format!("x must be positive, got {x}")));
        }
        Ok(ExperimentParams {
            x,
            beta1,
            beta2,
            l: l_of(x.max(3.0)),
            interval: Some(interval),
            iteration_cap,
            mode: Mode::Desk,
        })
    }
}
