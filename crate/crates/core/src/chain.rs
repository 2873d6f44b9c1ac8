//! The chain of rationals 1/2 = α₀ < α₁ < ⋯ < α_t < α_{t+1} = 1 and the
//! greedy division loop that approximates any target in (1/2, 1) by an
//! element of R(x).
//!
//! Each interior rung is m1/m2 from a matched-product search; consecutive
//! rungs satisfy 2 < (1-α_{i-1})/(1-α_i) < ρ_max, so distances to 1 at
//! least halve per rung and the chain reaches the halt band
//! [1 - 1/(4x²), 1) after at most log₂(4x²) rungs.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matched::{paper_s, select_largest_class, verify_spec};
use crate::params::{ExperimentParams, Mode};
use crate::rat::{f64_to_rat, rat, Rat};
use crate::ratio::{in_rx, RatioFactor, RatioProduct};
use crate::rule::PrimeSignAssignment;

/// Tunables replacing the paper-scale constants, which are unreachable at
/// desk x. In paper mode each is derived from the source formula instead.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Upper bound on (1-α_{i-1})/(1-α_i); paper: β₂/(8 log²x).
    pub rho_max: f64,
    /// Desk rung scale: y = c/(1-α_u); paper: c = β₂/(16 log²x).
    pub chain_y_coefficient: f64,
    /// Factors per rung in desk mode; paper mode derives ⌊√(log y)/4⌋.
    pub s: Option<u32>,
    /// Extra cap on m2 - m1 per rung, on top of the ratio band itself;
    /// paper: β₂/(32 log²x).
    pub gap_cap: Option<u64>,
    pub max_rungs: usize,
}

impl ChainConfig {
    pub fn desk(rho_max: f64, chain_y_coefficient: f64, s: u32) -> Self {
        ChainConfig {
            rho_max,
            chain_y_coefficient,
            s: Some(s),
            gap_cap: None,
            max_rungs: 256,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AlphaChain {
    /// α₁..α_t; α₀ = 1/2 and α_{t+1} = 1 are synthetic endpoints.
    interior: Vec<RatioProduct>,
    params: ExperimentParams,
    rule: PrimeSignAssignment,
    rho_max: f64,
    /// 1 - 1/(4x²), cached exactly.
    halt_lo: Rat,
}

impl AlphaChain {
    pub fn t(&self) -> usize {
        self.interior.len()
    }

    pub fn params(&self) -> &ExperimentParams {
        &self.params
    }

    pub fn rule(&self) -> &PrimeSignAssignment {
        &self.rule
    }

    pub fn interior(&self) -> &[RatioProduct] {
        &self.interior
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// α_i for i in 0..=t+1.
    pub fn alpha(&self, i: usize) -> Rat {
        if i == 0 {
            rat(1, 2)
        } else if i <= self.interior.len() {
            self.interior[i - 1].value().clone()
        } else {
            Rat::one()
        }
    }

    pub fn halt_lo(&self) -> &Rat {
        &self.halt_lo
    }

    /// Re-check every chain invariant from scratch: strict monotonicity,
    /// the exact ratio band, the halt-band straddle, t ≤ log₂(4x²), and
    /// per-rung value consistency.
    pub fn verify(&self) -> Result<()> {
        let t = self.t();
        if t == 0 {
            return Err(Error::Internal("chain has no interior rungs".into()));
        }
        let one = Rat::one();
        let two = rat(2, 1);
        let rho = f64_to_rat(self.rho_max, 1_000_000_000)?;
        for i in 1..=t {
            let prev = self.alpha(i - 1);
            let cur = self.alpha(i);
            if cur <= prev {
                return Err(chain_err(
                    i,
                    0.0,
                    format!(
                        "not strictly increasing: α_{} = {} ≤ α_{} = {}",
                        i,
                        cur,
                        i - 1,
                        prev
                    ),
                ));
            }
            let ratio = (&one - &prev) / (&one - &cur);
            if ratio <= two || ratio >= rho {
                return Err(chain_err(
                    i,
                    0.0,
                    format!("gap ratio {} outside (2, {})", ratio, rho),
                ));
            }
            if !self.interior[i - 1].value_consistent() {
                return Err(Error::Internal(format!("rung {i} value out of sync")));
            }
        }
        if self.alpha(t - 1) >= self.halt_lo || self.alpha(t) <= self.halt_lo {
            return Err(chain_err(
                t,
                0.0,
                "chain does not straddle 1 - 1/(4x²)".into(),
            ));
        }
        let t_cap = (4.0 * self.params.x * self.params.x).log2();
        if t as f64 > t_cap {
            return Err(chain_err(
                t,
                0.0,
                format!("t = {t} exceeds log₂(4x²) = {t_cap:.2}"),
            ));
        }
        Ok(())
    }
}

fn chain_err(rung: usize, y: f64, msg: String) -> Error {
    Error::Chain { rung, y, msg }
}

/// 1 - 1/(4x²) with x converted exactly (denominator-capped) first.
pub fn halt_band_lo(x: f64) -> Result<Rat> {
    let xr = f64_to_rat(x, 1_000_000_000)?;
    Ok(Rat::one() - Rat::one() / (rat(4, 1) * &xr * &xr))
}

fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Build the rung ladder by repeated matched-product search.
///
/// Per rung: y = c/(1-α_u); all adjacent pairs of the largest sign class
/// are screened against the exact band 2 < (1-α_u)/(1-m1/m2) < ρ_max and
/// the closest admissible pair becomes α_{u+1}. Stops once
/// α_{u+1} > 1 - 1/(4x²).
pub fn build_alpha_chain(
    rule: &PrimeSignAssignment,
    params: &ExperimentParams,
    config: &ChainConfig,
) -> Result<AlphaChain> {
    let (rho_max, c) = match params.mode {
        Mode::Paper => {
            let lx = params.x.ln();
            (
                params.beta2 / (8.0 * lx * lx),
                params.beta2 / (16.0 * lx * lx),
            )
        }
        Mode::Desk => (config.rho_max, config.chain_y_coefficient),
    };
    if rho_max <= 2.0 {
        return Err(Error::Config(format!(
            "rho_max must exceed 2, got {rho_max}"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::Config(format!(
            "chain_y_coefficient must be positive, got {c}"
        )));
    }
    let halt_lo = halt_band_lo(params.x)?;
    let one = Rat::one();
    let two = rat(2, 1);
    let rho = f64_to_rat(rho_max, 1_000_000_000)?;

    let mut interior: Vec<RatioProduct> = Vec::new();
    let mut alpha = rat(1, 2);
    loop {
        let rung = interior.len() + 1;
        if rung > config.max_rungs {
            return Err(chain_err(
                rung,
                0.0,
                format!("exceeded max_rungs = {}", config.max_rungs),
            ));
        }
        let gap_to_one = &one - &alpha;
        let y = c / rat_to_f64(&gap_to_one);
        let s = match params.mode {
            Mode::Paper => paper_s(y),
            Mode::Desk => config.s.unwrap_or_else(|| paper_s(y)),
        };
        let class =
            select_largest_class(rule, y, s).map_err(|e| chain_err(rung, y, e.to_string()))?;

        // Closest admissible adjacent pair under the exact ratio band.
        let mut best: Option<(u64, usize)> = None; // (gap, index)
        let mut nearest_ratio: Option<Rat> = None;
        for (i, w) in class.members.windows(2).enumerate() {
            let (m1, m2) = (w[0].0, w[1].0);
            if m1 == m2 {
                continue;
            }
            let gap = m2 - m1;
            if let Some(cap) = config.gap_cap {
                if gap > cap {
                    continue;
                }
            }
            if let Some((bg, _)) = best {
                if gap >= bg {
                    continue;
                }
            }
            let ratio = &gap_to_one / (&one - crate::rat::rat_u(m1, m2));
            if ratio > two && ratio < rho {
                best = Some((gap, i));
            } else {
                nearest_ratio = Some(match nearest_ratio {
                    None => ratio,
                    Some(r) => r, // keep the first for reporting
                });
            }
        }
        let (_, idx) = best.ok_or_else(|| {
            chain_err(
                rung,
                y,
                format!(
                    "no adjacent pair with gap ratio in (2, {rho_max}); a rejected pair had ratio {}",
                    nearest_ratio.map(|r| r.to_string()).unwrap_or_else(|| "n/a".into())
                ),
            )
        })?;
        let spec = class.pair_spec(idx, rule);
        if !verify_spec(&spec, rule) {
            return Err(Error::Internal(format!(
                "rung {rung} spec failed re-verification"
            )));
        }
        let mut next = RatioProduct::one();
        for (&p, &q) in spec.m1_factors.iter().zip(&spec.m2_factors) {
            next.push(RatioFactor::new(p, q, rule)?);
        }
        alpha = next.value().clone();
        interior.push(next);
        if alpha > halt_lo {
            break;
        }
    }

    let chain = AlphaChain {
        interior,
        params: params.clone(),
        rule: rule.clone(),
        rho_max,
        halt_lo,
    };
    chain.verify()?;
    Ok(chain)
}

/// The inner division loop: starting from n₀ = y0 ∈ (1/2, 1), repeatedly
/// find α_i ≤ n_j < α_{i+1} and divide by α_{i+1} until n_j enters the
/// halt band [1 - 1/(4x²), 1). Returns θ, the product of all divisors,
/// with y0/θ = the final n_j. n_j increases strictly: the divisor is < 1
/// and n_j < α_{i+1} keeps the quotient below 1.
pub fn greedy_divide(chain: &AlphaChain, y0: &Rat, cap: u64) -> Result<RatioProduct> {
    let one = Rat::one();
    let half = rat(1, 2);
    if !(y0 > &half && y0 < &one) {
        return Err(Error::Contract(format!("y0 = {y0} outside (1/2, 1)")));
    }
    let halt_lo = chain.halt_lo();
    let mut n = y0.clone();
    let mut theta = RatioProduct::one();
    let mut iterations = 0u64;
    let mut trajectory: Vec<String> = Vec::new();
    while !(&n >= halt_lo && n < one) {
        iterations += 1;
        if iterations > cap {
            trajectory.reverse();
            trajectory.truncate(8);
            return Err(Error::NonTermination {
                cap,
                tail: trajectory,
            });
        }
        // Find i with α_i ≤ n < α_{i+1}. The divisor is always interior:
        // n < halt_lo < α_t, so i + 1 ≤ t.
        let mut i = 0usize;
        while i + 1 <= chain.t() && chain.alpha(i + 1) <= n {
            i += 1;
        }
        let divisor = &chain.interior()[i]; // α_{i+1}
        let next = &n / divisor.value();
        debug_assert!(next > n && next < one);
        n = next;
        theta.extend(divisor.factors());
        if trajectory.len() < 64 {
            trajectory.push(crate::rat::rat_string(&n));
        }
    }
    Ok(theta)
}

/// Greedy chain division: approximate the midpoint of [y1, y2] by a
/// product of rungs. Returns θ ∈ R(x) with θ ∈ [y1, y2] whenever
/// y2 - y1 ≥ 1/(2x²).
pub fn approximate_in_interval(
    chain: &AlphaChain,
    y1: &Rat,
    y2: &Rat,
    cap: u64,
) -> Result<RatioProduct> {
    let one = Rat::one();
    let half = rat(1, 2);
    if !(y1 > &half && y2 > y1 && y2 < &one) {
        return Err(Error::Contract(format!(
            "need 1/2 < y1 < y2 < 1, got y1 = {y1}, y2 = {y2}"
        )));
    }
    let xr = f64_to_rat(chain.params.x, 1_000_000_000)?;
    let min_width = Rat::one() / (rat(2, 1) * &xr * &xr);
    if y2 - y1 < min_width {
        return Err(Error::Contract(format!(
            "interval width {} below 1/(2x²) = {}",
            y2 - y1,
            min_width
        )));
    }

    let theta = greedy_divide(chain, &((y1 + y2) / rat(2, 1)), cap)?;

    if !(theta.value() >= y1 && theta.value() <= y2) {
        return Err(Error::Internal(format!(
            "θ = {} escaped [y1, y2] = [{}, {}]",
            theta.value(),
            y1,
            y2
        )));
    }
    if !in_rx(&theta, &chain.params, &chain.rule) {
        return Err(Error::Budget {
            k: theta.k(),
            beta2: chain.params.beta2,
        });
    }
    Ok(theta)
}

/// Σ(I, α₁⋯α_ℓ) for every prefix length ℓ = 1..k.
pub fn chain_prefix_sigma_profile(
    table: &crate::table::SignTable,
    interval: &crate::interval::Interval,
    product: &RatioProduct,
) -> Result<Vec<u64>> {
    let mut prefix = Rat::one();
    let mut out = Vec::with_capacity(product.k());
    for f in product.factors() {
        prefix *= f.ratio();
        out.push(crate::oscillation::sigma(table, interval, &prefix)?);
    }
    Ok(out)
}

/// Serialized chain: factors per rung, values rebuilt on load.
#[derive(Serialize, Deserialize)]
pub struct AlphaChainFile {
    pub x: f64,
    pub rho_max: f64,
    pub rungs: Vec<crate::ratio::RatioProductFile>,
}

impl AlphaChain {
    pub fn to_file(&self) -> AlphaChainFile {
        AlphaChainFile {
            x: self.params.x,
            rho_max: self.rho_max,
            rungs: self.interior.iter().map(RatioProduct::to_file).collect(),
        }
    }

    pub fn from_file(
        file: &AlphaChainFile,
        rule: &PrimeSignAssignment,
        params: &ExperimentParams,
    ) -> Result<Self> {
        let interior = file
            .rungs
            .iter()
            .map(|r| RatioProduct::from_file(r, rule))
            .collect::<Result<Vec<_>>>()?;
        let chain = AlphaChain {
            interior,
            params: params.clone(),
            rule: rule.clone(),
            rho_max: file.rho_max,
            halt_lo: halt_band_lo(params.x)?,
        };
        chain.verify()?;
        Ok(chain)
    }
}
