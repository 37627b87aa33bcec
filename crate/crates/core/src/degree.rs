//! Social-network degree laws and the referral expectation
//! `E[1 − (1 − P)^d] = 1 − G(1 − P)`, where `G` is the probability generating
//! function of the degree.
//!
//! Erdős–Rényi groups are represented by their large-network Poisson limit,
//! random regular groups by a point mass, and scale-free groups by the Zipf
//! (zeta) law `f(k) = k^{-α} / ζ(α)` on `k ≥ 1`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special;

/// Lower end of the bracket used when matching a Zipf scale parameter to a mean.
pub const ZIPF_ALPHA_MIN: f64 = 2.0 + 1e-6;
/// Upper end of the same bracket.
pub const ZIPF_ALPHA_MAX: f64 = 50.0;
const ZIPF_MEAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DegreeDistribution {
    /// Poisson with mean `lambda > 0`.
    Poisson { lambda: f64 },
    /// Every worker has exactly `k` contacts.
    Degenerate { k: u32 },
    /// Zipf law on `{1, 2, ...}`; `alpha > 2` so that the mean is finite.
    Zipf { alpha: f64 },
}

impl DegreeDistribution {
    pub fn poisson(lambda: f64) -> Result<Self> {
        let d = DegreeDistribution::Poisson { lambda };
        d.validate()?;
        Ok(d)
    }

    pub fn degenerate(k: u32) -> Self {
        DegreeDistribution::Degenerate { k }
    }

    pub fn zipf(alpha: f64) -> Result<Self> {
        let d = DegreeDistribution::Zipf { alpha };
        d.validate()?;
        Ok(d)
    }

    /// Zipf law whose mean equals `mean`.
    pub fn zipf_with_mean(mean: f64) -> Result<Self> {
        Self::zipf(zipf_alpha_for_mean(mean)?)
    }

    /// Erdős–Rényi group with the given mean degree. A zero mean is the
    /// empty network, i.e. `Degenerate(0)`.
    pub fn erdos_renyi(mean: f64) -> Result<Self> {
        if mean == 0.0 {
            Ok(Self::degenerate(0))
        } else {
            Self::poisson(mean)
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DegreeDistribution::Poisson { lambda } => {
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return domain(format!("Poisson mean must be finite and > 0, got {lambda}"));
                }
            }
            DegreeDistribution::Degenerate { .. } => {}
            DegreeDistribution::Zipf { alpha } => {
                if !(alpha > 2.0) || !alpha.is_finite() {
                    return domain(format!(
                        "Zipf scale parameter must exceed 2 for a finite mean, got {alpha}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Short family label used in reports.
    pub fn family(&self) -> &'static str {
        match self {
            DegreeDistribution::Poisson { .. } => "poisson",
            DegreeDistribution::Degenerate { .. } => "regular",
            DegreeDistribution::Zipf { .. } => "zipf",
        }
    }

    /// Expected degree.
    pub fn mean(&self) -> f64 {
        match *self {
            DegreeDistribution::Poisson { lambda } => lambda,
            DegreeDistribution::Degenerate { k } => k as f64,
            DegreeDistribution::Zipf { alpha } => zipf_mean(alpha),
        }
    }

    /// Probability mass at degree `n`.
    pub fn pmf(&self, n: u64) -> f64 {
        match *self {
            DegreeDistribution::Poisson { lambda } => {
                // log-space to survive large n
                let nf = n as f64;
                let log_fact: f64 = (1..=n).map(|j| (j as f64).ln()).sum();
                (nf * lambda.ln() - lambda - log_fact).exp()
            }
            DegreeDistribution::Degenerate { k } => {
                if n == k as u64 {
                    1.0
                } else {
                    0.0
                }
            }
            DegreeDistribution::Zipf { alpha } => {
                if n == 0 {
                    0.0
                } else {
                    (n as f64).powf(-alpha) / zeta_unchecked(alpha)
                }
            }
        }
    }

    /// `E[1 − (1 − p)^d]`: the chance that at least one of a worker's
    /// contacts passes on vacancy information when each does so
    /// independently with probability `p`.
    pub fn referral_expectation(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("information probability must lie in [0, 1], got {p}"));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        let value = match *self {
            DegreeDistribution::Poisson { lambda } => -(-lambda * p).exp_m1(),
            DegreeDistribution::Degenerate { k } => {
                if k == 0 {
                    0.0
                } else {
                    -(k as f64 * (-p).ln_1p()).exp_m1()
                }
            }
            DegreeDistribution::Zipf { alpha } => {
                special::zeta_minus_polylog(alpha, 1.0 - p)? / special::zeta(alpha)?
            }
        };
        Ok(value.clamp(0.0, 1.0))
    }
}

fn zeta_unchecked(s: f64) -> f64 {
    special::zeta(s).expect("zeta argument validated by caller")
}

fn zipf_mean(alpha: f64) -> f64 {
    zeta_unchecked(alpha - 1.0) / zeta_unchecked(alpha)
}

/// Zipf scale parameter whose mean `ζ(α−1)/ζ(α)` equals `target_mean`,
/// found by bisection on `(2 + 1e-6, 50]`.
pub fn zipf_alpha_for_mean(target_mean: f64) -> Result<f64> {
    if !(target_mean > 1.0) || !target_mean.is_finite() {
        return domain(format!("Zipf mean exceeds 1 for every alpha > 2; got target {target_mean}"));
    }
    // mean is decreasing in alpha
    let (mut lo, mut hi) = (ZIPF_ALPHA_MIN, ZIPF_ALPHA_MAX);
    let f = |a: f64| zipf_mean(a) - target_mean;
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::Bracketing(format!(
            "Zipf mean {target_mean} outside [{}, {}] reachable on alpha in [{lo}, {hi}]",
            f_hi + target_mean,
            f_lo + target_mean
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() < ZIPF_MEAN_TOL {
            return Ok(mid);
        }
        if f_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    if f(mid).abs() < ZIPF_MEAN_TOL {
        Ok(mid)
    } else {
        Err(Error::Bracketing(format!(
            "bisection for Zipf mean {target_mean} stalled at alpha {mid}"
        )))
    }
}
