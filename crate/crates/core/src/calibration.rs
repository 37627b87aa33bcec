//! Recovers `(γ, β, c, φ)` from four steady-state targets.
//!
//! Under the symmetric baseline (identical Poisson groups) the target system
//! is triangular, so each parameter follows from a scalar step:
//!
//! 1. `p = δ(1 − u)/u`, split into `p_M = (1 − s) p` and `p_R = s p`;
//! 2. `γ = p_M (u/v)^{1−η}`;
//! 3. `P = −ln(1 − p_R)/λ` inverts the Poisson referral expectation;
//! 4. `φ = P / ((1 − u)[1 − (1 − v/(1 − u + v))^{d_f}])`;
//! 5. `β` solves `w = y − (r + δ)(1 − β)(y − b)/(r + δ + β p)`, which is
//!    linear in `β`;
//! 6. `c = (1 − β)(u p / v) S` with `S = (y − b)/(r + δ + β p)`.
//!
//! A forward solve with the recovered parameters closes the loop.

use serde::{Deserialize, Serialize};

use crate::degree::DegreeDistribution;
use crate::error::{domain, Error, Result};
use crate::model::{GroupSpec, ModelParams};
use crate::solver::{solve_equilibrium, SolverConfig};

/// Relative tolerance for the verification solve.
pub const VERIFY_TOL: f64 = 1e-6;

/// Parameters taken as given when calibrating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GivenParams {
    pub y: f64,
    pub b: f64,
    pub r: f64,
    pub delta: f64,
    pub eta: f64,
}

impl Default for GivenParams {
    fn default() -> Self {
        let p = ModelParams::default();
        GivenParams { y: p.y, b: p.b, r: p.r, delta: p.delta, eta: p.eta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationTargets {
    /// Aggregate unemployment rate.
    pub u_target: f64,
    /// Unemployed per vacancy, `u/v`.
    pub market_tightness_inverse: f64,
    pub wage_target: f64,
    /// Share of hires made through referrals, `p_R / p`.
    pub referral_share: f64,
    pub baseline_mean_degree: f64,
    pub d_f: u32,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        CalibrationTargets {
            u_target: 0.044,
            market_tightness_inverse: 1.1,
            wage_target: 0.6,
            referral_share: 0.5,
            baseline_mean_degree: 22.47,
            d_f: 16,
        }
    }
}

impl CalibrationTargets {
    pub fn vacancy_rate(&self) -> f64 {
        self.u_target / self.market_tightness_inverse
    }

    fn validate(&self) -> Result<()> {
        if !(self.u_target > 0.0 && self.u_target < 1.0) {
            return domain(format!("unemployment target must lie in (0, 1), got {}", self.u_target));
        }
        if !(self.market_tightness_inverse > 0.0) || !self.market_tightness_inverse.is_finite() {
            return domain("u/v target must be positive");
        }
        if !(self.wage_target > 0.0) || !(self.baseline_mean_degree > 0.0) {
            return domain("wage and mean-degree targets must be positive");
        }
        if !(0.0..=1.0).contains(&self.referral_share) {
            return domain(format!("referral share must lie in [0, 1], got {}", self.referral_share));
        }
        Ok(())
    }
}

/// Recovers the full parameter set and verifies it with a forward solve.
pub fn calibrate(given: &GivenParams, targets: &CalibrationTargets) -> Result<ModelParams> {
    let params = calibrate_closed_form(given, targets)?;
    let check = verify(&params, targets)?;
    if check.max_relative_error() > VERIFY_TOL {
        return Err(Error::Infeasible(format!(
            "verification solve misses targets by {:e} (relative)",
            check.max_relative_error()
        )));
    }
    Ok(params)
}

/// The closed-form chain alone, without the verification solve.
pub fn calibrate_closed_form(given: &GivenParams, targets: &CalibrationTargets) -> Result<ModelParams> {
    targets.validate()?;
    let GivenParams { y, b, r, delta, eta } = *given;
    if !(y > b && b > 0.0 && r > 0.0 && delta > 0.0 && eta > 0.0) {
        return domain("given parameters need y > b > 0, r > 0, delta > 0, eta > 0");
    }
    let u = targets.u_target;
    let v = targets.vacancy_rate();
    let share = targets.referral_share;

    let p = delta * (1.0 - u) / u;
    let p_market = p * (1.0 - share);
    let p_referral = p * share;
    let gamma = p_market * (u / v).powf(1.0 - eta);

    if p_referral >= 1.0 {
        return Err(Error::Infeasible(format!(
            "referral arrival {p_referral} must stay below 1 for a Poisson network"
        )));
    }
    let info = -(-p_referral).ln_1p() / targets.baseline_mean_degree;
    if info > 1.0 {
        return Err(Error::Infeasible(format!("information probability {info} exceeds 1")));
    }
    let any_vacant = if targets.d_f == 0 {
        0.0
    } else {
        -(targets.d_f as f64 * (-v / (1.0 - u + v)).ln_1p()).exp_m1()
    };
    let reach = (1.0 - u) * any_vacant;
    let phi = if info == 0.0 {
        0.0
    } else if reach > 0.0 {
        info / reach
    } else {
        return Err(Error::Infeasible("referrals required but the job network is empty".into()));
    };
    if phi > 1.0 {
        return Err(Error::Infeasible(format!("referral frequency {phi} exceeds 1")));
    }

    let beta = bargaining_power(given, targets.wage_target, p)?;
    let s = (y - b) / (r + delta + beta * p);
    let c = (1.0 - beta) * (u * p / v) * s;

    let params = ModelParams { y, b, r, delta, eta, gamma, beta, c, phi, d_f: targets.d_f };
    params.validate().map_err(|e| Error::Infeasible(e.to_string()))?;
    Ok(params)
}

/// Residual of the wage equation as a function of `β`; its root is the
/// calibrated bargaining power.
pub fn wage_gap(given: &GivenParams, wage_target: f64, p: f64, beta: f64) -> f64 {
    let rd = given.r + given.delta;
    given.y - rd * (1.0 - beta) * (given.y - given.b) / (rd + beta * p) - wage_target
}

fn bargaining_power(given: &GivenParams, w: f64, p: f64) -> Result<f64> {
    // (y − w)(r + δ + β p) = (r + δ)(1 − β)(y − b)  is linear in β
    let rd = given.r + given.delta;
    let beta = rd * (w - given.b) / ((given.y - w) * p + rd * (given.y - given.b));
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Infeasible(format!(
            "wage target {w} implies bargaining power {beta} outside [0, 1]"
        )));
    }
    Ok(beta)
}

/// Model moments at the symmetric baseline, compared with the targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetCheck {
    pub u: f64,
    pub u_over_v: f64,
    pub wage: f64,
    pub referral_share: f64,
    pub targets: CalibrationTargets,
}

impl TargetCheck {
    pub fn max_relative_error(&self) -> f64 {
        let t = &self.targets;
        let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { ((a - b) / b).abs() };
        [
            rel(self.u, t.u_target),
            rel(self.u_over_v, t.market_tightness_inverse),
            rel(self.wage, t.wage_target),
            rel(self.referral_share, t.referral_share),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Forward-solves the symmetric two-group Poisson baseline and reports its moments.
pub fn verify(params: &ModelParams, targets: &CalibrationTargets) -> Result<TargetCheck> {
    let dist = DegreeDistribution::poisson(targets.baseline_mean_degree)?;
    let groups = vec![GroupSpec::new(1e6, dist)?; 2];
    let eq = solve_equilibrium(params, &groups, &SolverConfig::default())?;
    let g = &eq.groups[0];
    Ok(TargetCheck {
        u: eq.u,
        u_over_v: eq.u / eq.v,
        wage: g.wage,
        referral_share: g.p_referral / g.p_total,
        targets: *targets,
    })
}
