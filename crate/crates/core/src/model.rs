//! Structural equations of the steady-state economy.
//!
//! Everything here is a pure function of its arguments. The free-entry
//! condition `V = 0` is imposed identically, so the job-side Bellman
//! equations are linear and solved in closed form.

use serde::{Deserialize, Serialize};

use crate::degree::DegreeDistribution;
use crate::error::{domain, Error, Result};

/// Structural parameters. `Default` is the published calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Output of a filled job.
    pub y: f64,
    /// Home production of an unemployed worker.
    pub b: f64,
    /// Discount rate.
    pub r: f64,
    /// Job destruction rate.
    pub delta: f64,
    /// Exponent on unemployment in the matching function.
    pub eta: f64,
    /// Market matching efficiency.
    pub gamma: f64,
    /// Worker bargaining power.
    pub beta: f64,
    /// Flow cost of a vacancy.
    pub c: f64,
    /// Probability that an employed worker looks for vacancies on behalf of contacts.
    pub phi: f64,
    /// Degree of the (regular) job network.
    pub d_f: u32,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            y: 1.0,
            b: 0.4,
            r: 0.012,
            delta: 0.036,
            eta: 0.72,
            gamma: 0.402,
            beta: 0.028,
            c: 7.188,
            phi: 0.048,
            d_f: 16,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.y, self.b, self.r, self.delta, self.eta, self.gamma, self.beta, self.c, self.phi,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return domain("parameters must be finite");
        }
        if !(self.y > self.b && self.b > 0.0) {
            return domain(format!("need y > b > 0, got y = {}, b = {}", self.y, self.b));
        }
        if !(self.r > 0.0) {
            return domain(format!("discount rate must be positive, got {}", self.r));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return domain(format!("delta must lie in [0, 1], got {}", self.delta));
        }
        if !(self.eta > 0.0) {
            return domain(format!("eta must be positive, got {}", self.eta));
        }
        if !(self.gamma >= 0.0) {
            return domain(format!("gamma must be non-negative, got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return domain(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        if !(self.c > 0.0) {
            return domain(format!("vacancy cost must be positive, got {}", self.c));
        }
        if !(0.0..=1.0).contains(&self.phi) {
            return domain(format!("phi must lie in [0, 1], got {}", self.phi));
        }
        Ok(())
    }
}

/// One worker group: its head count and social-network degree law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub size: f64,
    pub dist: DegreeDistribution,
}

impl GroupSpec {
    pub fn new(size: f64, dist: DegreeDistribution) -> Result<Self> {
        let g = GroupSpec { size, dist };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.size > 0.0) || !self.size.is_finite() {
            return domain(format!("group size must be positive, got {}", self.size));
        }
        self.dist.validate()
    }
}

/// Solved state of one group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupState {
    pub size: f64,
    pub dist: DegreeDistribution,
    /// Unemployment rate.
    pub u: f64,
    /// Probability that a group member holds vacancy information.
    pub info_prob: f64,
    pub p_market: f64,
    pub p_referral: f64,
    pub p_total: f64,
    /// Arrival rate of group members at a vacancy.
    pub q: f64,
    pub surplus: f64,
    pub wage: f64,
    pub value_employed: f64,
    pub value_unemployed: f64,
    pub value_filled_job: f64,
}

/// Steady-state equilibrium of the whole economy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub groups: Vec<GroupState>,
    /// Aggregate unemployment rate.
    pub u: f64,
    /// Vacancy rate.
    pub v: f64,
    /// Value of a vacant job recomputed from its Bellman equation; zero up to
    /// solver tolerance.
    pub vacancy_value: f64,
    /// Largest flow-balance residual at the returned point.
    pub max_residual: f64,
    pub iterations: usize,
}

impl Equilibrium {
    pub fn u_vec(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.u).collect()
    }

    pub fn total_size(&self) -> f64 {
        self.groups.iter().map(|g| g.size).sum()
    }

    /// Checks flow balance and free entry against the given tolerances.
    pub fn check_invariants(&self, params: &ModelParams, residual_tol: f64, free_entry_tol: f64) -> Result<()> {
        if !(self.max_residual < residual_tol) {
            return Err(Error::Convergence {
                iterations: self.iterations,
                residual: self.max_residual,
                last_u: self.u_vec(),
            });
        }
        let rv = params.r * self.vacancy_value;
        if !(rv.abs() < free_entry_tol) {
            return domain(format!("free entry violated: rV = {rv:e}"));
        }
        Ok(())
    }
}

/// Job arrival rate through the market, `γ (u/v)^{η−1}`.
pub fn market_arrival(params: &ModelParams, u: f64, v: f64) -> Result<f64> {
    if !(u > 0.0) || !(v > 0.0) {
        return domain(format!("market arrival needs u > 0 and v > 0, got u = {u}, v = {v}"));
    }
    Ok(params.gamma * (u / v).powf(params.eta - 1.0))
}

/// Probability that a group member is employed, finds a vacancy among the
/// `d_f` adjacent jobs, and is looking on behalf of contacts:
/// `φ (1 − u_i) [1 − (1 − v/(1 − u + v))^{d_f}]`.
pub fn info_probability(params: &ModelParams, u_i: f64, u: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u_i) || !(0.0..=1.0).contains(&u) || !(v >= 0.0) {
        return domain(format!("info probability needs u_i, u in [0, 1] and v >= 0; got {u_i}, {u}, {v}"));
    }
    let denom = 1.0 - u + v;
    if !(denom > 0.0) {
        return domain(format!("degenerate job pool 1 - u + v = {denom}"));
    }
    if params.d_f == 0 {
        return Ok(0.0);
    }
    let vacant = v / denom;
    let any_vacant = -(params.d_f as f64 * (-vacant).ln_1p()).exp_m1();
    Ok(params.phi * (1.0 - u_i) * any_vacant)
}

/// Job arrival rate through referrals for a group with degree law `dist`.
pub fn referral_arrival(dist: &DegreeDistribution, info_prob: f64) -> Result<f64> {
    dist.referral_expectation(info_prob)
}

/// Match surplus `(y − b) / (r + δ + β p)`.
pub fn surplus(params: &ModelParams, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return domain(format!("arrival rate must be non-negative, got {p}"));
    }
    Ok((params.y - params.b) / (params.r + params.delta + params.beta * p))
}

/// Nash-bargained wage `y − (r + δ)(1 − β) S`.
pub fn wage(params: &ModelParams, surplus: f64) -> f64 {
    params.y - (params.r + params.delta) * (1.0 - params.beta) * surplus
}

/// Asset values with `V = 0` imposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssetValues {
    pub employed: f64,
    pub unemployed: f64,
    pub filled_job: f64,
    /// This group's term `q_i J_i` is not known here; the vacancy is valued at zero.
    pub vacancy: f64,
}

/// Solves `rW = w − δ(W − U)`, `rU = b + p(W − U)`, `rJ = y − w − δJ`.
pub fn value_functions(params: &ModelParams, wage: f64, p: f64) -> Result<AssetValues> {
    if !wage.is_finite() || !p.is_finite() {
        return domain("value functions need finite wage and arrival rate");
    }
    let worker_denom = params.r + params.delta + p;
    let job_denom = params.r + params.delta;
    if worker_denom == 0.0 || job_denom == 0.0 || params.r == 0.0 {
        return domain("singular Bellman system (r + delta + p = 0)");
    }
    let gap = (wage - params.b) / worker_denom;
    let unemployed = (params.b + p * gap) / params.r;
    Ok(AssetValues {
        employed: unemployed + gap,
        unemployed,
        filled_job: (params.y - wage) / job_denom,
        vacancy: 0.0,
    })
}

/// Vacancy rate implied by free entry and bargaining at the given group
/// unemployment rates:
///
/// ```text
/// v = (y − b)(1 − β) δ / (c L) · Σ_i u_i (1 − u_i) L_i / (u_i (r + δ) + β δ (1 − u_i))
/// ```
pub fn vacancy_closure(params: &ModelParams, groups: &[GroupSpec], u_vec: &[f64]) -> Result<f64> {
    if groups.is_empty() {
        return domain("vacancy closure needs at least one group");
    }
    if groups.len() != u_vec.len() {
        return domain(format!("{} groups but {} unemployment rates", groups.len(), u_vec.len()));
    }
    let total: f64 = groups.iter().map(|g| g.size).sum();
    let mut sum = 0.0;
    for (g, &u_i) in groups.iter().zip(u_vec) {
        if !(0.0..=1.0).contains(&u_i) {
            return domain(format!("unemployment rate must lie in [0, 1], got {u_i}"));
        }
        let denom = u_i * (params.r + params.delta) + params.beta * params.delta * (1.0 - u_i);
        if denom > 0.0 {
            sum += u_i * (1.0 - u_i) * g.size / denom;
        }
    }
    Ok((params.y - params.b) * (1.0 - params.beta) * params.delta / (params.c * total) * sum)
}

/// Size-weighted aggregate unemployment rate.
pub fn aggregate_unemployment(groups: &[GroupSpec], u_vec: &[f64]) -> f64 {
    let total: f64 = groups.iter().map(|g| g.size).sum();
    groups.iter().zip(u_vec).map(|(g, u)| g.size * u).sum::<f64>() / total
}

/// Arrival rates `(p_market, P_i, p_referral)` of a group.
pub fn arrival_rates(
    params: &ModelParams,
    dist: &DegreeDistribution,
    u_i: f64,
    u: f64,
    v: f64,
) -> Result<(f64, f64, f64)> {
    let p_market = market_arrival(params, u, v)?;
    let info = info_probability(params, u_i, u, v)?;
    let p_referral = referral_arrival(dist, info)?;
    Ok((p_market, info, p_referral))
}
