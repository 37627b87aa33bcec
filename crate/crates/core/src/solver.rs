//! Steady-state equilibrium solver.
//!
//! Unknowns are the group unemployment rates; the vacancy rate is always
//! taken from the free-entry closure at the current iterate. Each outer step
//! solves every group's flow balance `u_i p_i = δ(1 − u_i)` for `u_i` with
//! the aggregate `u` and `v` held at their current values, then moves a
//! damped fraction of the way to the result. The loop ends when the full
//! residual vector (recomputed with consistent `u`, `v`) is below tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{
    aggregate_unemployment, arrival_rates, market_arrival, surplus, vacancy_closure, value_functions, wage,
    Equilibrium, GroupSpec, GroupState, ModelParams,
};
use crate::roots::brent;

/// Inner bracket is `[U_EPS, 1 − U_EPS]`.
pub const U_EPS: f64 = 1e-9;
/// Two solutions are the same equilibrium unless some `u_i` differ by more than this.
pub const DISTINCT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub residual_tol: f64,
    pub max_outer_iters: usize,
    pub damping: f64,
    pub initial_u: f64,
    /// Extra random starting points tried by [`solve_all_equilibria`].
    pub multistart: usize,
    pub multistart_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            residual_tol: 1e-12,
            max_outer_iters: 10_000,
            damping: 0.5,
            initial_u: 0.05,
            multistart: 0,
            multistart_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return domain(format!("residual tolerance must be positive, got {}", self.residual_tol));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return domain(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        if !(self.initial_u > 0.0 && self.initial_u < 1.0) {
            return domain(format!("initial u must lie in (0, 1), got {}", self.initial_u));
        }
        Ok(())
    }
}

/// Flow-balance residuals `u_i p_i − δ(1 − u_i)` at `(u_vec, v)`.
pub fn flow_residual(params: &ModelParams, groups: &[GroupSpec], u_vec: &[f64], v: f64) -> Result<Vec<f64>> {
    if groups.len() != u_vec.len() || groups.is_empty() {
        return domain(format!("{} groups but {} unemployment rates", groups.len(), u_vec.len()));
    }
    let u = aggregate_unemployment(groups, u_vec);
    residuals_at(params, groups, u_vec, u, v)
}

fn residuals_at(params: &ModelParams, groups: &[GroupSpec], u_vec: &[f64], u: f64, v: f64) -> Result<Vec<f64>> {
    groups
        .iter()
        .zip(u_vec)
        .map(|(g, &u_i)| {
            let (pm, _, pr) = arrival_rates(params, &g.dist, u_i, u, v)?;
            Ok(u_i * (pm + pr) - params.delta * (1.0 - u_i))
        })
        .collect()
}

fn check_inputs(params: &ModelParams, groups: &[GroupSpec], config: &SolverConfig) -> Result<()> {
    params.validate()?;
    config.validate()?;
    if groups.is_empty() {
        return domain("at least one group is required");
    }
    groups.iter().try_for_each(GroupSpec::validate)
}

/// Equilibrium reached from `config.initial_u` in every group.
pub fn solve_equilibrium(params: &ModelParams, groups: &[GroupSpec], config: &SolverConfig) -> Result<Equilibrium> {
    check_inputs(params, groups, config)?;
    iterate_from(params, groups, config, vec![config.initial_u; groups.len()])
}

/// Equilibrium reached from an explicit starting vector.
pub fn solve_from(
    params: &ModelParams,
    groups: &[GroupSpec],
    config: &SolverConfig,
    start: &[f64],
) -> Result<Equilibrium> {
    check_inputs(params, groups, config)?;
    if start.len() != groups.len() || start.iter().any(|u| !(*u > 0.0 && *u < 1.0)) {
        return domain("starting point must give one rate in (0, 1) per group");
    }
    iterate_from(params, groups, config, start.to_vec())
}

/// Runs the default start plus `config.multistart` seeded random starts and
/// returns every distinct equilibrium found, default-start solution first.
pub fn solve_all_equilibria(
    params: &ModelParams,
    groups: &[GroupSpec],
    config: &SolverConfig,
) -> Result<Vec<Equilibrium>> {
    check_inputs(params, groups, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.multistart_seed);
    let mut starts = vec![vec![config.initial_u; groups.len()]];
    for _ in 0..config.multistart {
        starts.push((0..groups.len()).map(|_| rng.random_range(0.001..0.6)).collect());
    }
    let mut found: Vec<Equilibrium> = Vec::new();
    let mut first_err = None;
    for start in starts {
        match iterate_from(params, groups, config, start) {
            Ok(eq) => {
                let is_new = found.iter().all(|prev| {
                    prev.groups
                        .iter()
                        .zip(&eq.groups)
                        .any(|(a, b)| (a.u - b.u).abs() > DISTINCT_TOL)
                });
                if is_new {
                    found.push(eq);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (found.is_empty(), first_err) {
        (true, Some(e)) => Err(e),
        _ => Ok(found),
    }
}

fn iterate_from(
    params: &ModelParams,
    groups: &[GroupSpec],
    config: &SolverConfig,
    mut u_vec: Vec<f64>,
) -> Result<Equilibrium> {
    let mut damping = config.damping;
    let mut prev_residual = f64::INFINITY;
    let mut rises = 0;
    let mut max_residual = f64::INFINITY;
    for iteration in 0..config.max_outer_iters {
        let v = vacancy_closure(params, groups, &u_vec)?;
        if !(v > 0.0) {
            return domain(format!("vacancy rate collapsed to {v} at u = {u_vec:?}"));
        }
        let u = aggregate_unemployment(groups, &u_vec);
        let residuals = residuals_at(params, groups, &u_vec, u, v)?;
        max_residual = residuals.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
        if max_residual < config.residual_tol {
            return assemble(params, groups, &u_vec, v, max_residual, iteration);
        }
        if max_residual > prev_residual {
            rises += 1;
            if rises >= 2 {
                damping *= 0.5;
                rises = 0;
            }
        } else {
            rises = 0;
        }
        prev_residual = max_residual;

        for (g, u_i) in groups.iter().zip(u_vec.iter_mut()) {
            let target = solve_group(params, g, u, v)?;
            *u_i += damping * (target - *u_i);
        }
    }
    Err(Error::Convergence {
        iterations: config.max_outer_iters,
        residual: max_residual,
        last_u: u_vec,
    })
}

/// Solves one group's flow balance for `u_i` with aggregate `u` and `v` frozen.
fn solve_group(params: &ModelParams, group: &GroupSpec, u: f64, v: f64) -> Result<f64> {
    let balance = |u_i: f64| -> Result<f64> {
        let (pm, _, pr) = arrival_rates(params, &group.dist, u_i, u, v)?;
        Ok(u_i * (pm + pr) - params.delta * (1.0 - u_i))
    };
    // referrals only add to the market rate, so every root lies at or below
    // the market-only rate δ / (δ + p_M); this also keeps P_i away from 0
    let p_market = market_arrival(params, u, v)?;
    let mut upper = (params.delta / (params.delta + p_market) * (1.0 + 1e-9)).min(1.0 - U_EPS);
    if upper <= U_EPS {
        upper = 1.0 - U_EPS;
    }
    brent(balance, U_EPS, upper, 1e-16, 200).map_err(|e| match e {
        Error::Bracketing(msg) => Error::Bracketing(format!(
            "group unemployment hit its bounds ({msg}); u = {u}, v = {v}"
        )),
        other => other,
    })
}

fn assemble(
    params: &ModelParams,
    groups: &[GroupSpec],
    u_vec: &[f64],
    v: f64,
    max_residual: f64,
    iterations: usize,
) -> Result<Equilibrium> {
    let u = aggregate_unemployment(groups, u_vec);
    let total: f64 = groups.iter().map(|g| g.size).sum();
    let mut states = Vec::with_capacity(groups.len());
    let mut job_flow = 0.0;
    for (g, &u_i) in groups.iter().zip(u_vec) {
        let (p_market, info_prob, p_referral) = arrival_rates(params, &g.dist, u_i, u, v)?;
        let p_total = p_market + p_referral;
        let q = g.size * u_i * p_total / (total * v);
        let s = surplus(params, p_total)?;
        let w = wage(params, s);
        let values = value_functions(params, w, p_total)?;
        job_flow += q * values.filled_job;
        states.push(GroupState {
            size: g.size,
            dist: g.dist,
            u: u_i,
            info_prob,
            p_market,
            p_referral,
            p_total,
            q,
            surplus: s,
            wage: w,
            value_employed: values.employed,
            value_unemployed: values.unemployed,
            value_filled_job: values.filled_job,
        });
    }
    Ok(Equilibrium {
        groups: states,
        u,
        v,
        vacancy_value: (job_flow - params.c) / params.r,
        max_residual,
        iterations,
    })
}
