//! Inequality and welfare over a solved equilibrium.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::{Equilibrium, ModelParams};

/// Population over which the Gini coefficient is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GiniBase {
    /// One point per group at its expected income `u_i b + (1 − u_i) w_i`,
    /// weighted by group size. This is the definition used in reports.
    #[default]
    Group,
    /// Four-point distribution of individual incomes: employed workers at
    /// `w_i`, unemployed at `b`.
    Individual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WelfareReport {
    pub gini: f64,
    pub social_welfare: f64,
    /// Expected income of a member of each group.
    pub group_incomes: Vec<f64>,
}

/// `Σ_i [y(1 − u_i) + b u_i] L_i/L − c v`.
pub fn social_welfare(params: &ModelParams, eq: &Equilibrium) -> f64 {
    let total = eq.total_size();
    let output: f64 = eq
        .groups
        .iter()
        .map(|g| (params.y * (1.0 - g.u) + params.b * g.u) * g.size / total)
        .sum();
    output - params.c * eq.v
}

pub fn group_incomes(params: &ModelParams, eq: &Equilibrium) -> Vec<f64> {
    eq.groups.iter().map(|g| g.u * params.b + (1.0 - g.u) * g.wage).collect()
}

/// Gini coefficient of the equilibrium income distribution.
pub fn gini(params: &ModelParams, eq: &Equilibrium, base: GiniBase) -> Result<f64> {
    let total = eq.total_size();
    let (values, weights): (Vec<f64>, Vec<f64>) = match base {
        GiniBase::Group => group_incomes(params, eq)
            .into_iter()
            .zip(eq.groups.iter().map(|g| g.size / total))
            .unzip(),
        GiniBase::Individual => eq
            .groups
            .iter()
            .flat_map(|g| {
                let share = g.size / total;
                [(g.wage, share * (1.0 - g.u)), (params.b, share * g.u)]
            })
            .unzip(),
    };
    weighted_gini(&values, &weights)
}

/// Gini of a discrete distribution with the given support and weights:
/// `Σ_i Σ_j w_i w_j |x_i − x_j| / (2 W Σ_i w_i x_i)`, with `W = Σ w_i`.
pub fn weighted_gini(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.len() != weights.len() || values.is_empty() {
        return domain("Gini needs one weight per value and at least one value");
    }
    if weights.iter().any(|w| !(*w >= 0.0)) || values.iter().any(|x| !(*x >= 0.0)) {
        return domain("Gini needs non-negative values and weights");
    }
    let w_total: f64 = weights.iter().sum();
    let mean_mass: f64 = values.iter().zip(weights).map(|(x, w)| x * w).sum();
    if !(w_total > 0.0) || !(mean_mass > 0.0) {
        return domain("Gini undefined for all-zero incomes");
    }
    let mut spread = 0.0;
    for (xi, wi) in values.iter().zip(weights) {
        for (xj, wj) in values.iter().zip(weights) {
            spread += wi * wj * (xi - xj).abs();
        }
    }
    Ok(spread / (2.0 * w_total * mean_mass))
}

pub fn welfare_report(params: &ModelParams, eq: &Equilibrium, base: GiniBase) -> Result<WelfareReport> {
    Ok(WelfareReport {
        gini: gini(params, eq, base)?,
        social_welfare: social_welfare(params, eq),
        group_incomes: group_incomes(params, eq),
    })
}
