//! Comparison of computed results with the published reference values.

use std::fmt::Write as _;

use serde::Serialize;

use crate::calibration::TargetCheck;
use crate::degree::DegreeDistribution;
use crate::experiments::{argmax_by, unemployment_gaps, SweepResult};
use crate::model::{Equilibrium, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceCheck {
    pub label: String,
    pub expected: f64,
    pub actual: f64,
    /// Allowed absolute deviation.
    pub tolerance: f64,
    pub pass: bool,
}

impl ReferenceCheck {
    pub fn absolute(label: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        ReferenceCheck {
            label: label.into(),
            expected,
            actual,
            tolerance,
            pass: (actual - expected).abs() <= tolerance,
        }
    }

    pub fn relative(label: impl Into<String>, expected: f64, actual: f64, rel: f64) -> Self {
        Self::absolute(label, expected, actual, rel * expected.abs())
    }

    /// A yes/no property; `expected` and `actual` are 1 or 0.
    pub fn property(label: impl Into<String>, holds: bool) -> Self {
        ReferenceCheck {
            label: label.into(),
            expected: 1.0,
            actual: if holds { 1.0 } else { 0.0 },
            tolerance: 0.0,
            pass: holds,
        }
    }
}

/// Published calibrated parameters `(γ, β, c, φ)`.
pub const CALIBRATED: [(&str, f64, f64); 4] =
    [("gamma", 0.402, 0.002), ("beta", 0.028, 0.002), ("c", 7.188, 0.02), ("phi", 0.048, 0.002)];

/// Published Zipf means for each scale parameter, with tolerance.
pub const ZIPF_MEANS: [(f64, f64, f64); 7] = [
    (2.028, 22.47, 0.05),
    (2.05, 12.86, 0.01),
    (2.1, 6.78, 0.01),
    (2.3, 2.74, 0.01),
    (2.5, 1.95, 0.01),
    (3.0, 1.37, 0.01),
    (5.0, 1.04, 0.01),
];

pub fn calibration_checks(params: &ModelParams) -> Vec<ReferenceCheck> {
    let actual = [params.gamma, params.beta, params.c, params.phi];
    CALIBRATED
        .iter()
        .zip(actual)
        .map(|(&(name, expected, tol), a)| ReferenceCheck::absolute(format!("calibration {name}"), expected, a, tol))
        .collect()
}

pub fn baseline_checks(eq: &Equilibrium, targets: &TargetCheck) -> Vec<ReferenceCheck> {
    let mut out = Vec::new();
    for (i, g) in eq.groups.iter().enumerate() {
        out.push(ReferenceCheck::absolute(format!("baseline u_{}", i + 1), 0.044, g.u, 0.001));
        out.push(ReferenceCheck::absolute(format!("baseline w_{}", i + 1), 0.600, g.wage, 0.002));
        out.push(ReferenceCheck::absolute(
            format!("baseline p_R/p group {}", i + 1),
            0.50,
            g.p_referral / g.p_total,
            0.01,
        ));
    }
    out.push(ReferenceCheck::absolute("baseline v", 0.040, eq.v, 0.001));
    out.push(ReferenceCheck::absolute("verification max relative target error", 0.0, targets.max_relative_error(), 1e-6));
    out
}

pub fn table2_checks(result: &SweepResult) -> Vec<ReferenceCheck> {
    let mut out = Vec::new();
    if let Some(p) = result.find("erdos_renyi") {
        let g = &p.equilibrium.groups;
        out.push(ReferenceCheck::absolute("ER u_1", 0.0510, g[0].u, 0.0005));
        out.push(ReferenceCheck::absolute("ER u_2", 0.0394, g[1].u, 0.0005));
        out.push(ReferenceCheck::absolute("ER w_1", 0.581, g[0].wage, 0.002));
        out.push(ReferenceCheck::absolute("ER w_2", 0.615, g[1].wage, 0.002));
        out.push(ReferenceCheck::relative("ER Gini", 1.451e-2, p.welfare.gini, 0.10));
        out.push(ReferenceCheck::absolute("ER SW", 0.685, p.welfare.social_welfare, 0.003));
    }
    if let Some(p) = result.find("regular") {
        let g = &p.equilibrium.groups;
        out.push(ReferenceCheck::absolute("Regular u_1", 0.0508, g[0].u, 0.0005));
        out.push(ReferenceCheck::absolute("Regular u_2", 0.0393, g[1].u, 0.0005));
        out.push(ReferenceCheck::absolute("Regular w_1", 0.582, g[0].wage, 0.002));
        out.push(ReferenceCheck::absolute("Regular w_2", 0.615, g[1].wage, 0.002));
        out.push(ReferenceCheck::relative("Regular Gini", 1.454e-2, p.welfare.gini, 0.10));
        out.push(ReferenceCheck::absolute("Regular SW", 0.685, p.welfare.social_welfare, 0.003));
    }
    if let Some(p) = result.find("scale_free") {
        let g = &p.equilibrium.groups;
        out.push(ReferenceCheck::absolute("Scale-free u_1", 0.0814, g[0].u, 0.001));
        out.push(ReferenceCheck::absolute("Scale-free u_2", 0.0810, g[1].u, 0.001));
        out.push(ReferenceCheck::absolute("Scale-free w_1", 0.529, g[0].wage, 0.002));
        out.push(ReferenceCheck::absolute("Scale-free w_2", 0.529, g[1].wage, 0.002));
        out.push(ReferenceCheck::relative("Scale-free Gini", 2.310e-4, p.welfare.gini, 0.50));
        out.push(ReferenceCheck::absolute("Scale-free SW", 0.627, p.welfare.social_welfare, 0.003));
    }
    out
}

pub fn table3_checks() -> Vec<ReferenceCheck> {
    ZIPF_MEANS
        .iter()
        .map(|&(alpha, mean, tol)| {
            let actual = DegreeDistribution::Zipf { alpha }.mean();
            ReferenceCheck::absolute(format!("Zipf mean at alpha {alpha}"), mean, actual, tol)
        })
        .collect()
}

/// Qualitative features of the network-structure comparisons.
pub fn structure_checks(result: &SweepResult) -> Vec<ReferenceCheck> {
    let mut out = Vec::new();
    let gaps = unemployment_gaps(result.scenario("er_vs_regular"));
    if let Some(&(_, gap0)) = gaps.iter().find(|(m, _)| *m == 0.0) {
        out.push(ReferenceCheck::absolute("u_ER - u_REG at mean degree 0", 0.0, gap0, 1e-12));
    }
    if gaps.len() >= 2 {
        let step = gaps[1].0 - gaps[0].0;
        if let Some(at) = argmax_by(result.scenario("er_vs_regular"), |p| {
            p.equilibrium.groups[0].u - p.equilibrium.groups[1].u
        }) {
            out.push(ReferenceCheck::absolute("argmax of u_ER - u_REG over mean degree", 25.0, at, step));
        }
        if let Some(at) = argmax_by(result.scenario("er_vs_regular"), |p| p.welfare.gini) {
            out.push(ReferenceCheck::absolute("argmax of ER/REG Gini over mean degree", 25.0, at, step));
        }
    }
    for p in result.scenario("er_vs_scale_free") {
        let alpha = p.axis_value.unwrap_or(f64::NAN);
        if alpha <= 2.1 {
            let g = &p.equilibrium.groups;
            out.push(ReferenceCheck::property(format!("u_SF > u_ER at alpha {alpha}"), g[1].u > g[0].u));
        }
    }
    out
}

fn nondecreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] >= w[0] - 1e-12)
}

pub fn df_checks(result: &SweepResult) -> Vec<ReferenceCheck> {
    let points: Vec<_> = result.scenario("df_sweep").collect();
    let gini: Vec<f64> = points.iter().map(|p| p.welfare.gini).collect();
    let sw: Vec<f64> = points.iter().map(|p| p.welfare.social_welfare).collect();
    let mut out = vec![
        ReferenceCheck::property("d_f sweep: Gini nondecreasing", nondecreasing(&gini)),
        ReferenceCheck::property("d_f sweep: SW nondecreasing", nondecreasing(&sw)),
    ];
    if let Some(p) = points.iter().find(|p| p.axis_value == Some(0.0)) {
        let g = &p.equilibrium.groups;
        out.push(ReferenceCheck::absolute("d_f = 0: u_ER - u_SF", 0.0, g[0].u - g[1].u, 1e-12));
        out.push(ReferenceCheck::absolute("d_f = 0: Gini", 0.0, p.welfare.gini, 1e-12));
    }
    out
}

pub fn phi_checks(result: &SweepResult) -> Vec<ReferenceCheck> {
    let points: Vec<_> = result.scenario("phi_sweep").collect();
    let sw: Vec<f64> = points.iter().map(|p| p.welfare.social_welfare).collect();
    let mut out = vec![ReferenceCheck::property("phi sweep: SW nondecreasing", nondecreasing(&sw))];
    if let Some(p) = points.iter().find(|p| p.axis_value == Some(0.0)) {
        out.push(ReferenceCheck::absolute("phi = 0: Gini", 0.0, p.welfare.gini, 1e-12));
    }
    let fine = points.iter().copied().filter(|p| p.axis_value.is_some_and(|v| v <= 0.3 + 1e-12));
    if let Some(at) = argmax_by(fine, |p| p.welfare.gini) {
        out.push(ReferenceCheck::absolute("phi sweep: Gini argmax on [0, 0.3] (in [0.05, 0.2])", 0.125, at, 0.075));
    }
    out
}

/// Markdown table of checks.
pub fn render(title: &str, checks: &[ReferenceCheck]) -> String {
    let mut s = String::new();
    let passed = checks.iter().filter(|c| c.pass).count();
    let _ = writeln!(s, "## {title} ({passed}/{} pass)\n", checks.len());
    let _ = writeln!(s, "| check | expected | actual | tolerance | result |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for c in checks {
        let _ = writeln!(
            s,
            "| {} | {:.6} | {:.6} | {:.3e} | {} |",
            c.label,
            c.expected,
            c.actual,
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    s
}
