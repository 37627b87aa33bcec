//! Scenario files.
//!
//! A scenario is a TOML document; every key is optional and falls back to
//! the published parameter set:
//!
//! ```toml
//! name = "phi-policy"
//! calibrate = false        # derive gamma, beta, c, phi from [targets] first
//!
//! [params]                 # any of y b r delta eta gamma beta c phi d_f
//! phi = 0.1
//!
//! [targets]                # used only when calibrate = true
//! u_target = 0.044
//!
//! [solver]                 # residual_tol max_outer_iters damping initial_u multistart
//! damping = 0.5
//!
//! [[groups]]
//! family = "erdos_renyi"   # or "regular", "scale_free"
//! mean = 15.0
//! size = 1e6
//!
//! [[groups]]
//! family = "scale_free"
//! alpha = 2.05             # or mean = ..., which picks alpha to match
//!
//! [sweep]
//! axis = "phi"             # mean-degree | alpha | df | phi
//! values = [0.0, 0.05, 0.1]
//! ```
//!
//! Without `[[groups]]` the scenario uses two Erdős–Rényi groups of mean
//! degree 22.47.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate, CalibrationTargets, GivenParams};
use crate::degree::{zipf_alpha_for_mean, DegreeDistribution};
use crate::error::{Error, Result};
use crate::model::{GroupSpec, ModelParams};
use crate::solver::SolverConfig;

pub const DEFAULT_GROUP_SIZE: f64 = 1e6;
pub const BASELINE_MEAN_DEGREE: f64 = 22.47;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[serde(alias = "poisson", alias = "er")]
    ErdosRenyi,
    #[serde(alias = "degenerate")]
    Regular,
    #[serde(alias = "zipf", alias = "sf")]
    ScaleFree,
}

/// A group described by network family and either its mean degree or (for
/// scale-free groups) its Zipf scale parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTemplate {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "default_size")]
    pub size: f64,
}

fn default_size() -> f64 {
    DEFAULT_GROUP_SIZE
}

impl GroupTemplate {
    pub fn with_mean(family: Family, mean: f64) -> Self {
        GroupTemplate { family, mean: Some(mean), alpha: None, size: DEFAULT_GROUP_SIZE }
    }

    pub fn scale_free_alpha(alpha: f64) -> Self {
        GroupTemplate { family: Family::ScaleFree, mean: None, alpha: Some(alpha), size: DEFAULT_GROUP_SIZE }
    }

    pub fn to_dist(&self) -> Result<DegreeDistribution> {
        match (self.family, self.mean, self.alpha) {
            (Family::ErdosRenyi, Some(m), None) => DegreeDistribution::erdos_renyi(m),
            (Family::Regular, Some(m), None) => {
                if m < 0.0 || m.fract() != 0.0 || m > u32::MAX as f64 {
                    return Err(Error::Config(format!("regular network needs an integer degree, got {m}")));
                }
                Ok(DegreeDistribution::degenerate(m as u32))
            }
            (Family::ScaleFree, Some(m), None) => DegreeDistribution::zipf(zipf_alpha_for_mean(m)?),
            (Family::ScaleFree, None, Some(a)) => DegreeDistribution::zipf(a),
            (family, mean, alpha) => Err(Error::Config(format!(
                "{family:?} group needs exactly one of `mean`{} (got mean = {mean:?}, alpha = {alpha:?})",
                if family == Family::ScaleFree { " or `alpha`" } else { "" }
            ))),
        }
    }

    pub fn to_spec(&self) -> Result<GroupSpec> {
        GroupSpec::new(self.size, self.to_dist()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    /// Mean degree of every group.
    #[serde(alias = "mean_degree")]
    MeanDegree,
    /// Zipf scale parameter of scale-free groups; other groups take the
    /// matching mean degree.
    Alpha,
    #[serde(alias = "d_f")]
    Df,
    Phi,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::MeanDegree => "mean-degree",
            Axis::Alpha => "alpha",
            Axis::Df => "df",
            Axis::Phi => "phi",
        }
    }

    /// Parameters and groups at one grid value.
    pub fn apply(&self, value: f64, params: &ModelParams, groups: &[GroupTemplate]) -> Result<(ModelParams, Vec<GroupTemplate>)> {
        if !value.is_finite() {
            return Err(Error::Config(format!("{} sweep value {value} is not finite", self.name())));
        }
        let mut params = *params;
        let mut groups = groups.to_vec();
        match self {
            Axis::Phi => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::Config(format!("phi sweep value {value} outside [0, 1]")));
                }
                params.phi = value;
            }
            Axis::Df => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::Config(format!("d_f sweep value {value} is not a non-negative integer")));
                }
                params.d_f = value as u32;
            }
            Axis::MeanDegree => {
                if value < 0.0 {
                    return Err(Error::Config(format!("mean degree {value} is negative")));
                }
                for g in &mut groups {
                    g.mean = Some(value);
                    g.alpha = None;
                }
            }
            Axis::Alpha => {
                let mean = DegreeDistribution::zipf(value)?.mean();
                for g in &mut groups {
                    if g.family == Family::ScaleFree {
                        g.alpha = Some(value);
                        g.mean = None;
                    } else {
                        g.mean = Some(mean);
                        g.alpha = None;
                    }
                }
            }
        }
        Ok((params, groups))
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean-degree" | "mean_degree" => Ok(Axis::MeanDegree),
            "alpha" => Ok(Axis::Alpha),
            "df" | "d_f" => Ok(Axis::Df),
            "phi" => Ok(Axis::Phi),
            other => Err(Error::Config(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub calibrate: bool,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default)]
    pub targets: CalibrationTargets,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub groups: Vec<GroupTemplate>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn default_name() -> String {
    "scenario".to_string()
}

impl Default for ScenarioFile {
    fn default() -> Self {
        ScenarioFile {
            name: default_name(),
            calibrate: false,
            params: ModelParams::default(),
            targets: CalibrationTargets::default(),
            solver: SolverConfig::default(),
            groups: Vec::new(),
            sweep: None,
        }
    }
}

/// A fully resolved scenario ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub groups: Vec<GroupTemplate>,
    pub sweep: Option<SweepSpec>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies calibration if requested and validates everything.
    pub fn resolve(&self) -> Result<Scenario> {
        let mut params = self.params;
        if self.calibrate {
            let given = GivenParams { y: params.y, b: params.b, r: params.r, delta: params.delta, eta: params.eta };
            params = calibrate(&given, &self.targets)?;
        }
        params.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.solver.validate().map_err(|e| Error::Config(e.to_string()))?;
        let groups = if self.groups.is_empty() {
            vec![GroupTemplate::with_mean(Family::ErdosRenyi, BASELINE_MEAN_DEGREE); 2]
        } else {
            self.groups.clone()
        };
        for g in &groups {
            g.to_spec().map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep needs at least one value".into()));
            }
            for &v in &sweep.values {
                sweep.axis.apply(v, &params, &groups)?;
            }
        }
        Ok(Scenario { name: self.name.clone(), params, groups, sweep: self.sweep.clone() })
    }
}
