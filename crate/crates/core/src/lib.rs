//! Steady-state search-and-matching labour market in which the unemployed
//! find jobs through a frictional market and through referrals from
//! employed contacts on a social network.
//!
//! Worker groups differ only in the degree distribution of their social
//! network (Erdős–Rényi, random regular, or scale-free). The crate solves
//! the equilibrium, calibrates the model to labour-market moments, measures
//! inter-group inequality and welfare, cross-checks the referral formulas by
//! simulation on explicit networks, and runs the comparative-statics
//! experiments exposed by the `labornet` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod calibration;
pub mod config;
pub mod degree;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod model;
pub mod report;
mod roots;
pub mod simulate;
pub mod solver;
pub mod special;

pub use calibration::{calibrate, CalibrationTargets, GivenParams};
pub use degree::{zipf_alpha_for_mean, DegreeDistribution};
pub use error::{Error, Result};
pub use metrics::{GiniBase, WelfareReport};
pub use model::{Equilibrium, GroupSpec, GroupState, ModelParams};
pub use solver::{solve_equilibrium, SolverConfig};
