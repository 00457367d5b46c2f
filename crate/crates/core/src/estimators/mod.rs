//! Channel estimators. All of them return an [`EstimateReport`] with the
//! channel estimate on every subcarrier.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::Error;

pub mod lasso;
pub mod posterior;
pub mod rvm;
pub mod rwf;
pub mod vmp;

pub use lasso::{estimate_lasso, LassoControls};
pub use posterior::{solve_gaussian, GaussianPosterior, LinearModel, SolveRoute};
pub use rvm::{estimate_rvm, RvmControls};
pub use rwf::estimate_rwf;
pub use vmp::{run_vmp, vmp_init, PosteriorState};

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// Dictionary weights; empty for estimators that do not use the
    /// dictionary (RWF).
    pub alpha_hat: DVector<Complex64>,
    /// Channel estimate on all `N` subcarriers.
    pub h_hat: DVector<Complex64>,
    pub iterations_used: usize,
    pub converged: bool,
    /// Per-iteration convergence measure (relative change of `α̂`, or the
    /// relative objective decrease for LASSO).
    pub residual_history: Vec<f64>,
    /// Final noise-precision estimate, or the design value where the
    /// estimator does not learn one.
    pub lambda_hat: f64,
}

impl EstimateReport {
    pub(crate) fn zero(num_components: usize, num_subcarriers: usize, lambda_hat: f64) -> Self {
        EstimateReport {
            alpha_hat: DVector::zeros(num_components),
            h_hat: DVector::zeros(num_subcarriers),
            iterations_used: 0,
            converged: true,
            residual_history: Vec::new(),
            lambda_hat,
        }
    }
}

/// Indices of the weights with `|α̂_l| ≥ rel_threshold · max_k |α̂_k|`.
///
/// Pruning removes a component only once its precision passes the prune
/// threshold, which can take longer than the convergence rule on `α̂`; the
/// leftover weights are then many orders of magnitude below the rest and
/// this is the support an estimate actually uses.
pub fn significant_support(alpha: &DVector<Complex64>, rel_threshold: f64) -> Vec<usize> {
    let peak = alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Vec::new();
    }
    (0..alpha.len()).filter(|&l| alpha[l].norm() >= rel_threshold * peak).collect()
}

/// Estimator identifiers as used in configs and CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    Vmp2l,
    Vmp3l,
    Lasso,
    Rvm,
    Rwf,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 5] = [
        EstimatorKind::Vmp2l,
        EstimatorKind::Vmp3l,
        EstimatorKind::Lasso,
        EstimatorKind::Rvm,
        EstimatorKind::Rwf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Vmp2l => "vmp2l",
            EstimatorKind::Vmp3l => "vmp3l",
            EstimatorKind::Lasso => "lasso",
            EstimatorKind::Rvm => "rvm",
            EstimatorKind::Rwf => "rwf",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown estimator '{s}' (expected vmp2l, vmp3l, lasso, rvm or rwf)")))
    }
}
