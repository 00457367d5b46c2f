//! EM sparse Bayesian learning (relevance vector machine) baseline.
//!
//! Each weight has prior `CN(0, γ_l)`. The E-step is the Gaussian posterior
//! with `V = diag(1/γ_l)`; the M-step sets `γ_l = |α̂_l|² + Σ_ll` and
//! `λ = M / (‖y - Φα̂‖² + tr(ΦΣΦᴴ))`. Components with `γ_l` below the prune
//! floor are removed.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::estimators::posterior::{LinearModel, SolveRoute};
use crate::estimators::vmp::relative_change;
use crate::estimators::EstimateReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvmControls {
    pub max_iters: usize,
    pub tol: f64,
    pub prune_floor: f64,
    pub lambda_cap: f64,
}

impl Default for RvmControls {
    fn default() -> Self {
        RvmControls {
            max_iters: 200,
            tol: 1e-6,
            prune_floor: 1e-12,
            lambda_cap: 1e12,
        }
    }
}

/// Final EM state: prior variances (zero where pruned) and the report.
#[derive(Debug, Clone)]
pub struct RvmFit {
    pub gamma: DVector<f64>,
    /// `⟨|α_l|²⟩` from the last E-step.
    pub second_moment: DVector<f64>,
    pub report: EstimateReport,
}

pub fn estimate_rvm(
    y: &DVector<Complex64>,
    dict_pilots: &Dictionary,
    dict_full: &Dictionary,
    controls: &RvmControls,
) -> Result<EstimateReport> {
    Ok(fit_rvm(y, dict_pilots, dict_full, controls)?.report)
}

pub fn fit_rvm(
    y: &DVector<Complex64>,
    dict_pilots: &Dictionary,
    dict_full: &Dictionary,
    controls: &RvmControls,
) -> Result<RvmFit> {
    let phi = dict_pilots.matrix();
    let (m, l) = phi.shape();
    if y.len() != m || dict_full.ncols() != l {
        return Err(Error::Argument("dictionary dimensions do not match the data".into()));
    }
    let energy = y.norm_squared();
    if energy == 0.0 {
        return Ok(RvmFit {
            gamma: DVector::zeros(l),
            second_moment: DVector::zeros(l),
            report: EstimateReport::zero(l, dict_full.nrows(), controls.lambda_cap),
        });
    }
    let model = LinearModel::new(phi.clone(), y.clone())?;
    let mut gamma = DVector::from_element(l, l as f64);
    let mut lambda = m as f64 / energy;
    let mut alpha = DVector::<Complex64>::zeros(l);
    let mut second = DVector::<f64>::zeros(l);
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < controls.max_iters {
        iterations += 1;
        let idx: Vec<usize> = (0..l).filter(|&k| gamma[k] > 0.0).collect();
        let precision: Vec<f64> = idx.iter().map(|&k| 1.0 / gamma[k]).collect();
        let post = model.solve(&idx, lambda, &precision, SolveRoute::Auto)?;
        let previous = alpha.clone();
        alpha.fill(Complex64::new(0.0, 0.0));
        second.fill(0.0);
        for (i, &k) in idx.iter().enumerate() {
            alpha[k] = post.mean[i];
            second[k] = post.mean[i].norm_sqr() + post.cov_diag[i];
            gamma[k] = if second[k] < controls.prune_floor { 0.0 } else { second[k] };
            if gamma[k] == 0.0 {
                alpha[k] = Complex64::new(0.0, 0.0);
            }
        }
        let e = (y - phi * &alpha).norm_squared() + post.fit_trace;
        lambda = if e > 0.0 { (m as f64 / e).min(controls.lambda_cap) } else { controls.lambda_cap };
        let change = relative_change(&alpha, &previous);
        history.push(change);
        if change < controls.tol {
            converged = true;
            break;
        }
    }
    Ok(RvmFit {
        gamma,
        second_moment: second,
        report: EstimateReport {
            h_hat: dict_full.matrix() * &alpha,
            alpha_hat: alpha,
            iterations_used: iterations,
            converged,
            residual_history: history,
            lambda_hat: lambda,
        },
    })
}
