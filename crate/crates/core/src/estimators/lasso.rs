//! `min ‖y - Φα‖² + κ‖α‖₁` over complex `α` by accelerated proximal
//! gradient (FISTA with adaptive restart).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::estimators::EstimateReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoControls {
    pub max_iters: usize,
    /// Stop when the objective decreases by less than this fraction.
    pub rel_tol: f64,
}

impl Default for LassoControls {
    fn default() -> Self {
        LassoControls {
            max_iters: 5000,
            rel_tol: 1e-10,
        }
    }
}

/// Complex soft threshold: shrinks the modulus by `threshold`, keeps the
/// phase.
pub fn soft_threshold(z: Complex64, threshold: f64) -> Complex64 {
    let r = z.norm();
    if r <= threshold {
        Complex64::new(0.0, 0.0)
    } else {
        z * ((r - threshold) / r)
    }
}

pub fn lasso_objective(phi: &DMatrix<Complex64>, y: &DVector<Complex64>, alpha: &DVector<Complex64>, kappa: f64) -> f64 {
    (y - phi * alpha).norm_squared() + kappa * alpha.iter().map(|a| a.norm()).sum::<f64>()
}

/// Largest eigenvalue of `ΦᴴΦ` by power iteration.
pub fn largest_gram_eigenvalue(phi: &DMatrix<Complex64>) -> f64 {
    let l = phi.ncols();
    if l == 0 {
        return 0.0;
    }
    // Deterministic start with components in every direction.
    let mut v = DVector::from_fn(l, |k, _| {
        let t = (k as f64 + 1.0) * 0.618_033_988_749_895;
        Complex64::new(1.0 + t.fract(), (2.0 * t).fract())
    });
    v /= Complex64::new(v.norm(), 0.0);
    let mut estimate = 0.0;
    for _ in 0..1000 {
        let w = phi.ad_mul(&(phi * &v));
        let next = w.norm();
        if next == 0.0 {
            return 0.0;
        }
        v = w / Complex64::new(next, 0.0);
        if (next - estimate).abs() <= 1e-13 * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// LASSO estimate on the pilot dictionary, reconstructed on `dict_full`.
pub fn estimate_lasso(
    y: &DVector<Complex64>,
    dict_pilots: &Dictionary,
    dict_full: &Dictionary,
    kappa: f64,
    controls: &LassoControls,
) -> Result<EstimateReport> {
    let phi = dict_pilots.matrix();
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Argument(format!("kappa must be > 0, got {kappa}")));
    }
    if phi.nrows() != y.len() || dict_full.ncols() != phi.ncols() {
        return Err(Error::Argument("dictionary dimensions do not match the data".into()));
    }
    let (alpha, history, converged) = fista(phi, y, kappa, controls);
    Ok(EstimateReport {
        h_hat: dict_full.matrix() * &alpha,
        alpha_hat: alpha,
        // Restarted steps are not recorded in the history.
        iterations_used: history.len(),
        converged,
        residual_history: history,
        lambda_hat: f64::NAN,
    })
}

pub(crate) fn fista(
    phi: &DMatrix<Complex64>,
    y: &DVector<Complex64>,
    kappa: f64,
    controls: &LassoControls,
) -> (DVector<Complex64>, Vec<f64>, bool) {
    let l = phi.ncols();
    let lipschitz = 2.0 * largest_gram_eigenvalue(phi);
    let mut x = DVector::<Complex64>::zeros(l);
    if lipschitz == 0.0 {
        return (x, Vec::new(), true);
    }
    let step = 1.0 / lipschitz;
    let threshold = kappa * step;
    let mut z = x.clone();
    let mut t = 1.0f64;
    let mut objective = lasso_objective(phi, y, &x, kappa);
    let mut history = Vec::new();
    for _ in 0..controls.max_iters {
        let grad = phi.ad_mul(&(phi * &z - y)) * Complex64::new(2.0, 0.0);
        let x_next = (&z - grad * Complex64::new(step, 0.0)).map(|v| soft_threshold(v, threshold));
        let next_objective = lasso_objective(phi, y, &x_next, kappa);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if next_objective > objective {
            // Momentum overshot: restart from the last accepted point.
            t = 1.0;
            z = x.clone();
            continue;
        }
        let decrease = (objective - next_objective) / objective.max(f64::MIN_POSITIVE);
        let momentum = Complex64::new((t - 1.0) / t_next, 0.0);
        z = &x_next + (&x_next - &x) * momentum;
        x = x_next;
        t = t_next;
        objective = next_objective;
        history.push(decrease);
        if decrease < controls.rel_tol {
            return (x, history, true);
        }
    }
    (x, history, false)
}
