//! Gaussian posterior of the dictionary weights for fixed prior precisions
//! and noise precision:
//!
//! ```text
//! Σ = (λ ΦᴴΦ + V)⁻¹,   μ = λ Σ Φᴴ y,   V = diag(v)
//! ```
//!
//! Two equivalent routes are implemented. The direct route factors the
//! `K×K` matrix `λΦᴴΦ + V` (`K` active columns). The Woodbury route factors
//! the `M×M` matrix `C = Φ D Φᴴ + λ⁻¹ I` with `D = V⁻¹`, which is cheaper
//! when `K > M`, and uses
//!
//! ```text
//! μ = D Φᴴ C⁻¹ y,   Σ = D - WᴴW,   W = R⁻¹ Φ D,   C = R Rᴴ
//! tr(Φ Σ Φᴴ) = λ⁻¹ Σ_k ‖W_{:,k}‖² / d_k
//! ```

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveRoute {
    /// Woodbury when there are more active columns than rows, direct otherwise.
    Auto,
    Direct,
    Woodbury,
}

#[derive(Debug, Clone)]
enum CovFactor {
    /// `X = L⁻¹` with `LLᴴ = λΦᴴΦ + V`, so `Σ = XᴴX`.
    InverseCholesky(DMatrix<Complex64>),
    Woodbury {
        prior_var: DVector<f64>,
        w: DMatrix<Complex64>,
    },
}

/// Mean, covariance diagonal and expected-fit trace of `q(α)` restricted to
/// the active columns.
#[derive(Debug, Clone)]
pub struct GaussianPosterior {
    pub mean: DVector<Complex64>,
    pub cov_diag: DVector<f64>,
    /// `tr(Φ Σ Φᴴ)`, the variance part of `⟨‖y - Φα‖²⟩`.
    pub fit_trace: f64,
    factor: CovFactor,
}

impl GaussianPosterior {
    /// Dense covariance `Σ` over the active columns.
    pub fn covariance(&self) -> DMatrix<Complex64> {
        match &self.factor {
            CovFactor::InverseCholesky(x) => linalg::ad_mul(x, x),
            CovFactor::Woodbury { prior_var, w } => {
                let mut cov = -linalg::ad_mul(w, w);
                for (k, d) in prior_var.iter().enumerate() {
                    cov[(k, k)] += d;
                }
                cov
            }
        }
    }

    fn empty() -> Self {
        GaussianPosterior {
            mean: DVector::zeros(0),
            cov_diag: DVector::zeros(0),
            fit_trace: 0.0,
            factor: CovFactor::InverseCholesky(DMatrix::zeros(0, 0)),
        }
    }
}

fn cholesky_with_jitter(mut a: DMatrix<Complex64>, what: &str) -> Result<Cholesky<Complex64, Dyn>> {
    let trace: f64 = a.diagonal().iter().map(|z| z.re).sum();
    match Cholesky::new(a.clone()) {
        Some(c) => Ok(c),
        None => {
            let jitter = JITTER * trace;
            for k in 0..a.nrows() {
                a[(k, k)] += jitter;
            }
            Cholesky::new(a).ok_or_else(|| {
                Error::Numerical(format!("{what} is not positive definite even after jitter {jitter:e}"))
            })
        }
    }
}

/// A dictionary and observation pair with the products every posterior
/// solve reuses (`ΦᴴΦ`, `Φᴴy`), so that iterating over prior precisions
/// only pays for the factorisation.
#[derive(Debug, Clone)]
pub struct LinearModel {
    phi: DMatrix<Complex64>,
    y: DVector<Complex64>,
    gram: DMatrix<Complex64>,
    phi_h_y: DVector<Complex64>,
}

impl LinearModel {
    pub fn new(phi: DMatrix<Complex64>, y: DVector<Complex64>) -> Result<Self> {
        if phi.nrows() != y.len() {
            return Err(Error::Argument(format!(
                "dictionary has {} rows but y has {} entries",
                phi.nrows(),
                y.len()
            )));
        }
        let gram = linalg::ad_mul(&phi, &phi);
        let phi_h_y = phi.ad_mul(&y);
        Ok(LinearModel { phi, y, gram, phi_h_y })
    }

    pub fn phi(&self) -> &DMatrix<Complex64> {
        &self.phi
    }

    pub fn y(&self) -> &DVector<Complex64> {
        &self.y
    }

    pub fn num_rows(&self) -> usize {
        self.phi.nrows()
    }

    pub fn num_columns(&self) -> usize {
        self.phi.ncols()
    }

    /// Posterior over the columns listed in `active`, with
    /// `prior_precision[i]` belonging to column `active[i]`.
    pub fn solve(
        &self,
        active: &[usize],
        lambda: f64,
        prior_precision: &[f64],
        route: SolveRoute,
    ) -> Result<GaussianPosterior> {
        let (m, l) = self.phi.shape();
        let k = active.len();
        if prior_precision.len() != k || active.iter().any(|&c| c >= l) {
            return Err(Error::Argument(format!(
                "posterior solve over {k} of {l} columns with {} precisions",
                prior_precision.len()
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) || prior_precision.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Numerical(format!(
                "posterior solve needs finite positive precisions (lambda = {lambda})"
            )));
        }
        if k == 0 {
            return Ok(GaussianPosterior::empty());
        }
        let woodbury = match route {
            SolveRoute::Auto => k > m,
            SolveRoute::Direct => false,
            SolveRoute::Woodbury => true,
        };
        if woodbury {
            self.solve_woodbury(active, lambda, prior_precision)
        } else {
            self.solve_direct(active, lambda, prior_precision)
        }
    }

    fn solve_direct(&self, active: &[usize], lambda: f64, prior_precision: &[f64]) -> Result<GaussianPosterior> {
        let k = active.len();
        let mut a = DMatrix::from_fn(k, k, |i, j| self.gram[(active[i], active[j])] * lambda);
        for (i, &v) in prior_precision.iter().enumerate() {
            a[(i, i)] += v;
        }
        let chol = cholesky_with_jitter(a, "posterior precision matrix")?;
        let x = linalg::lower_triangular_inverse(&chol.unpack());
        let rhs = DVector::from_iterator(k, active.iter().map(|&c| self.phi_h_y[c] * lambda));
        let mean = x.ad_mul(&(&x * rhs));
        let cov_diag = linalg::column_norms_squared(&x);
        // λΦᴴΦ = A - V, hence tr(ΦΣΦᴴ) = (K - Σ_k v_k Σ_kk) / λ.
        let fit_trace = cov_diag
            .iter()
            .zip(prior_precision)
            .map(|(s, v)| (1.0 - s * v).max(0.0))
            .sum::<f64>()
            / lambda;
        Ok(GaussianPosterior {
            mean,
            cov_diag,
            fit_trace,
            factor: CovFactor::InverseCholesky(x),
        })
    }

    fn solve_woodbury(&self, active: &[usize], lambda: f64, prior_precision: &[f64]) -> Result<GaussianPosterior> {
        let m = self.phi.nrows();
        let prior_var = DVector::from_iterator(prior_precision.len(), prior_precision.iter().map(|v| 1.0 / v));
        let phi_active = self.phi.select_columns(active);
        let mut phi_d = phi_active.clone();
        for (k, mut col) in phi_d.column_iter_mut().enumerate() {
            col *= Complex64::new(prior_var[k], 0.0);
        }
        // C = Φ D Φᴴ + λ⁻¹ I
        let mut c = linalg::mul(&phi_d, &phi_active.adjoint());
        for i in 0..m {
            c[(i, i)] += 1.0 / lambda;
        }
        let chol = cholesky_with_jitter(c, "Woodbury capacitance matrix")?;
        let r_inv = linalg::lower_triangular_inverse(&chol.unpack());
        let w = linalg::mul(&r_inv, &phi_d);
        let mean = w.ad_mul(&(&r_inv * &self.y));
        let mut cov_diag = DVector::zeros(prior_var.len());
        let mut fit_trace = 0.0;
        for (k, col) in w.column_iter().enumerate() {
            let energy = col.norm_squared();
            cov_diag[k] = (prior_var[k] - energy).max(0.0);
            fit_trace += energy / prior_var[k];
        }
        Ok(GaussianPosterior {
            mean,
            cov_diag,
            fit_trace: fit_trace / lambda,
            factor: CovFactor::Woodbury { prior_var, w },
        })
    }
}

/// Solves for `q(α)` given the active dictionary columns `phi`, data `y`,
/// noise precision `lambda` and per-column prior precisions.
pub fn solve_gaussian(
    phi: &DMatrix<Complex64>,
    y: &DVector<Complex64>,
    lambda: f64,
    prior_precision: &[f64],
    route: SolveRoute,
) -> Result<GaussianPosterior> {
    let k = phi.ncols();
    if prior_precision.len() != k {
        return Err(Error::Argument(format!(
            "posterior solve with {k} columns and {} precisions",
            prior_precision.len()
        )));
    }
    let model = LinearModel::new(phi.clone(), y.clone())?;
    let all: Vec<usize> = (0..k).collect();
    model.solve(&all, lambda, prior_precision, route)
}
