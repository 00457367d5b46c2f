//! Variational message passing for the two- and three-layer sparse priors.
//!
//! The factorised posterior `q(α) q(γ) q(η) q(λ)` is refined in the fixed
//! order `α → γ → η → λ` (the `η` step only for the three-layer prior):
//!
//! - `q(α)` is complex Gaussian with `Σ = (⟨λ⟩ΦᴴΦ + diag⟨γ⁻¹⟩)⁻¹` and mean
//!   `⟨λ⟩ΣΦᴴy`;
//! - `q(γ_l)` is GIG with order `ε - 1`, rate `⟨η_l⟩` and inverse rate
//!   `⟨|α_l|²⟩ = |α̂_l|² + Σ_ll`;
//! - `q(η_l)` is Gamma with mean `(ε + a_l)/(⟨γ_l⟩ + b_l)`;
//! - `q(λ)` is Gamma with mean `(M + c)/(⟨‖y - Φα‖²⟩ + d)`.
//!
//! Components whose `⟨γ_l⁻¹⟩` exceeds the prune threshold, or whose GIG
//! factor collapses, are removed from all later updates and report zero.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::estimators::posterior::{GaussianPosterior, LinearModel, SolveRoute};
use crate::estimators::EstimateReport;
use crate::model::{EstimatorConfig, PriorLayers};
use crate::specfun::{gig_moment, GigParams};

/// Complete VMP iterate.
#[derive(Debug, Clone)]
pub struct PosteriorState {
    /// `α̂`, zero on pruned components.
    pub alpha_mean: DVector<Complex64>,
    /// Diagonal of `Σ̂_α`, zero on pruned components.
    pub alpha_var: DVector<f64>,
    pub gamma_inv_mean: DVector<f64>,
    pub gamma_mean: DVector<f64>,
    pub eta_mean: DVector<f64>,
    pub lambda_mean: f64,
    pub active: Vec<bool>,
    posterior: Option<GaussianPosterior>,
}

impl PosteriorState {
    pub fn num_components(&self) -> usize {
        self.active.len()
    }

    pub fn active_indices(&self) -> Vec<usize> {
        (0..self.active.len()).filter(|&l| self.active[l]).collect()
    }

    pub fn num_active(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    /// `⟨|α_l|²⟩` under `q(α)`.
    pub fn alpha_second_moment(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.alpha_mean.len(),
            self.alpha_mean
                .iter()
                .zip(self.alpha_var.iter())
                .map(|(m, v)| m.norm_sqr() + v),
        )
    }

    /// Full `L×L` covariance `Σ̂_α`, zero in pruned rows and columns.
    /// `None` before the first `update_alpha`.
    pub fn alpha_cov(&self) -> Option<DMatrix<Complex64>> {
        let post = self.posterior.as_ref()?;
        let idx = self.active_indices();
        let reduced = post.covariance();
        let l = self.num_components();
        let mut full = DMatrix::zeros(l, l);
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                full[(a, b)] = reduced[(i, j)];
            }
        }
        Some(full)
    }

    /// `tr(Φ Σ̂_α Φᴴ)` from the last `update_alpha`.
    pub fn fit_trace(&self) -> f64 {
        self.posterior.as_ref().map_or(0.0, |p| p.fit_trace)
    }

    fn deactivate(&mut self, l: usize) {
        self.active[l] = false;
        self.alpha_mean[l] = Complex64::new(0.0, 0.0);
        self.alpha_var[l] = 0.0;
    }
}

fn two_layer_eta(config: &EstimatorConfig, num_pilots: usize) -> Option<f64> {
    match config.layers {
        PriorLayers::TwoLayer { eta } => Some(eta.unwrap_or(num_pilots as f64)),
        PriorLayers::ThreeLayer { .. } => None,
    }
}

/// Initial iterate: `⟨λ⟩ = M/‖y‖²`, `⟨γ_l⁻¹⟩ = 1/L`, all components
/// active. For the two-layer prior `⟨η_l⟩` is the fixed `η` (default `M`);
/// for the three-layer prior one `η` update is run from
/// `⟨γ_l⟩ := 1/⟨γ_l⁻¹⟩`.
pub fn vmp_init(y: &DVector<Complex64>, num_components: usize, config: &EstimatorConfig) -> Result<PosteriorState> {
    let m = y.len();
    if m == 0 || num_components == 0 {
        return Err(Error::Argument(format!(
            "VMP needs M >= 1 and L >= 1, got M = {m}, L = {num_components}"
        )));
    }
    config.validate(num_components)?;
    let sample_var = y.norm_squared() / m as f64;
    if !(sample_var > 0.0 && sample_var.is_finite()) {
        return Err(Error::Initialization(format!(
            "sample variance of y is {sample_var}"
        )));
    }
    let l = num_components;
    let gamma_inv = 1.0 / l as f64;
    let mut state = PosteriorState {
        alpha_mean: DVector::zeros(l),
        alpha_var: DVector::zeros(l),
        gamma_inv_mean: DVector::from_element(l, gamma_inv),
        gamma_mean: DVector::from_element(l, 1.0 / gamma_inv),
        eta_mean: DVector::from_element(l, two_layer_eta(config, m).unwrap_or(1.0)),
        lambda_mean: 1.0 / sample_var,
        active: vec![true; l],
        posterior: None,
    };
    update_eta(&mut state, config);
    Ok(state)
}

/// Refreshes `q(α)` on the active set.
pub fn update_alpha(state: &mut PosteriorState, model: &LinearModel) -> Result<()> {
    update_alpha_with(state, model, SolveRoute::Auto)
}

pub fn update_alpha_with(state: &mut PosteriorState, model: &LinearModel, route: SolveRoute) -> Result<()> {
    if model.num_columns() != state.num_components() {
        return Err(Error::Argument(format!(
            "dictionary with {} columns does not match state with {} components",
            model.num_columns(),
            state.num_components()
        )));
    }
    let idx = state.active_indices();
    let precision: Vec<f64> = idx.iter().map(|&l| state.gamma_inv_mean[l]).collect();
    let post = model.solve(&idx, state.lambda_mean, &precision, route)?;
    for (i, &l) in idx.iter().enumerate() {
        state.alpha_mean[l] = post.mean[i];
        state.alpha_var[l] = post.cov_diag[i];
    }
    state.posterior = Some(post);
    Ok(())
}

/// Refreshes `q(γ)`, pruning components whose inverse-variance moment
/// exceeds `config.prune_threshold` or whose GIG factor collapses.
pub fn update_gamma(state: &mut PosteriorState, config: &EstimatorConfig) -> Result<()> {
    let order = config.epsilon - 1.0;
    for l in state.active_indices() {
        let second = state.alpha_mean[l].norm_sqr() + state.alpha_var[l];
        let params = GigParams::new(order, state.eta_mean[l], second)?;
        let moments = gig_moment(&params, -1.0).and_then(|inv| Ok((inv, gig_moment(&params, 1.0)?)));
        match moments {
            Ok((inv, mean)) if inv <= config.prune_threshold => {
                state.gamma_inv_mean[l] = inv;
                state.gamma_mean[l] = mean;
            }
            Ok((inv, mean)) => {
                state.gamma_inv_mean[l] = inv;
                state.gamma_mean[l] = mean;
                state.deactivate(l);
            }
            Err(Error::ComponentCollapse(_)) => state.deactivate(l),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Refreshes `q(η)`; a no-op for the two-layer prior.
pub fn update_eta(state: &mut PosteriorState, config: &EstimatorConfig) {
    if let PriorLayers::ThreeLayer { a, b } = &config.layers {
        for l in state.active_indices() {
            state.eta_mean[l] = (config.epsilon + a.value(l)) / (state.gamma_mean[l] + b.value(l));
        }
    }
}

/// Expected squared residual `⟨‖y - Φα‖²⟩ = ‖y - Φα̂‖² + tr(ΦΣ̂Φᴴ)`.
pub fn expected_residual(state: &PosteriorState, model: &LinearModel) -> f64 {
    (model.y() - model.phi() * &state.alpha_mean).norm_squared() + state.fit_trace()
}

/// Refreshes `q(λ)`, capped at `config.lambda_cap`.
pub fn update_lambda(state: &mut PosteriorState, model: &LinearModel, config: &EstimatorConfig) {
    let e = expected_residual(state, model);
    let lambda = (model.num_rows() as f64 + config.c) / (e + config.d);
    state.lambda_mean = if lambda.is_finite() {
        lambda.min(config.lambda_cap)
    } else {
        config.lambda_cap
    };
}

/// Relative change `‖a - b‖ / max(‖b‖, 1e-12)`.
pub(crate) fn relative_change(new: &DVector<Complex64>, old: &DVector<Complex64>) -> f64 {
    (new - old).norm() / old.norm().max(1e-12)
}

/// Runs VMP to convergence and reconstructs the channel on the rows of
/// `dict_full`.
///
/// All-zero observations short-circuit to the zero estimate, since the
/// noise precision cannot be initialised from them.
pub fn run_vmp(
    y: &DVector<Complex64>,
    dict_pilots: &Dictionary,
    dict_full: &Dictionary,
    config: &EstimatorConfig,
) -> Result<EstimateReport> {
    let (_, report) = run_vmp_with_state(y, dict_pilots, dict_full, config)?;
    Ok(report)
}

/// As [`run_vmp`], also returning the final iterate (`None` for zero data).
pub fn run_vmp_with_state(
    y: &DVector<Complex64>,
    dict_pilots: &Dictionary,
    dict_full: &Dictionary,
    config: &EstimatorConfig,
) -> Result<(Option<PosteriorState>, EstimateReport)> {
    let phi = dict_pilots.matrix();
    let l = phi.ncols();
    if dict_full.ncols() != l || phi.nrows() != y.len() {
        return Err(Error::Argument("dictionary dimensions do not match the data".into()));
    }
    if y.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        config.validate(l)?;
        return Ok((None, EstimateReport::zero(l, dict_full.nrows(), config.lambda_cap)));
    }
    let mut state = vmp_init(y, l, config)?;
    let model = LinearModel::new(phi.clone(), y.clone())?;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        let previous = state.alpha_mean.clone();
        update_alpha(&mut state, &model)?;
        update_gamma(&mut state, config)?;
        update_eta(&mut state, config);
        update_lambda(&mut state, &model, config);
        let change = relative_change(&state.alpha_mean, &previous);
        if !change.is_finite() {
            return Err(Error::Numerical(format!("non-finite update at iteration {iterations}")));
        }
        history.push(change);
        if change < config.tol {
            converged = true;
            break;
        }
    }
    let report = EstimateReport {
        h_hat: dict_full.matrix() * &state.alpha_mean,
        alpha_hat: state.alpha_mean.clone(),
        iterations_used: iterations,
        converged,
        residual_history: history,
        lambda_hat: state.lambda_mean,
    };
    Ok((Some(state), report))
}
