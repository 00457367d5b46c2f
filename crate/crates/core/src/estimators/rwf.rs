//! Robust Wiener filter: LMMSE interpolation designed for a uniform
//! power-delay profile on `[0, τ_max]`.
//!
//! The assumed frequency correlation is
//! `R(Δf) = (1 - exp(-j2πΔf τ_max)) / (j2πΔf τ_max)`, with `R(0) = 1`, and
//! the estimate is `ĥ = R_{all,P} (R_{P,P} + I/snr)⁻¹ y`.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::dictionary::PilotPattern;
use crate::error::{Error, Result};
use crate::estimators::EstimateReport;

/// Correlation between subcarriers separated by `delta_f` under a uniform
/// delay profile of width `tau_max`.
pub fn uniform_pdp_correlation(delta_f: f64, tau_max: f64) -> Complex64 {
    let x = 2.0 * std::f64::consts::PI * delta_f * tau_max;
    if x.abs() < 1e-8 {
        // Series of (1 - e^{-jx})/(jx) about 0.
        return Complex64::new(1.0 - x * x / 6.0, -x / 2.0);
    }
    let jx = Complex64::new(0.0, x);
    (Complex64::new(1.0, 0.0) - (-jx).exp()) / jx
}

pub fn estimate_rwf(
    y: &DVector<Complex64>,
    pattern: &PilotPattern,
    num_subcarriers: usize,
    design_snr: f64,
    tau_max: f64,
) -> Result<EstimateReport> {
    if !(design_snr > 0.0) {
        return Err(Error::Argument(format!("design SNR must be > 0, got {design_snr}")));
    }
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::Argument(format!("tau_max must be > 0, got {tau_max}")));
    }
    if y.len() != pattern.num_pilots() || num_subcarriers != pattern.num_subcarriers() {
        return Err(Error::Argument("observation does not match the pilot pattern".into()));
    }
    let pilots = pattern.pilot_frequencies();
    let all = pattern.all_frequencies();
    let mut r_pp = DMatrix::from_fn(pilots.len(), pilots.len(), |i, j| {
        uniform_pdp_correlation(pilots[i] - pilots[j], tau_max)
    });
    let loading = if design_snr.is_infinite() { 0.0 } else { 1.0 / design_snr };
    for i in 0..pilots.len() {
        r_pp[(i, i)] += loading;
    }
    let chol = Cholesky::new(r_pp).ok_or_else(|| {
        Error::Numerical("regularised pilot correlation matrix is singular".into())
    })?;
    let weights = chol.solve(y);
    let r_ap = DMatrix::from_fn(all.len(), pilots.len(), |i, j| uniform_pdp_correlation(all[i] - pilots[j], tau_max));
    Ok(EstimateReport {
        alpha_hat: DVector::zeros(0),
        h_hat: r_ap * weights,
        iterations_used: 1,
        converged: true,
        residual_history: Vec::new(),
        lambda_hat: design_snr,
    })
}
