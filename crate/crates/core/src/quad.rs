//! Log-domain integration of `exp(g(t))` over the real line.
//!
//! Intended for integrands obtained from a positive half-line integral after
//! the substitution `x = e^t`, which turns algebraic and exponential decay
//! into exponential and double-exponential decay. For such smooth integrands
//! the trapezoidal rule converges geometrically, so step halving until two
//! successive sums agree is both simple and accurate.

use crate::error::{Error, Result};

/// Window scanned for the integrand's support.
const SCAN_LIMIT: f64 = 745.0;
const SCAN_STEP: f64 = 0.25;
/// Log-drop below the peak at which the integrand is treated as zero.
const LOG_CUTOFF: f64 = 60.0;
const MAX_HALVINGS: usize = 14;

/// Returns `ln ∫ exp(g(t)) dt` to relative accuracy `rel_tol`.
///
/// `g` may return `-∞` where the integrand vanishes, but must not return NaN
/// or `+∞` anywhere in `[-745, 745]`.
pub fn log_integral_exp(g: impl Fn(f64) -> f64, rel_tol: f64) -> Result<f64> {
    let n_scan = (2.0 * SCAN_LIMIT / SCAN_STEP) as usize + 1;
    let mut peak = f64::NEG_INFINITY;
    let mut samples = Vec::with_capacity(n_scan);
    for i in 0..n_scan {
        let t = -SCAN_LIMIT + i as f64 * SCAN_STEP;
        let v = g(t);
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::Numerical(format!(
                "integrand log-value {v} at t = {t}"
            )));
        }
        peak = peak.max(v);
        samples.push(v);
    }
    if peak == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let above = |v: &f64| *v > peak - LOG_CUTOFF;
    let first = samples.iter().position(above).unwrap_or(0);
    let last = samples.iter().rposition(above).unwrap_or(n_scan - 1);
    if first == 0 || last == n_scan - 1 {
        return Err(Error::Numerical(format!(
            "integrand support reaches the scan window edge (peak log-value {peak})"
        )));
    }
    let lo = -SCAN_LIMIT + (first - 1) as f64 * SCAN_STEP;
    let hi = -SCAN_LIMIT + (last + 1) as f64 * SCAN_STEP;

    let f = |t: f64| (g(t) - peak).exp();
    let mut n = ((hi - lo) / SCAN_STEP).ceil().max(8.0) as usize;
    let mut h = (hi - lo) / n as f64;
    let mut sum = 0.5 * (f(lo) + f(hi)) + (1..n).map(|i| f(lo + i as f64 * h)).sum::<f64>();
    let mut estimate = sum * h;
    for _ in 0..MAX_HALVINGS {
        // New midpoints only.
        sum += (0..n).map(|i| f(lo + (i as f64 + 0.5) * h)).sum::<f64>();
        n *= 2;
        h *= 0.5;
        let refined = sum * h;
        let converged = (refined - estimate).abs() <= rel_tol * refined.abs();
        estimate = refined;
        if converged {
            return Ok(peak + estimate.ln());
        }
    }
    Err(Error::Numerical(format!(
        "trapezoidal rule not converged on [{lo}, {hi}] after {MAX_HALVINGS} halvings"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integral() {
        // ∫ exp(-t²/2) dt = sqrt(2π)
        let got = log_integral_exp(|t| -0.5 * t * t, 1e-13).unwrap();
        let want = (2.0 * std::f64::consts::PI).sqrt().ln();
        assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn gamma_function_via_log_substitution() {
        // Γ(3.5) = ∫ x^{2.5} e^{-x} dx, x = e^t
        let got = log_integral_exp(|t| 3.5 * t - t.exp(), 1e-13).unwrap();
        assert!((got - libm::lgamma(3.5)).abs() < 1e-12);
    }

    #[test]
    fn slow_tail_is_reported() {
        assert!(log_integral_exp(|t| -1e-3 * t.abs(), 1e-10).is_err());
    }
}
