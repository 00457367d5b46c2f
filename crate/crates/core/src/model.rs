//! Hierarchical prior densities, their penalty terms, and the estimator
//! hyperparameter configuration.
//!
//! Both priors are Gaussian scale mixtures: `α | γ ~ CN(0, γ)` with
//! `γ ~ Ga(ε, η)`. The two-layer model fixes `η`; the three-layer model puts
//! `η ~ Ga(a, b)` on top. All densities are for a scalar complex coefficient
//! and depend on it only through `|α|`.
//!
//! Where a density diverges at the origin (`ε ≤ 1`) the functions return
//! `f64::INFINITY` rather than clamping.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::log_integral_exp;
use crate::specfun::log_bessel_k;

const QUAD_REL_TOL: f64 = 1e-10;

/// A hyperparameter that is either shared by all `L` components or given
/// per component.
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentParam {
    Uniform(f64),
    PerComponent(Vec<f64>),
}

impl ComponentParam {
    pub fn value(&self, l: usize) -> f64 {
        match self {
            ComponentParam::Uniform(v) => *v,
            ComponentParam::PerComponent(vs) => vs[l],
        }
    }

    fn validate(&self, name: &str, len: usize) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match self {
            ComponentParam::Uniform(v) if ok(*v) => Ok(()),
            ComponentParam::PerComponent(vs) if vs.len() != len => Err(Error::Argument(format!(
                "{name} has {} entries, dictionary has {len} columns",
                vs.len()
            ))),
            ComponentParam::PerComponent(vs) if vs.iter().all(|&v| ok(v)) => Ok(()),
            _ => Err(Error::Argument(format!("{name} must be finite and > 0"))),
        }
    }
}

/// Which hierarchical prior the VMP estimator runs with.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorLayers {
    /// Two-layer model with fixed `η_l`. `None` means `η_l = M`, the number
    /// of pilots, resolved when the estimator sees the data.
    TwoLayer { eta: Option<f64> },
    /// Three-layer model with `η_l ~ Ga(a_l, b_l)`.
    ThreeLayer { a: ComponentParam, b: ComponentParam },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    /// Shape `ε` of the Gamma prior on `γ_l`.
    pub epsilon: f64,
    pub layers: PriorLayers,
    /// Shape and rate of the Gamma prior on the noise precision.
    pub c: f64,
    pub d: f64,
    pub max_iters: usize,
    /// Relative change of the coefficient mean that counts as converged.
    pub tol: f64,
    /// Components with `⟨γ_l⁻¹⟩` above this are pruned.
    pub prune_threshold: f64,
    /// Upper bound on `⟨λ⟩`, hit on exact fits.
    pub lambda_cap: f64,
}

impl EstimatorConfig {
    pub fn two_layer() -> Self {
        EstimatorConfig {
            epsilon: 0.0,
            layers: PriorLayers::TwoLayer { eta: None },
            c: 0.0,
            d: 0.0,
            max_iters: 200,
            tol: 1e-6,
            prune_threshold: 1e12,
            lambda_cap: 1e12,
        }
    }

    pub fn three_layer() -> Self {
        EstimatorConfig {
            layers: PriorLayers::ThreeLayer {
                a: ComponentParam::Uniform(1.0),
                b: ComponentParam::Uniform(1e-6),
            },
            ..Self::two_layer()
        }
    }

    pub fn is_three_layer(&self) -> bool {
        matches!(self.layers, PriorLayers::ThreeLayer { .. })
    }

    /// Checks the configuration against a dictionary with `num_columns`
    /// columns.
    pub fn validate(&self, num_columns: usize) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::Argument(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !(self.c >= 0.0 && self.d >= 0.0 && self.c.is_finite() && self.d.is_finite()) {
            return Err(Error::Argument("noise prior c, d must be >= 0".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Argument("max_iters must be > 0".into()));
        }
        for (name, v) in [
            ("tol", self.tol),
            ("prune_threshold", self.prune_threshold),
            ("lambda_cap", self.lambda_cap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Argument(format!("{name} must be finite and > 0")));
            }
        }
        match &self.layers {
            PriorLayers::TwoLayer { eta: Some(eta) } if !(eta.is_finite() && *eta > 0.0) => {
                Err(Error::Argument(format!("eta must be > 0, got {eta}")))
            }
            PriorLayers::TwoLayer { .. } => Ok(()),
            PriorLayers::ThreeLayer { a, b } => {
                a.validate("a", num_columns)?;
                b.validate("b", num_columns)
            }
        }
    }
}

fn check_nonneg(alpha_abs: f64) -> Result<()> {
    if alpha_abs.is_finite() && alpha_abs >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("|alpha| must be finite and >= 0, got {alpha_abs}")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// `ln(|α|^{ε-1} K_{ε-1}(2√η |α|))`, the per-component penalty term.
fn log_kernel_2l(alpha_abs: f64, epsilon: f64, eta: f64) -> Result<f64> {
    let order = epsilon - 1.0;
    if alpha_abs == 0.0 {
        if epsilon <= 1.0 {
            return Ok(f64::INFINITY);
        }
        // |α|^ν K_ν(2√η|α|) → Γ(ν)/2 · η^{-ν/2} as |α| → 0, ν > 0.
        return Ok(libm::lgamma(order) - std::f64::consts::LN_2 - 0.5 * order * eta.ln());
    }
    Ok(order * alpha_abs.ln() + log_bessel_k(order, 2.0 * eta.sqrt() * alpha_abs)?)
}

/// Log-density of the two-layer prior for a complex coefficient of modulus
/// `alpha_abs`:
/// `2/(π Γ(ε)) η^{(ε+1)/2} |α|^{ε-1} K_{ε-1}(2√η|α|)`.
///
/// `ε = 3/2` gives the complex Laplace density `2η/π · exp(-2√η|α|)`.
pub fn log_prior_2l(alpha_abs: f64, epsilon: f64, eta: f64) -> Result<f64> {
    check_nonneg(alpha_abs)?;
    check_positive("epsilon", epsilon)?;
    check_positive("eta", eta)?;
    let log_norm = (2.0 / PI).ln() - libm::lgamma(epsilon) + 0.5 * (epsilon + 1.0) * eta.ln();
    Ok(log_norm + log_kernel_2l(alpha_abs, epsilon, eta)?)
}

/// Penalty `Q(α; ε, η) = Σ_l ln(|α_l|^{ε-1} K_{ε-1}(2√η_l |α_l|))`.
///
/// `Q` is stored with this sign, which makes it the log-prior up to a
/// constant. The MAP objective `‖y - Φα‖² + λ⁻¹(-Q)` therefore uses `-Q`;
/// for `ε = 3/2` and uniform `η` that is `2√η‖α‖₁` plus a constant, the
/// LASSO penalty.
pub fn penalty_2l(alpha_abs: &[f64], epsilon: f64, eta: &[f64]) -> Result<f64> {
    if alpha_abs.len() != eta.len() {
        return Err(Error::Argument(format!(
            "penalty over {} coefficients with {} eta values",
            alpha_abs.len(),
            eta.len()
        )));
    }
    check_positive("epsilon", epsilon)?;
    let mut total = 0.0;
    for (&a, &e) in alpha_abs.iter().zip(eta) {
        check_nonneg(a)?;
        check_positive("eta", e)?;
        total += log_kernel_2l(a, epsilon, e)?;
    }
    Ok(total)
}

/// Log-density of the three-layer prior, `η ~ Ga(a, b)` marginalised.
///
/// Integrating `η` first gives a beta-prime mixing density on `γ`,
/// `Γ(ε+a) b^a / (Γ(ε)Γ(a)) · γ^{ε-1} (γ+b)^{-(ε+a)}`, which is then
/// integrated against `CN(α | 0, γ)` numerically. At `α = 0` with `ε > 1`
/// the integral is closed-form, `a / (π b (ε-1))`.
pub fn log_prior_3l(alpha_abs: f64, epsilon: f64, a: f64, b: f64) -> Result<f64> {
    check_nonneg(alpha_abs)?;
    check_positive("epsilon", epsilon)?;
    check_positive("a", a)?;
    check_positive("b", b)?;
    if alpha_abs == 0.0 {
        if epsilon <= 1.0 {
            return Ok(f64::INFINITY);
        }
        return Ok((a / (PI * b * (epsilon - 1.0))).ln());
    }
    let log_c = libm::lgamma(epsilon + a) + a * b.ln() - libm::lgamma(epsilon) - libm::lgamma(a);
    let r2 = alpha_abs * alpha_abs;
    let g = |t: f64| {
        // ln(γ + b) with γ = e^t, without overflow for large t.
        let log_gamma_plus_b = if t > 0.0 {
            t + (b * (-t).exp()).ln_1p()
        } else {
            b.ln() + (t.exp() / b).ln_1p()
        };
        let decay = r2 * (-t).exp();
        if decay.is_infinite() {
            return f64::NEG_INFINITY;
        }
        (epsilon - 1.0) * t - decay - (epsilon + a) * log_gamma_plus_b
    };
    let log_integral = log_integral_exp(g, QUAD_REL_TOL).map_err(|e| {
        Error::Numerical(format!(
            "3-layer prior at |alpha| = {alpha_abs}, eps = {epsilon}, a = {a}, b = {b}: {e}"
        ))
    })?;
    Ok(log_c - PI.ln() + log_integral)
}

/// Which prior a density sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorFamily {
    TwoLayer { eta: f64 },
    ThreeLayer { a: f64, b: f64 },
}

impl PriorFamily {
    pub fn log_density(&self, alpha_abs: f64, epsilon: f64) -> Result<f64> {
        match *self {
            PriorFamily::TwoLayer { eta } => log_prior_2l(alpha_abs, epsilon, eta),
            PriorFamily::ThreeLayer { a, b } => log_prior_3l(alpha_abs, epsilon, a, b),
        }
    }
}

/// One row of a prior-density sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub alpha_abs: f64,
    pub epsilon: f64,
    pub log_density: f64,
}

/// Evaluates the prior on `num_points` equally spaced moduli in
/// `[0, alpha_max]` for each `ε`.
pub fn prior_sweep(
    family: PriorFamily,
    epsilons: &[f64],
    alpha_max: f64,
    num_points: usize,
) -> Result<Vec<SweepPoint>> {
    if num_points < 2 || !(alpha_max > 0.0) {
        return Err(Error::Argument(
            "sweep needs at least 2 points and alpha_max > 0".into(),
        ));
    }
    let mut rows = Vec::with_capacity(epsilons.len() * num_points);
    for &epsilon in epsilons {
        for i in 0..num_points {
            let alpha_abs = alpha_max * i as f64 / (num_points - 1) as f64;
            rows.push(SweepPoint {
                alpha_abs,
                epsilon,
                log_density: family.log_density(alpha_abs, epsilon)?,
            });
        }
    }
    Ok(rows)
}
