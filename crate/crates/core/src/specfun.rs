//! Modified Bessel functions of the second kind in the log domain and
//! closed-form moments of the generalized inverse Gaussian distribution.
//!
//! `K_ν(x)` is evaluated for a fractional order `μ ∈ [-1/2, 1/2]` by Temme's
//! series (`x ≤ 2`) or Steed's continued fraction (`x > 2`), and then lifted
//! to the requested order by forward recurrence on the ratio
//! `K_{ν+1}/K_ν`. Only logarithms and ratios are ever carried, so neither
//! `K_50(1e-8)` nor `K_0(700)` over- or underflows.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const MAX_SERIES_TERMS: usize = 10_000;

/// Below this argument Temme's series is used, above it Steed's CF2.
const TEMME_MAX_ARG: f64 = 2.0;

/// Bessel arguments below this use the power-law limits of `K_ν`.
pub const SMALL_ARG: f64 = 1e-12;

/// Taylor coefficients of `1/Γ(1+z)` about `z = 0`.
const RGAMMA1P: [f64; 27] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_9,
    -0.042_002_635_034_095_24,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_34,
    -0.009_621_971_527_876_974,
    0.007_218_943_246_663_1,
    -0.001_165_167_591_859_065,
    -0.000_215_241_674_114_951,
    0.000_128_050_282_388_116_2,
    -2.013_485_478_078_824e-5,
    -1.250_493_482_142_671e-6,
    1.133_027_231_981_696e-6,
    -2.056_338_416_977_607e-7,
    6.116_095_104_481_416e-9,
    5.002_007_644_469_223e-9,
    -1.181_274_570_487_02e-9,
    1.043_426_711_691_1e-10,
    7.782_263_439_905_071e-12,
    -3.696_805_618_642_206e-12,
    5.100_370_287_454_476e-13,
    -2.058_326_053_566_507e-14,
    -5.348_122_539_423_018e-15,
    1.226_778_628_238_261e-15,
    -1.181_259_301_697_459e-16,
    1.186_692_254_751_6e-18,
];

/// Temme's auxiliary gamma quantities for `|μ| ≤ 1/2`:
/// `(gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ))`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let even = RGAMMA1P
        .iter()
        .step_by(2)
        .rev()
        .fold(0.0, |acc, &c| acc * mu2 + c);
    let odd = RGAMMA1P
        .iter()
        .skip(1)
        .step_by(2)
        .rev()
        .fold(0.0, |acc, &c| acc * mu2 + c);
    let gam1 = -odd;
    let gam2 = even;
    (gam1, gam2, even + mu * odd, even - mu * odd)
}

/// `(ln K_μ(x), K_{μ+1}(x)/K_μ(x))` for `|μ| ≤ 1/2`, `0 < x ≤ 2`.
fn temme_series(mu: f64, x: f64) -> Result<(f64, f64)> {
    let x2 = 0.5 * x;
    let pimu = std::f64::consts::PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mut converged = false;
    for i in 1..MAX_SERIES_TERMS {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu * mu);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Temme series for K_{mu}({x}) did not converge"
        )));
    }
    Ok((sum.ln(), sum1 / sum / x2))
}

/// `(ln K_μ(x), K_{μ+1}(x)/K_μ(x))` for `|μ| ≤ 1/2`, `x > 2`, by Steed's
/// method on the continued fraction for `K_{μ+1}/K_μ`.
fn steed_cf2(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..MAX_SERIES_TERMS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "continued fraction for K_{mu}({x}) did not converge"
        )));
    }
    let h = a1 * h;
    let log_k = 0.5 * (std::f64::consts::PI / (2.0 * x)).ln() - x - s.ln();
    Ok((log_k, (mu + x + 0.5 - h) / x))
}

fn check_args(order: f64, arg: f64) -> Result<()> {
    if !order.is_finite() || !arg.is_finite() {
        return Err(Error::Domain(format!(
            "K_{order}({arg}) requires finite order and argument"
        )));
    }
    if arg <= 0.0 {
        return Err(Error::Domain(format!(
            "K_{order}({arg}) requires a positive argument"
        )));
    }
    Ok(())
}

/// Natural logarithm of the modified Bessel function of the second kind,
/// `ln K_order(arg)`.
///
/// Symmetric in the order. Any finite order is accepted; cost grows
/// linearly with `|order|`.
pub fn log_bessel_k(order: f64, arg: f64) -> Result<f64> {
    check_args(order, arg)?;
    let nu = order.abs();
    let steps = (nu + 0.5).floor();
    let mu = nu - steps;
    let (mut log_k, mut ratio) = if arg <= TEMME_MAX_ARG {
        temme_series(mu, arg)?
    } else {
        steed_cf2(mu, arg)?
    };
    let two_over_x = 2.0 / arg;
    for i in 1..=(steps as usize) {
        log_k += ratio.ln();
        ratio = (mu + i as f64) * two_over_x + 1.0 / ratio;
    }
    Ok(log_k)
}

/// Ratio `K_{order+1}(arg) / K_order(arg)`.
pub fn bessel_k_ratio(order: f64, arg: f64) -> Result<f64> {
    Ok((log_bessel_k(order + 1.0, arg)? - log_bessel_k(order, arg)?).exp())
}

/// `ln K_ν(z)` for `z < SMALL_ARG` from the power-law limits of `K_ν`.
///
/// Orders in `(0, 1)` keep both terms of the small-argument expansion, which
/// Temme's series already delivers exactly, so those go through
/// [`log_bessel_k`].
fn log_bessel_k_small_arg(order: f64, z: f64) -> Result<f64> {
    let nu = order.abs();
    if nu == 0.0 {
        Ok((-(0.5 * z).ln() - EULER_GAMMA).ln())
    } else if nu >= 1.0 {
        Ok(libm::lgamma(nu) - std::f64::consts::LN_2 - nu * (0.5 * z).ln())
    } else {
        log_bessel_k(nu, z)
    }
}

/// Parameters of a generalized inverse Gaussian density
/// `q(γ) ∝ γ^{order-1} exp(-rate·γ - inverse_rate/γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigParams {
    pub order: f64,
    /// Coefficient of `γ` in the exponent.
    pub rate: f64,
    /// Coefficient of `1/γ` in the exponent.
    pub inverse_rate: f64,
}

impl GigParams {
    pub fn new(order: f64, rate: f64, inverse_rate: f64) -> Result<Self> {
        let params = GigParams {
            order,
            rate,
            inverse_rate,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.order.is_finite() && self.rate.is_finite() && self.inverse_rate.is_finite()) {
            return Err(Error::Domain(format!("non-finite GIG parameters {self:?}")));
        }
        if self.rate <= 0.0 {
            return Err(Error::Domain(format!("GIG rate must be > 0, got {}", self.rate)));
        }
        if self.inverse_rate < 0.0 {
            return Err(Error::Domain(format!(
                "GIG inverse_rate must be >= 0, got {}",
                self.inverse_rate
            )));
        }
        Ok(())
    }

    /// Bessel argument `2·sqrt(rate·inverse_rate)`.
    pub fn bessel_arg(&self) -> f64 {
        2.0 * (self.rate * self.inverse_rate).sqrt()
    }
}

/// Moment `⟨γ^n⟩` of the GIG distribution, for any real `n`.
///
/// Evaluated as `(inverse_rate/rate)^{n/2} · K_{p+n}(ω) / K_p(ω)` with
/// `ω = 2·sqrt(rate·inverse_rate)`, with the Bessel ratio formed from log
/// values. With `inverse_rate = 0` the density is a Gamma law, which only
/// has the requested moment for `n ≥ 0` and `order > 0`; otherwise
/// [`Error::ComponentCollapse`] is returned, as it is when the moment
/// overflows.
pub fn gig_moment(params: &GigParams, n: f64) -> Result<f64> {
    params.validate()?;
    if !n.is_finite() {
        return Err(Error::Domain(format!("moment order must be finite, got {n}")));
    }
    if n == 0.0 {
        return Ok(1.0);
    }
    let p = params.order;
    if params.inverse_rate == 0.0 {
        if n >= 0.0 && p > 0.0 {
            let log_m = libm::lgamma(p + n) - libm::lgamma(p) - n * params.rate.ln();
            return Ok(log_m.exp());
        }
        return Err(Error::ComponentCollapse(format!(
            "moment {n} of GIG with zero inverse_rate and order {p}"
        )));
    }
    let omega = params.bessel_arg();
    let log_scale = 0.5 * n * (params.inverse_rate.ln() - params.rate.ln());
    let log_ratio = if omega < SMALL_ARG {
        log_bessel_k_small_arg(p + n, omega)? - log_bessel_k_small_arg(p, omega)?
    } else {
        log_bessel_k(p + n, omega)? - log_bessel_k(p, omega)?
    };
    let moment = (log_scale + log_ratio).exp();
    if !moment.is_finite() || moment <= 0.0 {
        return Err(Error::ComponentCollapse(format!(
            "moment {n} of {params:?} is not representable"
        )));
    }
    Ok(moment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn half_order_is_elementary() {
        let got = log_bessel_k(0.5, 1.0).unwrap();
        let want = (PI / 2.0).sqrt().ln() - 1.0;
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn order_symmetry() {
        assert_eq!(log_bessel_k(-1.0, 2.0).unwrap(), log_bessel_k(1.0, 2.0).unwrap());
        assert_eq!(log_bessel_k(-3.7, 0.3).unwrap(), log_bessel_k(3.7, 0.3).unwrap());
    }

    #[test]
    fn k0_at_one() {
        let got = log_bessel_k(0.0, 1.0).unwrap().exp();
        assert!(close(got, 0.421_024_438_240_708_3, 1e-14), "{got}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(log_bessel_k(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(log_bessel_k(1.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(log_bessel_k(f64::NAN, 1.0), Err(Error::Domain(_))));
        assert!(matches!(log_bessel_k(1.0, f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn extreme_arguments_stay_finite() {
        // K_50(1e-8) ~ 1e450 and K_0(700) ~ 1e-305 in linear scale.
        let big = log_bessel_k(50.0, 1e-8).unwrap();
        let want = libm::lgamma(50.0) - std::f64::consts::LN_2 - 50.0 * (0.5e-8f64).ln();
        assert!(close(big, want, 1e-12), "{big} vs {want}");
        let tiny = log_bessel_k(0.0, 700.0).unwrap();
        assert!(tiny.is_finite() && tiny < -700.0);
    }

    #[test]
    fn temme_gammas_at_zero() {
        let (g1, g2, gp, gm) = temme_gammas(0.0);
        assert!((g1 + EULER_GAMMA).abs() < 1e-15);
        assert_eq!(g2, 1.0);
        assert_eq!(gp, 1.0);
        assert_eq!(gm, 1.0);
    }

    #[test]
    fn zeroth_moment_is_one() {
        let p = GigParams::new(-1.0, 3.0, 0.2).unwrap();
        assert_eq!(gig_moment(&p, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn inverse_moment_matches_bessel_ratio() {
        // K_2(2)/K_1(2) from a 40-digit reference evaluation.
        let p = GigParams::new(-1.0, 1.0, 1.0).unwrap();
        let got = gig_moment(&p, -1.0).unwrap();
        assert!(close(got, 1.814_307_758_763_789_5, 1e-13), "{got}");
    }

    #[test]
    fn half_order_first_moment_is_elementary() {
        // K_{3/2}(z)/K_{1/2}(z) = 1 + 1/z; z = 2.
        let p = GigParams::new(0.5, 1.0, 1.0).unwrap();
        let got = gig_moment(&p, 1.0).unwrap();
        assert!(close(got, 1.5, 1e-14), "{got}");
    }

    #[test]
    fn gamma_limit_without_inverse_rate() {
        let p = GigParams::new(2.5, 2.0, 0.0).unwrap();
        assert!(close(gig_moment(&p, 1.0).unwrap(), 1.25, 1e-13));
        assert!(matches!(
            gig_moment(&p, -1.0),
            Err(Error::ComponentCollapse(_))
        ));
        let q = GigParams::new(-1.0, 2.0, 0.0).unwrap();
        assert!(matches!(gig_moment(&q, 1.0), Err(Error::ComponentCollapse(_))));
    }

    #[test]
    fn small_argument_branch_is_continuous() {
        // Straddle the analytic-limit switch.
        for &order in &[-1.0, 0.5, 2.0, -0.25] {
            for &n in &[-1.0, 1.0] {
                let below = GigParams::new(order, 1.0, (0.99 * SMALL_ARG / 2.0).powi(2)).unwrap();
                let above = GigParams::new(order, 1.0, (1.01 * SMALL_ARG / 2.0).powi(2)).unwrap();
                let a = gig_moment(&below, n).unwrap();
                let b = gig_moment(&above, n).unwrap();
                assert!(a.is_finite() && b.is_finite());
                assert!(close(a, b, 0.1), "order {order} n {n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn invalid_gig_params() {
        assert!(GigParams::new(0.0, 0.0, 1.0).is_err());
        assert!(GigParams::new(0.0, 1.0, -1.0).is_err());
        assert!(GigParams::new(f64::NAN, 1.0, 1.0).is_err());
    }
}
