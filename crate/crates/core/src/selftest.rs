//! Quick numerical self checks against independent references, run by the
//! `selftest` subcommand. Each check finishes in well under a second.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{sample_channel, ChannelParams};
use crate::dictionary::{build_delay_grid, build_dictionary, equispaced_pilots, DictionaryRows};
use crate::estimators::{
    estimate_lasso, lasso::soft_threshold, run_vmp, significant_support, solve_gaussian, LassoControls, SolveRoute,
};
use crate::model::{log_prior_2l, EstimatorConfig};
use crate::quad::log_integral_exp;
use crate::specfun::{gig_moment, log_bessel_k, GigParams};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, limit: f64) -> Check {
    Check {
        name,
        passed: worst <= limit,
        detail: format!("worst {worst:.3e} (limit {limit:.0e})"),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn half_order_bessel() -> Check {
    let mut worst = 0.0f64;
    for i in 0..=200 {
        let z = 0.01 * 10f64.powf(4.0 * i as f64 / 200.0);
        let want = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp();
        worst = match log_bessel_k(0.5, z) {
            Ok(v) => worst.max(rel(v.exp(), want)),
            Err(_) => f64::INFINITY,
        };
    }
    check("bessel K_1/2 closed form", worst, 1e-10)
}

fn bessel_integral_representation() -> Check {
    // K_ν(x) = ½ ∫ exp(-x cosh t + νt) dt over the real line.
    let mut worst = 0.0f64;
    for &nu in &[0.0, 0.3, 1.0, 2.5, 7.0, 20.0] {
        for &x in &[1e-3, 0.5, 2.0, 9.0, 60.0] {
            let reference = log_integral_exp(|t| -x * t.cosh() + nu * t, 1e-14).map(|v| v - 2f64.ln());
            let err = match (log_bessel_k(nu, x), reference) {
                (Ok(a), Ok(b)) => (a - b).abs(),
                _ => f64::INFINITY,
            };
            worst = worst.max(err);
        }
    }
    check("bessel K integral representation (log abs)", worst, 1e-10)
}

fn gig_moment_quadrature() -> Check {
    let mut worst = 0.0f64;
    for &p in &[-1.0, -0.5, 0.5, 1.0] {
        for &rate in &[1e-3, 1.0, 1e3] {
            for &inv in &[1e-6, 1.0, 1e2] {
                let log_mass = |k: f64| log_integral_exp(|t| k * t - rate * t.exp() - inv * (-t).exp(), 1e-14);
                for &n in &[-1.0, 1.0] {
                    let reference = log_mass(p + n).and_then(|a| Ok((a - log_mass(p)?).exp()));
                    let got = GigParams::new(p, rate, inv).and_then(|g| gig_moment(&g, n));
                    worst = worst.max(match (got, reference) {
                        (Ok(a), Ok(b)) => rel(a, b),
                        _ => f64::INFINITY,
                    });
                }
            }
        }
    }
    check("GIG moments vs quadrature", worst, 1e-8)
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn posterior_dense_solve() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for &(m, k) in &[(8, 12), (30, 20), (50, 80)] {
        let phi = random_matrix(&mut rng, m, k);
        let y = DVector::from_fn(m, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let v: Vec<f64> = (0..k).map(|_| 10f64.powf(rng.gen_range(-2.0..2.0))).collect();
        let lambda = 10f64.powf(rng.gen_range(-1.0..2.0));
        let mut a = phi.adjoint() * &phi * Complex64::new(lambda, 0.0);
        for (i, vi) in v.iter().enumerate() {
            a[(i, i)] += vi;
        }
        let lu = a.clone().lu();
        let mean = lu.solve(&(phi.adjoint() * &y * Complex64::new(lambda, 0.0)));
        let cov = lu.try_inverse();
        for route in [SolveRoute::Direct, SolveRoute::Woodbury] {
            worst = worst.max(match (solve_gaussian(&phi, &y, lambda, &v, route), &mean, &cov) {
                (Ok(post), Some(mu), Some(cov)) => {
                    (&post.mean - mu).norm() / mu.norm() + (post.covariance() - cov).norm() / cov.norm()
                }
                _ => f64::INFINITY,
            });
        }
    }
    check("Gaussian posterior vs dense LU solve", worst, 1e-10)
}

fn expected_residual_monte_carlo() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (m, k) = (6, 10);
    let phi = random_matrix(&mut rng, m, k);
    let y = DVector::from_fn(m, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let v: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..5.0)).collect();
    let post = match solve_gaussian(&phi, &y, 3.0, &v, SolveRoute::Auto) {
        Ok(p) => p,
        Err(e) => return Check { name: "expected residual vs Monte Carlo", passed: false, detail: e.to_string() },
    };
    let closed = (&y - &phi * &post.mean).norm_squared() + post.fit_trace;
    let Some(chol) = post.covariance().cholesky() else {
        return Check { name: "expected residual vs Monte Carlo", passed: false, detail: "covariance not PD".into() };
    };
    let l = chol.l();
    let samples = 200_000;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..samples {
        let z = DVector::from_fn(k, |_, _| {
            Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * half
        });
        let alpha = &post.mean + &l * z;
        let r = (&y - &phi * alpha).norm_squared();
        sum += r;
        sum_sq += r * r;
    }
    let n = samples as f64;
    let mean = sum / n;
    let se = ((sum_sq / n - mean * mean) / (n - 1.0)).sqrt();
    let z = (mean - closed).abs() / se;
    Check {
        name: "expected residual vs Monte Carlo",
        passed: z <= 3.0,
        detail: format!("closed {closed:.6}, sampled {mean:.6} ± {se:.1e} ({z:.2} s.e.)"),
    }
}

fn laplace_reduction() -> Check {
    let mut worst = 0.0f64;
    for &eta in &[0.1, 1.0, 25.0] {
        for i in 0..=40 {
            let a = 0.5 * i as f64;
            let want = (2.0 * eta / std::f64::consts::PI).ln() - 2.0 * eta.sqrt() * a;
            worst = worst.max(match log_prior_2l(a, 1.5, eta) {
                Ok(v) => rel(v.exp(), want.exp()),
                Err(_) => f64::INFINITY,
            });
        }
    }
    check("two-layer prior at ε = 3/2 is Laplace", worst, 1e-10)
}

fn lasso_orthonormal() -> Check {
    // Pilots at integer frequencies and delays l/n give the DFT matrix
    // D = √n Q with Q unitary. With β = √n α the objective becomes
    // ‖y - Qβ‖² + (κ/√n)‖β‖₁, whose minimiser is soft(Qᴴy, κ/(2√n)).
    let n = 64;
    let root = (n as f64).sqrt();
    let pattern = equispaced_pilots(n, n, 1.0).expect("valid pattern");
    let grid = build_delay_grid((n - 1) as f64 / n as f64, n).expect("valid grid");
    let dict = build_dictionary(&pattern, &grid, DictionaryRows::PilotsOnly);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let y = DVector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
    let kappa = 2.0 * root;
    let controls = LassoControls { max_iters: 5000, rel_tol: 1e-15 };
    let worst = match estimate_lasso(&y, &dict, &dict, kappa, &controls) {
        Ok(r) => {
            let z = dict.matrix().ad_mul(&y) / Complex64::new(root, 0.0);
            r.alpha_hat
                .iter()
                .zip(z.iter())
                .map(|(a, zl)| (a * root - soft_threshold(*zl, kappa / (2.0 * root))).norm())
                .fold(0.0, f64::max)
        }
        Err(_) => f64::INFINITY,
    };
    check("LASSO on orthonormal dictionary is a soft threshold", worst, 1e-8)
}

fn channel_statistics() -> Check {
    let params = ChannelParams::lte_default();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let draws = 20_000;
    let (mut k_sum, mut k_sq, mut p_sum, mut p_sq) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..draws {
        let ch = sample_channel(&mut rng, &params);
        let (k, p) = (ch.num_paths() as f64, ch.total_power());
        k_sum += k;
        k_sq += k * k;
        p_sum += p;
        p_sq += p * p;
    }
    let n = draws as f64;
    let (k_mean, p_mean) = (k_sum / n, p_sum / n);
    let k_se = ((k_sq / n - k_mean * k_mean) / n).sqrt();
    let p_se = ((p_sq / n - p_mean * p_mean) / n).sqrt();
    let zk = (k_mean - params.mean_paths).abs() / k_se;
    let zp = (p_mean - 1.0).abs() / p_se;
    Check {
        name: "channel path count and power",
        passed: zk <= 4.0 && zp <= 4.0,
        detail: format!("<K> = {k_mean:.4} ({zk:.2} s.e.), E|h|² = {p_mean:.4} ({zp:.2} s.e.)"),
    }
}

fn on_grid_recovery() -> Check {
    let pattern = equispaced_pilots(1200, 100, crate::channel::SUBCARRIER_SPACING).expect("valid pattern");
    let grid = build_delay_grid(ChannelParams::lte_default().tau_max, 200).expect("valid grid");
    let dp = build_dictionary(&pattern, &grid, DictionaryRows::PilotsOnly);
    let df = build_dictionary(&pattern, &grid, DictionaryRows::AllSubcarriers);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let trials = 3;
    let mut ok = 0;
    let mut worst_db = f64::NEG_INFINITY;
    for _ in 0..trials {
        let mut support: Vec<usize> = Vec::new();
        while support.len() < 5 {
            let l = rng.gen_range(0..200);
            if !support.contains(&l) {
                support.push(l);
            }
        }
        support.sort_unstable();
        let mut alpha = DVector::<Complex64>::zeros(200);
        for &l in &support {
            alpha[l] = Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        }
        let y = dp.matrix() * &alpha;
        let h = df.matrix() * &alpha;
        if let Ok(r) = run_vmp(&y, &dp, &df, &EstimatorConfig::three_layer()) {
            let found = significant_support(&r.alpha_hat, 1e-3);
            let db = 10.0 * ((&r.h_hat - &h).norm_squared() / h.norm_squared()).log10();
            worst_db = worst_db.max(db);
            if found == support && db < -60.0 {
                ok += 1;
            }
        }
    }
    Check {
        name: "noiseless on-grid support recovery",
        passed: ok == trials,
        detail: format!("{ok}/{trials} exact, worst NMSE {worst_db:.1} dB"),
    }
}

/// Runs every check in a fixed order.
pub fn run_all() -> Vec<Check> {
    vec![
        half_order_bessel(),
        bessel_integral_representation(),
        gig_moment_quadrature(),
        posterior_dense_solve(),
        expected_residual_monte_carlo(),
        laplace_reduction(),
        lasso_orthonormal(),
        channel_statistics(),
        on_grid_recovery(),
    ]
}
