//! Reference implementations the library is checked against. None of them
//! call into the crate's numerical code.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// 15-point Kronrod nodes on [-1, 1] (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// 7-point Gauss weights for nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss–Kronrod 7/15 panel: (Kronrod estimate, |Kronrod - Gauss|).
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod on `[a, b]`, bisecting the worst panel until the
/// summed error estimate is below `rel_tol · |I|` (or `abs_floor`).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let abs_floor = 1e-300;
    let mut panels = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..20_000 {
        let total: f64 = panels.iter().map(|p| p.2 .0).sum();
        let err: f64 = panels.iter().map(|p| p.2 .1).sum();
        if err <= (rel_tol * total.abs()).max(abs_floor) {
            return total;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.partial_cmp(&y.1 .2 .1).unwrap())
            .unwrap();
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        panels.push((lo, mid, gk15(&f, lo, mid)));
        panels.push((mid, hi, gk15(&f, mid, hi)));
    }
    panic!("adaptive quadrature did not converge on [{a}, {b}]");
}

/// `ln ∫_0^∞ x^(k-1) exp(-r x - s/x) dx` by substituting `x = e^t`, scaling
/// by the peak of the concave log-integrand and integrating where it lies
/// within 50 log-units of the peak.
pub fn log_gig_mass(k: f64, r: f64, s: f64) -> f64 {
    let g = |t: f64| k * t - r * t.exp() - s * (-t).exp();
    // g is concave; find its maximum by bisection on g'.
    let dg = |t: f64| k - r * t.exp() + s * (-t).exp();
    let (mut lo, mut hi) = (-800.0, 800.0);
    while dg(lo) <= 0.0 {
        lo *= 2.0;
    }
    while dg(hi) >= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dg(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t0 = 0.5 * (lo + hi);
    let peak = g(t0);
    let edge = |dir: f64| {
        let mut step = 1e-3;
        while g(t0 + dir * step) > peak - 50.0 {
            step *= 1.5;
        }
        t0 + dir * step
    };
    let (a, b) = (edge(-1.0), edge(1.0));
    // Split at the peak so each side is monotone.
    let f = |t: f64| (g(t) - peak).exp();
    peak + (integrate(f, a, t0, 1e-14) + integrate(f, t0, b, 1e-14)).ln()
}

/// `⟨γ^n⟩` of the GIG density `∝ γ^(p-1) exp(-rate γ - inv/γ)` by quadrature.
pub fn gig_moment_quadrature(p: f64, rate: f64, inv: f64, n: f64) -> f64 {
    (log_gig_mass(p + n, rate, inv) - log_gig_mass(p, rate, inv)).exp()
}

/// `K_ν(x) = ∫_0^∞ exp(-x cosh t) cosh(νt) dt`.
pub fn bessel_k_quadrature(nu: f64, x: f64) -> f64 {
    // Truncate where the integrand is below 1e-40 of its value at 0.
    let mut t_max: f64 = 1.0;
    while x * (t_max.cosh() - 1.0) - nu.abs() * t_max < 92.0 {
        t_max *= 1.25;
    }
    integrate(|t| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh(), 0.0, t_max, 1e-14) * (-x).exp()
}

pub fn random_complex_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_complex_vector(rng: &mut ChaCha8Rng, m: usize) -> DVector<Complex64> {
    DVector::from_fn(m, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Gaussian elimination with partial pivoting; returns `A⁻¹ B`.
pub fn dense_solve(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut b = b.clone();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[(i, col)].norm().partial_cmp(&a[(j, col)].norm()).unwrap()).unwrap();
        a.swap_rows(col, pivot);
        b.swap_rows(col, pivot);
        let d = a[(col, col)];
        assert!(d.norm() > 0.0, "singular matrix");
        for row in col + 1..n {
            let factor = a[(row, col)] / d;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = a[(col, k)];
                a[(row, k)] -= factor * v;
            }
            for k in 0..b.ncols() {
                let v = b[(col, k)];
                b[(row, k)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        for k in 0..b.ncols() {
            let mut s = b[(col, k)];
            for j in col + 1..n {
                s -= a[(col, j)] * b[(j, k)];
            }
            b[(col, k)] = s / a[(col, col)];
        }
    }
    b
}

/// Exact posterior `(μ, Σ)` of `y = Φα + w` with `α ~ CN(0, V⁻¹)` and
/// `w ~ CN(0, λ⁻¹I)`, from the normal equations.
pub fn posterior_oracle(
    phi: &DMatrix<Complex64>,
    y: &DVector<Complex64>,
    lambda: f64,
    precision: &[f64],
) -> (DVector<Complex64>, DMatrix<Complex64>) {
    let k = phi.ncols();
    let mut a = phi.adjoint() * phi * Complex64::new(lambda, 0.0);
    for (i, v) in precision.iter().enumerate() {
        a[(i, i)] += v;
    }
    let cov = dense_solve(&a, &DMatrix::identity(k, k));
    let mean = &cov * (phi.adjoint() * y) * Complex64::new(lambda, 0.0);
    (mean, cov)
}

/// Sample mean and standard error of `‖y - Φα‖²` with `α ~ CN(μ, Σ)`.
pub fn residual_monte_carlo(
    phi: &DMatrix<Complex64>,
    y: &DVector<Complex64>,
    mean: &DVector<Complex64>,
    cov: &DMatrix<Complex64>,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let l = cov.clone().cholesky().expect("covariance is positive definite").l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Residual of the mean and the map from standard normals to residual.
    let r0 = y - phi * mean;
    let b = phi * l;
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let k = cov.nrows();
    let mut z = DVector::<Complex64>::zeros(k);
    for _ in 0..samples {
        for zi in z.iter_mut() {
            *zi = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * half;
        }
        let r = (&r0 - &b * &z).norm_squared();
        sum += r;
        sum_sq += r * r;
    }
    let n = samples as f64;
    let m = sum / n;
    (m, ((sum_sq / n - m * m) / (n - 1.0)).sqrt())
}

/// Cyclic coordinate descent for `min ‖y - Φα‖² + κ‖α‖₁`, run until no
/// coordinate moves by more than `1e-15`.
pub fn lasso_coordinate_descent(phi: &DMatrix<Complex64>, y: &DVector<Complex64>, kappa: f64) -> DVector<Complex64> {
    let l = phi.ncols();
    let mut alpha = DVector::<Complex64>::zeros(l);
    let mut r = y.clone();
    for _ in 0..1_000_000 {
        let mut moved = 0.0f64;
        for k in 0..l {
            let col = phi.column(k);
            let norm2 = col.norm_squared();
            let z = col.dotc(&r) + alpha[k] * norm2;
            let mag = z.norm();
            let new = if mag <= kappa / 2.0 { Complex64::new(0.0, 0.0) } else { z * ((mag - kappa / 2.0) / mag / norm2) };
            let delta = new - alpha[k];
            if delta != Complex64::new(0.0, 0.0) {
                r -= col * delta;
                alpha[k] = new;
                moved = moved.max(delta.norm());
            }
        }
        if moved < 1e-15 {
            return alpha;
        }
    }
    alpha
}

pub fn lasso_objective(phi: &DMatrix<Complex64>, y: &DVector<Complex64>, alpha: &DVector<Complex64>, kappa: f64) -> f64 {
    (y - phi * alpha).norm_squared() + kappa * alpha.iter().map(|a| a.norm()).sum::<f64>()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
