//! End-to-end acceptance checks. Runs as a plain program so that the
//! per-criterion verdicts always reach the console; exits nonzero if any
//! criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{gig_moment_quadrature, posterior_oracle, random_complex_matrix, random_complex_vector, residual_monte_carlo};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbl_chanest::channel::{sample_channel, ChannelParams, CP_SAMPLES, SAMPLING_TIME, SUBCARRIER_SPACING};
use sbl_chanest::dictionary::{build_delay_grid, build_dictionary, equispaced_pilots, DictionaryRows};
use sbl_chanest::estimators::lasso::soft_threshold;
use sbl_chanest::estimators::vmp::{expected_residual, update_alpha};
use sbl_chanest::estimators::*;
use sbl_chanest::harness::{run_experiment, ExperimentConfig, Scenario, TrialResult};
use sbl_chanest::model::{log_prior_2l, EstimatorConfig};
use sbl_chanest::specfun::{gig_moment, log_bessel_k, GigParams};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn special_functions() -> Verdict {
    let mut worst_gig: f64 = 0.0;
    for &p in &[-1.0, -0.5, 0.5, 1.0] {
        for &rate in &[1e-3, 1.0, 1e3] {
            for &inv in &[1e-6, 1.0, 1e2] {
                for &n in &[-1.0, 1.0] {
                    let got = gig_moment(&GigParams::new(p, rate, inv).unwrap(), n).unwrap();
                    let want = gig_moment_quadrature(p, rate, inv, n);
                    worst_gig = worst_gig.max((got - want).abs() / want);
                }
            }
        }
    }
    let mut worst_half: f64 = 0.0;
    let steps = 2000;
    for i in 0..=steps {
        let z = 0.01 * 1e4f64.powf(i as f64 / steps as f64);
        let k = log_bessel_k(0.5, z).unwrap().exp();
        let closed = (PI / (2.0 * z)).sqrt() * (-z).exp();
        worst_half = worst_half.max((k - closed).abs() / closed);
    }
    verdict(
        worst_gig <= 1e-8 && worst_half <= 1e-10,
        format!("GIG grid max rel err {worst_gig:.1e} (≤ 1e-8), K_1/2 max rel err {worst_half:.1e} (≤ 1e-10)"),
    )
}

fn random_state(rng: &mut ChaCha8Rng, y: &DVector<Complex64>, k: usize) -> PosteriorState {
    let mut state = vmp_init(y, k, &EstimatorConfig::two_layer()).unwrap();
    for l in 0..k {
        state.gamma_inv_mean[l] = 10f64.powf(rng.gen_range(-2.0..2.0));
    }
    state.lambda_mean = 10f64.powf(rng.gen_range(-1.0..2.0));
    state
}

fn gaussian_update() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (m, k) = (rng.gen_range(1..=50), rng.gen_range(1..=80));
        let phi = random_complex_matrix(&mut rng, m, k);
        let y = random_complex_vector(&mut rng, m);
        let mut state = random_state(&mut rng, &y, k);
        let (mean, cov) = posterior_oracle(&phi, &y, state.lambda_mean, state.gamma_inv_mean.as_slice());
        update_alpha(&mut state, &LinearModel::new(phi, y).unwrap()).unwrap();
        let scale = cov.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cov_err = (state.alpha_cov().unwrap() - &cov).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale;
        worst = worst.max((&state.alpha_mean - &mean).norm() / mean.norm()).max(cov_err);
    }
    verdict(worst <= 1e-10, format!("100 instances up to 50x80, max rel err {worst:.1e} (≤ 1e-10)"))
}

fn expected_residual_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_z: f64 = 0.0;
    for case in 0..10u64 {
        let (m, k) = (rng.gen_range(2..=10), rng.gen_range(2..=12));
        let phi = random_complex_matrix(&mut rng, m, k);
        let y = random_complex_vector(&mut rng, m);
        let mut state = random_state(&mut rng, &y, k);
        let (mean, cov) = posterior_oracle(&phi, &y, state.lambda_mean, state.gamma_inv_mean.as_slice());
        let model = LinearModel::new(phi.clone(), y.clone()).unwrap();
        update_alpha(&mut state, &model).unwrap();
        let e = expected_residual(&state, &model);
        let (mc, se) = residual_monte_carlo(&phi, &y, &mean, &cov, 1_000_000, 1000 + case);
        worst_z = worst_z.max((e - mc).abs() / se);
    }
    verdict(worst_z < 3.0, format!("10 instances, 1e6 samples each, max |E - MC| = {worst_z:.2} SE (< 3)"))
}

fn laplace_and_soft_threshold() -> Verdict {
    let mut worst_laplace: f64 = 0.0;
    for &eta in &[0.01, 1.0, 4.0, 100.0] {
        for i in 0..=400 {
            let r = 0.05 * i as f64;
            let closed = 2.0 * eta / PI * (-2.0 * eta.sqrt() * r).exp();
            let got = log_prior_2l(r, 1.5, eta).unwrap().exp();
            worst_laplace = worst_laplace.max((got - closed).abs() / closed);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_lasso: f64 = 0.0;
    for &n in &[16usize, 64, 128] {
        // A DFT dictionary is √n times a unitary matrix, so with β = √n α
        // the problem is the orthonormal one with threshold κ/(2√n).
        let pattern = equispaced_pilots(n, n, SUBCARRIER_SPACING).unwrap();
        let grid = build_delay_grid((n - 1) as f64 / (n as f64 * SUBCARRIER_SPACING), n).unwrap();
        let dict = build_dictionary(&pattern, &grid, DictionaryRows::PilotsOnly);
        let root_n = (n as f64).sqrt();
        for &kappa in &[0.5, 2.0, 2.0 * root_n] {
            let y = random_complex_vector(&mut rng, n) * Complex64::new(2.0, 0.0);
            let report = estimate_lasso(&y, &dict, &dict, kappa, &LassoControls::default()).unwrap();
            let z = dict.matrix().ad_mul(&y) / Complex64::new(root_n, 0.0);
            for l in 0..n {
                let want = soft_threshold(z[l], kappa / (2.0 * root_n)) / root_n;
                worst_lasso = worst_lasso.max((report.alpha_hat[l] - want).norm());
            }
        }
    }
    verdict(
        worst_laplace <= 1e-10 && worst_lasso <= 1e-8,
        format!("Laplace max rel err {worst_laplace:.1e} (≤ 1e-10), LASSO vs soft threshold max err {worst_lasso:.1e} (≤ 1e-8)"),
    )
}

fn exact_recovery() -> Verdict {
    let pattern = equispaced_pilots(1200, 100, SUBCARRIER_SPACING).unwrap();
    let grid = build_delay_grid(CP_SAMPLES * SAMPLING_TIME, 200).unwrap();
    let dp = build_dictionary(&pattern, &grid, DictionaryRows::PilotsOnly);
    let df = build_dictionary(&pattern, &grid, DictionaryRows::AllSubcarriers);
    let config = EstimatorConfig::three_layer();
    let mut successes = 0;
    let mut worst_db = f64::NEG_INFINITY;
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(50_000 + trial);
        let mut support: Vec<usize> = rand::seq::index::sample(&mut rng, 200, 5).into_vec();
        support.sort();
        let mut alpha = DVector::<Complex64>::zeros(200);
        for &l in &support {
            alpha[l] = Complex64::from_polar(rng.gen_range(0.3..1.0), rng.gen_range(0.0..2.0 * PI));
        }
        let y = dp.matrix() * &alpha;
        let h = df.matrix() * &alpha;
        let report = run_vmp(&y, &dp, &df, &config).unwrap();
        let nmse_db = 10.0 * ((&report.h_hat - &h).norm_squared() / h.norm_squared()).log10();
        worst_db = worst_db.max(nmse_db);
        if significant_support(&report.alpha_hat, 1e-3) == support && nmse_db < -60.0 {
            successes += 1;
        }
    }
    verdict(
        successes >= 95,
        format!("{successes}/100 trials with exact support and NMSE < -60 dB (≥ 95), worst NMSE {worst_db:.1} dB"),
    )
}

fn desk_config(trials: usize, pilots: usize, estimators: &str) -> ExperimentConfig {
    let mut config = ExperimentConfig {
        scenario: Scenario::SingleRun,
        trials,
        master_seed: 20_240_615,
        pilots,
        fixed_snr_db: 15.0,
        ..ExperimentConfig::default()
    };
    config.set("estimators", estimators).unwrap();
    config
}

fn nmse_of(rows: &[TrialResult], kind: EstimatorKind) -> Vec<f64> {
    rows.iter().filter(|r| r.estimator == kind && !r.failed()).map(|r| r.nmse).collect()
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Gap `b - a` in units of the unpaired standard error, and of the paired
/// one when both runs saw the same trials.
fn gap_in_se(a: &[f64], b: &[f64]) -> (f64, Option<f64>) {
    let ((ma, sa), (mb, sb)) = (mean_se(a), mean_se(b));
    let unpaired = (mb - ma) / (sa * sa + sb * sb).sqrt();
    let paired = (a.len() == b.len()).then(|| {
        let d: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        let (md, sd) = mean_se(&d);
        md / sd
    });
    (unpaired, paired)
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn ordering() -> Verdict {
    let results = run_experiment(&desk_config(500, 100, "vmp2l,vmp3l,lasso,rwf")).unwrap();
    let best = nmse_of(&results.trials, EstimatorKind::Vmp3l);
    let (m3, _) = mean_se(&best);
    let mut passed = true;
    let mut parts = vec![format!("VMP-3L {:.2} dB", db(m3))];
    for kind in [EstimatorKind::Vmp2l, EstimatorKind::Lasso, EstimatorKind::Rwf] {
        let other = nmse_of(&results.trials, kind);
        let (m, _) = mean_se(&other);
        let (z, paired) = gap_in_se(&best, &other);
        passed &= z > 3.0;
        parts.push(format!("{kind} {:.2} dB gap {z:.1} SE (paired {:.1})", db(m), paired.unwrap_or(f64::NAN)));
    }
    verdict(passed, format!("500 trials at 15 dB, M = 100: {}; each gap > 3 SE", parts.join(", ")))
}

fn pilot_efficiency() -> Verdict {
    let three = run_experiment(&desk_config(300, 100, "vmp3l")).unwrap();
    let two = run_experiment(&desk_config(300, 150, "vmp2l")).unwrap();
    let a = nmse_of(&three.trials, EstimatorKind::Vmp3l);
    let b = nmse_of(&two.trials, EstimatorKind::Vmp2l);
    let ((ma, _), (mb, _)) = (mean_se(&a), mean_se(&b));
    let (z, paired) = gap_in_se(&a, &b);
    verdict(
        ma <= mb && z >= 2.0,
        format!(
            "300 trials at 15 dB: VMP-3L(M=100) {:.2} dB vs VMP-2L(M=150) {:.2} dB, gap {z:.1} SE (paired {:.1}; ≥ 2)",
            db(ma),
            db(mb),
            paired.unwrap_or(f64::NAN)
        ),
    )
}

fn channel_statistics() -> Verdict {
    let params = ChannelParams::lte_default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let draws = 100_000;
    let (mut paths, mut power) = (0usize, 0.0);
    for _ in 0..draws {
        let ch = sample_channel(&mut rng, &params);
        paths += ch.num_paths();
        power += ch.total_power();
    }
    let k = paths as f64 / draws as f64;
    let p = power / draws as f64;
    verdict(
        (k - 10.0).abs() <= 0.05 && (p - 1.0).abs() <= 0.01,
        format!("1e5 draws: <K> = {k:.4} (10 ± 0.05), E[sum |beta|^2] = {p:.4} (1 ± 0.01)"),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "scenario = mse_vs_snr\nsnr_grid_db = 0, 15\ntrials = 6\nmaster_seed = 5\npilots = 60\nestimators = vmp2l, vmp3l, lasso, rvm, rwf\n",
    )
    .unwrap();
    let run = |out: &str, workers: &str| -> Vec<u8> {
        let status = Command::new(env!("CARGO_BIN_EXE_sbl-chanest"))
            .args(["simulate", "--config", "run.cfg", "--workers", workers, "--out", out])
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let workers = (4 * cores).to_string();
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", &workers);
    let rows = a.iter().filter(|&&c| c == b'\n').count() - 1;
    verdict(
        a == b && a == c,
        format!("{rows} raw rows byte-identical across 2 serial runs and a {workers}-worker run"),
    )
}

fn main() {
    let minutes = |m: u64| Some(Duration::from_secs(60 * m));
    let criteria: [(&str, fn() -> Verdict, Option<Duration>); 9] = [
        ("1 special-function oracles", special_functions, minutes(1)),
        ("2 Gaussian update vs dense solve", gaussian_update, minutes(1)),
        ("3 expected residual vs Monte Carlo", expected_residual_identity, minutes(5)),
        ("4 Laplace prior and LASSO soft threshold", laplace_and_soft_threshold, None),
        ("5 exact on-grid recovery", exact_recovery, minutes(5)),
        ("6 estimator ordering at 15 dB", ordering, minutes(30)),
        ("7 pilot efficiency", pilot_efficiency, minutes(30)),
        ("8 channel statistics", channel_statistics, minutes(1)),
        ("9 determinism", determinism, None),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (name, check, budget) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let in_time = budget.map_or(true, |b| elapsed <= b);
        let ok = v.passed && in_time;
        failures += usize::from(!ok);
        let limit = budget.map_or(String::new(), |b| format!(", limit {} s", b.as_secs()));
        println!(
            "[{}] criterion {name}: {} [{:.1} s{limit}{}]",
            if ok { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over time" }
        );
    }
    println!("acceptance: {failures} failed");
    if failures > 0 {
        std::process::exit(1);
    }
}
