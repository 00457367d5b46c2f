//! Seeded Monte Carlo driver.

use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{observe_pilots, sample_channel, snr_db_to_precision, ChannelParams, ChannelRealization};
use crate::dictionary::{build_delay_grid, build_dictionary, equispaced_pilots, Dictionary, DictionaryRows, PilotPattern};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_lasso, estimate_rvm, estimate_rwf, run_vmp, EstimateReport, EstimatorKind, LassoControls, RvmControls,
};
use crate::harness::config::{ExperimentConfig, GridPoint, Scenario};
use crate::model::EstimatorConfig;

/// `‖ĥ - h‖² / ‖h‖²`. An all-zero `h_true` is reported as a domain error,
/// which the driver turns into a skipped trial.
pub fn compute_nmse(h_hat: &DVector<Complex64>, h_true: &DVector<Complex64>) -> Result<f64> {
    if h_hat.len() != h_true.len() {
        return Err(Error::Argument(format!(
            "estimate has {} entries, channel has {}",
            h_hat.len(),
            h_true.len()
        )));
    }
    let energy = h_true.norm_squared();
    if energy == 0.0 {
        return Err(Error::Domain("true channel is identically zero".into()));
    }
    Ok((h_hat - h_true).norm_squared() / energy)
}

/// Random stream of one trial: ChaCha8 keyed by the master seed, with the
/// stream id `(point_index << 32) | trial`. Streams never overlap, so the
/// draws of a trial do not depend on the other trials, on the estimators or
/// on the execution order.
pub fn trial_rng(master_seed: u64, point_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((point_index as u64) << 32) | (trial as u64 & 0xffff_ffff));
    rng
}

/// Everything an estimator may look at for one operating point.
#[derive(Debug, Clone)]
pub struct PointSetup {
    pub pattern: PilotPattern,
    pub dict_pilots: Dictionary,
    pub dict_full: Dictionary,
    pub tau_max: f64,
}

impl PointSetup {
    pub fn new(num_subcarriers: usize, pilots: usize, num_delays: usize, channel: &ChannelParams) -> Result<Self> {
        let pattern = equispaced_pilots(num_subcarriers, pilots, crate::channel::SUBCARRIER_SPACING)?;
        let grid = build_delay_grid(channel.tau_max, num_delays)?;
        Ok(PointSetup {
            dict_pilots: build_dictionary(&pattern, &grid, DictionaryRows::PilotsOnly),
            dict_full: build_dictionary(&pattern, &grid, DictionaryRows::AllSubcarriers),
            pattern,
            tau_max: channel.tau_max,
        })
    }
}

/// One channel draw and its noisy pilot observation.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub channel: ChannelRealization,
    pub h_true: DVector<Complex64>,
    pub y: DVector<Complex64>,
}

pub fn draw_trial(rng: &mut ChaCha8Rng, params: &ChannelParams, setup: &PointSetup, snr_db: f64) -> Result<TrialData> {
    let channel = sample_channel(rng, params);
    let h_true = channel.frequency_response(&setup.pattern.all_frequencies());
    let h_pilots = DVector::from_iterator(
        setup.pattern.num_pilots(),
        setup.pattern.pilot_indices().iter().map(|&n| h_true[n - 1]),
    );
    let obs = observe_pilots(&setup.pattern, &h_pilots, snr_db_to_precision(snr_db), rng)?;
    Ok(TrialData { channel, h_true, y: obs.y })
}

/// Runs one estimator with the experiment's settings.
pub fn run_estimator(
    kind: EstimatorKind,
    y: &DVector<Complex64>,
    setup: &PointSetup,
    kappa: f64,
    rwf_design_snr_db: f64,
) -> Result<EstimateReport> {
    match kind {
        EstimatorKind::Vmp2l => run_vmp(y, &setup.dict_pilots, &setup.dict_full, &EstimatorConfig::two_layer()),
        EstimatorKind::Vmp3l => run_vmp(y, &setup.dict_pilots, &setup.dict_full, &EstimatorConfig::three_layer()),
        EstimatorKind::Lasso => estimate_lasso(y, &setup.dict_pilots, &setup.dict_full, kappa, &LassoControls::default()),
        EstimatorKind::Rvm => estimate_rvm(y, &setup.dict_pilots, &setup.dict_full, &RvmControls::default()),
        EstimatorKind::Rwf => estimate_rwf(
            y,
            &setup.pattern,
            setup.pattern.num_subcarriers(),
            snr_db_to_precision(rwf_design_snr_db),
            setup.tau_max,
        ),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub scenario: Scenario,
    pub point_index: usize,
    /// SNR in dB or number of pilots, depending on the scenario.
    pub point: f64,
    pub estimator: EstimatorKind,
    pub trial: usize,
    /// NaN when the trial failed or was skipped.
    pub nmse: f64,
    pub converged: bool,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

impl TrialResult {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub scenario: Scenario,
    pub point_index: usize,
    pub point: f64,
    pub estimator: EstimatorKind,
    /// Linear mean over successful trials.
    pub mean_nmse: f64,
    pub mean_nmse_db: f64,
    /// Standard error of `mean_nmse`.
    pub std_error: f64,
    /// All trials, failed ones included.
    pub trials: usize,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentResults {
    /// Sorted by grid point, trial and estimator.
    pub trials: Vec<TrialResult>,
    /// Sorted by grid point and estimator.
    pub aggregates: Vec<Aggregate>,
}

fn run_trial(config: &ExperimentConfig, point_index: usize, point: &GridPoint, setup: &PointSetup, trial: usize) -> Vec<TrialResult> {
    let mut rng = trial_rng(config.master_seed, point_index, trial);
    let row = |estimator, nmse, converged, iterations, wall_time_s, error| TrialResult {
        scenario: config.scenario,
        point_index,
        point: config.point_value(point),
        estimator,
        trial,
        nmse,
        converged,
        iterations,
        wall_time_s,
        error,
    };
    let data = match draw_trial(&mut rng, &config.channel, setup, point.snr_db) {
        Ok(d) if d.h_true.norm_squared() > 0.0 => d,
        Ok(_) => {
            let msg = "channel draw has no paths".to_string();
            return config.estimators.iter().map(|&k| row(k, f64::NAN, false, 0, 0.0, Some(msg.clone()))).collect();
        }
        Err(e) => {
            return config.estimators.iter().map(|&k| row(k, f64::NAN, false, 0, 0.0, Some(e.to_string()))).collect();
        }
    };
    let design = config.rwf_design_snr_db.unwrap_or(point.snr_db);
    config
        .estimators
        .iter()
        .map(|&kind| {
            let start = Instant::now();
            let outcome = run_estimator(kind, &data.y, setup, config.kappa, design)
                .and_then(|report| Ok((compute_nmse(&report.h_hat, &data.h_true)?, report)));
            let elapsed = if config.record_timing { start.elapsed().as_secs_f64() } else { 0.0 };
            match outcome {
                Ok((nmse, _)) if !nmse.is_finite() => {
                    row(kind, f64::NAN, false, 0, elapsed, Some("non-finite NMSE".into()))
                }
                Ok((nmse, report)) => row(kind, nmse, report.converged, report.iterations_used, elapsed, None),
                Err(e) => row(kind, f64::NAN, false, 0, elapsed, Some(e.to_string())),
            }
        })
        .collect()
}

/// Runs every (grid point, trial) pair, in parallel up to
/// `config.workers` threads, and aggregates the results.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults> {
    config.validate()?;
    let grid = config.grid();
    let setups = grid
        .iter()
        .map(|p| PointSetup::new(config.num_subcarriers, p.pilots, config.num_delays, &config.channel))
        .collect::<Result<Vec<_>>>()?;
    let items: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|p| (0..config.trials).map(move |t| (p, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<Vec<TrialResult>> = pool.install(|| {
        items
            .par_iter()
            .map(|&(p, t)| run_trial(config, p, &grid[p], &setups[p], t))
            .collect()
    });
    let mut trials: Vec<TrialResult> = rows.into_iter().flatten().collect();
    trials.sort_by_key(|r| (r.point_index, r.trial, r.estimator));
    let aggregates = aggregate(&trials);
    Ok(ExperimentResults { trials, aggregates })
}

/// Mean NMSE per (grid point, estimator) over the non-failed rows.
pub fn aggregate(results: &[TrialResult]) -> Vec<Aggregate> {
    let mut keys: Vec<(usize, EstimatorKind)> = results.iter().map(|r| (r.point_index, r.estimator)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(point_index, estimator)| {
            let rows: Vec<&TrialResult> = results
                .iter()
                .filter(|r| r.point_index == point_index && r.estimator == estimator)
                .collect();
            let ok: Vec<f64> = rows.iter().filter(|r| !r.failed()).map(|r| r.nmse).collect();
            let n = ok.len() as f64;
            let mean = if ok.is_empty() { f64::NAN } else { ok.iter().sum::<f64>() / n };
            let std_error = if ok.len() < 2 {
                f64::NAN
            } else {
                (ok.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
            };
            Aggregate {
                scenario: rows[0].scenario,
                point_index,
                point: rows[0].point,
                estimator,
                mean_nmse: mean,
                mean_nmse_db: 10.0 * mean.log10(),
                std_error,
                trials: rows.len(),
                failures: rows.len() - ok.len(),
            }
        })
        .collect()
}
