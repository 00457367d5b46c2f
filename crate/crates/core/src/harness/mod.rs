//! Monte Carlo experiments: configuration, the seeded parallel driver and
//! CSV output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{ExperimentConfig, GridPoint, Scenario};
pub use output::{aggregate_path, write_csv};
pub use run::{
    aggregate, compute_nmse, draw_trial, run_estimator, run_experiment, trial_rng, Aggregate, ExperimentResults,
    PointSetup, TrialData, TrialResult,
};
