//! Command-line front end: `simulate`, `priors sweep` and `selftest`.
//!
//! Exit codes: 0 on success, 1 on a runtime failure (including failed self
//! checks), 2 on a usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::harness::{run_experiment, write_csv, ExperimentConfig};
use crate::model::{prior_sweep, PriorFamily};
use crate::selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sbl-chanest", version, about = "Sparse Bayesian OFDM channel estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and write raw and aggregate CSV files.
    Simulate(SimulateArgs),
    /// Prior density diagnostics.
    Priors {
        #[command(subcommand)]
        command: PriorsCommand,
    },
    /// Run the built-in numerical self checks.
    Selftest,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// mse_vs_snr, mse_vs_pilots or single_run.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr_db_list: Option<String>,
    /// Comma-separated pilot counts.
    #[arg(long)]
    pilots_list: Option<String>,
    /// Comma-separated estimator names (vmp2l, vmp3l, lasso, rvm, rwf).
    #[arg(long)]
    estimators: Option<String>,
    /// Raw results path; aggregates go to `<stem>.aggregate.csv` beside it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    workers: Option<usize>,
}

impl SimulateArgs {
    fn is_empty(&self) -> bool {
        self.config.is_none()
            && self.scenario.is_none()
            && self.trials.is_none()
            && self.seed.is_none()
            && self.snr_db_list.is_none()
            && self.pilots_list.is_none()
            && self.estimators.is_none()
            && self.out.is_none()
            && self.workers.is_none()
    }

    fn to_config(&self) -> crate::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = [
            ("scenario", self.scenario.clone()),
            ("trials", self.trials.map(|v| v.to_string())),
            ("master_seed", self.seed.map(|v| v.to_string())),
            ("snr_grid_db", self.snr_db_list.clone()),
            ("pilot_grid", self.pilots_list.clone()),
            ("estimators", self.estimators.clone()),
            ("workers", self.workers.map(|v| v.to_string())),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                config.set(key, &v)?;
            }
        }
        if let Some(out) = &self.out {
            config.output_path = out.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    #[value(name = "2l")]
    TwoLayer,
    #[value(name = "3l")]
    ThreeLayer,
}

#[derive(Debug, Subcommand)]
enum PriorsCommand {
    /// Tabulate `ln p(|α|)` over a modulus grid for several ε.
    Sweep {
        #[arg(long, value_enum, default_value = "2l")]
        family: Family,
        /// Comma-separated ε values.
        #[arg(long, default_value = "0.5,1,1.5,2")]
        epsilons: String,
        /// Two-layer rate η.
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        /// Three-layer shape a.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Three-layer rate b.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 3.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn simulate(args: &SimulateArgs) -> i32 {
    if args.is_empty() {
        eprintln!("error: simulate needs --config or at least one override flag\n");
        eprintln!("usage: sbl-chanest simulate [--config FILE] [--scenario S] [--trials N] [--seed N]");
        eprintln!("                            [--snr-db-list L] [--pilots-list L] [--estimators L] [--out PATH]");
        return EXIT_USAGE;
    }
    // An unreadable config file is reported like a malformed one.
    let config = match args.to_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let results = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = write_csv(&results.trials, &results.aggregates, &config.output_path) {
        eprintln!("error: {e}");
        return EXIT_RUNTIME;
    }
    for a in &results.aggregates {
        println!(
            "{} point={} {:<6} mean_nmse={:.4e} ({:.2} dB) failures={}/{}",
            a.scenario, a.point, a.estimator, a.mean_nmse, a.mean_nmse_db, a.failures, a.trials
        );
    }
    EXIT_OK
}

fn priors(cmd: &PriorsCommand) -> i32 {
    let PriorsCommand::Sweep { family, epsilons, eta, a, b, alpha_max, points, out } = cmd;
    let eps: Result<Vec<f64>, _> = epsilons.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let Ok(eps) = eps else {
        eprintln!("error: cannot parse --epsilons '{epsilons}'");
        return EXIT_USAGE;
    };
    let fam = match family {
        Family::TwoLayer => PriorFamily::TwoLayer { eta: *eta },
        Family::ThreeLayer => PriorFamily::ThreeLayer { a: *a, b: *b },
    };
    let rows = match prior_sweep(fam, &eps, *alpha_max, *points) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut text = String::from("alpha_abs,epsilon,log_density\n");
    for r in rows {
        text.push_str(&format!("{},{},{}\n", r.alpha_abs, r.epsilon, r.log_density));
    }
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}", Error::io(path, e));
                return EXIT_RUNTIME;
            }
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    EXIT_OK
}

fn run_selftest() -> i32 {
    let checks = selftest::run_all();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("[{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{} passed, {} failed", checks.len() - failed, failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_RUNTIME
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Priors { command } => priors(command),
        Command::Selftest => run_selftest(),
    }
}
