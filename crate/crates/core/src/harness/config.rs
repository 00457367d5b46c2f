//! Plain-text experiment configuration.
//!
//! One `key = value` per line, `#` starts a comment, lists are
//! comma-separated. Unknown keys are rejected.
//!
//! ```text
//! scenario = mse_vs_snr
//! snr_grid_db = 0, 5, 10, 15
//! trials = 200
//! estimators = vmp3l, lasso
//! output_path = results/snr.csv
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Sweep the SNR at a fixed number of pilots.
    MseVsSnr,
    /// Sweep the number of pilots at a fixed SNR.
    MseVsPilots,
    /// One operating point (`fixed_snr_db`, `pilots`).
    SingleRun,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::MseVsSnr => "mse_vs_snr",
            Scenario::MseVsPilots => "mse_vs_pilots",
            Scenario::SingleRun => "single_run",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mse_vs_snr" => Ok(Scenario::MseVsSnr),
            "mse_vs_pilots" => Ok(Scenario::MseVsPilots),
            "single_run" => Ok(Scenario::SingleRun),
            other => Err(Error::Config(format!(
                "unknown scenario '{other}' (expected mse_vs_snr, mse_vs_pilots or single_run)"
            ))),
        }
    }
}

/// One operating point of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub snr_db: f64,
    pub pilots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub snr_grid_db: Vec<f64>,
    pub pilot_grid: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub estimators: Vec<EstimatorKind>,
    /// Subcarriers `N`.
    pub num_subcarriers: usize,
    /// Delay-grid size `L`.
    pub num_delays: usize,
    pub channel: ChannelParams,
    pub kappa: f64,
    pub output_path: PathBuf,
    /// Pilots used when the SNR is swept or for a single run.
    pub pilots: usize,
    /// SNR used when the pilots are swept or for a single run.
    pub fixed_snr_db: f64,
    /// RWF design SNR; `None` matches the operating SNR.
    pub rwf_design_snr_db: Option<f64>,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Write measured run times. Off by default so that output files are
    /// reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: Scenario::MseVsSnr,
            snr_grid_db: (0..=8).map(|i| 3.0 * i as f64).collect(),
            pilot_grid: (0..=7).map(|i| 60 + 20 * i).collect(),
            trials: 500,
            master_seed: 1,
            estimators: EstimatorKind::ALL.to_vec(),
            num_subcarriers: 1200,
            num_delays: 200,
            channel: ChannelParams::lte_default(),
            kappa: 2.0,
            output_path: PathBuf::from("results.csv"),
            pilots: 100,
            fixed_snr_db: 15.0,
            rwf_design_snr_db: None,
            workers: 0,
            record_timing: false,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse '{}' for key '{key}'", value.trim())))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!("cannot parse '{other}' as a boolean for key '{key}'"))),
    }
}

impl ExperimentConfig {
    /// Parses config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1)))?;
            config
                .set(key.trim(), value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Sets a single key, as it would appear in a config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = value.parse()?,
            "snr_grid_db" => self.snr_grid_db = parse_list(key, value)?,
            "pilot_grid" => self.pilot_grid = parse_list(key, value)?,
            "trials" => self.trials = parse_value(key, value)?,
            "master_seed" => self.master_seed = parse_value(key, value)?,
            "estimators" => {
                let mut kinds: Vec<EstimatorKind> = parse_list(key, value)?;
                kinds.sort();
                kinds.dedup();
                self.estimators = kinds;
            }
            "N" => self.num_subcarriers = parse_value(key, value)?,
            "L" => self.num_delays = parse_value(key, value)?,
            "kappa" => self.kappa = parse_value(key, value)?,
            "output_path" => self.output_path = PathBuf::from(value.trim()),
            "pilots" => self.pilots = parse_value(key, value)?,
            "fixed_snr_db" => self.fixed_snr_db = parse_value(key, value)?,
            "rwf_design_snr_db" => {
                self.rwf_design_snr_db = match value.trim() {
                    "" | "auto" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "workers" => self.workers = parse_value(key, value)?,
            "record_timing" => self.record_timing = parse_bool(key, value)?,
            "channel.mean_paths" | "channel.tau_max" | "channel.decay" | "channel.sampling_time" => {
                let v: f64 = parse_value(key, value)?;
                let c = self.channel;
                let (mean_paths, tau_max, decay, ts) = match key {
                    "channel.mean_paths" => (v, c.tau_max, c.decay, c.sampling_time),
                    "channel.tau_max" => (c.mean_paths, v, c.decay, c.sampling_time),
                    "channel.decay" => (c.mean_paths, c.tau_max, v, c.sampling_time),
                    _ => (c.mean_paths, c.tau_max, c.decay, v),
                };
                self.channel =
                    ChannelParams::new(mean_paths, tau_max, decay, ts).map_err(|e| Error::Config(e.to_string()))?;
            }
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.estimators.is_empty() {
            return bad("no estimators configured".into());
        }
        if self.num_subcarriers == 0 || self.num_delays == 0 {
            return bad("N and L must be >= 1".into());
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be > 0, got {}", self.kappa));
        }
        match self.scenario {
            Scenario::MseVsSnr if self.snr_grid_db.is_empty() => return bad("snr_grid_db is empty".into()),
            Scenario::MseVsPilots if self.pilot_grid.is_empty() => return bad("pilot_grid is empty".into()),
            _ => {}
        }
        for point in self.grid() {
            if point.pilots == 0 || point.pilots > self.num_subcarriers {
                return bad(format!("{} pilots do not fit {} subcarriers", point.pilots, self.num_subcarriers));
            }
            if !point.snr_db.is_finite() {
                return bad(format!("SNR {} dB is not finite", point.snr_db));
            }
        }
        if let Some(d) = self.rwf_design_snr_db {
            if !d.is_finite() {
                return bad(format!("rwf_design_snr_db {d} is not finite"));
            }
        }
        Ok(())
    }

    /// Operating points in output order.
    pub fn grid(&self) -> Vec<GridPoint> {
        match self.scenario {
            Scenario::MseVsSnr => self
                .snr_grid_db
                .iter()
                .map(|&snr_db| GridPoint { snr_db, pilots: self.pilots })
                .collect(),
            Scenario::MseVsPilots => self
                .pilot_grid
                .iter()
                .map(|&pilots| GridPoint { snr_db: self.fixed_snr_db, pilots })
                .collect(),
            Scenario::SingleRun => vec![GridPoint { snr_db: self.fixed_snr_db, pilots: self.pilots }],
        }
    }

    /// The swept quantity at a grid point, as written to the `point` column.
    pub fn point_value(&self, point: &GridPoint) -> f64 {
        match self.scenario {
            Scenario::MseVsPilots => point.pilots as f64,
            Scenario::MseVsSnr | Scenario::SingleRun => point.snr_db,
        }
    }
}
