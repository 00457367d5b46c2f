//! CSV output of experiment results.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::run::{Aggregate, TrialResult};

pub const RAW_HEADER: &str = "scenario,point,estimator,trial,nmse,converged,iterations,wall_time_s";
pub const AGGREGATE_HEADER: &str = "scenario,point,estimator,mean_nmse,mean_nmse_db,trials,failures";

/// Formats with 9 significant digits in the shortest of fixed or
/// scientific notation, trailing zeros removed (like C's `%.9g`).
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

pub fn raw_csv(results: &[TrialResult]) -> String {
    let mut out = String::with_capacity(64 * (results.len() + 1));
    out.push_str(RAW_HEADER);
    out.push('\n');
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scenario,
            format_sig9(r.point),
            r.estimator,
            r.trial,
            format_sig9(r.nmse),
            r.converged,
            r.iterations,
            format_sig9(r.wall_time_s)
        );
    }
    out
}

pub fn aggregate_csv(aggregates: &[Aggregate]) -> String {
    let mut out = String::with_capacity(64 * (aggregates.len() + 1));
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for a in aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            a.scenario,
            format_sig9(a.point),
            a.estimator,
            format_sig9(a.mean_nmse),
            format_sig9(a.mean_nmse_db),
            a.trials,
            a.failures
        );
    }
    out
}

/// Where the aggregate table goes for a raw-results path:
/// `out/run.csv` becomes `out/run.aggregate.csv`.
pub fn aggregate_path(raw_path: &Path) -> PathBuf {
    let stem = raw_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    raw_path.with_file_name(format!("{stem}.aggregate.csv"))
}

/// Writes the raw table to `path` and the aggregate table next to it (see
/// [`aggregate_path`]). Parent directories are created.
pub fn write_csv(results: &[TrialResult], aggregates: &[Aggregate], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, raw_csv(results)).map_err(|e| Error::io(path, e))?;
    let agg = aggregate_path(path);
    fs::write(&agg, aggregate_csv(aggregates)).map_err(|e| Error::io(&agg, e))
}
