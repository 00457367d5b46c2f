//! A reduced SNR sweep through the experiment harness.
use sbl_chanest::harness::{run_experiment, ExperimentConfig};

fn main() -> sbl_chanest::Result<()> {
    let config = ExperimentConfig::parse(
        "scenario = mse_vs_snr\n\
         snr_grid_db = 0, 6, 12, 18, 24\n\
         trials = 20\n\
         master_seed = 5\n\
         estimators = vmp2l, vmp3l, lasso, rwf\n",
    )?;
    let results = run_experiment(&config)?;

    let mut last = f64::NAN;
    for agg in &results.aggregates {
        if agg.point != last {
            println!("SNR {:>4} dB", agg.point);
            last = agg.point;
        }
        println!(
            "  {:>6}  {:>7.2} dB  (se {:.1e}, failures {})",
            agg.estimator.to_string(),
            agg.mean_nmse_db,
            agg.std_error,
            agg.failures
        );
    }
    Ok(())
}
