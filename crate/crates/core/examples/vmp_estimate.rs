//! One pilot observation through the two- and three-layer VMP estimators.
use sbl_chanest::channel::ChannelParams;
use sbl_chanest::estimators::vmp::run_vmp_with_state;
use sbl_chanest::estimators::significant_support;
use sbl_chanest::harness::{compute_nmse, draw_trial, trial_rng, PointSetup};
use sbl_chanest::model::EstimatorConfig;

fn main() -> sbl_chanest::Result<()> {
    let params = ChannelParams::lte_default();
    let setup = PointSetup::new(1200, 100, 200, &params)?;
    let mut rng = trial_rng(7, 0, 0);
    let data = draw_trial(&mut rng, &params, &setup, 15.0)?;
    println!("true channel: {} paths", data.channel.num_paths());

    for (name, config) in [("2-layer", EstimatorConfig::two_layer()), ("3-layer", EstimatorConfig::three_layer())] {
        let (state, report) = run_vmp_with_state(&data.y, &setup.dict_pilots, &setup.dict_full, &config)?;
        let state = state.expect("nonzero data");
        let nmse = compute_nmse(&report.h_hat, &data.h_true)?;
        println!(
            "{name}: {} iterations (converged: {}), {} active, {} significant, noise var {:.3e} (true {:.3e}), NMSE {:.2} dB",
            report.iterations_used,
            report.converged,
            state.num_active(),
            significant_support(&report.alpha_hat, 1e-3).len(),
            1.0 / report.lambda_hat,
            10f64.powf(-1.5),
            10.0 * nmse.log10(),
        );
    }
    Ok(())
}
