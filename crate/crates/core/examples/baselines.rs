//! All five estimators on the same few channel draws.
use sbl_chanest::channel::ChannelParams;
use sbl_chanest::estimators::EstimatorKind;
use sbl_chanest::harness::{compute_nmse, draw_trial, run_estimator, trial_rng, PointSetup};

fn main() -> sbl_chanest::Result<()> {
    let params = ChannelParams::lte_default();
    let setup = PointSetup::new(1200, 100, 200, &params)?;
    let snr_db = 10.0;
    let trials = 10;

    print!("{:>6}", "trial");
    for kind in EstimatorKind::ALL {
        print!(" {:>8}", kind.to_string());
    }
    println!();
    let mut sums = [0.0; 5];
    for trial in 0..trials {
        let data = draw_trial(&mut trial_rng(3, 0, trial), &params, &setup, snr_db)?;
        print!("{trial:>6}");
        for (i, kind) in EstimatorKind::ALL.into_iter().enumerate() {
            let report = run_estimator(kind, &data.y, &setup, 2.0, snr_db)?;
            let nmse = compute_nmse(&report.h_hat, &data.h_true)?;
            sums[i] += nmse;
            print!(" {:>8.2}", 10.0 * nmse.log10());
        }
        println!();
    }
    print!("{:>6}", "mean");
    for s in sums {
        print!(" {:>8.2}", 10.0 * (s / trials as f64).log10());
    }
    println!("   (NMSE, dB)");
    Ok(())
}
