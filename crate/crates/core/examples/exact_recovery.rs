//! Noiseless on-grid channels: VMP returns the support and the gains.
use nalgebra::DVector;
use num_complex::Complex64;
use sbl_chanest::channel::{CP_SAMPLES, SAMPLING_TIME, SUBCARRIER_SPACING};
use sbl_chanest::dictionary::{build_delay_grid, build_dictionary, equispaced_pilots, DictionaryRows};
use sbl_chanest::estimators::{run_vmp, significant_support};
use sbl_chanest::model::EstimatorConfig;

fn main() -> sbl_chanest::Result<()> {
    let pattern = equispaced_pilots(1200, 100, SUBCARRIER_SPACING)?;
    let grid = build_delay_grid(CP_SAMPLES * SAMPLING_TIME, 200)?;
    let phi = build_dictionary(&pattern, &grid, DictionaryRows::PilotsOnly);
    let full = build_dictionary(&pattern, &grid, DictionaryRows::AllSubcarriers);

    let support = [4, 37, 90, 151, 188];
    let mut alpha = DVector::<Complex64>::zeros(grid.len());
    for (k, &l) in support.iter().enumerate() {
        alpha[l] = Complex64::from_polar(0.4 + 0.1 * k as f64, 0.7 * k as f64);
    }
    let y = phi.matrix() * &alpha;

    let report = run_vmp(&y, &phi, &full, &EstimatorConfig::three_layer())?;
    let found = significant_support(&report.alpha_hat, 1e-3);
    println!("true support  {support:?}");
    println!("found support {found:?}");
    println!("coefficient error {:.3e}", (&report.alpha_hat - &alpha).norm() / alpha.norm());
    println!("channel error     {:.3e}", (&report.h_hat - full.matrix() * &alpha).norm() / report.h_hat.norm());
    Ok(())
}
