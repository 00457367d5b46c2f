//! Pilot pattern, delay grid and the Fourier dictionary built from them.
use num_complex::Complex64;
use sbl_chanest::channel::{CP_SAMPLES, SAMPLING_TIME, SUBCARRIER_SPACING};
use sbl_chanest::dictionary::{build_delay_grid, build_dictionary, equispaced_pilots, DictionaryRows};

fn main() -> sbl_chanest::Result<()> {
    let pattern = equispaced_pilots(1200, 100, SUBCARRIER_SPACING)?;
    let grid = build_delay_grid(CP_SAMPLES * SAMPLING_TIME, 200)?;
    let phi = build_dictionary(&pattern, &grid, DictionaryRows::PilotsOnly);

    println!("pilots: {:?} ... {:?}", &pattern.pilot_indices()[..4], pattern.pilot_indices().last().unwrap());
    println!("delay grid: {} points, step {:.3} ns, tau_max {:.3} us", grid.len(), grid.resolution() * 1e9, grid.tau_max() * 1e6);
    println!("dictionary: {} x {}", phi.nrows(), phi.ncols());

    // Mutual coherence of neighbouring and distant columns.
    let m = phi.nrows() as f64;
    let coherence = |i: usize, j: usize| {
        let dot: Complex64 = phi.matrix().column(i).dotc(&phi.matrix().column(j));
        dot.norm() / m
    };
    for j in [1, 2, 5, 20, 100] {
        println!("  |<phi_0, phi_{j}>| / M = {:.4}", coherence(0, j));
    }
    Ok(())
}
