//! Draws a channel, prints its taps and writes the frequency response and
//! the noisy pilots.
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbl_chanest::channel::{observe_pilots, sample_channel, snr_db_to_precision, ChannelParams, SUBCARRIER_SPACING};
use sbl_chanest::dictionary::equispaced_pilots;

fn main() -> sbl_chanest::Result<()> {
    let params = ChannelParams::lte_default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ch = sample_channel(&mut rng, &params);
    println!("{} paths, total power {:.3}", ch.num_paths(), ch.total_power());
    for (tau, g) in ch.delays.iter().zip(&ch.gains) {
        println!("  tau = {:>7.1} ns  |g| = {:.4}", tau * 1e9, g.norm());
    }

    let pattern = equispaced_pilots(1200, 100, SUBCARRIER_SPACING)?;
    let h = ch.frequency_response(&pattern.all_frequencies());
    let h_p = h.select_rows(pattern.pilot_indices().iter().map(|n| n - 1).collect::<Vec<_>>().iter());
    let obs = observe_pilots(&pattern, &h_p, snr_db_to_precision(10.0), &mut rng)?;

    println!("\n{:>5} {:>10} {:>10}", "n", "|h|", "|y|");
    for (k, &n) in pattern.pilot_indices().iter().enumerate().step_by(10) {
        println!("{n:>5} {:>10.4} {:>10.4}", h[n - 1].norm(), obs.y[k].norm());
    }

    let path = std::env::temp_dir().join("channel.csv");
    ch.write_csv(&path)?;
    println!("\nchannel written to {}", path.display());
    Ok(())
}
