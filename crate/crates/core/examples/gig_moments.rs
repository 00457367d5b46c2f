//! Log-domain Bessel K and GIG moments, including arguments where the plain
//! Bessel function under- or overflows.
use sbl_chanest::specfun::{bessel_k_ratio, gig_moment, log_bessel_k, GigParams};

fn main() -> sbl_chanest::Result<()> {
    println!("{:>6} {:>10} {:>22} {:>14}", "nu", "x", "ln K_nu(x)", "K_nu+1/K_nu");
    for &nu in &[0.0, 0.5, 2.5, 40.0] {
        for &x in &[1e-8, 1.0, 50.0, 1e4] {
            println!("{nu:>6} {x:>10.0e} {:>22.12e} {:>14.6e}", log_bessel_k(nu, x)?, bessel_k_ratio(nu, x)?);
        }
    }

    // Order ε-1 with ε = 1, rate η = 2 and a coefficient with |α|² = 0.5.
    let q = GigParams::new(0.0, 2.0, 0.5)?;
    println!("\nGIG(order 0, rate 2, inverse rate 0.5)");
    for n in [-1.0, 1.0, 2.0] {
        println!("  E[gamma^{n:+}] = {:.15}", gig_moment(&q, n)?);
    }
    // A pruned-looking component: tiny inverse rate.
    let tiny = GigParams::new(-0.5, 3.0, 1e-30)?;
    println!("  tiny inverse rate: E[1/gamma] = {:.6e}", gig_moment(&tiny, -1.0)?);
    Ok(())
}
