//! Two- and three-layer prior densities over the coefficient modulus.
use sbl_chanest::model::{prior_sweep, PriorFamily};

fn main() -> sbl_chanest::Result<()> {
    let epsilons = [0.25, 0.5, 1.0, 1.5];
    for family in [PriorFamily::TwoLayer { eta: 1.0 }, PriorFamily::ThreeLayer { a: 1.0, b: 1.0 }] {
        println!("{family:?}");
        print!("{:>8}", "|alpha|");
        for eps in epsilons {
            print!(" {:>12}", format!("eps={eps}"));
        }
        println!();
        let rows = prior_sweep(family, &epsilons, 3.0, 7)?;
        for i in 0..7 {
            print!("{:>8.2}", rows[i].alpha_abs);
            for j in 0..epsilons.len() {
                print!(" {:>12.5}", rows[j * 7 + i].log_density);
            }
            println!();
        }
        println!();
    }
    Ok(())
}
