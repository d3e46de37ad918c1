//! Energy-basis coherence of a single coherent state relaxing towards the
//! vacuum, next to the basis-independent position and momentum values.
//!
//!     cargo run --example coherence_decay

use dho::coherence::{cr_coherent_energy, cr_coherent_momentum, cr_coherent_position};
use dho::states::{CoherentAmplitude, EvolutionParams};

fn main() -> dho::Result<()> {
    let a = CoherentAmplitude::real(1.0);
    println!("{:>6} {:>10} {:>12} {:>12} {:>12}", "t", "gamma0", "C_r energy", "C_r x", "C_r p");
    for g in [0.0, 0.1, 0.3] {
        for t in [0.0, 2.0, 5.0, 10.0, 20.0] {
            let p = EvolutionParams::new(g, t)?;
            println!(
                "{t:>6.1} {g:>10.2} {:>12.6} {:>12.6} {:>12.6}",
                cr_coherent_energy(a, &p).value,
                cr_coherent_position(a, &p).value,
                cr_coherent_momentum(a, &p).value,
            );
        }
    }
    Ok(())
}
