//! Integrates the master equation in a truncated Fock space and compares
//! with the closed-form density matrix of a decaying cat state.

use dho::fock::{density_from_superposition, trace_distance, FockDensityMatrix};
use dho::lindblad::{integrate, integrate_snapshots, IntegratorConfig};
use dho::states::{make_cat, CatKind, CoherentAmplitude, EvolutionParams};

fn main() -> dho::Result<()> {
    let (g, n_max) = (0.2, 40);
    let cat = make_cat(CoherentAmplitude::real(1.0), CatKind::PlusMinusAlpha);
    let m0 = density_from_superposition(&cat, &EvolutionParams::initial(), n_max)?;
    let times = [1.0, 3.0, 10.0];
    let cfg = IntegratorConfig::new(0.005, 10.0)?;
    for (m, &t) in integrate_snapshots(&m0, g, 0.0, &cfg, &times)?.iter().zip(&times) {
        let exact = density_from_superposition(&cat, &EvolutionParams::new(g, t)?, n_max)?;
        println!("t = {t:>4}: trace distance {:.3e}, purity {:.6}", trace_distance(m, &exact)?, m.purity());
    }

    // A warm bath drives any state to the Gibbs state.
    let nbar = 0.5;
    let mut w = vec![0.0; 25];
    w[0] = 1.0;
    let m = integrate(&FockDensityMatrix::diagonal(&w)?, 1.0, nbar, &IntegratorConfig::new(0.005, 30.0)?)?;
    let gibbs = FockDensityMatrix::thermal(nbar, 24)?;
    println!("thermalization: distance to Gibbs state {:.3e}", trace_distance(&m, &gibbs)?);

    // Too large a step is refused up front.
    match integrate(&m0, g, 0.0, &IntegratorConfig::new(0.5, 1.0)?) {
        Err(e) => println!("dt = 0.5: {e}"),
        Ok(_) => println!("dt = 0.5 unexpectedly accepted"),
    }
    Ok(())
}
