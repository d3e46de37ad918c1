//! Coherence of cat states: the closed form against the Fock-space spectrum,
//! the decay of C_r(ρ2) under damping and the two superposition bounds.

use dho::coherence::{cr_cat_closed_form, cr_coherent_energy, cr_mixed_energy, cr_state_energy, cr_two_cat_inequality,
    cr_upper_bound_cat};
use dho::fock::{default_n_max, density_from_superposition};
use dho::states::{make_cat, CatKind, CoherentAmplitude, EvolutionParams};

fn main() -> dho::Result<()> {
    let p0 = EvolutionParams::initial();
    println!("|a|^2   closed form   spectral      coherent   bound");
    for x in [0.25f64, 1.0, 2.0, 4.0] {
        let a = CoherentAmplitude::real(x.sqrt());
        let cat = make_cat(a, CatKind::PlusMinusAlpha);
        let spectral = cr_mixed_energy(&density_from_superposition(&cat, &p0, default_n_max(x))?)?.value;
        println!(
            "{x:<7} {:<13.10} {:<13.10} {:<10.6} {:.6}",
            cr_cat_closed_form(x)?.value,
            spectral,
            cr_coherent_energy(a, &p0).value,
            cr_upper_bound_cat(a, &p0)
        );
    }

    println!("\nC_r(rho2) of the a = -b = 1 cat under damping");
    let cat = make_cat(CoherentAmplitude::real(1.0), CatKind::PlusMinusAlpha);
    for g in [0.0, 0.1, 0.3] {
        let series: Vec<String> = [0.0, 2.5, 5.0, 10.0]
            .iter()
            .map(|&t| Ok(format!("{:.5}", cr_state_energy(&cat, &EvolutionParams::new(g, t)?, 31)?.value)))
            .collect::<dho::Result<_>>()?;
        println!("gamma0 = {g:<4} {}", series.join("  "));
    }

    println!("\nsuperposition of two cats: C_r(T) <= N_T^2 (C_r(Phi) + C_r(Psi) + 2 ln 2)");
    for x in [0.5f64, 1.0, 3.0] {
        let ineq = cr_two_cat_inequality(CoherentAmplitude::real(x.sqrt()))?;
        println!("|a|^2 = {x:<4} lhs {:.6}  rhs {:.6}", ineq.lhs, ineq.rhs);
    }
    Ok(())
}
