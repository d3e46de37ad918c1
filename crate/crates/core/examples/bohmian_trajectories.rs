//! Bohmian trajectories of the a = -b = 7/sqrt(2) cat: paths launched in
//! either packet reflect near the origin instead of crossing it.

use std::f64::consts::FRAC_1_SQRT_2;

use dho::bohmian::{continuity_residual, integrate_trajectories, packet_quantile_positions, sample_grid, GridSpec,
    TrajectoryConfig};
use dho::states::{make_cat, CatKind, CoherentAmplitude};

fn main() -> dho::Result<()> {
    let cat = make_cat(CoherentAmplitude::real(7.0 * FRAC_1_SQRT_2), CatKind::PlusMinusAlpha);
    let starts = packet_quantile_positions(&cat, 5)?;
    let cfg = TrajectoryConfig {
        t_final: 6.0,
        sample_every: 500,
        ..TrajectoryConfig::default()
    };
    for g in [0.0, 0.2] {
        let ens = integrate_trajectories(&cat, g, &starts, &cfg)?;
        println!("gamma0 = {g}: order preserved = {}", ens.preserves_order());
        for (r, x0) in starts.iter().enumerate() {
            let path: Vec<String> = (0..ens.times.len()).map(|c| format!("{:7.3}", ens.paths[[r, c]])).collect();
            println!("  x0 = {x0:7.3} -> {}", path.join(" "));
        }
    }

    let times: Vec<f64> = (0..=10).map(|i| 0.5 * i as f64).collect();
    let field = sample_grid(&cat, 0.1, &times, GridSpec::new(-12.0, 12.0, 400)?)?;
    println!("continuity residual max|dP/dt + dJ/dx| = {:.2e}", continuity_residual(&cat, &field));
    Ok(())
}
