//! Two identical oscillators: mean square separation, joint detection in a
//! window and the coherence of the reduced one-particle state.

use dho::identical::{cr_by_statistics, joint_detection_ratio, mss, DetectorWindow, Statistics, TwoParticleState};
use dho::states::{CoherentAmplitude, EvolutionParams};

fn main() -> dho::Result<()> {
    let a = CoherentAmplitude::real(1.0);
    let pairs: Vec<TwoParticleState> =
        Statistics::ALL.iter().map(|&s| TwoParticleState::new(a, -a, s)).collect::<dho::Result<_>>()?;

    println!("mean square separation, gamma0 = 0.1");
    for t in [0.0, 0.5, 1.0, 1.5, 3.0, 10.0] {
        let p = EvolutionParams::new(0.1, t)?;
        let row: Vec<String> = pairs.iter().map(|tp| format!("{}={:.5}", tp.stats().name(), mss(tp, &p))).collect();
        println!("  t = {t:<4} {}", row.join("  "));
    }

    println!("joint detection relative to distinguishable particles, 2d = 4");
    let w = DetectorWindow::new(2.0)?;
    for t in [0.0, 0.8, 1.6, 2.4] {
        let p = EvolutionParams::new(0.0, t)?;
        println!(
            "  t = {t:<4} p+ = {:.6}  p- = {:.6}",
            joint_detection_ratio(&pairs[1], &p, &w)?,
            joint_detection_ratio(&pairs[2], &p, &w)?
        );
    }

    println!("reduced-state coherence, gamma0 = 0.001, t = 5");
    let p = EvolutionParams::new(0.001, 5.0)?;
    for alpha in [std::f64::consts::FRAC_1_SQRT_2, 1.0] {
        let a = CoherentAmplitude::real(alpha);
        let row: Vec<String> = Statistics::ALL
            .iter()
            .map(|&s| Ok(format!("{}={:.6}", s.name(), cr_by_statistics(&TwoParticleState::new(a, -a, s)?, &p, 30)?.value)))
            .collect::<dho::Result<_>>()?;
        println!("  alpha = {alpha:.4} {}", row.join("  "));
    }
    Ok(())
}
