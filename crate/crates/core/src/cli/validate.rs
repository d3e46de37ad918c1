//! Oracle suite behind `dho validate`: every closed form against an
//! independent numerical path, reported with its measured residual.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{CliError, ValidateArgs};
use crate::bohmian::{continuity_residual, sample_grid, GridSpec};
use crate::coherence::{
    cr_cat_closed_form, cr_coherent_energy, cr_coherent_momentum, cr_coherent_position, cr_mixed_energy,
};
use crate::fock::{density_from_superposition, trace_distance, FockDensityMatrix};
use crate::identical::{
    mss_closed_form, mss_general, window_integrals_closed_form, window_integrals_quadrature, DetectorWindow,
    Statistics, TwoParticleState,
};
use crate::lindblad::{integrate, integrate_snapshots, IntegratorConfig};
use crate::states::{make_cat, CatKind, CoherentAmplitude, EvolutionParams, SuperposedState};
use crate::Result;

pub const DEFAULT_DT: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    /// Measured residual, or the error that stopped the check.
    pub residual: std::result::Result<f64, String>,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        matches!(self.residual, Ok(r) if r <= self.tolerance)
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        match &self.residual {
            Ok(r) => format!("{verdict} {:<34} residual={r:.3e} tol={:.0e}", self.name, self.tolerance),
            Err(e) => format!("{verdict} {:<34} error: {e} tol={:.0e}", self.name, self.tolerance),
        }
    }
}

fn check(name: &'static str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> CheckResult {
    CheckResult {
        name,
        residual: f().map_err(|e| e.to_string()),
        tolerance,
    }
}

fn lindblad_cat(dt: f64) -> Result<f64> {
    let s = make_cat(CoherentAmplitude::real(1.0), CatKind::PlusMinusAlpha);
    let (g, n_max) = (0.2, 40);
    let m0 = density_from_superposition(&s, &EvolutionParams::initial(), n_max)?;
    let times = [1.0, 3.0, 10.0];
    let snaps = integrate_snapshots(&m0, g, 0.0, &IntegratorConfig::new(dt, 10.0)?, &times)?;
    let mut worst: f64 = 0.0;
    for (m, &t) in snaps.iter().zip(&times) {
        let exact = density_from_superposition(&s, &EvolutionParams::new(g, t)?, n_max)?;
        worst = worst.max(trace_distance(m, &exact)?);
    }
    Ok(worst)
}

fn lindblad_thermal(dt: f64) -> Result<f64> {
    let (nbar, n_max) = (0.5, 24);
    let mut vacuum = vec![0.0; n_max + 1];
    vacuum[0] = 1.0;
    let m = integrate(&FockDensityMatrix::diagonal(&vacuum)?, 1.0, nbar, &IntegratorConfig::new(dt, 30.0)?)?;
    trace_distance(&m, &FockDensityMatrix::thermal(nbar, n_max)?)
}

fn series_vs_spectral() -> Result<f64> {
    let a = CoherentAmplitude::new(1.1, -0.6);
    let p = EvolutionParams::new(0.2, 0.7)?;
    let m = density_from_superposition(&SuperposedState::coherent(a), &p, 40)?;
    Ok((cr_coherent_energy(a, &p).value - cr_mixed_energy(&m)?.value).abs())
}

fn cat_closed_vs_spectral() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in [0.25f64, 1.0, 4.0] {
        let s = make_cat(CoherentAmplitude::real(x.sqrt()), CatKind::PlusMinusAlpha);
        let m = density_from_superposition(&s, &EvolutionParams::initial(), 50)?;
        worst = worst.max((cr_cat_closed_form(x)?.value - cr_mixed_energy(&m)?.value).abs());
    }
    Ok(worst)
}

fn constant_basis() -> Result<f64> {
    let want = 0.5 * (1.0 + PI.ln());
    let a = CoherentAmplitude::new(1.3, 0.4);
    let mut worst: f64 = 0.0;
    for g in [0.0, 0.3] {
        for t in [0.0, 2.5, 20.0] {
            let p = EvolutionParams::new(g, t)?;
            worst = worst
                .max((cr_coherent_position(a, &p).value - want).abs())
                .max((cr_coherent_momentum(a, &p).value - want).abs());
        }
    }
    Ok(worst)
}

fn window_closed_vs_quadrature() -> Result<f64> {
    let a = CoherentAmplitude::real(1.0);
    let tp = TwoParticleState::new(a, -a, Statistics::BE)?;
    let w = DetectorWindow::new(2.0)?;
    let mut worst: f64 = 0.0;
    for t in [0.0, 0.7, 2.0, 4.4] {
        let p = EvolutionParams::new(0.1, t)?;
        let c = window_integrals_closed_form(1.0, &p, 2.0);
        let q = window_integrals_quadrature(&tp, &p, &w);
        worst = worst
            .max((c.i_alpha - q.i_alpha).abs())
            .max((c.i_beta - q.i_beta).abs())
            .max((c.i_cross - q.i_cross).norm());
    }
    Ok(worst)
}

fn mss_closed_vs_general() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0] {
        let a = CoherentAmplitude::real(alpha);
        for stats in Statistics::ALL {
            let tp = TwoParticleState::new(a, -a, stats)?;
            for t in [0.0, 0.9, 2.3] {
                let p = EvolutionParams::new(0.2, t)?;
                worst = worst.max((mss_closed_form(alpha, &p, stats) - mss_general(&tp, &p)).abs());
            }
        }
    }
    Ok(worst)
}

fn continuity(s: &SuperposedState, gamma0: f64, grid: GridSpec) -> Result<f64> {
    let times: Vec<f64> = (0..=20).map(|i| 0.25 * i as f64).collect();
    let field = sample_grid(s, gamma0, &times, grid)?;
    Ok(continuity_residual(s, &field))
}

/// Runs every check with master-equation step `dt`.
pub fn validation_suite(dt: f64) -> Vec<CheckResult> {
    let big = CoherentAmplitude::real(7.0 * FRAC_1_SQRT_2);
    let cat = make_cat(big, CatKind::PlusMinusAlpha);
    let coherent = SuperposedState::coherent(CoherentAmplitude::new(1.0, 0.5));
    vec![
        check("lindblad_cat_vs_analytic", 1e-6, || lindblad_cat(dt)),
        check("lindblad_thermal_steady_state", 1e-6, || lindblad_thermal(dt)),
        check("energy_series_vs_spectral", 1e-9, series_vs_spectral),
        check("cat_closed_form_vs_spectral", 1e-9, cat_closed_vs_spectral),
        check("position_momentum_constant", 1e-12, constant_basis),
        check("window_erf_vs_quadrature", 1e-8, window_closed_vs_quadrature),
        check("mss_closed_form_vs_moments", 1e-10, mss_closed_vs_general),
        check("continuity_coherent", 1e-6, || continuity(&coherent, 0.2, GridSpec::new(-8.0, 8.0, 400)?)),
        check("continuity_cat", 1e-5, || continuity(&cat, 0.1, GridSpec::new(-12.0, 12.0, 400)?)),
    ]
}

pub fn run_validate(args: &ValidateArgs) -> std::result::Result<(), CliError> {
    let dt = args.dt.unwrap_or(DEFAULT_DT);
    let results = validation_suite(dt);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    println!("{} of {} checks passed", results.len() - failed, results.len());
    if failed > 0 {
        return Err(CliError::Validation(format!("{failed} check(s) failed")));
    }
    Ok(())
}
