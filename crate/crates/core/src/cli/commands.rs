//! Panel builders behind each subcommand.

use num_complex::Complex64;
use rayon::prelude::*;

use super::output::{format_value, Panel};
use super::{CliError, Layout, RunConfig};
use crate::bohmian::{integrate_trajectories, packet_quantile_positions, sample_grid, GridSpec, TrajectoryConfig};
use crate::coherence::{
    cr_cat_closed_form, cr_coherent_energy, cr_coherent_momentum, cr_coherent_position, cr_state_energy,
    cr_thermal_position, cr_two_cat_inequality, cr_upper_bound_cat, nbar_from_kbt, Basis,
};
use crate::fock::default_n_max;
use crate::identical::{cr_by_statistics, joint_detection_ratio, mss as mss_of, DetectorWindow, Statistics, TwoParticleState};
use crate::states::{CoherentAmplitude, EvolutionParams, SuperposedState};

type Rows = Result<Vec<Vec<f64>>, CliError>;

/// 0, dt, 2dt, … up to t_max (inclusive within rounding).
pub fn time_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * dt).collect()
}

fn amplitude(v: [f64; 2]) -> Result<CoherentAmplitude, CliError> {
    Ok(CoherentAmplitude::try_new(v[0], v[1])?)
}

fn alpha(cfg: &RunConfig) -> Result<CoherentAmplitude, CliError> {
    amplitude(cfg.alpha)
}

/// β, defaulting to -α.
fn beta_or_mirror(cfg: &RunConfig) -> Result<CoherentAmplitude, CliError> {
    match cfg.beta {
        Some(b) => amplitude(b),
        None => Ok(-alpha(cfg)?),
    }
}

fn cat(a: CoherentAmplitude, b: CoherentAmplitude) -> Result<SuperposedState, CliError> {
    let one = Complex64::new(1.0, 0.0);
    Ok(SuperposedState::pair(one, a, one, b)?)
}

fn gamma_label(g: f64) -> String {
    format!("g{}", format_value(g, 6))
}

fn params(g: f64, t: f64) -> Result<EvolutionParams, CliError> {
    Ok(EvolutionParams::new(g, t)?)
}

fn collect_rows(rows: Vec<Result<Vec<f64>, CliError>>) -> Rows {
    rows.into_iter().collect()
}

fn columns(first: &str, rest: impl IntoIterator<Item = String>) -> Vec<String> {
    std::iter::once(first.to_string()).chain(rest).collect()
}

pub fn coherence(cfg: &RunConfig) -> Result<Vec<Panel>, CliError> {
    match cfg.layout {
        Layout::CatTimeAndAlpha => Ok(vec![
            coherence_time(cfg, Some("time".into()))?,
            cat_alpha_sweep(cfg)?,
        ]),
        Layout::CatSweeps => cat_sweeps(cfg),
        _ => Ok(vec![coherence_time(cfg, None)?]),
    }
}

/// C_r against t, one column per γ0. A β turns the state into a two-packet
/// superposition, which is supported in the energy basis only.
fn coherence_time(cfg: &RunConfig, name: Option<String>) -> Result<Panel, CliError> {
    let a = alpha(cfg)?;
    let pair = match cfg.beta {
        Some(b) => Some(cat(a, amplitude(b)?)?),
        None => None,
    };
    if pair.is_some() && cfg.basis != Basis::Energy {
        return Err(CliError::Config("superpositions are supported in the energy basis only".into()));
    }
    let nbar = match cfg.kbt {
        Some(k) if cfg.basis == Basis::Position => nbar_from_kbt(k)?,
        Some(_) => return Err(CliError::Config("--kbt requires --basis position".into())),
        None => 0.0,
    };
    let n_max = cfg
        .n_max
        .unwrap_or_else(|| default_n_max(pair.as_ref().map_or(a.norm_sqr(), |s| s.max_norm_sqr())));
    let value = |g: f64, t: f64| -> Result<f64, CliError> {
        let p = params(g, t)?;
        Ok(match (&pair, cfg.basis) {
            (Some(s), _) => cr_state_energy(s, &p, n_max)?.value,
            (None, Basis::Energy) => cr_coherent_energy(a, &p).value,
            (None, Basis::Position) if nbar > 0.0 => cr_thermal_position(&p.with_nbar(nbar)?)?.value,
            (None, Basis::Position) => cr_coherent_position(a, &p).value,
            (None, Basis::Momentum) => cr_coherent_momentum(a, &p).value,
        })
    };
    let mut panel = Panel::new(name, columns("t", cfg.gamma0.iter().map(|&g| gamma_label(g))));
    panel.rows = collect_rows(
        time_grid(cfg.t_max, cfg.dt)
            .par_iter()
            .map(|&t| {
                let mut row = vec![t];
                for &g in &cfg.gamma0 {
                    row.push(value(g, t)?);
                }
                Ok(row)
            })
            .collect(),
    )?;
    Ok(panel)
}

fn alpha2_grid(cfg: &RunConfig, include_zero: bool) -> Vec<f64> {
    let start = usize::from(!include_zero);
    let n = (cfg.alpha2_max / cfg.alpha2_step + 1e-9).floor() as usize;
    (start..=n).map(|i| i as f64 * cfg.alpha2_step).collect()
}

/// C_r(ρ2) of the α, -α cat at t0 against |α|², one column per γ0.
fn cat_alpha_sweep(cfg: &RunConfig) -> Result<Panel, CliError> {
    let mut panel = Panel::new(Some("alpha2".into()), columns("alpha2", cfg.gamma0.iter().map(|&g| gamma_label(g))));
    panel.rows = collect_rows(
        alpha2_grid(cfg, true)
            .par_iter()
            .map(|&x| {
                let a = CoherentAmplitude::real(x.sqrt());
                let s = cat(a, -a)?;
                let n_max = cfg.n_max.unwrap_or_else(|| default_n_max(x));
                let mut row = vec![x];
                for &g in &cfg.gamma0 {
                    row.push(cr_state_energy(&s, &params(g, cfg.t0)?, n_max)?.value);
                }
                Ok(row)
            })
            .collect(),
    )?;
    Ok(panel)
}

/// Non-dissipative sweeps: single cat against the coherent state and the
/// upper bound; two-cat superposition against its components and bound.
fn cat_sweeps(cfg: &RunConfig) -> Result<Vec<Panel>, CliError> {
    let grid = alpha2_grid(cfg, true);
    let p0 = EvolutionParams::initial();
    let mut single = Panel::new(Some("single".into()), ["alpha2", "coherent", "cat", "bound"].map(String::from).to_vec());
    single.rows = collect_rows(
        grid.par_iter()
            .map(|&x| {
                let a = CoherentAmplitude::real(x.sqrt());
                Ok(vec![
                    x,
                    cr_coherent_energy(a, &p0).value,
                    cr_cat_closed_form(x)?.value,
                    cr_upper_bound_cat(a, &p0),
                ])
            })
            .collect(),
    )?;
    let mut two = Panel::new(
        Some("twocat".into()),
        ["alpha2", "coherent", "phi", "psi", "T", "bound"].map(String::from).to_vec(),
    );
    two.rows = collect_rows(
        grid.par_iter()
            .map(|&x| {
                let a = CoherentAmplitude::real(x.sqrt());
                let ineq = cr_two_cat_inequality(a)?;
                Ok(vec![x, cr_coherent_energy(a, &p0).value, ineq.cr_phi, ineq.cr_psi, ineq.lhs, ineq.rhs])
            })
            .collect(),
    )?;
    Ok(vec![single, two])
}

/// P and J on the (t, x) lattice, one panel per γ0.
pub fn grid(cfg: &RunConfig) -> Result<Vec<Panel>, CliError> {
    let s = cat(alpha(cfg)?, beta_or_mirror(cfg)?)?;
    let spec = GridSpec::new(cfg.x_min, cfg.x_max, cfg.nx)?;
    let times = time_grid(cfg.t_max, cfg.dt);
    cfg.gamma0
        .iter()
        .map(|&g| {
            let field = sample_grid(&s, g, &times, spec)?;
            let xs = field.xs();
            let mut panel = Panel::new(Some(gamma_label(g)), ["t", "x", "P", "J"].map(String::from).to_vec());
            for (r, &t) in field.times.iter().enumerate() {
                for (c, &x) in xs.iter().enumerate() {
                    panel.rows.push(vec![t, x, field.p[[r, c]], field.j[[r, c]]]);
                }
            }
            Ok(panel)
        })
        .collect()
}

/// Internal integration step of the trajectory solver.
const TRAJECTORY_STEP: f64 = 1e-3;

/// Bohmian paths launched from density quantiles of each packet; one
/// panel per γ0 with a column per path.
pub fn trajectories(cfg: &RunConfig) -> Result<Vec<Panel>, CliError> {
    let s = cat(alpha(cfg)?, beta_or_mirror(cfg)?)?;
    let initial = packet_quantile_positions(&s, cfg.per_packet)?;
    let step = TRAJECTORY_STEP.min(cfg.dt);
    let tcfg = TrajectoryConfig {
        dt: step,
        t_final: cfg.t_max,
        sample_every: ((cfg.dt / step).round() as usize).max(1),
        ..TrajectoryConfig::default()
    };
    cfg.gamma0
        .iter()
        .map(|&g| {
            let ens = integrate_trajectories(&s, g, &initial, &tcfg)?;
            let mut panel = Panel::new(Some(gamma_label(g)), columns("t", (0..initial.len()).map(|i| format!("x{i}"))));
            for (c, &t) in ens.times.iter().enumerate() {
                let mut row = vec![t];
                row.extend((0..initial.len()).map(|r| ens.paths[[r, c]]));
                panel.rows.push(row);
            }
            Ok(panel)
        })
        .collect()
}

fn particle_states(cfg: &RunConfig, a: CoherentAmplitude, b: CoherentAmplitude) -> Result<Vec<TwoParticleState>, CliError> {
    cfg.stats.iter().map(|&st| Ok(TwoParticleState::new(a, b, st)?)).collect()
}

/// MSS(t) per statistics, one panel per γ0.
pub fn mss(cfg: &RunConfig) -> Result<Vec<Panel>, CliError> {
    let states = particle_states(cfg, alpha(cfg)?, beta_or_mirror(cfg)?)?;
    let times = time_grid(cfg.t_max, cfg.dt);
    cfg.gamma0
        .iter()
        .map(|&g| {
            let mut panel = Panel::new(Some(gamma_label(g)), columns("t", states.iter().map(|s| s.stats().name().to_string())));
            panel.rows = collect_rows(
                times
                    .par_iter()
                    .map(|&t| {
                        let p = params(g, t)?;
                        Ok(std::iter::once(t).chain(states.iter().map(|s| mss_of(s, &p))).collect())
                    })
                    .collect(),
            )?;
            Ok(panel)
        })
        .collect()
}

/// p±(t) for a window of half-width d at the origin; one panel per d and a
/// column per (statistics, γ0).
pub fn detect(cfg: &RunConfig) -> Result<Vec<Panel>, CliError> {
    let states = particle_states(cfg, alpha(cfg)?, beta_or_mirror(cfg)?)?;
    let times = time_grid(cfg.t_max, cfg.dt);
    cfg.d
        .iter()
        .map(|&d| {
            let window = DetectorWindow::new(d)?;
            let names = states
                .iter()
                .flat_map(|s| cfg.gamma0.iter().map(move |&g| format!("{}_{}", s.stats().name(), gamma_label(g))));
            let mut panel = Panel::new(Some(format!("d{}", format_value(d, 6))), columns("t", names));
            panel.rows = collect_rows(
                times
                    .par_iter()
                    .map(|&t| {
                        let mut row = vec![t];
                        for s in &states {
                            for &g in &cfg.gamma0 {
                                row.push(joint_detection_ratio(s, &params(g, t)?, &window)?);
                            }
                        }
                        Ok(row)
                    })
                    .collect(),
            )?;
            Ok(panel)
        })
        .collect()
}

fn reduced_coherence_row(
    cfg: &RunConfig,
    a: CoherentAmplitude,
    b: CoherentAmplitude,
    p: &EvolutionParams,
) -> Result<Vec<f64>, CliError> {
    let n_max = cfg.n_max.unwrap_or_else(|| default_n_max(a.norm_sqr().max(b.norm_sqr())));
    particle_states(cfg, a, b)?
        .iter()
        .map(|s| Ok(cr_by_statistics(s, p, n_max)?.value))
        .collect()
}

/// C_r of the reduced single-particle state per statistics: against t (one
/// panel per amplitude when several are configured) or against |α|².
pub fn spcoherence(cfg: &RunConfig) -> Result<Vec<Panel>, CliError> {
    let g = cfg.gamma0[0];
    let stat_names = || cfg.stats.iter().map(|s| s.name().to_string());
    if cfg.layout == Layout::StatisticsSweep {
        let mut panel = Panel::new(Some("alpha2".into()), columns("alpha2", stat_names()));
        let include_zero = !cfg.stats.contains(&Statistics::FD);
        panel.rows = collect_rows(
            alpha2_grid(cfg, include_zero)
                .par_iter()
                .map(|&x| {
                    let a = CoherentAmplitude::real(x.sqrt());
                    let mut row = vec![x];
                    row.extend(reduced_coherence_row(cfg, a, -a, &params(g, 0.0)?)?);
                    Ok(row)
                })
                .collect(),
        )?;
        return Ok(vec![panel]);
    }
    let pairs: Vec<(Option<String>, CoherentAmplitude, CoherentAmplitude)> = if cfg.alphas.is_empty() {
        vec![(None, alpha(cfg)?, beta_or_mirror(cfg)?)]
    } else {
        cfg.alphas
            .iter()
            .map(|&x| {
                let a = CoherentAmplitude::try_new(x, 0.0)?;
                Ok((Some(format!("a{}", format_value(x, 4))), a, -a))
            })
            .collect::<Result<_, CliError>>()?
    };
    let times = time_grid(cfg.t_max, cfg.dt);
    pairs
        .into_iter()
        .map(|(name, a, b)| {
            let mut panel = Panel::new(name, columns("t", stat_names()));
            panel.rows = collect_rows(
                times
                    .par_iter()
                    .map(|&t| {
                        let mut row = vec![t];
                        row.extend(reduced_coherence_row(cfg, a, b, &params(g, t)?)?);
                        Ok(row)
                    })
                    .collect(),
            )?;
            Ok(panel)
        })
        .collect()
}
