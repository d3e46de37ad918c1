//! Named figure parameter sets and resolution of command-line overrides.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use clap::ValueEnum;
use serde::Serialize;

use super::{CliError, CommandKind, RunConfig, SeriesArgs};
use crate::coherence::Basis;
use crate::identical::Statistics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }

    /// The subcommand a preset belongs to.
    pub fn command(self) -> CommandKind {
        match self {
            Preset::Fig1 | Preset::Fig2 => CommandKind::Coherence,
            Preset::Fig3 => CommandKind::Grid,
            Preset::Fig4 => CommandKind::Trajectories,
            Preset::Fig5 => CommandKind::Mss,
            Preset::Fig6 => CommandKind::Detect,
            Preset::Fig7 | Preset::Fig8 => CommandKind::Spcoherence,
        }
    }

    pub fn subcommand(self) -> &'static str {
        match self.command() {
            CommandKind::Coherence => "coherence",
            CommandKind::Grid => "grid",
            CommandKind::Trajectories => "trajectories",
            CommandKind::Mss => "mss",
            CommandKind::Detect => "detect",
            CommandKind::Spcoherence => "spcoherence",
        }
    }
}

const DAMPINGS: [f64; 4] = [0.0, 0.1, 0.2, 0.3];

fn defaults() -> RunConfig {
    RunConfig {
        command: CommandKind::Coherence,
        preset: "custom".into(),
        layout: Layout::Series,
        alpha: [1.0, 0.0],
        beta: None,
        gamma0: vec![0.0],
        t_max: 10.0,
        dt: 0.1,
        kbt: None,
        d: vec![2.0],
        stats: Statistics::ALL.to_vec(),
        basis: Basis::Energy,
        n_max: None,
        x_min: -12.0,
        x_max: 12.0,
        nx: 400,
        alpha2_max: 4.0,
        alpha2_step: 0.05,
        t0: 5.0,
        alphas: Vec::new(),
        per_packet: 10,
        format: super::Format::Csv,
        precision: 12,
    }
}

/// How a command lays out its panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Time series, one panel (or one per γ0 / amplitude / width).
    Series,
    /// C_r(ρ2) versus t and versus |α|² at t0.
    CatTimeAndAlpha,
    /// Non-dissipative |α|² sweeps of cats and bounds.
    CatSweeps,
    /// Non-dissipative |α|² sweep of the reduced-state coherences.
    StatisticsSweep,
}

fn preset_config(p: Preset) -> RunConfig {
    let mut c = defaults();
    c.command = p.command();
    c.preset = p.name().into();
    let cat_big = 7.0 * FRAC_1_SQRT_2;
    match p {
        Preset::Fig1 => {
            c.layout = Layout::CatTimeAndAlpha;
            c.beta = Some([-1.0, 0.0]);
            c.gamma0 = DAMPINGS.to_vec();
        }
        Preset::Fig2 => {
            c.layout = Layout::CatSweeps;
        }
        Preset::Fig3 | Preset::Fig4 => {
            c.alpha = [cat_big, 0.0];
            c.beta = Some([-cat_big, 0.0]);
            c.gamma0 = DAMPINGS.to_vec();
            c.dt = if p == Preset::Fig3 { 0.05 } else { 0.01 };
        }
        Preset::Fig5 => {
            c.beta = Some([-1.0, 0.0]);
            c.gamma0 = DAMPINGS.to_vec();
            c.t_max = 2.0 * PI;
            c.dt = 0.01;
        }
        Preset::Fig6 => {
            c.beta = Some([-1.0, 0.0]);
            c.gamma0 = vec![0.0, 0.05, 0.1];
            c.d = vec![1.0, 2.0];
            c.stats = vec![Statistics::BE, Statistics::FD];
            c.t_max = 2.0 * PI;
            c.dt = 0.01;
        }
        Preset::Fig7 => {
            c.gamma0 = vec![0.001];
            c.alphas = vec![FRAC_1_SQRT_2, 1.0];
            c.dt = 0.05;
        }
        Preset::Fig8 => {
            c.layout = Layout::StatisticsSweep;
        }
    }
    c
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(format!("--{name} must be finite, got {v}")))
    }
}

/// Upper bound on rows of any one series, to catch runaway step choices.
const MAX_POINTS: f64 = 1e6;

/// Merge a preset (or the defaults) with explicit flags and check ranges.
pub fn resolve(kind: CommandKind, a: &SeriesArgs) -> Result<RunConfig, CliError> {
    let mut c = match a.preset {
        Some(p) if p.command() != kind => {
            return Err(config_err(format!(
                "preset {} belongs to the `{}` subcommand",
                p.name(),
                p.subcommand()
            )))
        }
        Some(p) => preset_config(p),
        None => {
            let mut c = defaults();
            c.command = kind;
            c
        }
    };
    if let Some(al) = a.alpha {
        c.alpha = [al.re, al.im];
        c.alphas.clear();
        if a.beta.is_none() && c.preset != "custom" {
            c.beta = None;
        }
    }
    if let Some(b) = a.beta {
        c.beta = Some([b.re, b.im]);
    }
    if !a.gamma0.is_empty() {
        c.gamma0 = a.gamma0.clone();
    }
    if let Some(t) = a.t_max {
        c.t_max = t;
    }
    if let Some(dt) = a.dt {
        match c.layout {
            Layout::CatSweeps | Layout::StatisticsSweep => c.alpha2_step = dt,
            _ => c.dt = dt,
        }
    }
    if a.kbt.is_some() {
        c.kbt = a.kbt;
    }
    if !a.d.is_empty() {
        c.d = a.d.clone();
    }
    if let Some(s) = a.stats {
        c.stats = vec![s];
    }
    if let Some(b) = a.basis {
        c.basis = b.into();
    }
    if a.nmax.is_some() {
        c.n_max = a.nmax;
    }
    if let Some(v) = a.x_min {
        c.x_min = v;
    }
    if let Some(v) = a.x_max {
        c.x_max = v;
    }
    if let Some(v) = a.nx {
        c.nx = v;
    }
    c.format = a.format;
    c.precision = a.precision;
    check(&c, a)?;
    Ok(c)
}

fn check(c: &RunConfig, a: &SeriesArgs) -> Result<(), CliError> {
    finite("t-max", c.t_max)?;
    finite("dt", c.dt)?;
    if c.t_max < 0.0 {
        return Err(config_err(format!("--t-max must be >= 0, got {}", c.t_max)));
    }
    if !(c.dt > 0.0) || !(c.alpha2_step > 0.0 && c.alpha2_step.is_finite()) {
        return Err(config_err("--dt must be > 0"));
    }
    if c.t_max / c.dt > MAX_POINTS || c.alpha2_max / c.alpha2_step > MAX_POINTS {
        return Err(config_err("step too small: more than 1e6 rows requested"));
    }
    if c.gamma0.is_empty() {
        return Err(config_err("--gamma0 needs at least one value"));
    }
    for &g in &c.gamma0 {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(config_err(format!("--gamma0 values must be finite and >= 0, got {g}")));
        }
    }
    for &d in &c.d {
        if !(d > 0.0 && d.is_finite()) {
            return Err(config_err(format!("--d must be > 0, got {d}")));
        }
    }
    if let Some(k) = c.kbt {
        if !(k > 0.0 && k.is_finite()) {
            return Err(config_err(format!("--kbt must be > 0, got {k}")));
        }
    }
    if c.nx < 2 {
        return Err(config_err("--nx must be >= 2"));
    }
    finite("x-min", c.x_min)?;
    finite("x-max", c.x_max)?;
    if c.x_min >= c.x_max {
        return Err(config_err("--x-min must be below --x-max"));
    }
    if !(1..=17).contains(&c.precision) {
        return Err(config_err("--precision must be between 1 and 17"));
    }
    if let Some(out) = &a.out {
        let parent = out.parent().filter(|p| !p.as_os_str().is_empty());
        if let Some(dir) = parent {
            if !dir.is_dir() {
                return Err(config_err(format!("output directory {} does not exist", dir.display())));
            }
        }
        if out.is_dir() {
            return Err(config_err(format!("output path {} is a directory", out.display())));
        }
    }
    Ok(())
}
