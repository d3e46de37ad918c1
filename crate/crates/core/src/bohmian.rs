//! Position-space density, probability current and Bohmian trajectories of
//! damped coherent-state superpositions.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quadrature::trapezoid;
use crate::states::{amplitude_at, decoherence_factor_raw, position_wf_at, EvolutionParams, SuperposedState};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Time step used for ∂_t P in [`continuity_residual`].
pub const TIME_DIFF_STEP: f64 = 1e-5;

/// The state at one instant: evolved amplitudes and the weights
/// w_ij = 𝒩² c_i c_j* f_ij(t) of ψ_i(x) ψ_j*(x').
#[derive(Debug, Clone)]
struct Snapshot {
    alphas: Vec<Complex64>,
    q: Vec<f64>,
    k: Vec<f64>,
    weights: Vec<Complex64>,
    gamma0: f64,
}

impl Snapshot {
    fn new(s: &SuperposedState, gamma0: f64, t: f64) -> Self {
        let comps = s.components();
        let n2 = s.normalization().powi(2);
        let alphas: Vec<Complex64> = comps.iter().map(|(_, a)| amplitude_at(*a, gamma0, t)).collect();
        let mut weights = Vec::with_capacity(comps.len() * comps.len());
        for (i, (ci, ai)) in comps.iter().enumerate() {
            for (j, (cj, aj)) in comps.iter().enumerate() {
                let f = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    decoherence_factor_raw(*ai, *aj, gamma0, t)
                };
                weights.push(n2 * ci * cj.conj() * f);
            }
        }
        Self {
            q: alphas.iter().map(|a| SQRT_2 * a.re).collect(),
            k: alphas.iter().map(|a| SQRT_2 * a.im).collect(),
            alphas,
            weights,
            gamma0,
        }
    }

    fn len(&self) -> usize {
        self.alphas.len()
    }

    fn psi(&self, x: f64) -> Vec<Complex64> {
        self.alphas.iter().map(|a| position_wf_at(*a, x)).collect()
    }

    fn density_matrix(&self, x: f64, xp: f64) -> Complex64 {
        let (u, v) = (self.psi(x), self.psi(xp));
        let n = self.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                acc += self.weights[i * n + j] * ui * vj.conj();
            }
        }
        acc
    }

    /// Σ_ij g_ij(x) w_ij ψ_i ψ_j* for a per-pair factor g.
    fn pair_sum(&self, x: f64, g: impl Fn(usize, usize) -> Complex64) -> f64 {
        let u = self.psi(x);
        let n = self.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.weights[i * n + j] * u[i] * u[j].conj() * g(i, j);
            }
        }
        acc.re
    }

    /// The x-independent factor B_ij with j = Re Σ B_ij T_ij on the diagonal,
    /// from -i∂_r - (γ0/2)(R + ½∂_R) acting on ψ_i(x)ψ_j*(x').
    fn current_factor(&self, i: usize, j: usize) -> Complex64 {
        let (qi, qj, ki, kj) = (self.q[i], self.q[j], self.k[i], self.k[j]);
        Complex64::new(0.5 * (ki + kj), -0.5 * (qi - qj))
            - 0.5 * self.gamma0 * Complex64::new(0.5 * (qi + qj), 0.5 * (ki - kj))
    }

    /// ∂_x [ψ_i(x) ψ_j*(x)] / [ψ_i(x) ψ_j*(x)].
    fn log_derivative(&self, x: f64, i: usize, j: usize) -> Complex64 {
        Complex64::new(-(x - self.q[i]) - (x - self.q[j]), self.k[i] - self.k[j])
    }

    fn density(&self, x: f64) -> f64 {
        self.pair_sum(x, |_, _| Complex64::new(1.0, 0.0))
    }

    fn density_dx(&self, x: f64) -> f64 {
        self.pair_sum(x, |i, j| self.log_derivative(x, i, j))
    }

    fn current(&self, x: f64) -> f64 {
        self.pair_sum(x, |i, j| self.current_factor(i, j))
    }

    fn current_dx(&self, x: f64) -> f64 {
        self.pair_sum(x, |i, j| self.current_factor(i, j) * self.log_derivative(x, i, j))
    }

    fn velocity(&self, x: f64) -> (f64, f64) {
        let u = self.psi(x);
        let n = self.len();
        let (mut p, mut j) = (0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                let t = self.weights[a * n + b] * u[a] * u[b].conj();
                p += t.re;
                j += (t * self.current_factor(a, b)).re;
            }
        }
        (p, j)
    }
}

/// ρ(x, x', t) = 𝒩² Σ_ij c_i c_j* f_ij(t) ψ_{α_i}(x, t) ψ*_{α_j}(x', t).
pub fn density_matrix_position(s: &SuperposedState, p: &EvolutionParams, x: f64, xp: f64) -> Complex64 {
    Snapshot::new(s, p.gamma0(), p.t()).density_matrix(x, xp)
}

/// P(x, t) = ρ(x, x, t).
pub fn probability_density(s: &SuperposedState, p: &EvolutionParams, x: f64) -> f64 {
    Snapshot::new(s, p.gamma0(), p.t()).density(x)
}

/// ∂_x P(x, t).
pub fn probability_density_dx(s: &SuperposedState, p: &EvolutionParams, x: f64) -> f64 {
    Snapshot::new(s, p.gamma0(), p.t()).density_dx(x)
}

/// J(x, t) = Re{[-i∂_r - (γ0/2)(R + ½∂_R)] ρ(R, r, t)} at R = x, r = 0.
///
/// Each term ψ_i(x)ψ_j*(x') contributes T_ij [½(k_i + k_j) - (i/2)(q_i - q_j)
/// minus (γ0/2)((q_i + q_j)/2 + i(k_i - k_j)/2)] with q = √2 Re α(t) and
/// k = √2 Im α(t); the x dependence cancels inside the bracket.
pub fn probability_current(s: &SuperposedState, p: &EvolutionParams, x: f64) -> f64 {
    Snapshot::new(s, p.gamma0(), p.t()).current(x)
}

/// ∂_x J(x, t).
pub fn probability_current_dx(s: &SuperposedState, p: &EvolutionParams, x: f64) -> f64 {
    Snapshot::new(s, p.gamma0(), p.t()).current_dx(x)
}

/// Equally spaced spatial lattice x_min, …, x_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, nx: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(invalid("x range", format!("need finite x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if nx < 2 {
            return Err(invalid("nx", format!("need at least 2 points, got {nx}")));
        }
        Ok(Self { x_min, x_max, nx })
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.nx)
            .map(|i| if i + 1 == self.nx { self.x_max } else { self.x_min + h * i as f64 })
            .collect()
    }
}

/// P and J sampled on a space-time lattice; rows are times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridField {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub gamma0: f64,
    pub times: Vec<f64>,
    pub p: Array2<f64>,
    pub j: Array2<f64>,
}

impl GridField {
    pub fn spec(&self) -> GridSpec {
        GridSpec {
            x_min: self.x_min,
            x_max: self.x_max,
            nx: self.nx,
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        self.spec().points()
    }

    /// Trapezoid ∫P dx for each stored time.
    pub fn norms(&self) -> Vec<f64> {
        let h = self.spec().step();
        self.p.rows().into_iter().map(|row| trapezoid(row.as_slice().expect("standard layout"), h)).collect()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(invalid("times", "empty time list"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("times", "must be finite and >= 0"));
    }
    Ok(())
}

/// Fills P and J over `times` × `grid`, one time slice per worker task.
pub fn sample_grid(s: &SuperposedState, gamma0: f64, times: &[f64], grid: GridSpec) -> Result<GridField> {
    check_times(times)?;
    EvolutionParams::new(gamma0, 0.0)?;
    let xs = grid.points();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = times
        .par_iter()
        .map(|&t| {
            let snap = Snapshot::new(s, gamma0, t);
            xs.iter().map(|&x| snap.velocity(x)).unzip()
        })
        .collect();
    let nt = times.len();
    let mut p = Array2::zeros((nt, grid.nx));
    let mut j = Array2::zeros((nt, grid.nx));
    for (r, (pr, jr)) in rows.into_iter().enumerate() {
        for c in 0..grid.nx {
            p[[r, c]] = pr[c];
            j[[r, c]] = jr[c];
        }
    }
    Ok(GridField {
        x_min: grid.x_min,
        x_max: grid.x_max,
        nx: grid.nx,
        gamma0,
        times: times.to_vec(),
        p,
        j,
    })
}

fn density_time_derivative(s: &SuperposedState, gamma0: f64, t: f64, x: f64) -> f64 {
    let h = TIME_DIFF_STEP;
    let at = |tt: f64| Snapshot::new(s, gamma0, tt).density(x);
    if t >= h {
        (at(t + h) - at(t - h)) / (2.0 * h)
    } else {
        (-3.0 * at(t) + 4.0 * at(t + h) - at(t + 2.0 * h)) / (2.0 * h)
    }
}

/// max |∂_t P + ∂_x J| over interior lattice points at every stored time,
/// with ∂_x J analytic and ∂_t P a central difference (one-sided at t < h).
pub fn continuity_residual(s: &SuperposedState, grid: &GridField) -> f64 {
    let xs = grid.xs();
    let interior = &xs[1..xs.len() - 1];
    grid.times
        .par_iter()
        .map(|&t| {
            let snap = Snapshot::new(s, grid.gamma0, t);
            interior
                .iter()
                .map(|&x| (density_time_derivative(s, grid.gamma0, t, x) + snap.current_dx(x)).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// max P / min P over `n` equally spaced points of [x_lo, x_hi].
pub fn fringe_contrast(s: &SuperposedState, p: &EvolutionParams, x_lo: f64, x_hi: f64, n: usize) -> f64 {
    let snap = Snapshot::new(s, p.gamma0(), p.t());
    let h = (x_hi - x_lo) / (n.max(2) - 1) as f64;
    let (lo, hi) = (0..n.max(2))
        .map(|i| snap.density(x_lo + h * i as f64))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Positions where the cumulative of P(x, 0) restricted to [x_lo, x_hi]
/// reaches (k + ½)/n, k = 0..n.
pub fn density_quantile_positions(s: &SuperposedState, n: usize, x_lo: f64, x_hi: f64) -> Result<Vec<f64>> {
    quantiles_at(s, 0.0, 0.0, n, x_lo, x_hi)
}

fn quantiles_at(s: &SuperposedState, gamma0: f64, t: f64, n: usize, x_lo: f64, x_hi: f64) -> Result<Vec<f64>> {
    let grid = GridSpec::new(x_lo, x_hi, 20_001)?;
    let snap = Snapshot::new(s, gamma0, t);
    let xs = grid.points();
    let h = grid.step();
    let dens: Vec<f64> = xs.iter().map(|&x| snap.density(x).max(0.0)).collect();
    let mut cdf = vec![0.0; xs.len()];
    for i in 1..xs.len() {
        cdf[i] = cdf[i - 1] + 0.5 * h * (dens[i] + dens[i - 1]);
    }
    let total = *cdf.last().expect("non-empty");
    if !(total > 0.0) {
        return Err(Error::DegenerateInput("no probability in the quantile window"));
    }
    let mut out = Vec::with_capacity(n);
    let mut i = 1;
    for k in 0..n {
        let target = (k as f64 + 0.5) / n as f64 * total;
        while i + 1 < cdf.len() && cdf[i] < target {
            i += 1;
        }
        let (c0, c1) = (cdf[i - 1], cdf[i]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        out.push(xs[i - 1] + frac * h);
    }
    Ok(out)
}

/// `per_packet` quantile positions of P(x, 0) within ±6 widths of each
/// component's initial center, sorted.
pub fn packet_quantile_positions(s: &SuperposedState, per_packet: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (_, a) in s.components() {
        let center = SQRT_2 * a.re();
        out.extend(density_quantile_positions(s, per_packet, center - 6.0, center + 6.0)?);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Keep every n-th step in the stored paths.
    pub sample_every: usize,
    pub velocity_clamp: f64,
    pub density_floor: f64,
    /// Slack allowed when checking that paths keep their initial order.
    pub ordering_tolerance: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 10.0,
            sample_every: 10,
            velocity_clamp: 1e3,
            density_floor: 1e-12,
            ordering_tolerance: 1e-6,
        }
    }
}

impl TrajectoryConfig {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(invalid("t_final", format!("must be finite and >= 0, got {}", self.t_final)));
        }
        if self.sample_every == 0 {
            return Err(invalid("sample_every", "must be >= 1"));
        }
        if !(self.velocity_clamp > 0.0) {
            return Err(invalid("velocity_clamp", "must be > 0"));
        }
        if !(self.density_floor >= 0.0) {
            return Err(invalid("density_floor", "must be >= 0"));
        }
        Ok(())
    }
}

/// Bohmian paths x(x⁽⁰⁾, t) sampled at `times`; rows are trajectories.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryEnsemble {
    pub initial_positions: Vec<f64>,
    pub times: Vec<f64>,
    pub paths: Array2<f64>,
    /// Time at which a path hit the density floor and stopped, if it did.
    pub halted: Vec<Option<f64>>,
    pub solver_tolerance: f64,
}

impl TrajectoryEnsemble {
    /// Largest amount by which a path that started to the left of another
    /// ends up to its right, over all stored times.
    pub fn ordering_violation(&self) -> f64 {
        let mut order: Vec<usize> = (0..self.initial_positions.len()).collect();
        order.sort_by(|&a, &b| self.initial_positions[a].total_cmp(&self.initial_positions[b]));
        let mut worst: f64 = 0.0;
        for col in 0..self.times.len() {
            for w in order.windows(2) {
                worst = worst.max(self.paths[[w[0], col]] - self.paths[[w[1], col]]);
            }
        }
        worst
    }

    pub fn preserves_order(&self) -> bool {
        self.ordering_violation() <= self.solver_tolerance
    }

    pub fn final_positions(&self) -> Vec<f64> {
        let last = self.times.len() - 1;
        (0..self.paths.nrows()).map(|r| self.paths[[r, last]]).collect()
    }
}

/// Integrates dx/dt = J/P with fixed-step RK4 from every initial point.
///
/// The velocity is clamped to ±`velocity_clamp`; a path whose density drops
/// below `density_floor` stops there and is flagged in `halted`. Starting
/// points already below the floor are rejected.
pub fn integrate_trajectories(
    s: &SuperposedState,
    gamma0: f64,
    initial: &[f64],
    cfg: &TrajectoryConfig,
) -> Result<TrajectoryEnsemble> {
    cfg.validate()?;
    EvolutionParams::new(gamma0, 0.0)?;
    let start = Snapshot::new(s, gamma0, 0.0);
    for &x in initial {
        let d = start.density(x);
        if !(x.is_finite() && d > cfg.density_floor) {
            return Err(Error::DensityFloorHit { x, t: 0.0, density: d });
        }
    }
    let steps = if cfg.t_final == 0.0 {
        0
    } else {
        (cfg.t_final / cfg.dt - 1e-9).ceil().max(1.0) as usize
    };
    let h = if steps == 0 { 0.0 } else { cfg.t_final / steps as f64 };
    // Half-step snapshots shared by every path: index 2k is t_k, 2k+1 is t_k + h/2.
    let snaps: Vec<Snapshot> = (0..=2 * steps)
        .into_par_iter()
        .map(|i| Snapshot::new(s, gamma0, 0.5 * h * i as f64))
        .collect();
    let sample_steps: Vec<usize> = (0..=steps).filter(|k| k % cfg.sample_every == 0 || *k == steps).collect();
    let times: Vec<f64> = sample_steps.iter().map(|&k| h * k as f64).collect();

    let results: Vec<(Vec<f64>, Option<f64>)> = initial
        .par_iter()
        .map(|&x0| {
            let velocity = |snap: &Snapshot, x: f64| -> Option<f64> {
                let (p, j) = snap.velocity(x);
                if !(p >= cfg.density_floor) {
                    return None;
                }
                Some((j / p).clamp(-cfg.velocity_clamp, cfg.velocity_clamp))
            };
            let mut x = x0;
            let mut halted = None;
            let mut path = Vec::with_capacity(sample_steps.len());
            path.push(x);
            for k in 0..steps {
                if halted.is_none() {
                    let (s0, sm, s1) = (&snaps[2 * k], &snaps[2 * k + 1], &snaps[2 * k + 2]);
                    let next = (|| {
                        let k1 = velocity(s0, x)?;
                        let k2 = velocity(sm, x + 0.5 * h * k1)?;
                        let k3 = velocity(sm, x + 0.5 * h * k2)?;
                        let k4 = velocity(s1, x + h * k3)?;
                        Some(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
                    })();
                    match next {
                        Some(v) => x = v,
                        None => halted = Some(h * k as f64),
                    }
                }
                if (k + 1) % cfg.sample_every == 0 || k + 1 == steps {
                    path.push(x);
                }
            }
            (path, halted)
        })
        .collect();

    let mut paths = Array2::zeros((initial.len(), times.len()));
    let mut halted = Vec::with_capacity(initial.len());
    for (r, (path, stop)) in results.into_iter().enumerate() {
        for (c, v) in path.into_iter().enumerate() {
            paths[[r, c]] = v;
        }
        halted.push(stop);
    }
    Ok(TrajectoryEnsemble {
        initial_positions: initial.to_vec(),
        times,
        paths,
        halted,
        solver_tolerance: cfg.ordering_tolerance,
    })
}

/// Classical center √2 Re α(t) of a single coherent packet.
pub fn classical_center(a: crate::states::CoherentAmplitude, gamma0: f64, t: f64) -> f64 {
    SQRT_2 * amplitude_at(a, gamma0, t).re
}
