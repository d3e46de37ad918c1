//! Fixed-step RK4 integration of the master equation in truncated Fock space.
//!
//! Used as an independent check on the closed-form coherent-state solution.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fock::FockDensityMatrix;

/// Largest RK4 step accepted relative to the generator's spectral radius.
const STABILITY_LIMIT: f64 = 2.0;
const TRACE_DRIFT_LIMIT: f64 = 1e-6;
const TRUNCATION_GUARD: f64 = 1e-8;
const INPUT_TRACE_TOLERANCE: f64 = 1e-6;

/// Dense annihilation and creation matrices on {|0⟩, …, |n_max⟩}.
#[derive(Debug, Clone)]
pub struct LadderOperators {
    a: Array2<Complex64>,
    adag: Array2<Complex64>,
}

impl LadderOperators {
    pub fn new(n_max: usize) -> Self {
        let d = n_max + 1;
        let mut a = Array2::zeros((d, d));
        for n in 1..d {
            a[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        let adag = a.t().mapv(|z: Complex64| z.conj());
        Self { a, adag }
    }

    pub fn a(&self) -> &Array2<Complex64> {
        &self.a
    }

    pub fn adag(&self) -> &Array2<Complex64> {
        &self.adag
    }

    pub fn number(&self) -> Array2<Complex64> {
        self.adag.dot(&self.a)
    }

    /// max |[a, a†] - 1| over the block that excludes the top level.
    pub fn commutator_defect(&self) -> f64 {
        let c = self.a.dot(&self.adag) - self.adag.dot(&self.a);
        let d = c.nrows();
        let mut worst: f64 = 0.0;
        for m in 0..d - 1 {
            for n in 0..d - 1 {
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((c[[m, n]] - target).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    pub method: Method,
    /// Rescale to unit trace after every step.
    pub renormalize: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 0.005,
            t_final: 0.0,
            method: Method::Rk4,
            renormalize: false,
        }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_final: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("must be finite and > 0, got {dt}")));
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(invalid("t_final", format!("must be finite and >= 0, got {t_final}")));
        }
        Ok(Self {
            dt,
            t_final,
            ..Self::default()
        })
    }
}

/// dρ/dt for the thermal master equation,
///
/// -i[a†a, ρ] + γ0(n̄+1)(aρa† - ½{a†a, ρ}) + γ0 n̄(a†ρa - ½{aa†, ρ}),
///
/// with a, a† truncated at n_max. Element-wise:
/// (aρa†)_mn = √((m+1)(n+1)) ρ_{m+1,n+1}, (a†ρa)_mn = √(mn) ρ_{m-1,n-1},
/// and aa† = diag(1, …, n_max, 0) on the truncation, which keeps the trace
/// exactly conserved and the truncated Gibbs state exactly stationary.
/// For n̄ = 0 this is (-i - γ0/2)a†aρ + (i - γ0/2)ρa†a + γ0 aρa†.
pub fn lindblad_rhs(m: &FockDensityMatrix, gamma0: f64, nbar: f64) -> FockDensityMatrix {
    let rho = m.matrix();
    let d = m.dim();
    let down = gamma0 * (nbar + 1.0);
    let up = gamma0 * nbar;
    let raised = |k: usize| if k + 1 < d { (k + 1) as f64 } else { 0.0 };
    let out = Array2::from_shape_fn((d, d), |(i, j)| {
        let (mf, nf) = (i as f64, j as f64);
        let mut v = Complex64::new(0.0, -(mf - nf)) * rho[[i, j]];
        let mut decay = -0.5 * down * (mf + nf);
        if i + 1 < d && j + 1 < d {
            v += down * ((mf + 1.0) * (nf + 1.0)).sqrt() * rho[[i + 1, j + 1]];
        }
        if up != 0.0 {
            decay -= 0.5 * up * (raised(i) + raised(j));
            if i > 0 && j > 0 {
                v += up * (mf * nf).sqrt() * rho[[i - 1, j - 1]];
            }
        }
        v + decay * rho[[i, j]]
    });
    FockDensityMatrix::from_matrix(out).expect("square by construction")
}

/// Upper estimate of the generator's spectral radius on this truncation.
fn spectral_radius(n_max: usize, gamma0: f64, nbar: f64) -> f64 {
    n_max as f64 + gamma0 * (2.0 * nbar + 1.0) * (n_max as f64 + 1.0)
}

fn check_inputs(m0: &FockDensityMatrix, gamma0: f64, nbar: f64, cfg: &IntegratorConfig) -> Result<()> {
    if !(gamma0 >= 0.0 && gamma0.is_finite()) {
        return Err(invalid("gamma0", format!("must be finite and >= 0, got {gamma0}")));
    }
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(invalid("nbar", format!("must be finite and >= 0, got {nbar}")));
    }
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(invalid("dt", format!("must be finite and > 0, got {}", cfg.dt)));
    }
    let tr = m0.trace();
    if (tr - 1.0).norm() > INPUT_TRACE_TOLERANCE {
        return Err(invalid("m0", format!("trace {tr} is not 1")));
    }
    if m0.hermiticity_defect() > 1e-10 {
        return Err(invalid("m0", "not Hermitian"));
    }
    let product = cfg.dt * spectral_radius(m0.n_max(), gamma0, nbar);
    if product > STABILITY_LIMIT {
        return Err(Error::StepTooLarge(format!(
            "dt = {} times generator radius {:.3} is {product:.3} > {STABILITY_LIMIT}",
            cfg.dt,
            spectral_radius(m0.n_max(), gamma0, nbar)
        )));
    }
    Ok(())
}

fn axpy(base: &Array2<Complex64>, k: &FockDensityMatrix, h: f64) -> FockDensityMatrix {
    FockDensityMatrix::from_matrix(base + &(k.matrix() * Complex64::new(h, 0.0))).expect("square")
}

fn rk4_step(m: &FockDensityMatrix, gamma0: f64, nbar: f64, h: f64) -> FockDensityMatrix {
    let base = m.matrix();
    let k1 = lindblad_rhs(m, gamma0, nbar);
    let k2 = lindblad_rhs(&axpy(base, &k1, 0.5 * h), gamma0, nbar);
    let k3 = lindblad_rhs(&axpy(base, &k2, 0.5 * h), gamma0, nbar);
    let k4 = lindblad_rhs(&axpy(base, &k3, h), gamma0, nbar);
    let incr = (k1.matrix() + &(k2.matrix() * 2.0) + &(k3.matrix() * 2.0) + k4.matrix()) * (h / 6.0);
    FockDensityMatrix::from_matrix(base + &incr).expect("square")
}

struct Stepper<'a> {
    gamma0: f64,
    nbar: f64,
    cfg: &'a IntegratorConfig,
    state: FockDensityMatrix,
    t: f64,
}

impl Stepper<'_> {
    fn guard(&self) -> Result<()> {
        let drift = (self.state.trace() - 1.0).norm();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::StepTooLarge(format!("trace drifted by {drift:e} at t = {}", self.t)));
        }
        let top = self.state.top_population(2);
        if !(top <= TRUNCATION_GUARD) {
            return Err(Error::TruncationGuard { t: self.t, population: top });
        }
        Ok(())
    }

    fn advance_to(&mut self, target: f64) -> Result<()> {
        let span = target - self.t;
        if span <= 0.0 {
            return Ok(());
        }
        let steps = (span / self.cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for k in 0..steps {
            self.state = rk4_step(&self.state, self.gamma0, self.nbar, h);
            self.state.hermitize();
            if self.cfg.renormalize {
                let tr = self.state.trace().re;
                self.state = FockDensityMatrix::from_matrix(self.state.matrix() / Complex64::new(tr, 0.0))?;
            }
            self.t = if k + 1 == steps { target } else { self.t + h };
            self.guard()?;
        }
        Ok(())
    }
}

/// Integrates ρ from t = 0 to `cfg.t_final`.
///
/// When t_final is not a multiple of dt the steps are shortened uniformly so
/// that the last one lands exactly on t_final.
pub fn integrate(m0: &FockDensityMatrix, gamma0: f64, nbar: f64, cfg: &IntegratorConfig) -> Result<FockDensityMatrix> {
    let mut out = integrate_snapshots(m0, gamma0, nbar, cfg, &[cfg.t_final])?;
    Ok(out.pop().expect("one snapshot"))
}

/// States at each of `times` (non-decreasing, ≥ 0) from a single run.
pub fn integrate_snapshots(
    m0: &FockDensityMatrix,
    gamma0: f64,
    nbar: f64,
    cfg: &IntegratorConfig,
    times: &[f64],
) -> Result<Vec<FockDensityMatrix>> {
    check_inputs(m0, gamma0, nbar, cfg)?;
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("times", "must be finite and >= 0"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "must be non-decreasing"));
    }
    let mut stepper = Stepper {
        gamma0,
        nbar,
        cfg,
        state: m0.clone(),
        t: 0.0,
    };
    stepper.guard()?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        stepper.advance_to(t)?;
        out.push(stepper.state.clone());
    }
    Ok(out)
}

fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    Array2::from_shape_fn((ra * rb, ca * cb), |(i, j)| a[[i / rb, j / cb]] * b[[i % rb, j % cb]])
}

/// Largest truncation accepted by [`two_particle_step_check`].
pub const TWO_PARTICLE_MAX_N: usize = 12;

/// ‖(d/dt)(ρ1⊗ρ2) - [(𝓛ρ1)⊗ρ2 + ρ1⊗(𝓛ρ2)]‖_max at zero temperature, where
/// the left side applies the two-mode generator built from a⊗1 and 1⊗a on
/// the product space.
pub fn two_particle_step_check(ma: &FockDensityMatrix, mb: &FockDensityMatrix, gamma0: f64) -> Result<f64> {
    for (name, m) in [("ma", ma), ("mb", mb)] {
        if m.n_max() > TWO_PARTICLE_MAX_N {
            return Err(invalid(name, format!("n_max {} exceeds {TWO_PARTICLE_MAX_N}", m.n_max())));
        }
    }
    let ida = Array2::<Complex64>::eye(ma.dim());
    let idb = Array2::<Complex64>::eye(mb.dim());
    let (la, lb) = (LadderOperators::new(ma.n_max()), LadderOperators::new(mb.n_max()));
    let rho = kron(ma.matrix(), mb.matrix());
    let mut lhs = Array2::<Complex64>::zeros(rho.dim());
    for op in [kron(la.a(), &idb), kron(&ida, lb.a())] {
        let op_dag = op.t().mapv(|z| z.conj());
        let num = op_dag.dot(&op);
        lhs = lhs
            + num.dot(&rho) * Complex64::new(-0.5 * gamma0, -1.0)
            + rho.dot(&num) * Complex64::new(-0.5 * gamma0, 1.0)
            + op.dot(&rho).dot(&op_dag) * gamma0;
    }
    let rhs = kron(lindblad_rhs(ma, gamma0, 0.0).matrix(), mb.matrix())
        + kron(ma.matrix(), lindblad_rhs(mb, gamma0, 0.0).matrix());
    Ok(lhs.iter().zip(rhs.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_fock_vector, density_from_superposition, hermitian_eigenvalues, trace_distance};
    use crate::states::{decoherence_factor, evolve_amplitude, make_cat, overlap, CatKind, CoherentAmplitude, EvolutionParams, SuperposedState};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn coherent_rho(a: CoherentAmplitude, n_max: usize) -> FockDensityMatrix {
        FockDensityMatrix::pure(&coherent_fock_vector(a, n_max))
    }

    /// The same generator from dense operator products.
    fn dense_rhs(m: &FockDensityMatrix, gamma0: f64, nbar: f64) -> Array2<Complex64> {
        let ops = LadderOperators::new(m.n_max());
        let (a, ad) = (ops.a(), ops.adag());
        let rho = m.matrix();
        let num = ops.number();
        let anti = a.dot(ad);
        let half = c(0.5, 0.0);
        (num.dot(rho) - rho.dot(&num)) * c(0.0, -1.0)
            + (a.dot(rho).dot(ad) - (num.dot(rho) + rho.dot(&num)) * half) * (gamma0 * (nbar + 1.0))
            + (ad.dot(rho).dot(a) - (anti.dot(rho) + rho.dot(&anti)) * half) * (gamma0 * nbar)
    }

    fn random_density(seed: u64, n_max: usize) -> FockDensityMatrix {
        // Small deterministic LCG; Gram matrix of pseudo-random columns.
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let d = n_max + 1;
        let b = Array2::from_shape_fn((d, d), |_| c(next(), next()));
        let g = b.dot(&b.t().mapv(|z: Complex64| z.conj()));
        let tr = g.diag().sum();
        FockDensityMatrix::from_matrix(g / tr).unwrap()
    }

    #[test]
    fn ladder_operators() {
        let ops = LadderOperators::new(6);
        assert_eq!(ops.a()[[2, 3]], c(3f64.sqrt(), 0.0));
        assert!(ops.commutator_defect() < 1e-14);
        assert_abs_diff_eq!(ops.number()[[4, 4]].re, 4.0, epsilon = 1e-14);
    }

    #[test]
    fn rhs_matches_dense_operators() {
        for (seed, g, nbar) in [(1, 0.0, 0.0), (2, 0.3, 0.0), (3, 0.2, 0.7), (4, 1.5, 2.0)] {
            let m = random_density(seed, 9);
            let rhs = lindblad_rhs(&m, g, nbar);
            let dense = dense_rhs(&m, g, nbar);
            let diff = rhs.matrix().iter().zip(dense.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-14, "diff {diff}");
            assert!(rhs.hermiticity_defect() < 1e-14);
            assert!(rhs.trace().norm() < 1e-13);
        }
    }

    #[test]
    fn rhs_steady_states() {
        let vac = coherent_rho(CoherentAmplitude::vacuum(), 10);
        assert_eq!(lindblad_rhs(&vac, 0.7, 0.0).matrix().iter().map(|z| z.norm()).fold(0.0, f64::max), 0.0);
        let gibbs = FockDensityMatrix::thermal(0.8, 30).unwrap();
        let r = lindblad_rhs(&gibbs, 0.4, 0.8);
        assert!(r.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-15);
        let coh = coherent_rho(CoherentAmplitude::new(1.2, -0.4), 30);
        assert!(lindblad_rhs(&coh, 0.3, 0.0).trace().norm() < 1e-13);
    }

    #[test]
    fn coherent_rotation_without_damping() {
        let a = CoherentAmplitude::new(1.0, 0.5);
        let cfg = IntegratorConfig::new(0.005, std::f64::consts::PI).unwrap();
        let out = integrate(&coherent_rho(a, 40), 0.0, 0.0, &cfg).unwrap();
        let p = EvolutionParams::new(0.0, std::f64::consts::PI).unwrap();
        let want = coherent_rho(evolve_amplitude(a, &p), 40);
        assert!(trace_distance(&out, &want).unwrap() < 1e-8);
        assert!((out.trace() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn cat_matches_analytic_solution() {
        let cat = make_cat(CoherentAmplitude::real(1.0), CatKind::PlusMinusAlpha);
        let m0 = density_from_superposition(&cat, &EvolutionParams::initial(), 40).unwrap();
        let times = [1.0, 3.0, 10.0];
        let snaps = integrate_snapshots(&m0, 0.2, 0.0, &IntegratorConfig::default(), &times).unwrap();
        for (t, m) in times.iter().zip(&snaps) {
            let want = density_from_superposition(&cat, &EvolutionParams::new(0.2, *t).unwrap(), 40).unwrap();
            let dist = trace_distance(m, &want).unwrap();
            assert!(dist < 1e-6, "t = {t}: {dist}");
            assert!((m.trace() - 1.0).norm() < 1e-9);
            assert!(hermitian_eigenvalues(m).unwrap().last().copied().unwrap() >= -1e-8);
        }
    }

    #[test]
    fn large_overlap_phase_follows_master_equation() {
        // Im(β* α) = -4 lies outside the principal branch of the overlap's
        // logarithm, so ⟨β|α⟩^{1-e^{-γ0 t}} taken on that branch would
        // differ from the integrated state.
        let (a, b) = (CoherentAmplitude::real(2.0), CoherentAmplitude::new(0.0, 2.0));
        let s = SuperposedState::pair(c(1.0, 0.0), a, c(1.0, 0.0), b).unwrap();
        let n_max = 44;
        let m0 = density_from_superposition(&s, &EvolutionParams::initial(), n_max).unwrap();
        let p = EvolutionParams::new(0.5, 1.5).unwrap();
        let cfg = IntegratorConfig::new(0.005, p.t()).unwrap();
        let num = integrate(&m0, p.gamma0(), 0.0, &cfg).unwrap();
        let analytic = density_from_superposition(&s, &p, n_max).unwrap();
        assert!(trace_distance(&num, &analytic).unwrap() < 1e-6);

        let principal = overlap(b, a).powf(1.0 - (-p.gamma0() * p.t()).exp());
        let analytic_f = decoherence_factor(a, b, &p);
        assert!((principal - analytic_f).norm() > 1e-3 * analytic_f.norm());
    }

    #[test]
    fn thermal_relaxation_reaches_gibbs_state() {
        let n_max = 24;
        let vac = coherent_rho(CoherentAmplitude::vacuum(), n_max);
        let cfg = IntegratorConfig::new(0.005, 30.0).unwrap();
        let out = integrate(&vac, 1.0, 0.5, &cfg).unwrap();
        let gibbs = FockDensityMatrix::thermal(0.5, n_max).unwrap();
        let worst = out
            .populations()
            .iter()
            .zip(gibbs.populations())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn guards() {
        let m = coherent_rho(CoherentAmplitude::real(1.0), 40);
        let cfg = IntegratorConfig::new(0.5, 1.0).unwrap();
        assert!(matches!(integrate(&m, 0.2, 0.0, &cfg), Err(Error::StepTooLarge(_))));
        let m = coherent_rho(CoherentAmplitude::real(2.0), 20);
        let cfg = IntegratorConfig::new(0.005, 0.1).unwrap();
        assert!(matches!(integrate(&m, 0.0, 0.0, &cfg), Err(Error::TruncationGuard { .. })));
        let bad = FockDensityMatrix::diagonal(&[0.5, 0.2]).unwrap();
        assert!(integrate(&bad, 0.0, 0.0, &cfg).is_err());
        assert!(IntegratorConfig::new(0.0, 1.0).is_err());
        assert!(IntegratorConfig::new(0.01, -1.0).is_err());
    }

    #[test]
    fn zero_time_returns_input() {
        let m = coherent_rho(CoherentAmplitude::real(0.7), 30);
        let out = integrate(&m, 0.3, 0.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn renormalization_keeps_unit_trace() {
        let m = coherent_rho(CoherentAmplitude::real(0.7), 30);
        let cfg = IntegratorConfig {
            renormalize: true,
            ..IntegratorConfig::new(0.01, 2.0).unwrap()
        };
        let out = integrate(&m, 0.3, 0.0, &cfg).unwrap();
        assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn product_states_evolve_independently() {
        let vac = coherent_rho(CoherentAmplitude::vacuum(), 6);
        assert_eq!(two_particle_step_check(&vac, &vac, 0.4).unwrap(), 0.0);
        let a = coherent_rho(CoherentAmplitude::real(0.5), 12);
        let b = coherent_rho(CoherentAmplitude::real(-0.5), 12);
        assert!(two_particle_step_check(&a, &b, 0.1).unwrap() < 1e-12);
        let big = coherent_rho(CoherentAmplitude::real(0.5), 13);
        assert!(two_particle_step_check(&big, &b, 0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn rhs_is_traceless_and_hermitian(seed in 0u64..1000, g in 0.0f64..2.0, nbar in 0.0f64..3.0) {
            let m = random_density(seed, 8);
            let r = lindblad_rhs(&m, g, nbar);
            prop_assert!(r.trace().norm() < 1e-13);
            prop_assert!(r.hermiticity_defect() < 1e-14);
        }

        #[test]
        fn product_check_for_random_pairs(s1 in 0u64..500, s2 in 0u64..500, g in 0.0f64..1.0) {
            let v = two_particle_step_check(&random_density(s1, 5), &random_density(s2, 4), g).unwrap();
            prop_assert!(v < 1e-12);
        }
    }
}
