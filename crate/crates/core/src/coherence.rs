//! Relative entropy of coherence C_r(ρ) = S(ρ_d) - S(ρ) in the energy,
//! position and momentum bases, plus the superposition bounds.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fock::{
    coherent_fock_vector_checked, default_n_max, density_from_superposition, diagonal_entropy, shannon_entropy,
    von_neumann_entropy, FockDensityMatrix, TAIL_TOLERANCE,
};
use crate::quadrature::gauss_hermite;
use libm::lgamma as ln_gamma;
use crate::states::{
    evolve_amplitude, make_cat, momentum_wavefunction, position_wavefunction, CatKind, CoherentAmplitude,
    EvolutionParams, SuperposedState,
};

/// Clamp window for round-off negatives in S(ρ_d) - S(ρ).
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Energy,
    Position,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Series,
    Spectral,
    Quadrature,
}

/// A coherence value in nats with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceResult {
    pub value: f64,
    pub basis: Basis,
    pub method: Method,
    /// Bound on the truncated remainder for series evaluations, 0 otherwise.
    pub tail_bound: f64,
}

impl CoherenceResult {
    fn new(value: f64, basis: Basis, method: Method) -> Self {
        Self {
            value,
            basis,
            method,
            tail_bound: 0.0,
        }
    }
}

/// C_r of |α(t)⟩ in the Fock basis from the Poisson series
/// x(1 - ln x) + e^{-x} Σ xⁿ ln(n!)/n!, x = |α(t)|² = e^{-γ0 t}|α|².
pub fn cr_coherent_energy(a: CoherentAmplitude, p: &EvolutionParams) -> CoherenceResult {
    let x = p.decay() * a.norm_sqr();
    let (value, tail) = poisson_coherence_series(x);
    CoherenceResult {
        value,
        basis: Basis::Energy,
        method: Method::Series,
        tail_bound: tail,
    }
}

fn poisson_coherence_series(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    // -Σ pₙ ln pₙ summed directly: an error δ in ln pₙ moves the result by
    // only Σ pₙ δ (1 + ln pₙ), unlike the rearranged x(1 - ln x) + Σ pₙ ln n!.
    let ln_x = x.ln();
    let mut sum = 0.0;
    let mut n = 0usize;
    loop {
        let lp = n as f64 * ln_x - x - ln_gamma(n as f64 + 1.0);
        let p = lp.exp();
        sum -= p * lp;
        let ratio = x / (n + 1) as f64;
        if ratio < 0.25 {
            // -p ln p ≤ (2/e)√p and p_{n+k} ≤ pₙ rᵏ bound the remainder.
            let root = ratio.sqrt();
            let tail = 2.0 / std::f64::consts::E * p.sqrt() * root / (1.0 - root);
            if tail < 1e-16 * sum.max(1e-300) || p == 0.0 {
                return (sum, tail);
            }
        }
        n += 1;
    }
}

/// C_r in the Fock basis of a superposition that stays pure: any state
/// without dissipation, or a single coherent component.
pub fn cr_pure_state_energy(s: &SuperposedState, p: &EvolutionParams, n_max: usize) -> Result<CoherenceResult> {
    if p.nbar() > 0.0 {
        return Err(Error::ThermalUnsupported { nbar: p.nbar() });
    }
    let comps = s.components();
    if p.gamma0() > 0.0 && p.t() > 0.0 && comps.len() > 1 {
        return Err(Error::NotPure {
            components: comps.len(),
        });
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for (c, a) in comps {
        let v = coherent_fock_vector_checked(evolve_amplitude(*a, p), n_max, TAIL_TOLERANCE)?;
        let w = s.normalization() * c;
        for (acc, coeff) in psi.iter_mut().zip(v.coeffs()) {
            *acc += w * coeff;
        }
    }
    let populations: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    Ok(CoherenceResult::new(
        shannon_entropy(&populations),
        Basis::Energy,
        Method::Spectral,
    ))
}

/// Closed form for the cat 𝒩(|α⟩ + |-α⟩) as a function of x = |α|²:
/// ln(2 cosh x) - x ln x tanh x - Σ_{n even} xⁿ/(n! cosh x) ln(2/n!).
pub fn cr_cat_closed_form(alpha_mod_sq: f64) -> Result<CoherenceResult> {
    let x = alpha_mod_sq;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid("alpha_mod_sq", format!("must be finite and >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(CoherenceResult::new(0.0, Basis::Energy, Method::ClosedForm));
    }
    let ln_x = x.ln();
    // ln cosh x without overflow.
    let ln_cosh = x + (-2.0 * x).exp().ln_1p() - LN_2;
    let ln_2cosh = ln_cosh + LN_2;
    let mut sum = 0.0;
    let mut ln_fact = 0.0;
    let spread = x + 10.0 * x.sqrt();
    let mut n = 0usize;
    loop {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        if n.is_multiple_of(2) {
            let w = (n as f64 * ln_x - ln_fact - ln_cosh).exp();
            let term = w * (LN_2 - ln_fact);
            sum += term;
            if n as f64 > spread && (term.abs() < 1e-17 * sum.abs().max(1e-300) || w == 0.0) {
                break;
            }
        }
        n += 1;
    }
    let value = ln_2cosh - x * ln_x * x.tanh() - sum;
    Ok(CoherenceResult::new(value.max(0.0), Basis::Energy, Method::ClosedForm))
}

/// S(ρ_d) - S(ρ) for a Fock-space density matrix.
pub fn cr_mixed_energy(m: &FockDensityMatrix) -> Result<CoherenceResult> {
    let value = diagonal_entropy(m).nats() - von_neumann_entropy(m)?.nats();
    if value < -NEGATIVE_TOLERANCE {
        return Err(Error::NegativeBeyondTolerance { value });
    }
    Ok(CoherenceResult::new(value.max(0.0), Basis::Energy, Method::Spectral))
}

/// Energy-basis C_r of a superposition evolved to `p`: the pure-state path
/// when the state stays pure, the spectral mixed-state path otherwise.
pub fn cr_state_energy(s: &SuperposedState, p: &EvolutionParams, n_max: usize) -> Result<CoherenceResult> {
    if s.components().len() == 1 || p.gamma0() == 0.0 || p.t() == 0.0 {
        cr_pure_state_energy(s, p, n_max)
    } else {
        cr_mixed_energy(&density_from_superposition(s, p, n_max)?)
    }
}

/// Differential entropy ½[1 + ln(2π σ²)] of a Gaussian density.
pub fn cr_gaussian_position(variance: f64) -> Result<CoherenceResult> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::DomainError(format!("variance must be > 0, got {variance}")));
    }
    Ok(CoherenceResult::new(
        0.5 * (1.0 + (2.0 * PI * variance).ln()),
        Basis::Position,
        Method::ClosedForm,
    ))
}

const HERMITE_NODES: usize = 24;

/// -∫ P ln P over a density concentrated around `center`, by Gauss–Hermite
/// quadrature in u = x - center.
fn differential_entropy(density: impl Fn(f64) -> f64, center: f64) -> f64 {
    gauss_hermite(HERMITE_NODES)
        .iter()
        .map(|(u, w)| {
            let d = density(center + u);
            if d > 0.0 {
                -w * d * d.ln() * (u * u).exp()
            } else {
                0.0
            }
        })
        .sum()
}

/// Position-basis C_r of the pure state |α(t)⟩: the differential entropy of
/// |ψ_α(x, t)|², since S(ρ) = 0.
pub fn cr_coherent_position(a: CoherentAmplitude, p: &EvolutionParams) -> CoherenceResult {
    let center = std::f64::consts::SQRT_2 * evolve_amplitude(a, p).re();
    let value = differential_entropy(|x| position_wavefunction(a, p, x).norm_sqr(), center);
    CoherenceResult::new(value, Basis::Position, Method::Quadrature)
}

/// Momentum-basis counterpart of [`cr_coherent_position`].
pub fn cr_coherent_momentum(a: CoherentAmplitude, p: &EvolutionParams) -> CoherenceResult {
    let center = std::f64::consts::SQRT_2 * evolve_amplitude(a, p).im();
    let value = differential_entropy(|k| momentum_wavefunction(a, p, k).norm_sqr(), center);
    CoherenceResult::new(value, Basis::Momentum, Method::Quadrature)
}

/// n̄ = 1/(e^{1/k_BT} - 1) with ħω0 = 1.
pub fn nbar_from_kbt(kbt: f64) -> Result<f64> {
    if !(kbt > 0.0 && kbt.is_finite()) {
        return Err(invalid("kbt", format!("must be > 0, got {kbt}")));
    }
    Ok(1.0 / (1.0 / kbt).exp_m1())
}

/// k_BT = 1/ln(1 + 1/n̄).
pub fn kbt_from_nbar(nbar: f64) -> Result<f64> {
    if !(nbar > 0.0 && nbar.is_finite()) {
        return Err(invalid("nbar", format!("must be > 0, got {nbar}")));
    }
    Ok(1.0 / (1.0 / nbar).ln_1p())
}

/// σ(t)² = ½[2n̄(1 - e^{-γ0 t}) + 1], the position variance under thermal noise.
pub fn thermal_variance(p: &EvolutionParams) -> f64 {
    0.5 * (2.0 * p.nbar() * -(-p.gamma0() * p.t()).exp_m1() + 1.0)
}

/// Position-basis C_r of a coherent state under thermal noise, taken as the
/// differential entropy of the Gaussian position density without subtracting
/// the entropy of the (now mixed) state.
pub fn cr_thermal_position(p: &EvolutionParams) -> Result<CoherenceResult> {
    cr_gaussian_position(thermal_variance(p))
}

/// von Neumann entropy of the displaced thermal state reached from a
/// coherent state: (n+1)ln(n+1) - n ln n with n = σ(t)² - ½.
pub fn thermal_state_entropy(p: &EvolutionParams) -> f64 {
    let n = p.nbar() * -(-p.gamma0() * p.t()).exp_m1();
    if n <= 0.0 {
        return 0.0;
    }
    (n + 1.0) * (n + 1.0).ln() - n * n.ln()
}

/// [`cr_thermal_position`] with the state entropy subtracted.
pub fn cr_thermal_position_subtracted(p: &EvolutionParams) -> Result<CoherenceResult> {
    let mut r = cr_thermal_position(p)?;
    r.value -= thermal_state_entropy(p);
    r.method = Method::Spectral;
    Ok(r)
}

/// [e^{-|α|²} cosh|α|²]^{-1} [C_r(ρ1(t)) + ln 2], an upper bound on the
/// coherence of the cat 𝒩(|α⟩ + |-α⟩).
pub fn cr_upper_bound_cat(a: CoherentAmplitude, p: &EvolutionParams) -> f64 {
    let x = a.norm_sqr();
    // e^{-x} cosh x = (1 + e^{-2x})/2
    let weight = 0.5 * (1.0 + (-2.0 * x).exp());
    (cr_coherent_energy(a, p).value + LN_2) / weight
}

/// Both sides of C_r(|T⟩⟨T|) ≤ 𝒩_T² [C_r(|Φ⟩⟨Φ|) + C_r(|Ψ⟩⟨Ψ|) + 2 ln 2]
/// for the non-dissipative superposition of two cats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoCatInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub cr_phi: f64,
    pub cr_psi: f64,
    pub normalization_t: f64,
}

pub fn cr_two_cat_inequality(alpha: CoherentAmplitude) -> Result<TwoCatInequality> {
    let p = EvolutionParams::initial();
    let n_max = default_n_max(alpha.norm_sqr());
    let t = make_cat(alpha, CatKind::TwoCatSuperposition);
    let phi = make_cat(alpha, CatKind::PlusMinusAlpha);
    let psi = make_cat(alpha, CatKind::HalfAlphaPair);
    let lhs = cr_pure_state_energy(&t, &p, n_max)?.value;
    let cr_phi = cr_pure_state_energy(&phi, &p, n_max)?.value;
    let cr_psi = cr_pure_state_energy(&psi, &p, n_max)?.value;
    let nt2 = t.normalization().powi(2);
    Ok(TwoCatInequality {
        lhs,
        rhs: nt2 * (cr_phi + cr_psi + 2.0 * LN_2),
        cr_phi,
        cr_psi,
        normalization_t: t.normalization(),
    })
}
