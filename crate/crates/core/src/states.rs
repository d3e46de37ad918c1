//! Coherent-state algebra in scaled units (ħ = m = ω0 = 1).
//!
//! A coherent state |α⟩ evolving under the zero-temperature damped-oscillator
//! master equation stays coherent, with amplitude α(t) = α e^{-(i + γ0/2) t}.
//! Superpositions pick up a decoherence factor on their cross terms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Complex label α of a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude(Complex64);

impl CoherentAmplitude {
    /// Panics if either part is not finite; use [`CoherentAmplitude::try_new`]
    /// for untrusted input.
    pub fn new(re: f64, im: f64) -> Self {
        Self::try_new(re, im).expect("coherent amplitude must be finite")
    }

    pub fn try_new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(invalid("alpha", format!("non-finite amplitude {re} + {im}i")));
        }
        Ok(Self(Complex64::new(re, im)))
    }

    pub fn real(re: f64) -> Self {
        Self::new(re, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn vacuum() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    /// |α|², the mean photon number of the state.
    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0 * factor)
    }
}

impl std::ops::Neg for CoherentAmplitude {
    type Output = Self;

    fn neg(self) -> Self {
        Self(-self.0)
    }
}

/// Damping rate, time and thermal occupation, all in scaled units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    gamma0: f64,
    t: f64,
    nbar: f64,
}

impl EvolutionParams {
    /// Zero-temperature parameters.
    pub fn new(gamma0: f64, t: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 >= 0.0) {
            return Err(invalid("gamma0", format!("must be finite and >= 0, got {gamma0}")));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
        }
        Ok(Self {
            gamma0,
            t,
            nbar: 0.0,
        })
    }

    /// Non-dissipative evolution at t = 0.
    pub fn initial() -> Self {
        Self {
            gamma0: 0.0,
            t: 0.0,
            nbar: 0.0,
        }
    }

    pub fn with_nbar(self, nbar: f64) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(invalid("nbar", format!("must be finite and >= 0, got {nbar}")));
        }
        Ok(Self { nbar, ..self })
    }

    pub fn at_time(self, t: f64) -> Result<Self> {
        Self::new(self.gamma0, t)?.with_nbar(self.nbar)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// τ_R = 1/γ0; `None` without dissipation.
    pub fn relaxation_time(&self) -> Option<f64> {
        (self.gamma0 > 0.0).then(|| 1.0 / self.gamma0)
    }

    /// e^{-γ0 t}.
    pub fn decay(&self) -> f64 {
        (-self.gamma0 * self.t).exp()
    }
}

/// ln⟨a|b⟩ = -(|a|² + |b|²)/2 + a* b, without wrapping the imaginary part.
pub fn log_overlap(a: CoherentAmplitude, b: CoherentAmplitude) -> Complex64 {
    -0.5 * (a.norm_sqr() + b.norm_sqr()) + a.value().conj() * b.value()
}

/// ⟨a|b⟩ for two coherent states.
pub fn overlap(a: CoherentAmplitude, b: CoherentAmplitude) -> Complex64 {
    log_overlap(a, b).exp()
}

pub(crate) fn amplitude_at(a: CoherentAmplitude, gamma0: f64, t: f64) -> Complex64 {
    a.value() * Complex64::new(-0.5 * gamma0 * t, -t).exp()
}

/// α(t) = α e^{-(i + γ0/2) t}.
pub fn evolve_amplitude(a: CoherentAmplitude, p: &EvolutionParams) -> CoherentAmplitude {
    CoherentAmplitude(amplitude_at(a, p.gamma0, p.t))
}

pub(crate) fn decoherence_factor_raw(
    a: CoherentAmplitude,
    b: CoherentAmplitude,
    gamma0: f64,
    t: f64,
) -> Complex64 {
    let exponent = -(-gamma0 * t).exp_m1();
    if exponent == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    (exponent * log_overlap(b, a)).exp()
}

/// Decoherence factor f(t) = ⟨b|a⟩^{1 - e^{-γ0 t}} multiplying |a(t)⟩⟨b(t)|.
///
/// The power is taken on the analytic exponent of the overlap,
/// exp[(1 - e^{-γ0 t}) (b* a - (|a|² + |b|²)/2)], which is what the master
/// equation produces. It coincides with the principal branch whenever
/// |Im(b* a)| ≤ π and never underflows through an intermediate zero.
pub fn decoherence_factor(
    a: CoherentAmplitude,
    b: CoherentAmplitude,
    p: &EvolutionParams,
) -> Complex64 {
    decoherence_factor_raw(a, b, p.gamma0, p.t)
}

/// |⟨a(t)|b(t)⟩ - ⟨a|b⟩^{e^{-γ0 t}}|.
pub fn evolved_overlap_residual(
    a: CoherentAmplitude,
    b: CoherentAmplitude,
    p: &EvolutionParams,
) -> f64 {
    let lhs = overlap(evolve_amplitude(a, p), evolve_amplitude(b, p));
    let rhs = (p.decay() * log_overlap(a, b)).exp();
    (lhs - rhs).norm()
}

/// τ_D = 2 τ_R / |a - b|².
pub fn decoherence_time(a: CoherentAmplitude, b: CoherentAmplitude, gamma0: f64) -> Result<f64> {
    if gamma0 <= 0.0 {
        return Err(Error::DegenerateInput("decoherence time needs gamma0 > 0"));
    }
    let sep = (a.value() - b.value()).norm_sqr();
    if sep == 0.0 {
        return Err(Error::DegenerateInput("decoherence time needs a != b"));
    }
    Ok(2.0 / (gamma0 * sep))
}

/// Position wavefunction of |α(t)⟩, consistent with the Fock expansion of
/// coherent states: π^{-1/4} exp[-(x - √2 α_r)²/2 + i√2 α_i x - i α_r α_i].
pub(crate) fn position_wf_at(alpha_t: Complex64, x: f64) -> Complex64 {
    let center = std::f64::consts::SQRT_2 * alpha_t.re;
    let wavenumber = std::f64::consts::SQRT_2 * alpha_t.im;
    let dx = x - center;
    let exponent = Complex64::new(-0.5 * dx * dx, wavenumber * x - alpha_t.re * alpha_t.im);
    PI.powf(-0.25) * exponent.exp()
}

/// ψ_α(x, t) = ⟨x|α(t)⟩.
pub fn position_wavefunction(a: CoherentAmplitude, p: &EvolutionParams, x: f64) -> Complex64 {
    position_wf_at(evolve_amplitude(a, p).value(), x)
}

/// φ_α(p, t) = (2π)^{-1/2} ∫ ψ_α(x, t) e^{-i p x} dx
/// = π^{-1/4} exp[-(p - √2 α_i)²/2 - i√2 α_r p + i α_r α_i].
pub fn momentum_wavefunction(a: CoherentAmplitude, p: &EvolutionParams, mom: f64) -> Complex64 {
    let alpha_t = evolve_amplitude(a, p).value();
    let center = std::f64::consts::SQRT_2 * alpha_t.im;
    let dp = mom - center;
    let exponent = Complex64::new(
        -0.5 * dp * dp,
        -std::f64::consts::SQRT_2 * alpha_t.re * mom + alpha_t.re * alpha_t.im,
    );
    PI.powf(-0.25) * exponent.exp()
}

/// Which superposition [`make_cat`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatKind {
    /// |α⟩ + |-α⟩
    PlusMinusAlpha,
    /// |α/2⟩ + |-α/2⟩
    HalfAlphaPair,
    /// (|Φ⟩ + |Ψ⟩)/√2 with |Φ⟩, |Ψ⟩ the two normalized cats above.
    TwoCatSuperposition,
}

/// Normalized superposition 𝒩 Σ_i c_i |α_i⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperposedState {
    components: Vec<(Complex64, CoherentAmplitude)>,
    normalization: f64,
}

impl SuperposedState {
    /// Builds the superposition and fixes 𝒩 = (c† G c)^{-1/2} with the
    /// Gram matrix G_ij = ⟨α_i|α_j⟩. Repeated amplitudes are merged.
    pub fn new(components: impl IntoIterator<Item = (Complex64, CoherentAmplitude)>) -> Result<Self> {
        let mut merged: Vec<(Complex64, CoherentAmplitude)> = Vec::new();
        for (c, a) in components {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(invalid("coefficient", "non-finite coefficient"));
            }
            match merged.iter_mut().find(|(_, b)| *b == a) {
                Some((acc, _)) => *acc += c,
                None => merged.push((c, a)),
            }
        }
        merged.retain(|(c, _)| c.norm_sqr() > 0.0);
        if merged.is_empty() {
            return Err(Error::DegenerateInput("superposition has zero norm"));
        }
        let norm_sqr = gram_form(&merged);
        if !(norm_sqr > 0.0 && norm_sqr.is_finite()) {
            return Err(Error::DegenerateInput("superposition has zero norm"));
        }
        Ok(Self {
            components: merged,
            normalization: norm_sqr.sqrt().recip(),
        })
    }

    pub fn coherent(a: CoherentAmplitude) -> Self {
        Self {
            components: vec![(Complex64::new(1.0, 0.0), a)],
            normalization: 1.0,
        }
    }

    /// The two-component state 𝒩(c_α|α⟩ + c_β|β⟩).
    pub fn pair(c_alpha: Complex64, alpha: CoherentAmplitude, c_beta: Complex64, beta: CoherentAmplitude) -> Result<Self> {
        Self::new([(c_alpha, alpha), (c_beta, beta)])
    }

    pub fn components(&self) -> &[(Complex64, CoherentAmplitude)] {
        &self.components
    }

    /// The prefactor 𝒩.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Largest |α_i|² over the components.
    pub fn max_norm_sqr(&self) -> f64 {
        self.components
            .iter()
            .map(|(_, a)| a.norm_sqr())
            .fold(0.0, f64::max)
    }

    /// 𝒩² Σ_ij c_i* c_j ⟨α_i|α_j⟩; equals 1 up to rounding.
    pub fn norm(&self) -> f64 {
        self.normalization.powi(2) * gram_form(&self.components)
    }
}

fn gram_form(components: &[(Complex64, CoherentAmplitude)]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (ci, ai) in components {
        for (cj, aj) in components {
            acc += ci.conj() * cj * overlap(*ai, *aj);
        }
    }
    acc.re
}

/// Cat states and the superposition of two cats.
pub fn make_cat(alpha: CoherentAmplitude, kind: CatKind) -> SuperposedState {
    let one = Complex64::new(1.0, 0.0);
    let pair = |a: CoherentAmplitude| {
        SuperposedState::new([(one, a), (one, -a)]).expect("a cat state always has positive norm")
    };
    match kind {
        CatKind::PlusMinusAlpha => pair(alpha),
        CatKind::HalfAlphaPair => pair(alpha.scale(0.5)),
        CatKind::TwoCatSuperposition => {
            let phi = pair(alpha);
            let psi = pair(alpha.scale(0.5));
            let w = std::f64::consts::FRAC_1_SQRT_2;
            let comps = phi
                .components()
                .iter()
                .map(|(c, a)| (c * phi.normalization() * w, *a))
                .chain(
                    psi.components()
                        .iter()
                        .map(|(c, a)| (c * psi.normalization() * w, *a)),
                );
            SuperposedState::new(comps).expect("two-cat superposition has positive norm")
        }
    }
}
