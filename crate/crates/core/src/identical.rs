//! Two identical damped oscillators prepared in a (anti)symmetrized product
//! of coherent states: reduced single-particle coherence, mean square
//! separation and joint detection by an extended detector.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::coherence::{cr_mixed_energy, CoherenceResult};
use crate::error::{invalid, Error, Result};
use crate::fock::{coherent_fock_vector_checked, FockDensityMatrix, TAIL_TOLERANCE};
use crate::quadrature::integrate_complex;
use crate::special::{complex_erf, erf};
use crate::states::{amplitude_at, overlap, position_wf_at, CoherentAmplitude, EvolutionParams};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Window integrals below this are treated as empty.
pub const EMPTY_WINDOW: f64 = 1e-300;
/// Tolerance of the adaptive quadrature used for general windows.
pub const WINDOW_QUADRATURE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Statistics {
    /// Distinguishable particles.
    MB,
    /// Bosons, symmetric spatial state.
    BE,
    /// Fermions, antisymmetric spatial state.
    FD,
}

impl Statistics {
    pub const ALL: [Statistics; 3] = [Statistics::MB, Statistics::BE, Statistics::FD];

    /// 0, +1, -1.
    pub fn sign(self) -> f64 {
        match self {
            Statistics::MB => 0.0,
            Statistics::BE => 1.0,
            Statistics::FD => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::MB => "MB",
            Statistics::BE => "BE",
            Statistics::FD => "FD",
        }
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "MB" => Ok(Statistics::MB),
            "BE" => Ok(Statistics::BE),
            "FD" => Ok(Statistics::FD),
            _ => Err(invalid("stats", format!("expected MB, BE or FD, got {s:?}"))),
        }
    }
}

/// 𝒩 (|α⟩₁|β⟩₂ ± |β⟩₁|α⟩₂), or the equal mixture of both orderings for MB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParticleState {
    alpha: CoherentAmplitude,
    beta: CoherentAmplitude,
    stats: Statistics,
    norm: f64,
}

impl TwoParticleState {
    /// 𝒩± = [2(1 ± |⟨α|β⟩|²)]^{-1/2}; MB uses 1/√2.
    pub fn new(alpha: CoherentAmplitude, beta: CoherentAmplitude, stats: Statistics) -> Result<Self> {
        let ov = overlap(alpha, beta).norm_sqr();
        let denom = 2.0 * (1.0 + stats.sign() * ov);
        if !(denom > 0.0) {
            return Err(Error::DegenerateInput("antisymmetric state of equal amplitudes vanishes"));
        }
        Ok(Self {
            alpha,
            beta,
            stats,
            norm: denom.sqrt().recip(),
        })
    }

    pub fn alpha(&self) -> CoherentAmplitude {
        self.alpha
    }

    pub fn beta(&self) -> CoherentAmplitude {
        self.beta
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// β = -α with α real, where the closed forms apply.
    pub fn is_mirror_real(&self) -> bool {
        self.alpha.im() == 0.0 && self.beta.im() == 0.0 && self.beta.re() == -self.alpha.re()
    }
}

/// |f(t)|² = |⟨β|α⟩|^{2(1 - e^{-γ0 t})} = exp[-(1 - e^{-γ0 t}) |α - β|²].
pub fn decoherence_modulus_sqr(alpha: CoherentAmplitude, beta: CoherentAmplitude, p: &EvolutionParams) -> f64 {
    let sep = (alpha.value() - beta.value()).norm_sqr();
    ((-p.gamma0() * p.t()).exp_m1() * sep).exp()
}

fn evolved(tp: &TwoParticleState, p: &EvolutionParams) -> (Complex64, Complex64) {
    (
        amplitude_at(tp.alpha, p.gamma0(), p.t()),
        amplitude_at(tp.beta, p.gamma0(), p.t()),
    )
}

/// Reduced single-particle state in the Fock basis:
/// 𝒩±²(|α⟩⟨α| + |β⟩⟨β| ± ⟨α|β⟩|f|²|α⟩⟨β| ± ⟨β|α⟩|f|²|β⟩⟨α|) at time t,
/// or ½(|α⟩⟨α| + |β⟩⟨β|) for MB.
pub fn reduced_single_particle(tp: &TwoParticleState, p: &EvolutionParams, n_max: usize) -> Result<FockDensityMatrix> {
    if p.nbar() > 0.0 {
        return Err(Error::ThermalUnsupported { nbar: p.nbar() });
    }
    let (at, bt) = evolved(tp, p);
    let (ca, cb) = (CoherentAmplitude::from_complex(at), CoherentAmplitude::from_complex(bt));
    let va = coherent_fock_vector_checked(ca, n_max, TAIL_TOLERANCE)?;
    let vb = coherent_fock_vector_checked(cb, n_max, TAIL_TOLERANCE)?;
    let (u, v) = (va.coeffs(), vb.coeffs());
    let (direct, cross) = match tp.stats {
        Statistics::MB => (0.5, Complex64::new(0.0, 0.0)),
        s => {
            let n2 = tp.norm * tp.norm;
            let f2 = decoherence_modulus_sqr(tp.alpha, tp.beta, p);
            (n2, n2 * s.sign() * f2 * overlap(ca, cb))
        }
    };
    let d = n_max + 1;
    let m = Array2::from_shape_fn((d, d), |(i, j)| {
        direct * (u[i] * u[j].conj() + v[i] * v[j].conj()) + cross * u[i] * v[j].conj() + cross.conj() * v[i] * u[j].conj()
    });
    let mut out = FockDensityMatrix::from_matrix(m)?;
    out.hermitize();
    Ok(out)
}

/// C_r of the reduced single-particle state in the energy basis.
pub fn cr_by_statistics(tp: &TwoParticleState, p: &EvolutionParams, n_max: usize) -> Result<CoherenceResult> {
    cr_mixed_energy(&reduced_single_particle(tp, p, n_max)?)
}

/// ⟨a|x̂|b⟩ and ⟨a|x̂²|b⟩ with x̂ = (a + a†)/√2:
/// (a* + b)/√2 ⟨a|b⟩ and ½[(a* + b)² + 1] ⟨a|b⟩.
pub fn position_moments(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let ov = overlap(CoherentAmplitude::from_complex(a), CoherentAmplitude::from_complex(b));
    let s = a.conj() + b;
    (s / SQRT_2 * ov, 0.5 * (s * s + 1.0) * ov)
}

/// ⟨(x̂₁ - x̂₂)²⟩ from coherent-state matrix elements, valid for any α, β:
/// 2𝒩±²(MB ∓ 2|f|²|⟨x⟩_αβ|² ± 2|f|² Re{⟨x²⟩_αβ ⟨β|α⟩}) at time t.
pub fn mss_general(tp: &TwoParticleState, p: &EvolutionParams) -> f64 {
    let (at, bt) = evolved(tp, p);
    let (xa, xxa) = position_moments(at, at);
    let (xb, xxb) = position_moments(bt, bt);
    let mb = xxa.re + xxb.re - 2.0 * xa.re * xb.re;
    if tp.stats == Statistics::MB {
        return mb;
    }
    let s = tp.stats.sign();
    let f2 = decoherence_modulus_sqr(tp.alpha, tp.beta, p);
    let (xab, xxab) = position_moments(at, bt);
    let ov_ba = overlap(CoherentAmplitude::from_complex(bt), CoherentAmplitude::from_complex(at));
    2.0 * tp.norm * tp.norm * (mb - 2.0 * s * f2 * xab.norm_sqr() + 2.0 * s * f2 * (xxab * ov_ba).re)
}

/// Closed forms for β = -α, α real:
/// MB: 1 + 8α²e^{-γ0 t}cos²t;
/// ±: [1 + 8α²e^{-γ0 t}cos²t ± e^{-4α²}(1 - 8α²e^{-γ0 t}sin²t)] / (1 ± e^{-4α²}).
pub fn mss_closed_form(alpha: f64, p: &EvolutionParams, stats: Statistics) -> f64 {
    let decay = (-p.gamma0() * p.t()).exp();
    let (s, c) = p.t().sin_cos();
    if stats == Statistics::MB {
        return 1.0 + 8.0 * alpha * alpha * decay * c * c;
    }
    // Rearranged as 1 + 8α²e^{-γ0 t}(cos²t ∓ e^{-4α²}sin²t)/(1 ± e^{-4α²}),
    // which stays accurate as α → 0 for fermions.
    let (weight, e) = exchange_weight(alpha, stats);
    1.0 + weight * decay * (c * c - stats.sign() * e * s * s)
}

/// 8α²/(1 ± e^{-4α²}) and e^{-4α²}; the fermionic ratio tends to 2 at α = 0.
fn exchange_weight(alpha: f64, stats: Statistics) -> (f64, f64) {
    let a2 = alpha * alpha;
    let e = (-4.0 * a2).exp();
    let weight = if stats.sign() > 0.0 {
        8.0 * a2 / (1.0 + e)
    } else if a2 == 0.0 {
        2.0
    } else {
        8.0 * a2 / -(-4.0 * a2).exp_m1()
    };
    (weight, e)
}

/// Mean square separation, by closed form when β = -α is real and from
/// matrix elements otherwise.
pub fn mss(tp: &TwoParticleState, p: &EvolutionParams) -> f64 {
    if tp.is_mirror_real() && tp.alpha.re() != 0.0 {
        mss_closed_form(tp.alpha.re(), p, tp.stats)
    } else {
        mss_general(tp, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MssDifferences {
    pub fd_mb: f64,
    pub mb_be: f64,
    pub fd_be: f64,
    /// α = 0: all three vanish identically.
    pub degenerate: bool,
}

/// FD-MB = 8α²e^{-γ0 t}/(e^{4α²} - 1), MB-BE = 8α²e^{-γ0 t}/(e^{4α²} + 1),
/// FD-BE = 8α²e^{-γ0 t}/sinh(4α²), for β = -α real.
pub fn mss_differences(alpha: f64, p: &EvolutionParams) -> MssDifferences {
    let a2 = alpha * alpha;
    if a2 == 0.0 {
        return MssDifferences {
            fd_mb: 0.0,
            mb_be: 0.0,
            fd_be: 0.0,
            degenerate: true,
        };
    }
    let scale = 8.0 * a2 * (-p.gamma0() * p.t()).exp();
    let x = 4.0 * a2;
    let e = (-x).exp();
    // Written in e^{-4α²} so that large α neither overflows nor cancels.
    let em1 = -(-x).exp_m1();
    MssDifferences {
        fd_mb: scale * e / em1,
        mb_be: scale * e / (1.0 + e),
        fd_be: scale * 2.0 * e / (em1 * (1.0 + e)),
        degenerate: false,
    }
}

/// ∂/∂γ0 of the closed-form MSS:
/// MB: -8α²t e^{-γ0 t}cos²t;
/// ±: -8α²t e^{-γ0 t}(e^{4α²}cos²t ∓ sin²t)/(±1 + e^{4α²}).
pub fn mss_gamma_derivative(alpha: f64, p: &EvolutionParams, stats: Statistics) -> f64 {
    let t = p.t();
    let decay = (-p.gamma0() * t).exp();
    let (s, c) = t.sin_cos();
    if stats == Statistics::MB {
        return -8.0 * alpha * alpha * t * decay * c * c;
    }
    let (weight, e) = exchange_weight(alpha, stats);
    -weight * t * decay * (c * c - stats.sign() * e * s * s)
}

/// Diagonal two-particle density
/// 2𝒩±²[ρ_MB(x₁, x₂) ± |f|² Re{ψ_α(x₁)ψ_β*(x₁)ψ_β(x₂)ψ_α*(x₂)}],
/// ρ_MB = ½[|ψ_α(x₁)|²|ψ_β(x₂)|² + |ψ_β(x₁)|²|ψ_α(x₂)|²].
pub fn two_particle_position_density(tp: &TwoParticleState, p: &EvolutionParams, x1: f64, x2: f64) -> f64 {
    let (at, bt) = evolved(tp, p);
    let (a1, b1) = (position_wf_at(at, x1), position_wf_at(bt, x1));
    let (a2, b2) = (position_wf_at(at, x2), position_wf_at(bt, x2));
    let mb = 0.5 * (a1.norm_sqr() * b2.norm_sqr() + b1.norm_sqr() * a2.norm_sqr());
    if tp.stats == Statistics::MB {
        return mb;
    }
    let f2 = decoherence_modulus_sqr(tp.alpha, tp.beta, p);
    let exchange = (a1 * b1.conj() * b2 * a2.conj()).re;
    2.0 * tp.norm * tp.norm * (mb + tp.stats.sign() * f2 * exchange)
}

/// Detector of width 2d centered at `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorWindow {
    half_width: f64,
    center: f64,
}

impl DetectorWindow {
    pub fn new(half_width: f64) -> Result<Self> {
        Self::centered(half_width, 0.0)
    }

    pub fn centered(half_width: f64, center: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("d", format!("half width must be finite and > 0, got {half_width}")));
        }
        if !center.is_finite() {
            return Err(invalid("center", "must be finite"));
        }
        Ok(Self { half_width, center })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn center(&self) -> f64 {
        self.center
    }
}

/// The three window integrals entering the detection ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowIntegrals {
    /// ∫ |ψ_α|² dx
    pub i_alpha: f64,
    /// ∫ |ψ_β|² dx
    pub i_beta: f64,
    /// ∫ ψ_α ψ_β* dx
    pub i_cross: Complex64,
}

/// Closed forms for β = -α real and a window centered at 0, with
/// q = √2 α e^{-γ0 t/2}:
/// I_α = I_β = ½[erf(d + q cos t) + erf(d - q cos t)],
/// I_× = ½ e^{-q²}[erf(d + i q sin t) + erf(d - i q sin t)].
pub fn window_integrals_closed_form(alpha: f64, p: &EvolutionParams, d: f64) -> WindowIntegrals {
    let q = SQRT_2 * alpha * (-0.5 * p.gamma0() * p.t()).exp();
    let (s, c) = p.t().sin_cos();
    let i_alpha = 0.5 * (erf(d + q * c) + erf(d - q * c));
    let i_cross = 0.5
        * (-q * q).exp()
        * (complex_erf(Complex64::new(d, q * s)) + complex_erf(Complex64::new(d, -q * s)));
    WindowIntegrals {
        i_alpha,
        i_beta: i_alpha,
        i_cross: Complex64::new(i_cross.re, 0.0),
    }
}

/// The window integrals by adaptive Gauss–Kronrod quadrature, for any α, β.
pub fn window_integrals_quadrature(tp: &TwoParticleState, p: &EvolutionParams, w: &DetectorWindow) -> WindowIntegrals {
    let (at, bt) = evolved(tp, p);
    let (lo, hi) = (w.center - w.half_width, w.center + w.half_width);
    let tol = WINDOW_QUADRATURE_TOLERANCE;
    let prob = |a: Complex64| integrate_complex(|x| Complex64::new(position_wf_at(a, x).norm_sqr(), 0.0), lo, hi, tol * 1e-3, tol).re;
    WindowIntegrals {
        i_alpha: prob(at),
        i_beta: prob(bt),
        i_cross: integrate_complex(|x| position_wf_at(at, x) * position_wf_at(bt, x).conj(), lo, hi, tol * 1e-3, tol),
    }
}

/// p± = p_{BE/FD} / p_MB = 2𝒩±²{1 ± |f|²|I_×|²/(I_α I_β)}; 1 for MB.
///
/// Uses the erf closed forms when β = -α is real and the window is centered
/// at the origin, quadrature otherwise.
pub fn joint_detection_ratio(tp: &TwoParticleState, p: &EvolutionParams, w: &DetectorWindow) -> Result<f64> {
    let ints = if tp.is_mirror_real() && w.center == 0.0 {
        window_integrals_closed_form(tp.alpha.re(), p, w.half_width)
    } else {
        window_integrals_quadrature(tp, p, w)
    };
    ratio_from_integrals(tp, p, &ints)
}

/// [`joint_detection_ratio`] with the window integrals supplied.
pub fn ratio_from_integrals(tp: &TwoParticleState, p: &EvolutionParams, ints: &WindowIntegrals) -> Result<f64> {
    if !(ints.i_alpha >= EMPTY_WINDOW && ints.i_beta >= EMPTY_WINDOW) {
        return Err(Error::EmptyWindow {
            i_alpha: ints.i_alpha,
            i_beta: ints.i_beta,
        });
    }
    if tp.stats == Statistics::MB {
        return Ok(1.0);
    }
    let f2 = decoherence_modulus_sqr(tp.alpha, tp.beta, p);
    let exchange = f2 * ints.i_cross.norm_sqr() / (ints.i_alpha * ints.i_beta);
    Ok(2.0 * tp.norm * tp.norm * (1.0 + tp.stats.sign() * exchange))
}
