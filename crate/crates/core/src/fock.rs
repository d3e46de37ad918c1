//! Truncated Fock-space representations: coherent-state vectors, density
//! matrices, a Hermitian Jacobi eigensolver and the entropies built on it.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::states::{decoherence_factor, evolve_amplitude, CoherentAmplitude, EvolutionParams, SuperposedState};

/// Largest tail mass a constructed state may drop beyond N_max.
pub const TAIL_TOLERANCE: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-13;
const EIGEN_CLAMP: f64 = -1e-10;

/// ceil(x + 10√x + 20) for x the largest initial |α|².
pub fn default_n_max(max_norm_sqr: f64) -> usize {
    (max_norm_sqr + 10.0 * max_norm_sqr.sqrt() + 20.0).ceil() as usize
}

/// ln(k!) for k = 0..=n by cumulative sums of ln k.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson mass e^{-x} Σ_{n > n_max} xⁿ/n!, summed term by term.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let lnf = ln_factorials(n_max + 1);
    let n0 = n_max + 1;
    let mut term = (n0 as f64 * mean.ln() - mean - lnf[n0]).exp();
    let mut sum = 0.0;
    let mut n = n0;
    // Terms rise until n ≈ mean, then fall faster than geometrically.
    loop {
        sum += term;
        n += 1;
        term *= mean / n as f64;
        if n as f64 > mean && (term < 1e-17 * sum || term < 1e-300) {
            break;
        }
    }
    sum
}

/// Coefficients ⟨n|ψ⟩ for n = 0..=n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("coeffs", "empty Fock vector"));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// ⟨self|other⟩ over the shared truncation.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// |a⟩ truncated at n_max by the recurrence c_{n+1} = c_n a/√(n+1).
pub fn coherent_fock_vector(a: CoherentAmplitude, n_max: usize) -> FockVector {
    let alpha = a.value();
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
    for n in 0..=n_max {
        coeffs.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    FockVector { coeffs }
}

/// As [`coherent_fock_vector`], failing when the Poisson tail beyond n_max
/// exceeds `tolerance`.
pub fn coherent_fock_vector_checked(a: CoherentAmplitude, n_max: usize, tolerance: f64) -> Result<FockVector> {
    let tail = poisson_tail(a.norm_sqr(), n_max);
    if tail > tolerance {
        return Err(Error::TruncationTooSmall {
            n_max,
            tail,
            tolerance,
        });
    }
    Ok(coherent_fock_vector(a, n_max))
}

/// Hermitian density matrix on {|0⟩, …, |n_max⟩}.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    elements: Array2<Complex64>,
}

impl FockDensityMatrix {
    pub fn from_matrix(elements: Array2<Complex64>) -> Result<Self> {
        let (r, c) = elements.dim();
        if r != c || r == 0 {
            return Err(invalid("elements", format!("expected a non-empty square matrix, got {r}x{c}")));
        }
        Ok(Self { elements })
    }

    pub fn zeros(n_max: usize) -> Self {
        Self {
            elements: Array2::zeros((n_max + 1, n_max + 1)),
        }
    }

    /// |v⟩⟨v|.
    pub fn pure(v: &FockVector) -> Self {
        let d = v.coeffs.len();
        let elements = Array2::from_shape_fn((d, d), |(m, n)| v.coeffs[m] * v.coeffs[n].conj());
        Self { elements }
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("weights", "empty diagonal"));
        }
        let d = weights.len();
        let mut elements = Array2::zeros((d, d));
        for (i, w) in weights.iter().enumerate() {
            elements[[i, i]] = Complex64::new(*w, 0.0);
        }
        Ok(Self { elements })
    }

    /// Gibbs state with weights ∝ (n̄/(n̄+1))ⁿ, normalized on the truncation.
    pub fn thermal(nbar: f64, n_max: usize) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(invalid("nbar", format!("must be finite and >= 0, got {nbar}")));
        }
        let ratio = nbar / (nbar + 1.0);
        let mut w: Vec<f64> = (0..=n_max).map(|n| ratio.powi(n as i32)).collect();
        let z: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= z);
        Self::diagonal(&w)
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.elements
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn trace(&self) -> Complex64 {
        self.elements.diag().sum()
    }

    /// Real parts of the diagonal, the Fock populations.
    pub fn populations(&self) -> Vec<f64> {
        self.elements.diag().iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_mn|² for Hermitian ρ.
        self.elements.iter().map(|z| z.norm_sqr()).sum()
    }

    /// max |ρ - ρ†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for m in 0..d {
            for n in m..d {
                worst = worst.max((self.elements[[m, n]] - self.elements[[n, m]].conj()).norm());
            }
        }
        worst
    }

    /// Replaces ρ by (ρ + ρ†)/2 and returns the size of the correction.
    pub fn hermitize(&mut self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for m in 0..d {
            for n in m..d {
                let avg = 0.5 * (self.elements[[m, n]] + self.elements[[n, m]].conj());
                worst = worst.max((avg - self.elements[[m, n]]).norm());
                self.elements[[m, n]] = avg;
                self.elements[[n, m]] = avg.conj();
            }
        }
        worst
    }

    /// Summed population of the `levels` highest Fock states.
    pub fn top_population(&self, levels: usize) -> f64 {
        let d = self.dim();
        (d.saturating_sub(levels)..d).map(|n| self.elements[[n, n]].re).sum()
    }

    pub fn max_abs_diff(&self, other: &FockDensityMatrix) -> f64 {
        self.elements
            .iter()
            .zip(other.elements.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn difference(&self, other: &FockDensityMatrix) -> Result<FockDensityMatrix> {
        if self.dim() != other.dim() {
            return Err(invalid("other", format!("dimension {} vs {}", self.dim(), other.dim())));
        }
        Ok(Self {
            elements: &self.elements - &other.elements,
        })
    }
}

/// Entropy in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyValue(f64);

impl EntropyValue {
    pub fn nats(&self) -> f64 {
        self.0
    }
}

fn entropy_of(weights: impl IntoIterator<Item = f64>) -> f64 {
    let s: f64 = weights
        .into_iter()
        .filter(|w| *w > 0.0)
        .map(|w| -w * w.ln())
        .sum();
    s.max(0.0)
}

/// Shannon entropy -Σ pᵢ ln pᵢ of a probability vector; 0 ln 0 = 0.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    entropy_of(probabilities.iter().copied())
}

/// Fock-space density matrix of a superposition evolved under the
/// zero-temperature master equation:
/// 𝒩² Σ_ij c_i c_j* f_ij(t) |α_i(t)⟩⟨α_j(t)|.
pub fn density_from_superposition(
    s: &SuperposedState,
    p: &EvolutionParams,
    n_max: usize,
) -> Result<FockDensityMatrix> {
    if p.nbar() > 0.0 {
        return Err(Error::ThermalUnsupported { nbar: p.nbar() });
    }
    let comps = s.components();
    let vectors = comps
        .iter()
        .map(|(_, a)| coherent_fock_vector_checked(evolve_amplitude(*a, p), n_max, TAIL_TOLERANCE))
        .collect::<Result<Vec<_>>>()?;
    let n2 = s.normalization().powi(2);
    let d = n_max + 1;
    let mut rho = Array2::<Complex64>::zeros((d, d));
    for (i, (ci, ai)) in comps.iter().enumerate() {
        for (j, (cj, aj)) in comps.iter().enumerate() {
            let f = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                decoherence_factor(*ai, *aj, p)
            };
            let w = n2 * ci * cj.conj() * f;
            let (vi, vj) = (vectors[i].coeffs(), vectors[j].coeffs());
            for m in 0..d {
                let left = w * vi[m];
                for n in 0..d {
                    rho[[m, n]] += left * vj[n].conj();
                }
            }
        }
    }
    let mut out = FockDensityMatrix { elements: rho };
    out.hermitize();
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// sorted in descending order.
pub fn jacobi_eigenvalues(m: &Array2<Complex64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let mut a = m.clone();
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = JACOBI_REL_TOL * scale.max(f64::MIN_POSITIVE);
    let off_norm = |a: &Array2<Complex64>| {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += 2.0 * a[[p, q]].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target || n < 2 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        // Skip negligible entries during the first sweeps.
        let threshold = if sweeps < 4 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                let mag = apq.norm();
                if mag == 0.0 || mag < threshold {
                    continue;
                }
                let (app, aqq) = (a[[p, p]].re, a[[q, q]].re);
                // Rotation U = D R with D = diag(1, e^{-iφ}) making a_pq real.
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let u_pp = Complex64::new(c, 0.0);
                let u_qp = -s * phase.conj();
                let u_pq = Complex64::new(s, 0.0);
                let u_qq = c * phase.conj();
                for k in 0..n {
                    let (akp, akq) = (a[[k, p]], a[[k, q]]);
                    a[[k, p]] = akp * u_pp + akq * u_qp;
                    a[[k, q]] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[[p, k]], a[[q, k]]);
                    a[[p, k]] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[[q, k]] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[[p, q]] = Complex64::new(0.0, 0.0);
                a[[q, p]] = Complex64::new(0.0, 0.0);
                a[[p, p]] = Complex64::new(a[[p, p]].re, 0.0);
                a[[q, q]] = Complex64::new(a[[q, q]].re, 0.0);
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Eigenvalues of a density matrix, descending.
pub fn hermitian_eigenvalues(m: &FockDensityMatrix) -> Result<Vec<f64>> {
    jacobi_eigenvalues(&m.elements)
}

/// S(ρ) = -tr ρ ln ρ, with eigenvalues above -1e-10 clamped to zero.
pub fn von_neumann_entropy(m: &FockDensityMatrix) -> Result<EntropyValue> {
    let values = hermitian_eigenvalues(m)?;
    if let Some(bad) = values.iter().find(|v| **v < EIGEN_CLAMP) {
        return Err(Error::DomainError(format!("density matrix has eigenvalue {bad:e}")));
    }
    Ok(EntropyValue(entropy_of(values)))
}

/// Entropy of the Fock-basis populations, i.e. of ρ with its off-diagonal
/// elements deleted.
pub fn diagonal_entropy(m: &FockDensityMatrix) -> EntropyValue {
    EntropyValue(entropy_of(m.elements.diag().iter().map(|z| z.re)))
}

/// ½ Σ |λᵢ(a - b)|.
pub fn trace_distance(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<f64> {
    let diff = a.difference(b)?;
    Ok(0.5 * hermitian_eigenvalues(&diff)?.iter().map(|v| v.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_cat, overlap, CatKind};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn amp(re: f64, im: f64) -> CoherentAmplitude {
        CoherentAmplitude::new(re, im)
    }

    #[test]
    fn coherent_vector_examples() {
        let v = coherent_fock_vector(CoherentAmplitude::vacuum(), 5);
        assert_eq!(v.coeffs()[0], Complex64::new(1.0, 0.0));
        assert!(v.coeffs()[1..].iter().all(|c| c.norm() == 0.0));
        let v = coherent_fock_vector(amp(1.0, 0.0), 40);
        assert_abs_diff_eq!(v.norm_sqr(), 1.0, epsilon = 1e-14);
        assert!(matches!(
            coherent_fock_vector_checked(amp(3.0, 0.0), 10, 1e-12),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn poisson_tail_matches_direct_deficit() {
        for (x, n) in [(1.0f64, 5usize), (4.0, 10), (9.0, 20)] {
            let v = coherent_fock_vector(amp(x.sqrt(), 0.0), n);
            assert_abs_diff_eq!(poisson_tail(x, n), 1.0 - v.norm_sqr(), epsilon = 1e-14);
        }
        assert!(poisson_tail(49.0, default_n_max(49.0)) < 1e-12);
    }

    #[test]
    fn ln_factorial_table() {
        let t = ln_factorials(20);
        assert_abs_diff_eq!(t[0], 0.0);
        assert_abs_diff_eq!(t[5], 120f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(t[20], 2432902008176640000f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn single_component_is_pure() {
        let s = SuperposedState::coherent(amp(0.8, -0.3));
        let rho = density_from_superposition(&s, &EvolutionParams::initial(), 30).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
        let cat = make_cat(amp(1.0, 0.0), CatKind::PlusMinusAlpha);
        for t in [0.0, 1.3, 7.0] {
            let p = EvolutionParams::new(0.0, t).unwrap();
            let rho = density_from_superposition(&cat, &p, 31).unwrap();
            assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn density_rejects_thermal_and_small_truncation() {
        let s = SuperposedState::coherent(amp(3.0, 0.0));
        let p = EvolutionParams::initial().with_nbar(0.1).unwrap();
        assert!(matches!(density_from_superposition(&s, &p, 40), Err(Error::ThermalUnsupported { .. })));
        assert!(matches!(
            density_from_superposition(&s, &EvolutionParams::initial(), 8),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn eigenvalue_examples() {
        let id = FockDensityMatrix::diagonal(&[1.0; 6]).unwrap();
        for v in hermitian_eigenvalues(&id).unwrap() {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
        }
        let proj = FockDensityMatrix::pure(&coherent_fock_vector(amp(1.2, 0.4), 35));
        let values = hermitian_eigenvalues(&proj).unwrap();
        assert_abs_diff_eq!(values[0], 1.0, epsilon = 1e-10);
        assert!(values[1..].iter().all(|v| v.abs() < 1e-10));
    }

    /// Nonzero eigenvalues of w_aa|a⟩⟨a| + w_bb|b⟩⟨b| + w_ab|a⟩⟨b| + w_ab*|b⟩⟨a|
    /// from the 2×2 problem W G x = λ x on the span of the two states.
    fn gram_reduction_eigenvalues(
        a: CoherentAmplitude,
        b: CoherentAmplitude,
        waa: f64,
        wbb: f64,
        wab: Complex64,
    ) -> (f64, f64) {
        let g = overlap(a, b);
        // M = W G with W = [[waa, wab], [wab*, wbb]], G = [[1, g], [g*, 1]].
        let m00 = waa + wab * g.conj();
        let m11 = wab.conj() * g + wbb;
        let m01 = waa * g + wab;
        let m10 = wab.conj() + wbb * g.conj();
        let tr = m00 + m11;
        let det = m00 * m11 - m01 * m10;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let l1 = 0.5 * (tr + disc);
        let l2 = 0.5 * (tr - disc);
        (l1.re.max(l2.re), l1.re.min(l2.re))
    }

    #[test]
    fn two_component_mixture_matches_gram_reduction() {
        // Reduced boson state: 𝒩²(|a⟩⟨a| + |b⟩⟨b| + ⟨a|b⟩|a⟩⟨b| + h.c.).
        let (a, b) = (amp(1.0, 0.0), amp(-1.0, 0.0));
        let g = overlap(a, b);
        let n2 = 1.0 / (2.0 * (1.0 + g.norm_sqr()));
        let (va, vb) = (coherent_fock_vector(a, 40), coherent_fock_vector(b, 40));
        let mut rho = Array2::<Complex64>::zeros((41, 41));
        let wab = n2 * g;
        for m in 0..41 {
            for n in 0..41 {
                rho[[m, n]] = n2 * va.coeffs()[m] * va.coeffs()[n].conj()
                    + n2 * vb.coeffs()[m] * vb.coeffs()[n].conj()
                    + wab * va.coeffs()[m] * vb.coeffs()[n].conj()
                    + wab.conj() * vb.coeffs()[m] * va.coeffs()[n].conj();
            }
        }
        let rho = FockDensityMatrix::from_matrix(rho).unwrap();
        let values = hermitian_eigenvalues(&rho).unwrap();
        let (l1, l2) = gram_reduction_eigenvalues(a, b, n2, n2, wab);
        assert_abs_diff_eq!(values[0], l1, epsilon = 1e-10);
        assert_abs_diff_eq!(values[1], l2, epsilon = 1e-10);
        assert!(values[2..].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn entropy_examples() {
        let pure = FockDensityMatrix::pure(&coherent_fock_vector(amp(0.7, 0.7), 30));
        assert!(von_neumann_entropy(&pure).unwrap().nats() < 1e-9);
        let mixed = FockDensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&mixed).unwrap().nats(), std::f64::consts::LN_2, epsilon = 1e-15);
        let diag = FockDensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        assert_abs_diff_eq!(
            diagonal_entropy(&diag).nats(),
            von_neumann_entropy(&diag).unwrap().nats(),
            epsilon = 1e-15
        );
        let vac = FockDensityMatrix::pure(&coherent_fock_vector(CoherentAmplitude::vacuum(), 4));
        assert_eq!(diagonal_entropy(&vac).nats(), 0.0);
    }

    #[test]
    fn far_separated_mixture_has_ln2_entropy() {
        let (a, b) = (amp(3.0, 0.0), amp(-3.0, 0.0));
        let n = default_n_max(9.0);
        let (va, vb) = (coherent_fock_vector(a, n), coherent_fock_vector(b, n));
        let (pa, pb) = (FockDensityMatrix::pure(&va), FockDensityMatrix::pure(&vb));
        let m = (pa.matrix() + pb.matrix()).mapv(|z| 0.5 * z);
        let rho = FockDensityMatrix::from_matrix(m).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap().nats(), std::f64::consts::LN_2, epsilon = 1e-6);
    }

    #[test]
    fn diagonal_entropy_matches_poisson_series() {
        // Direct Poisson entropy for |α|² = 1 with tail < 1e-12.
        let lnf = ln_factorials(60);
        let direct: f64 = (0..=60)
            .map(|n| {
                let p = (-1.0 - lnf[n]).exp();
                -p * p.ln()
            })
            .sum();
        let rho = FockDensityMatrix::pure(&coherent_fock_vector(amp(1.0, 0.0), 40));
        assert_abs_diff_eq!(diagonal_entropy(&rho).nats(), direct, epsilon = 1e-9);
    }

    #[test]
    fn trace_distance_of_orthogonal_projectors() {
        let a = FockDensityMatrix::diagonal(&[1.0, 0.0, 0.0]).unwrap();
        let b = FockDensityMatrix::diagonal(&[0.0, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(trace_distance(&a, &b).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
    }

    fn amp_strategy(max: f64) -> impl Strategy<Value = CoherentAmplitude> {
        (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, th)| amp(r * th.cos(), r * th.sin()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fock_series_matches_closed_overlap(a in amp_strategy(3.0), b in amp_strategy(3.0)) {
            let va = coherent_fock_vector(a, 60);
            let vb = coherent_fock_vector(b, 60);
            prop_assert!((va.inner(&vb) - overlap(a, b)).norm() < 1e-12);
        }

        #[test]
        fn constructed_states_are_consistent(
            a in amp_strategy(1.5), b in amp_strategy(1.5),
            g in 0.0..0.5f64, t in 0.0..6.0f64,
            cre in -1.0..1.0f64, cim in -1.0..1.0f64,
        ) {
            let s = SuperposedState::pair(Complex64::new(1.0, 0.0), a, Complex64::new(cre, cim), b);
            prop_assume!(s.is_ok());
            let s = s.unwrap();
            let n = default_n_max(s.max_norm_sqr());
            let p = EvolutionParams::new(g, t).unwrap();
            let rho = density_from_superposition(&s, &p, n).unwrap();
            prop_assert!(rho.hermiticity_defect() < 1e-14);
            let tr = rho.trace();
            prop_assert!(tr.re <= 1.0 + 1e-12 && tr.re >= 1.0 - 1e-10);
            let values = hermitian_eigenvalues(&rho).unwrap();
            prop_assert!((values.iter().sum::<f64>() - tr.re).abs() < 1e-10);
            let clamped: f64 = values.iter().filter(|v| **v < 0.0).map(|v| -v).sum();
            prop_assert!(clamped < 1e-8);
            let gap = diagonal_entropy(&rho).nats() - von_neumann_entropy(&rho).unwrap().nats();
            prop_assert!(gap >= -1e-9);
        }
    }
}
