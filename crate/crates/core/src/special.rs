//! Error function of complex argument.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use num_complex::Complex64;

/// erf(z) for complex z.
///
/// Near the imaginary axis (Re z < 1.5, |z| < 10) the Maclaurin series is
/// used: its cancellation costs at most a factor |z|² e^{2 (Re z)²} in
/// relative accuracy there. Elsewhere erf = 1 - erfc with erfc from the
/// Laplace continued fraction, which converges for Re z > 0.
pub fn complex_erf(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -complex_erf(-z);
    }
    if z.re == 0.0 && z.im == 0.0 {
        return z;
    }
    if z.re < 1.5 && z.norm() < 10.0 {
        erf_series(z)
    } else {
        Complex64::new(1.0, 0.0) - erfc_continued_fraction(z)
    }
}

/// Real error function.
pub fn erf(x: f64) -> f64 {
    complex_erf(Complex64::new(x, 0.0)).re
}

/// Faddeeva function w(z) = e^{-z²} erfc(-iz), from [`complex_erf`].
pub fn faddeeva_w(z: Complex64) -> Complex64 {
    let iz = Complex64::new(-z.im, z.re);
    (-z * z).exp() * (Complex64::new(1.0, 0.0) + complex_erf(iz))
}

fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0usize;
    let min_terms = z2.norm() as usize + 2;
    loop {
        n += 1;
        term = term * -z2 / n as f64;
        let contribution = term / (2 * n + 1) as f64;
        sum += contribution;
        if n > min_terms && contribution.norm() <= 1e-17 * sum.norm() {
            break;
        }
        if n > 2000 {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

/// erfc(z) = e^{-z²}/√π · 1/(z + ½/(z + 1/(z + (3/2)/(z + …)))), Re z > 0,
/// evaluated with the modified Lentz algorithm.
fn erfc_continued_fraction(z: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let mut f = z;
    if f.norm() == 0.0 {
        f = Complex64::new(tiny, 0.0);
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..20000 {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if d.norm() == 0.0 {
            d = Complex64::new(tiny, 0.0);
        }
        c = z + a / c;
        if c.norm() == 0.0 {
            c = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let prefactor = (-z * z).exp() / PI.sqrt();
    if prefactor.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    prefactor / f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// erf(z) = (2/√π) z ∫₀¹ e^{-z² s²} ds by composite Gauss–Legendre,
    /// independent of the series and continued fraction.
    fn erf_quadrature(z: Complex64) -> Complex64 {
        let rule = gauss_legendre(40);
        let panels = 200;
        let h = 1.0 / panels as f64;
        let mut acc = c(0.0, 0.0);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in &rule {
                let s = mid + 0.5 * h * x;
                acc += 0.5 * h * w * (-z * z * s * s).exp();
            }
        }
        acc * z * FRAC_2_SQRT_PI
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn symmetry_and_zero() {
        assert_eq!(complex_erf(c(0.0, 0.0)), c(0.0, 0.0));
        for z in [c(0.3, 0.2), c(2.0, -1.0), c(4.0, 6.0)] {
            assert!((complex_erf(-z) + complex_erf(z)).norm() < 1e-15 * complex_erf(z).norm());
        }
        for (d, s) in [(1.0, 0.5), (2.0, 1.4), (3.0, 5.0), (0.2, 7.9)] {
            let sum = complex_erf(c(d, s)) + complex_erf(c(d, -s));
            assert!(sum.im.abs() <= 1e-14 * sum.norm());
        }
    }

    #[test]
    fn real_values() {
        assert_abs_diff_eq!(erf(1.0), 0.842_700_792_949_714_9, epsilon = 1e-15);
        assert_abs_diff_eq!(erf_quadrature(c(1.0, 0.0)).re, 0.8427007929, epsilon = 1e-10);
        assert_abs_diff_eq!(erf(50.0), 1.0);
        assert_abs_diff_eq!(erf(-3.0), -0.999_977_909_503_001_4, epsilon = 1e-15);
    }

    #[test]
    fn matches_high_precision_values() {
        let cases = [
            (c(0.5, 0.5), c(0.642_612_914_854_820_5, 0.457_881_394_435_192_2)),
            (c(2.0, 1.0), c(1.003_606_342_725_651_8, -0.011_259_006_028_815_025)),
            (c(1.5, 8.0), c(-4.445_461_029_578_116e25, 1.134_505_773_818_138e25)),
            (c(0.3, 7.5), c(-1.802_446_403_256_367e23, -4.662_161_792_588_62e22)),
            (c(2.0, -0.2), c(0.996_920_486_593_258_1, -0.003_751_845_075_208_846_6)),
            (c(3.0, 3.0), c(0.867_826_497_575_452_1, -0.012_152_181_790_312_257)),
            (c(1.4, 2.0), c(-0.765_392_877_076_466_8, 0.344_864_607_272_432_3)),
            (c(0.01, 0.01), c(0.011_284_543_878_595_874, 0.011_283_039_373_044_045)),
            (c(6.0, 8.0), c(72_960_695_305.270_3, 36_778_329_114.156_306)),
            (c(1.6, 0.001), c(0.976_348_522_911_088_5, 8.722_893_883_936_709e-5)),
        ];
        for (z, want) in cases {
            let got = complex_erf(z);
            assert!(rel_err(got, want) < 1e-12, "erf({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn agrees_with_quadrature_oracle() {
        for re in [0.0, 0.4, 1.2, 1.49, 1.51, 2.5, 4.0] {
            for im in [-7.5, -3.0, -0.5, 0.0, 0.7, 2.2, 5.0, 8.0] {
                let z = c(re, im);
                if z.norm() == 0.0 {
                    continue;
                }
                let got = complex_erf(z);
                let want = erf_quadrature(z);
                assert!(rel_err(got, want) < 1e-12, "erf({z}) = {got}, oracle {want}");
            }
        }
    }

    #[test]
    fn faddeeva_on_imaginary_axis() {
        // w(iy) = e^{y²} erfc(y)
        let y: f64 = 0.8;
        let want = (y * y).exp() * (1.0 - erf(y));
        assert_abs_diff_eq!(faddeeva_w(c(0.0, y)).re, want, epsilon = 1e-14);
    }
}
