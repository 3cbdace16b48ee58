//! Scalar special functions: complex gamma, a reference Riemann zeta and
//! principal complex powers of positive reals.

use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

use crate::error::{Error, Result};

/// The universal complex scalar.
pub type ComplexValue = Complex64;

/// Distance below which the gamma function refuses a non-positive integer.
pub const GAMMA_POLE_GUARD: f64 = 1e-12;

/// Distance below which the reference zeta refuses `z = 1`.
pub const ZETA_POLE_GUARD: f64 = 1e-8;

/// Conservative relative accuracy of [`complex_gamma`] for `0.1 <= |z| <= 50`.
pub const GAMMA_REL_ERR: f64 = 2e-13;

// Lanczos approximation with g = 671/128 and 14 rational terms.
const LANCZOS_G: f64 = 5.242_187_5;
#[allow(clippy::excessive_precision)]
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Log-gamma for `Re z >= 0.5`. The imaginary part is not reduced mod 2 pi.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let shifted = z + LANCZOS_G;
    let head = (z + 0.5) * shifted.ln() - shifted;
    let mut denom = z;
    let mut series = Complex64::new(LANCZOS_C0, 0.0);
    for c in LANCZOS_COEF {
        denom += 1.0;
        series += c / denom;
    }
    head + (series * SQRT_2PI / z).ln()
}

fn nearest_nonpositive_integer(z: Complex64) -> Option<f64> {
    if z.re > 0.5 {
        return None;
    }
    let k = z.re.round();
    Some(k)
}

/// Complex gamma function.
///
/// Lanczos approximation on `Re z >= 0.5`, reflection
/// `Gamma(z) Gamma(1 - z) = pi / sin(pi z)` to the left of that line.
pub fn complex_gamma(z: ComplexValue) -> Result<ComplexValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("gamma argument must be finite"));
    }
    if let Some(k) = nearest_nonpositive_integer(z) {
        if (z - k).norm() <= GAMMA_POLE_GUARD {
            return Err(Error::Pole { at: z });
        }
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z).exp())
    } else {
        let reflected = ln_gamma_right(1.0 - z).exp();
        let s = (z * PI).sin();
        Ok(PI / (s * reflected))
    }
}

/// `exp(w) - 1` without cancellation for small `|w|`.
pub(crate) fn expm1_complex(w: Complex64) -> Complex64 {
    let (sin_b, cos_b) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    let re = w.re.exp_m1() * cos_b - 2.0 * half * half;
    let im = w.re.exp() * sin_b;
    Complex64::new(re, im)
}

/// Terms for the Borwein acceleration of the alternating eta series,
/// chosen so that the truncation error stays below double precision for
/// `|Im z| <= 50`.
fn borwein_terms(im: f64) -> usize {
    let ln_rate = (3.0 + 8.0_f64.sqrt()).ln();
    let need = (1e17 * (1.0 + 2.0 * im.abs())).ln() + 0.5 * PI * im.abs();
    (need / ln_rate).ceil() as usize + 4
}

/// Riemann zeta on `Re z > 0` through the alternating eta series with the
/// Borwein (Chebyshev) acceleration, `zeta = eta / (1 - 2^(1 - z))`.
///
/// The eta denominator vanishes on `Re z = 1` at `Im z = 2 pi k / ln 2`; near
/// those points the relative accuracy degrades like `eps / distance`.
pub fn reference_zeta(z: ComplexValue) -> Result<ComplexValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("zeta argument must be finite"));
    }
    if (z - 1.0).norm() <= ZETA_POLE_GUARD {
        return Err(Error::Pole { at: z });
    }
    if z.re <= 0.0 {
        return Err(Error::Domain("reference zeta requires Re z > 0"));
    }
    let n = borwein_terms(z.im);
    let nf = n as f64;
    // d_k = sum_{i <= k} n (n + i - 1)! 4^i / ((n - i)! (2i)!)
    let mut partial = alloc::vec::Vec::with_capacity(n + 1);
    let mut term = 1.0_f64;
    let mut acc = term;
    partial.push(acc);
    for i in 0..n {
        let fi = i as f64;
        term *= 4.0 * (nf + fi) * (nf - fi) / ((2.0 * fi + 1.0) * (2.0 * fi + 2.0));
        acc += term;
        partial.push(acc);
    }
    let d_n = partial[n];
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, d_k) in partial.iter().take(n).enumerate() {
        let weight = (d_k - d_n) / d_n;
        let signed = if k % 2 == 0 { weight } else { -weight };
        sum += complex_power((k + 1) as f64, z)? * signed;
    }
    let eta = -sum;
    // 1 - 2^(1 - z) = -expm1((1 - z) ln 2)
    let denom = -expm1_complex((1.0 - z) * LN_2);
    Ok(eta / denom)
}

/// `x^(-z)` on the principal branch, for `x > 0`.
pub fn complex_power(x: f64, z: ComplexValue) -> Result<ComplexValue> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain("complex_power requires finite x > 0"));
    }
    if x == 1.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok((-z * x.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    /// `Gamma(1/2) = 2 int_0^inf e^{-u^2} du` by composite Simpson on [0, 12];
    /// the neglected tail is below 1e-60.
    fn gamma_half_oracle() -> f64 {
        let n = 20_000;
        let h = 12.0 / n as f64;
        let f = |u: f64| (-u * u).exp();
        let mut s = f(0.0) + f(12.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        2.0 * s * h / 3.0
    }

    #[test]
    fn gamma_factorials() {
        assert!(rel(complex_gamma(c(1.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-14);
        assert!(rel(complex_gamma(c(5.0, 0.0)).unwrap(), c(24.0, 0.0)) < 1e-13);
        let g = complex_gamma(c(0.5, 0.0)).unwrap();
        let oracle = gamma_half_oracle();
        assert!((g.re - oracle).abs() / oracle < 1e-12, "{g} vs {oracle}");
        assert!(g.im.abs() < 1e-15);
    }

    #[test]
    fn gamma_reference_values() {
        // mpmath.gamma at 30 digits
        let cases = [
            (c(0.5, 14.134725), c(-1.4455538437606964e-10, -5.522788768774066e-10)),
            (c(3.7, -2.2), c(-1.8850260130418728, -0.8497909415945895)),
            (c(-2.5, 0.3), c(-0.6138229974377415, -0.2112326149370418)),
            (c(0.1, 0.0), c(9.51350769866873, 0.0)),
            (c(30.0, 40.0), c(1.8741997673037803e21, -1.5108445033328678e21)),
        ];
        for (z, want) in cases {
            let got = complex_gamma(z).unwrap();
            assert!(rel(got, want) < 1e-12, "Gamma({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn gamma_poles() {
        for k in 0..5 {
            let z = c(-(k as f64) + 1e-13, 0.0);
            assert!(matches!(complex_gamma(z), Err(Error::Pole { .. })));
        }
        assert!(complex_gamma(c(-3.0, 1e-6)).is_ok());
    }

    #[test]
    fn gamma_reflection_at_point_three() {
        let z = c(0.3, 0.0);
        let lhs = complex_gamma(z).unwrap() * complex_gamma(1.0 - z).unwrap();
        let rhs = PI / (z * PI).sin();
        assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn zeta_even_values() {
        // Oracle: partial sums of n^-s plus the tail integral from N; the true
        // tail lies between the integrals from N + 1 and N, so the gap is < N^-s.
        fn oracle(s: f64) -> (f64, f64) {
            let n = 200_000;
            let sum: f64 = (1..=n).rev().map(|k| (k as f64).powf(-s)).sum();
            let tail = (n as f64).powf(1.0 - s) / (s - 1.0);
            (sum + tail, (n as f64).powf(-s))
        }
        for s in [2.0, 4.0] {
            let (want, gap) = oracle(s);
            let got = reference_zeta(c(s, 0.0)).unwrap();
            assert!((got.re - want).abs() <= gap + 1e-13, "zeta({s})");
        }
        let z2 = reference_zeta(c(2.0, 0.0)).unwrap();
        assert!((z2.re - 1.644_934_066_848_226_4).abs() < 1e-14);
        let z4 = reference_zeta(c(4.0, 0.0)).unwrap();
        assert!((z4.re - 1.082_323_233_711_138_1).abs() < 1e-14);
    }

    #[test]
    fn zeta_reference_values() {
        // mpmath.zeta at 30 digits
        let cases = [
            (c(0.5, 0.0), c(-1.4603545088095868, 0.0)),
            (c(0.75, 0.0), c(-3.4412853869452227, 0.0)),
            (c(1.5, 30.0), c(0.6908557315228129, -0.3671427473747212)),
            (c(0.3, 45.0), c(3.1696538970143533, 2.4695222137042174)),
            (c(9.5, -3.0), c(0.9992975044595085, 0.0011998398836580303)),
        ];
        for (z, want) in cases {
            let got = reference_zeta(z).unwrap();
            assert!(rel(got, want) < 1e-10, "zeta({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn zeta_conjugation_and_guards() {
        let z = c(0.5, 14.1);
        let a = reference_zeta(z.conj()).unwrap();
        let b = reference_zeta(z).unwrap().conj();
        assert!((a - b).norm() <= 4.0 * f64::EPSILON * b.norm().max(1e-3));
        assert!(matches!(reference_zeta(c(1.0, 5e-9)), Err(Error::Pole { .. })));
        assert!(matches!(reference_zeta(c(0.0, 3.0)), Err(Error::Domain(_))));
        assert!(reference_zeta(c(1.0, 2e-8)).is_ok());
    }

    #[test]
    fn power_cases() {
        assert_eq!(complex_power(1.0, c(3.3, -7.0)).unwrap(), c(1.0, 0.0));
        assert!((complex_power(4.0, c(0.5, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-16);
        // e^{-i ln 2} = cos(ln 2) - i sin(ln 2), frozen from mpmath
        let p = complex_power(2.0, c(0.0, 1.0)).unwrap();
        assert!((p - c(0.7692389013639721, -0.6389612763136348)).norm() < 1e-15);
        assert!(matches!(complex_power(0.0, c(1.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(complex_power(-2.0, c(1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn expm1_small_arguments() {
        let w = c(1e-10, -2e-10);
        let got = expm1_complex(w);
        let want = w + w * w * 0.5;
        assert!((got - want).norm() / w.norm() < 1e-15);
    }
}
