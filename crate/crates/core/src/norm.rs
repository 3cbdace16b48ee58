//! Weighted `L^2` norms of `psi_z` on the half-line.
//!
//! With the weight `x^alpha`, `|psi_z(x)|^2 x^alpha` behaves like
//! `x^(2 - 2 Re z + alpha)` for large `x` (because `psi_z(x) ~ x^(1-z)/(z-1)`),
//! so the norm is finite at infinity exactly when `Re z > (3 + alpha)/2`.
//! The routines here measure that exponent, classify convergence, and check
//! the weighted dilation representation and the eigenvalue of its generator.

use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::operator::Grid;
use crate::psi::{psi_value, INTEGRAL_POLE_GUARD};
use crate::quad::{integrate_panels, GaussLegendre, PanelControl};
use crate::special::ComplexValue;

/// Exponent `alpha` of the weight `x^alpha`, restricted to `[-4, 4]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WeightExponent(f64);

impl WeightExponent {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha.abs() <= 4.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain("weight exponent must be finite with |alpha| <= 4"))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    /// `Re z` above which the tail of the weighted norm of `psi_z` converges.
    pub fn threshold_sigma(self) -> f64 {
        (3.0 + self.0) / 2.0
    }

    /// Large-`x` exponent of `|psi_z(x)|^2 x^alpha`.
    pub fn predicted_exponent(self, z: ComplexValue) -> f64 {
        2.0 - 2.0 * z.re + self.0
    }
}

fn check_z(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.re <= 0.0 {
        return Err(Error::Domain("weighted norms need finite z with Re z > 0"));
    }
    if (z - 1.0).norm() <= INTEGRAL_POLE_GUARD {
        return Err(Error::Pole { at: z });
    }
    Ok(())
}

/// `int_{x_min}^{x_max} |psi_z(x)|^2 x^alpha dx`, integrated in `log x`.
pub fn weighted_norm_integral(
    z: ComplexValue,
    w: WeightExponent,
    x_min: f64,
    x_max: f64,
    tol: f64,
) -> Result<f64> {
    check_z(z)?;
    if !(x_min > 0.0 && x_min < x_max && x_max.is_finite()) {
        return Err(Error::Domain("weighted norm needs 0 < x_min < x_max"));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive"));
    }
    let alpha = w.alpha();
    let (lo, hi) = (x_min.ln(), x_max.ln());
    let rule = GaussLegendre::new(12);
    let initial_panels = ((4.0 * (hi - lo)).ceil() as usize).max(8);
    // x = e^u, dx = x du
    let integrand = |u: f64| -> f64 {
        let x = u.exp();
        match psi_value(z, x) {
            Ok(psi) => psi.norm_sqr() * x.powf(alpha + 1.0),
            Err(_) => f64::NAN,
        }
    };
    let mut coarse = 0.0;
    let step = (hi - lo) / initial_panels as f64;
    for k in 0..initial_panels {
        let a = lo + step * k as f64;
        coarse += rule.integrate(a, a + step, integrand).0;
    }
    if !coarse.is_finite() {
        return Err(Error::QuadratureFailure { panels: initial_panels });
    }
    let control = PanelControl {
        initial_panels,
        abs_tol: tol * coarse.abs(),
        max_panels: 100_000,
    };
    let out = integrate_panels(&rule, lo, hi, control, integrand)?;
    Ok(out.value)
}

/// Least-squares slope of `log(|psi_z(x)|^2 x^alpha)` against `log x`.
pub fn tail_exponent_fit(z: ComplexValue, w: WeightExponent, sample_points: &[f64]) -> Result<f64> {
    check_z(z)?;
    if sample_points.len() < 6 {
        return Err(Error::Domain("tail fit needs at least 6 sample points"));
    }
    if sample_points[0] < 20.0 || sample_points.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::Domain("tail fit samples must be increasing and >= 20"));
    }
    let mut pts = Vec::with_capacity(sample_points.len());
    for &x in sample_points {
        let psi = psi_value(z, x)?;
        let y = psi.norm_sqr().ln() + w.alpha() * x.ln();
        if !y.is_finite() {
            return Err(Error::Domain("psi vanished at a tail sample point"));
        }
        pts.push((x.ln(), y));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    Ok(sxy / sxx)
}

/// Twelve log-spaced points on `[50, 5000]`.
pub fn default_tail_samples() -> Vec<f64> {
    let n = 12;
    (0..n)
        .map(|k| 50.0 * 100.0_f64.powf(k as f64 / (n - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Convergent,
    Divergent,
    Marginal,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Convergent => "Convergent",
            Verdict::Divergent => "Divergent",
            Verdict::Marginal => "Marginal",
        }
    }
}

/// Half-width of the marginal band of fitted exponents around `-1`.
pub const MARGINAL_BAND: f64 = 0.1;

/// Behaviour of the weighted norm near the origin.
///
/// For `alpha > -1` the bounded function `psi_z` is integrable against the
/// weight near 0. Otherwise convergence there hinges on `psi_z(0) = 0`, which
/// is not certified; the contribution of `[1e-3, 1]` is reported instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OriginCheck {
    Certified,
    Uncertified { contribution: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceVerdict {
    pub verdict: Verdict,
    pub fitted_exponent: f64,
    pub predicted_exponent: f64,
    pub threshold_sigma: f64,
    pub origin: OriginCheck,
}

impl ConvergenceVerdict {
    /// Verdict implied by the threshold rule, `None` inside the margin band.
    pub fn analytic(&self, sigma: f64) -> Option<Verdict> {
        let margin = sigma - self.threshold_sigma;
        if margin > MARGINAL_BAND {
            Some(Verdict::Convergent)
        } else if margin < -MARGINAL_BAND {
            Some(Verdict::Divergent)
        } else {
            None
        }
    }

    /// True when the numerical verdict agrees with the threshold rule, or the
    /// case sits inside the margin band.
    pub fn consistent(&self, sigma: f64) -> bool {
        match self.analytic(sigma) {
            Some(v) => v == self.verdict,
            None => true,
        }
    }
}

/// Classifies the tail of `||psi_z||_alpha` from the fitted tail exponent.
pub fn convergence_classify(z: ComplexValue, w: WeightExponent) -> Result<ConvergenceVerdict> {
    check_z(z)?;
    let fitted = tail_exponent_fit(z, w, &default_tail_samples())?;
    let verdict = if fitted < -1.0 - MARGINAL_BAND {
        Verdict::Convergent
    } else if fitted > -1.0 + MARGINAL_BAND {
        Verdict::Divergent
    } else {
        Verdict::Marginal
    };
    let origin = if w.alpha() > -1.0 {
        OriginCheck::Certified
    } else {
        OriginCheck::Uncertified { contribution: weighted_norm_integral(z, w, 1e-3, 1.0, 1e-8)? }
    };
    Ok(ConvergenceVerdict {
        verdict,
        fitted_exponent: fitted,
        predicted_exponent: w.predicted_exponent(z),
        threshold_sigma: w.threshold_sigma(),
        origin,
    })
}

/// Eigenvalue of `x^{-z}` under `A_alpha = i x d/dx + i (alpha + 1)/2`, and
/// the `Re z` on which that eigenvalue is real.
pub fn a_alpha_eigendata(z: ComplexValue, w: WeightExponent) -> (ComplexValue, f64) {
    let critical = 0.5 * (w.alpha() + 1.0);
    let i = Complex64::new(0.0, 1.0);
    (i * (critical - z), critical)
}

/// Gaussian bumps `(center, width)`; every bump is below 1e-16 of its peak
/// at the origin.
const DILATION_FAMILY: [(f64, f64); 4] = [(2.0, 0.2), (3.0, 0.3), (4.0, 0.45), (5.0, 0.5)];

/// Truncation radius of a unit-width Gaussian at 1e-16 relative amplitude.
fn gaussian_cutoff() -> f64 {
    (2.0 * 16.0 * core::f64::consts::LN_10).sqrt()
}

fn bump(x: f64, center: f64, width: f64) -> f64 {
    let s = (x - center) / width;
    if s.abs() > gaussian_cutoff() {
        0.0
    } else {
        (-0.5 * s * s).exp()
    }
}

/// Relative change of the weighted norm under
/// `D(lambda) f(x) = lambda^{-(1+alpha)/2} f(x / lambda)`, maximised over a
/// family of Gaussian bumps. Norms are trapezoid sums on `grid`.
pub fn weighted_dilation_check(lambda: f64, w: WeightExponent, grid: &Grid) -> Result<f64> {
    if !(0.1..=10.0).contains(&lambda) {
        return Err(Error::Domain("dilation factor must lie in [0.1, 10]"));
    }
    let alpha = w.alpha();
    let scale = lambda.powf(-(1.0 + alpha) / 2.0);
    let cut = gaussian_cutoff();
    let mut worst: f64 = 0.0;
    for (center, width) in DILATION_FAMILY {
        for factor in [1.0, lambda] {
            let lo = factor * (center - cut * width);
            let hi = factor * (center + cut * width);
            if lo < grid.node(0) || hi > grid.extent() || factor * width < 4.0 * grid.spacing() {
                return Err(Error::QuadratureFailure { panels: grid.count() });
            }
        }
        let mut plain = 0.0;
        let mut dilated = 0.0;
        for j in 0..grid.count() {
            let x = grid.node(j);
            let wt = grid.trapezoid_weight(j) * x.powf(alpha);
            let f = bump(x, center, width);
            let g = scale * bump(x / lambda, center, width);
            plain += wt * f * f;
            dilated += wt * g * g;
        }
        let (plain, dilated) = (plain.sqrt(), dilated.sqrt());
        worst = worst.max((dilated - plain).abs() / plain);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn alpha(a: f64) -> WeightExponent {
        WeightExponent::new(a).unwrap()
    }

    #[test]
    fn weight_bounds() {
        assert!(WeightExponent::new(4.5).is_err());
        assert!(WeightExponent::new(f64::NAN).is_err());
        assert_eq!(alpha(-2.5).threshold_sigma(), 0.25);
    }

    #[test]
    fn convergent_norm_is_stable() {
        let a = weighted_norm_integral(c(2.0, 0.0), alpha(0.0), 1e-3, 200.0, 1e-10).unwrap();
        let b = weighted_norm_integral(c(2.0, 0.0), alpha(0.0), 1e-3, 400.0, 1e-10).unwrap();
        assert!(a.is_finite() && (b - a).abs() / a < 0.01);
    }

    #[test]
    fn divergent_norm_grows_quadratically() {
        // |psi_{1/2}(x)|^2 ~ 4x, so the integral grows like 2 x_max^2.
        let a = weighted_norm_integral(c(0.5, 0.0), alpha(0.0), 1e-3, 1000.0, 1e-10).unwrap();
        let b = weighted_norm_integral(c(0.5, 0.0), alpha(0.0), 1e-3, 2000.0, 1e-10).unwrap();
        assert!((b / a / 4.0 - 1.0).abs() < 0.05, "ratio {}", b / a);
        assert!((a / (2.0 * 1000.0 * 1000.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn origin_side_is_finite_for_bounded_psi() {
        let near = weighted_norm_integral(c(2.0, 0.0), alpha(0.0), 1e-9, 1.0, 1e-10).unwrap();
        let far = weighted_norm_integral(c(2.0, 0.0), alpha(0.0), 1e-3, 1.0, 1e-10).unwrap();
        assert!((near - far) < 1e-3 * 3.0);
    }

    #[test]
    fn tail_fit_examples() {
        let s = default_tail_samples();
        assert!((tail_exponent_fit(c(2.0, 0.0), alpha(0.0), &s).unwrap() + 2.0).abs() < 0.05);
        assert!((tail_exponent_fit(c(0.5, 14.13), alpha(0.0), &s).unwrap() - 1.0).abs() < 0.05);
        assert!((tail_exponent_fit(c(1.75, 0.0), alpha(-1.0), &s).unwrap() + 2.5).abs() < 0.05);
        assert!(tail_exponent_fit(c(2.0, 0.0), alpha(0.0), &s[..5]).is_err());
        assert!(tail_exponent_fit(c(2.0, 0.0), alpha(0.0), &[10.0, 30.0, 40.0, 50.0, 60.0, 70.0]).is_err());
    }

    #[test]
    fn classifier_examples() {
        let v = convergence_classify(c(2.0, 0.0), alpha(0.0)).unwrap();
        assert_eq!(v.verdict, Verdict::Convergent);
        assert_eq!(v.threshold_sigma, 1.5);
        assert_eq!(v.origin, OriginCheck::Certified);
        let v = convergence_classify(c(0.5, 14.13), alpha(0.0)).unwrap();
        assert_eq!(v.verdict, Verdict::Divergent);
        let v = convergence_classify(c(0.5, 14.13), alpha(-2.5)).unwrap();
        assert_eq!(v.verdict, Verdict::Convergent);
        assert!(matches!(v.origin, OriginCheck::Uncertified { contribution } if contribution > 0.0));
    }

    #[test]
    fn a_alpha_examples() {
        let (ev, crit) = a_alpha_eigendata(c(0.5, 10.0), alpha(0.0));
        assert_eq!(ev, c(10.0, 0.0));
        assert_eq!(crit, 0.5);
        let (ev, crit) = a_alpha_eigendata(c(0.5, 10.0), alpha(-2.0));
        assert_eq!(ev, c(10.0, -1.0));
        assert_eq!(crit, -0.5);
        let z = c(0.8, -3.0);
        let (ev, _) = a_alpha_eigendata(z, alpha(0.0));
        assert!((ev.norm() - (z - 0.5).norm()).abs() < 1e-15);
    }

    #[test]
    fn dilation_examples() {
        let grid = Grid::uniform(0.01, 60.0).unwrap();
        for a in [-2.0, 0.0, 1.5, 3.0] {
            assert!(weighted_dilation_check(1.0, alpha(a), &grid).unwrap() < 1e-15);
        }
        assert!(weighted_dilation_check(2.0, alpha(0.0), &grid).unwrap() <= 1e-6);
        assert!(weighted_dilation_check(3.0, alpha(1.5), &grid).unwrap() <= 1e-6);
        assert!(weighted_dilation_check(20.0, alpha(0.0), &grid).is_err());
        // lambda = 0.1 shrinks the narrowest bump below four nodes
        assert!(weighted_dilation_check(0.1, alpha(0.0), &grid).is_err());
    }
}
