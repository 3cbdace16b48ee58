//! Gauss-Legendre panel quadrature with bisection refinement.
//!
//! The integrator is generic over real and complex integrands. Each panel is
//! integrated once as a whole and once as two halves; the difference is the
//! panel-refinement error estimate.

use core::f64::consts::PI;
use core::ops::{Add, Mul};

use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Values the panel integrator can accumulate.
pub trait Integrand: Copy + Zero + Add<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `order`-point rule by Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]`, also returning the rule applied to `|f|`.
    pub fn integrate<T: Integrand>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> (T, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = T::zero();
        let mut mass = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            mass += w * v.magnitude();
            sum = sum + v * w;
        }
        (sum * half, mass * half.abs())
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of an adaptive panel integration.
#[derive(Debug, Clone, Copy)]
pub struct PanelIntegral<T> {
    pub value: T,
    /// Sum of accepted panel-refinement deltas and rounding floors.
    pub abs_err: f64,
    /// Integral of `|f|`, the scale for rounding error.
    pub abs_mass: f64,
    pub panels: usize,
}

/// Refinement controls for [`integrate_panels`].
#[derive(Debug, Clone, Copy)]
pub struct PanelControl {
    pub initial_panels: usize,
    pub abs_tol: f64,
    pub max_panels: usize,
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// The interval is cut into `initial_panels` equal panels; a panel is
/// bisected until its whole-versus-halves delta is below its share of
/// `abs_tol` or below the rounding floor of its absolute mass.
pub fn integrate_panels<T, F>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    control: PanelControl,
    mut f: F,
) -> Result<PanelIntegral<T>>
where
    T: Integrand,
    F: FnMut(f64) -> T,
{
    let width = b - a;
    let n0 = control.initial_panels.max(1);
    let min_width = width.abs() * 1e-13;
    let mut stack: Vec<(f64, f64, T)> = Vec::with_capacity(2 * n0);
    for k in (0..n0).rev() {
        let lo = a + width * k as f64 / n0 as f64;
        let hi = a + width * (k + 1) as f64 / n0 as f64;
        let (whole, _) = rule.integrate(lo, hi, &mut f);
        stack.push((lo, hi, whole));
    }
    let mut value = T::zero();
    let mut abs_err = 0.0;
    let mut abs_mass = 0.0;
    let mut panels = 0usize;
    let mut evaluated = n0;
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, left_mass) = rule.integrate(lo, mid, &mut f);
        let (right, right_mass) = rule.integrate(mid, hi, &mut f);
        evaluated += 2;
        let halves = left + right;
        let mass = left_mass + right_mass;
        let delta = (whole + halves * -1.0).magnitude();
        let share = control.abs_tol * ((hi - lo) / width).abs();
        let floor = 64.0 * f64::EPSILON * mass;
        if delta <= share.max(floor) {
            value = value + halves;
            abs_err += delta + floor;
            abs_mass += mass;
            panels += 1;
        } else {
            if evaluated >= control.max_panels || (hi - lo).abs() <= min_width {
                return Err(Error::QuadratureFailure { panels: evaluated });
            }
            stack.push((mid, hi, right));
            stack.push((lo, mid, left));
        }
    }
    if !(value.magnitude().is_finite()) {
        return Err(Error::QuadratureFailure { panels });
    }
    Ok(PanelIntegral { value, abs_err, abs_mass, panels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for order in [4, 7, 16, 24] {
            let rule = GaussLegendre::new(order);
            let weights: f64 = rule.weights.iter().sum();
            assert!((weights - 2.0).abs() < 1e-14);
            // x^(2n-1) and x^(2n-2) over [0, 1]
            let deg = 2 * order - 2;
            let (v, _) = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "order {order}");
        }
    }

    #[test]
    fn adaptive_resolves_endpoint_peak() {
        let rule = GaussLegendre::new(10);
        let control = PanelControl { initial_panels: 4, abs_tol: 1e-12, max_panels: 100_000 };
        // int_0^1 1 / (1e-3 + x) dx
        let out = integrate_panels(&rule, 0.0, 1.0, control, |x| 1.0 / (1e-3 + x)).unwrap();
        let exact = (1.001f64 / 1e-3).ln();
        assert!((out.value - exact).abs() < 1e-11);
        assert!(out.abs_err < 1e-11);
    }

    #[test]
    fn complex_oscillation() {
        let rule = GaussLegendre::new(16);
        let control = PanelControl { initial_panels: 8, abs_tol: 1e-13, max_panels: 100_000 };
        let out = integrate_panels(&rule, 0.0, 10.0, control, |x| {
            Complex64::new(0.0, 25.0 * x).exp()
        })
        .unwrap();
        let exact = (Complex64::new(0.0, 250.0).exp() - 1.0) / Complex64::new(0.0, 25.0);
        assert!((out.value - exact).norm() < 1e-12);
    }

    #[test]
    fn gives_up_on_nonintegrable_spike() {
        let rule = GaussLegendre::new(4);
        let control = PanelControl { initial_panels: 1, abs_tol: 1e-14, max_panels: 200 };
        let res = integrate_panels(&rule, -1.0, 1.0, control, |x: f64| 1.0 / x.abs().max(1e-300));
        assert!(matches!(res, Err(Error::QuadratureFailure { .. })));
    }
}
