//! Evaluation of `psi_z(x) = sum_{n >= 1} (n + x)^(-z)`.
//!
//! Three independent routes are provided:
//!
//! * [`psi_series`]: the defining series on `Re z > 1`, with a midpoint tail
//!   estimate and a rigorous bound on its error;
//! * [`psi_euler_maclaurin`]: Euler-Maclaurin summation, valid on `Re z > 0`;
//! * [`psi_integral`]: the Mellin-type integral representation
//!
//!   ```text
//!   psi_z(x) = -1 / ((z - 1) Gamma(z)) * int_0^inf t^(z-1) e^(-tx) / (4 sinh^2(t/2))
//!                                          * (1 - t - e^(-t) - x t (1 - e^(-t))) dt
//!   ```
//!
//!   which continues `psi_z` meromorphically to `Re z > 0` with a simple pole
//!   at `z = 1`. The brace is negative on the whole half-line, hence the
//!   leading minus sign.
//!
//! Every evaluator returns an [`EvalResult`] carrying an absolute error
//! estimate, so results of different methods can be compared against the sum
//! of their estimates.

use core::f64::consts::{FRAC_PI_2, PI};

use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{integrate_panels, GaussLegendre, PanelControl};
use crate::special::{complex_gamma, complex_power, reference_zeta, ComplexValue, GAMMA_REL_ERR};

/// Series and Euler-Maclaurin refuse `|z - 1|` at or below this radius.
pub const SUM_POLE_GUARD: f64 = 1e-8;
/// The integral refuses `|z - 1|` at or below this radius; the `1/(z - 1)`
/// prefactor amplifies quadrature error.
pub const INTEGRAL_POLE_GUARD: f64 = 1e-6;
/// `NearPole` is reported inside this radius.
pub const NEAR_POLE_RADIUS: f64 = 1e-6;
/// Default cap on the number of directly summed series terms.
pub const SERIES_TERM_CAP: u64 = 100_000_000;

const EPS: f64 = f64::EPSILON;

/// Evaluation route for `psi_z(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Series,
    EulerMaclaurin,
    Integral,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Series, Method::EulerMaclaurin, Method::Integral];

    pub fn name(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::EulerMaclaurin => "em",
            Method::Integral => "integral",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalFlags {
    pub near_pole: bool,
    pub tail_truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: ComplexValue,
    pub abs_err: f64,
    pub method: Method,
    pub flags: EvalFlags,
}

impl EvalResult {
    fn new(value: Complex64, abs_err: f64, method: Method, z: Complex64) -> Self {
        Self {
            value,
            abs_err,
            method,
            flags: EvalFlags { near_pole: (z - 1.0).norm() < NEAR_POLE_RADIUS, tail_truncated: false },
        }
    }
}

/// Controls for the integral representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// `|t|` below which the integrand is replaced by its Maclaurin series.
    pub t_split: f64,
    /// Gauss-Legendre points per panel.
    pub panel_order: usize,
    /// Initial panel count on `[t_split, t_max]`.
    pub panels: usize,
    /// Largest real part of `t` the panels may reach.
    pub t_max: f64,
    /// Target absolute error on `psi_z(x)`.
    pub tol: f64,
}

impl QuadratureSpec {
    pub fn new(t_split: f64, panel_order: usize, panels: usize, t_max: f64, tol: f64) -> Result<Self> {
        if !(t_split > 0.0 && t_split < t_max && t_max.is_finite()) {
            return Err(Error::Domain("quadrature spec needs 0 < t_split < t_max"));
        }
        if panel_order < 4 || panels < 8 {
            return Err(Error::Domain("quadrature spec needs panel_order >= 4 and panels >= 8"));
        }
        if !(tol > 1e-15 && tol < 1e-2) {
            return Err(Error::Domain("quadrature tolerance must lie in (1e-15, 1e-2)"));
        }
        Ok(Self { t_split, panel_order, panels, t_max, tol })
    }

    /// Defaults for evaluating at `(z, x)`: `t_split = 1e-2`, 16-point panels,
    /// `max(32, 8 |Im z|)` panels and `t_max = 60 + 5 |Im z|`, stretched by
    /// `1 / (1 + x)` when `x < 0` since the integrand decays like `e^{-t(1+x)}`.
    pub fn for_point(z: ComplexValue, x: f64, tol: f64) -> Self {
        let im = z.im.abs();
        let decay = (1.0 + x).clamp(1e-6, 1.0);
        Self {
            t_split: 1e-2,
            panel_order: 16,
            panels: ((8.0 * im).ceil() as usize).max(32),
            t_max: (60.0 + 5.0 * im) / decay,
            tol: tol.clamp(2e-15, 5e-3),
        }
    }
}

/// Neumaier-compensated complex sum that also tracks `sum |term|`.
#[derive(Default)]
struct Accumulator {
    sum: Complex64,
    carry: Complex64,
    mass: f64,
}

impl Accumulator {
    fn add(&mut self, v: Complex64) {
        self.mass += v.norm();
        self.sum = Complex64::new(
            neumaier(&mut self.carry.re, self.sum.re, v.re),
            neumaier(&mut self.carry.im, self.sum.im, v.im),
        );
    }

    fn total(&self) -> Complex64 {
        self.sum + self.carry
    }
}

fn neumaier(carry: &mut f64, sum: f64, v: f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *carry += (sum - t) + v;
    } else {
        *carry += (v - t) + sum;
    }
    t
}

fn check_finite(z: Complex64, x: f64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("arguments must be finite"))
    }
}

/// Relative rounding level of `(n + x)^(-z)` computed as `exp(-z ln(n + x))`.
fn power_rounding(z: Complex64, a: f64) -> f64 {
    EPS * (2.0 + z.norm() * (a.abs() + 1.0).ln())
}

/// Direct summation of the defining series on `Re z > 1`.
pub fn psi_series(z: ComplexValue, x: f64, tol: f64) -> Result<EvalResult> {
    psi_series_capped(z, x, tol, SERIES_TERM_CAP)
}

/// [`psi_series`] with an explicit cap on the number of summed terms.
///
/// The partial sum to `N` is completed with the midpoint tail
/// `int_{N+1/2}^inf (t + x)^(-z) dt`; the midpoint rule error on each unit
/// cell is at most `|z (z+1)| / 24 * max (t + x)^(-Re z - 2)`, which sums to
/// the rigorous tail bound `|z (z+1)| / (24 (Re z + 1)) (N - 1/2 + x)^(-Re z - 1)`.
pub fn psi_series_capped(z: ComplexValue, x: f64, tol: f64, cap: u64) -> Result<EvalResult> {
    check_finite(z, x)?;
    if z.re <= 1.0 {
        return Err(Error::Domain("series requires Re z > 1"));
    }
    if x <= -1.0 {
        return Err(Error::Domain("series requires x > -1"));
    }
    if (z - 1.0).norm() <= SUM_POLE_GUARD {
        return Err(Error::Pole { at: z });
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive"));
    }
    let sigma = z.re;
    let scale = (z * (z + 1.0)).norm() / (24.0 * (sigma + 1.0));
    let base = (scale / (0.5 * tol)).powf(1.0 / (sigma + 1.0));
    let needed = (base + 0.5 - x).ceil().max(2.0);
    if needed > cap as f64 {
        return Err(Error::NonConvergence { terms_needed: needed, cap });
    }
    let n_terms = needed as u64;
    let mut acc = Accumulator::default();
    // Smallest terms first.
    for n in (1..=n_terms).rev() {
        acc.add(complex_power(n as f64 + x, z)?);
    }
    let nf = n_terms as f64;
    let tail = complex_power(nf + 0.5 + x, z - 1.0)? / (z - 1.0);
    let tail_bound = scale * (nf - 0.5 + x).powf(-(sigma + 1.0));
    let value = acc.total() + tail;
    let rounding = power_rounding(z, nf + x) * (acc.mass + tail.norm());
    Ok(EvalResult::new(value, tail_bound + rounding, Method::Series, z))
}

/// `B_{2j} / (2j)!` for `j = 1..=9`.
const BERNOULLI_OVER_FACTORIAL: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
];

/// Euler-Maclaurin summation with `n_direct` explicit terms and
/// `n_bernoulli` correction terms.
///
/// With `a = N + x` the value is
/// `sum_{n<=N} (n+x)^-z + a^(1-z)/(z-1) - a^-z/2 + sum_j B_2j/(2j)! (z)_(2j-1) a^(-z-2j+1)`.
/// The error estimate is the first omitted correction scaled by
/// `|z + 2M + 1| / (Re z + 2M + 1)`, plus rounding.
pub fn psi_euler_maclaurin(
    z: ComplexValue,
    x: f64,
    n_direct: usize,
    n_bernoulli: usize,
) -> Result<EvalResult> {
    em_with_remainder(z, x, n_direct, n_bernoulli).map(|(r, _)| r)
}

fn em_with_remainder(
    z: ComplexValue,
    x: f64,
    n_direct: usize,
    n_bernoulli: usize,
) -> Result<(EvalResult, f64)> {
    check_finite(z, x)?;
    if (z - 1.0).norm() <= SUM_POLE_GUARD {
        return Err(Error::Pole { at: z });
    }
    if z.re <= 0.0 {
        return Err(Error::Domain("Euler-Maclaurin requires Re z > 0"));
    }
    if x <= -1.0 {
        return Err(Error::Domain("Euler-Maclaurin requires x > -1"));
    }
    if n_direct < 8 || !(1..=8).contains(&n_bernoulli) {
        return Err(Error::Domain("Euler-Maclaurin needs n_direct >= 8 and 1 <= n_bernoulli <= 8"));
    }
    let mut acc = Accumulator::default();
    for n in (1..=n_direct).rev() {
        acc.add(complex_power(n as f64 + x, z)?);
    }
    let a = n_direct as f64 + x;
    let a_pow = complex_power(a, z)?;
    let lead = a_pow * a / (z - 1.0) - a_pow * 0.5;
    let mut rising = z;
    let mut a_corr = a_pow / a;
    let inv_a2 = 1.0 / (a * a);
    let mut corrections = Complex64::new(0.0, 0.0);
    let mut correction_mass = 0.0;
    let mut omitted = 0.0;
    for (j, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate().take(n_bernoulli + 1) {
        let term = rising * a_corr * *coef;
        if j < n_bernoulli {
            corrections += term;
            correction_mass += term.norm();
        } else {
            omitted = term.norm();
        }
        let k = 2.0 * j as f64 + 1.0;
        rising *= (z + k) * (z + k + 1.0);
        a_corr *= inv_a2;
    }
    let m = n_bernoulli as f64;
    let remainder = omitted * (z + 2.0 * m + 1.0).norm() / (z.re + 2.0 * m + 1.0);
    let rounding = power_rounding(z, a) * (acc.mass + lead.norm() + correction_mass);
    let value = acc.total() + lead + corrections;
    Ok((EvalResult::new(value, remainder + rounding, Method::EulerMaclaurin, z), remainder))
}

/// Euler-Maclaurin with eight corrections and the smallest doubling of
/// `n_direct` whose truncation remainder is below `tol / 2`.
pub fn psi_euler_maclaurin_auto(z: ComplexValue, x: f64, tol: f64) -> Result<EvalResult> {
    check_finite(z, x)?;
    let mut n = ((z.norm() + 4.0).ceil() as usize).max(8);
    loop {
        let (r, remainder) = em_with_remainder(z, x, n, 8)?;
        if remainder <= 0.5 * tol || n >= 1 << 22 {
            return Ok(r);
        }
        n *= 2;
    }
}

/// `psi_z(x)` by the cheapest valid route, to about 1e-13 relative accuracy.
pub(crate) fn psi_value(z: Complex64, x: f64) -> Result<Complex64> {
    let lead = (complex_power(x + 2.0, z - 1.0)? / (z - 1.0)).norm();
    Ok(psi_euler_maclaurin_auto(z, x, 1e-14 * lead.max(1e-3))?.value)
}

/// Maclaurin coefficients of `B(t) / t^2` where
/// `B(t) = 1 - t - e^{-t} - x t (1 - e^{-t})`.
fn brace_over_t2(x: f64, len: usize) -> Vec<f64> {
    // B_k = (-1)^(k+1) (1/k! + x/(k-1)!) for k >= 2
    let mut out = Vec::with_capacity(len);
    let mut inv_fact_k1 = 1.0; // 1/(k-1)! at k = 2
    for i in 0..len {
        let k = i as f64 + 2.0;
        let inv_fact_k = inv_fact_k1 / k;
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        out.push(sign * (inv_fact_k + x * inv_fact_k1));
        inv_fact_k1 = inv_fact_k;
    }
    out
}

/// Maclaurin coefficients of `g(t) = e^{-tx} B(t) / (4 sinh^2(t/2))`,
/// which is analytic for `|t| < 2 pi` with `g(0) = -(1/2 + x)`.
fn small_t_coefficients(x: f64, len: usize) -> Vec<f64> {
    let b = brace_over_t2(x, len);
    // 4 sinh^2(t/2) / t^2 = sum_m 2 t^(2m-2) / (2m)!
    let mut d = alloc::vec![0.0; len];
    let mut inv_fact = 0.5; // 1/2!
    let mut k = 2.0;
    for i in (0..len).step_by(2) {
        d[i] = 2.0 * inv_fact;
        inv_fact /= (k + 1.0) * (k + 2.0);
        k += 2.0;
    }
    let mut q = alloc::vec![0.0; len];
    for i in 0..len {
        let mut v = b[i];
        for j in 1..=i {
            v -= d[j] * q[i - j];
        }
        q[i] = v / d[0];
    }
    let mut e = Vec::with_capacity(len);
    let mut term = 1.0;
    for i in 0..len {
        e.push(term);
        term *= -x / (i as f64 + 1.0);
    }
    (0..len).map(|i| (0..=i).map(|j| e[j] * q[i - j]).sum()).collect()
}

const SMALL_T_TERMS: usize = 40;

/// `g(t) = e^{-tx} B(t) / (4 sinh^2(t/2))` for complex `t` with `Re t > 0`.
fn kernel(t: Complex64, x: f64, brace: &[f64]) -> Complex64 {
    if t.norm() < 1.0 {
        let mut poly = Complex64::new(0.0, 0.0);
        for &c in brace.iter().rev() {
            poly = poly * t + c;
        }
        let s = (t * 0.5).sinh() * 2.0;
        (-t * x).exp() * poly * (t * t) / (s * s)
    } else {
        let em = (-t).exp();
        let brace = 1.0 - t - em - t * x * (1.0 - em);
        let denom = 1.0 - em;
        (-t * (1.0 + x)).exp() * brace / (denom * denom)
    }
}

/// Rotation of the integration ray into the quadrant of `Im z`.
///
/// On the ray `t = r e^{i theta}` the factor `|t^{z-1}|` picks up
/// `e^{-theta Im z}`, which removes most of the cancellation against the
/// `e^{-pi |Im z| / 2}` decay of `Gamma(z)`. The ray keeps `Re t -> inf` and
/// stays clear of the poles of `sinh^{-2}(t/2)` on the imaginary axis.
fn ray_angle(im: f64) -> f64 {
    let a = im.abs();
    if a < 1e-300 {
        return 0.0;
    }
    let theta = (FRAC_PI_2 - 4.0 / a).clamp(0.0, FRAC_PI_2 - 0.1);
    theta.copysign(im)
}

/// Rigorous bound on the integral of `|t^{z-1} g(t)|` along the ray beyond
/// radius `r`, valid once `r cos(theta) >= 1`.
fn ray_tail_bound(z: Complex64, x: f64, theta: f64, r: f64) -> f64 {
    let c = theta.cos();
    let tau = r * c;
    let beta = c * (1.0 + x);
    let sigma = z.re;
    if tau < 1.0 || beta * r <= sigma {
        return f64::INFINITY;
    }
    let kappa = 1.0 / (1.0 - (-tau).exp()).powi(2);
    let prefactor = (-theta * z.im).exp() * kappa * (2.0 / r + 1.0 + 2.0 * x.abs());
    let log_tail = sigma * r.ln() - beta * r - (beta - sigma / r).ln();
    prefactor * log_tail.exp()
}

/// `psi_z(x)` from the integral representation, continued to `Re z > 0`.
///
/// `[0, t_split]` is integrated term by term from the Maclaurin series of the
/// smooth factor; the remaining ray is integrated with adaptive
/// Gauss-Legendre panels in `log |t|`, and the far tail is bounded
/// analytically. `x` may lie anywhere in `(-1, inf)`.
pub fn psi_integral(z: ComplexValue, x: f64, spec: &QuadratureSpec) -> Result<EvalResult> {
    check_finite(z, x)?;
    if (z - 1.0).norm() <= INTEGRAL_POLE_GUARD {
        return Err(Error::Pole { at: z });
    }
    if z.re <= 0.0 {
        return Err(Error::Domain("integral representation requires Re z > 0"));
    }
    if x <= -1.0 {
        return Err(Error::Domain("integral representation requires x > -1"));
    }
    let spec = QuadratureSpec::new(spec.t_split, spec.panel_order, spec.panels, spec.t_max, spec.tol)?;
    let norm = (z - 1.0) * complex_gamma(z)?;
    let target = spec.tol * norm.norm();

    let theta = ray_angle(z.im);
    let dir = Complex64::from_polar(1.0, theta);
    let cos_theta = theta.cos();

    // Maclaurin zone: int_0^T t^{z-1} sum g_k t^k dt = sum g_k T^{z+k} / (z+k).
    let g = small_t_coefficients(x, SMALL_T_TERMS);
    let log_t = Complex64::new(spec.t_split.ln(), theta);
    let t_split = dir * spec.t_split;
    let mut t_pow = (z * log_t).exp();
    let mut small = Complex64::new(0.0, 0.0);
    let mut small_err = f64::INFINITY;
    for (k, gk) in g.iter().enumerate() {
        let term = t_pow * *gk / (z + k as f64);
        small += term;
        t_pow *= t_split;
        if k >= 4 && term.norm() <= 1e-18 * small.norm() {
            small_err = 2.0 * term.norm();
            break;
        }
    }
    if !small_err.is_finite() {
        return Err(Error::QuadratureFailure { panels: 0 });
    }

    // Far end of the ray.
    let r_cap = spec.t_max / cos_theta;
    let mut r_max = (1.5 / cos_theta).max(2.0 * spec.t_split);
    let mut tail = ray_tail_bound(z, x, theta, r_max);
    while tail > 1e-2 * target && r_max < r_cap {
        r_max = (r_max * 1.2).min(r_cap);
        tail = ray_tail_bound(z, x, theta, r_max);
    }

    let brace = brace_over_t2(x, SMALL_T_TERMS);
    let rule = GaussLegendre::new(spec.panel_order);
    let control = PanelControl {
        initial_panels: spec.panels,
        abs_tol: 0.5 * target,
        max_panels: 400_000,
    };
    let panels = integrate_panels(&rule, spec.t_split.ln(), r_max.ln(), control, |u| {
        let log_t = Complex64::new(u, theta);
        let t = log_t.exp();
        // t^{z-1} dt = t^z du
        (z * log_t).exp() * kernel(t, x, &brace)
    })?;

    let integral = small + panels.value;
    let value = -integral / norm;
    let integral_err =
        small_err + panels.abs_err + tail + 8.0 * EPS * (panels.abs_mass + small.norm());
    let abs_err = integral_err / norm.norm() + (GAMMA_REL_ERR + 4.0 * EPS) * value.norm();
    let mut out = EvalResult::new(value, abs_err, Method::Integral, z);
    out.flags.tail_truncated = tail / norm.norm() > spec.tol / 10.0;
    Ok(out)
}

/// Evaluates `psi_z(x)` with `method`, aiming at absolute accuracy `tol`.
pub fn evaluate(z: ComplexValue, x: f64, method: Method, tol: f64) -> Result<EvalResult> {
    match method {
        Method::Series => psi_series(z, x, tol),
        Method::EulerMaclaurin => psi_euler_maclaurin_auto(z, x, tol),
        Method::Integral => psi_integral(z, x, &QuadratureSpec::for_point(z, x, tol)),
    }
}

/// Residual of `psi_z(x) - psi_z(x - 1) = -x^{-z}` and the combined error
/// estimate of the two evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    pub residual: f64,
    pub combined_err: f64,
}

/// `|psi_z(x) - psi_z(x - 1) + x^{-z}|` with both points evaluated by `method`.
pub fn functional_equation_residual(
    z: ComplexValue,
    x: f64,
    method: Method,
    tol: f64,
) -> Result<IdentityResidual> {
    if !(x > 0.0) {
        return Err(Error::Domain("functional equation needs x > 0"));
    }
    let here = evaluate(z, x, method, tol)?;
    let back = evaluate(z, x - 1.0, method, tol)?;
    let power = complex_power(x, z)?;
    let residual = (here.value - back.value + power).norm();
    let combined_err = here.abs_err + back.abs_err + power_rounding(z, x) * power.norm();
    Ok(IdentityResidual { residual, combined_err })
}

/// Boundary value `psi_z(0)` against the reference zeta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResidual {
    pub psi_at_zero: EvalResult,
    pub zeta: ComplexValue,
    pub residual: f64,
}

/// `|psi_z(0) - zeta(z)|` with `psi_z(0)` evaluated by `method`.
pub fn boundary_zeta_residual(z: ComplexValue, method: Method, tol: f64) -> Result<BoundaryResidual> {
    if (z - 1.0).norm() <= INTEGRAL_POLE_GUARD {
        return Err(Error::Pole { at: z });
    }
    let psi_at_zero = evaluate(z, 0.0, method, tol)?;
    let zeta = reference_zeta(z)?;
    Ok(BoundaryResidual { psi_at_zero, zeta, residual: (psi_at_zero.value - zeta).norm() })
}

/// Residue estimate at `z = 1`: the mean of `(z - 1) psi_z(x)` over the four
/// points `1 + eps i^k`. Odd powers of `z - 1` cancel in the mean, so the
/// estimate is accurate to `O(eps^4)`.
pub fn pole_probe(x: f64, eps: f64) -> Result<ComplexValue> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain("pole probe needs x >= 0"));
    }
    if !(eps > 1e-7 && eps < 1e-2) {
        return Err(Error::Domain("pole probe needs eps in (1e-7, 1e-2)"));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        let offset = Complex64::from_polar(eps, 0.5 * PI * k as f64);
        let z = 1.0 + offset;
        let psi = psi_euler_maclaurin_auto(z, x, 1e-14 / eps)?;
        total += offset * psi.value;
    }
    Ok(total * 0.25)
}
