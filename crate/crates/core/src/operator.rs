//! Discretized operators on `L^2(0, inf)`.
//!
//! Everything lives on a uniform [`Grid`] whose first node sits at `offset`
//! (default `h/2`), so `x = 0` is never a node. Spectral statements are
//! checked by residuals against known eigenpairs rather than by solving
//! eigenproblems:
//!
//! * `e^{-zx}` under `-i d/dx` with eigenvalue `i z` (adjoint of the Dirichlet
//!   momentum, `Re z > 0`);
//! * `e^{-zx}` under the left shift `S*` with eigenvalue `e^{-z}`;
//! * `x^{-z}` under the dilation generator `A = -i (x d/dx + 1/2)`.

use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;
#[cfg(not(any(feature = "std", test)))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::psi::{psi_value, INTEGRAL_POLE_GUARD};
use crate::quad::GaussLegendre;
use crate::special::{complex_power, ComplexValue};

/// Largest supported node count.
pub const MAX_NODES: usize = 20_000;
/// Nodes dropped at each boundary by interior residuals.
pub const BOUNDARY_LAYER: usize = 3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Uniform half-line grid `x_j = offset + j h`, `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    spacing: f64,
    count: usize,
    offset: f64,
}

impl Grid {
    pub fn new(spacing: f64, count: usize, offset: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing <= 0.1 + 1e-12) {
            return Err(Error::Domain("grid spacing must lie in (0, 0.1]"));
        }
        if !(16..=MAX_NODES).contains(&count) {
            return Err(Error::Domain("grid needs between 16 and 20000 nodes"));
        }
        if !(offset > 0.0 && offset.is_finite()) {
            return Err(Error::Domain("grid nodes must be strictly positive"));
        }
        let grid = Self { spacing, count, offset };
        if grid.extent() < 10.0 - 1e-9 {
            return Err(Error::Domain("grid extent must be at least 10"));
        }
        Ok(grid)
    }

    /// Grid with offset `h/2` whose last node is within `h/2` of `extent`.
    pub fn uniform(spacing: f64, extent: f64) -> Result<Self> {
        Self::with_offset(spacing, extent, 0.5 * spacing)
    }

    /// Grid starting at `offset` whose last node is within `h/2` of `extent`.
    pub fn with_offset(spacing: f64, extent: f64, offset: f64) -> Result<Self> {
        if !(spacing > 0.0 && extent > offset) {
            return Err(Error::Domain("grid needs spacing > 0 and extent > offset"));
        }
        let steps = ((extent - offset) / spacing).round();
        if !(steps >= 0.0 && steps < MAX_NODES as f64) {
            return Err(Error::Domain("grid needs between 16 and 20000 nodes"));
        }
        Self::new(spacing, steps as usize + 1, offset)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Position of the last node.
    pub fn extent(&self) -> f64 {
        self.node(self.count - 1)
    }

    pub fn node(&self, j: usize) -> f64 {
        self.offset + j as f64 * self.spacing
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|j| self.node(j))
    }

    /// Trapezoid weight of node `j` over the whole grid.
    pub fn trapezoid_weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.count {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    /// Number of nodes in a unit translation; requires `1/h` to be an integer
    /// within 1e-12 and `0 < offset < h`, so that `x_j - 1` is a node or
    /// negative.
    pub fn unit_shift(&self) -> Result<usize> {
        let m = (1.0 / self.spacing).round();
        if m < 1.0 || (m * self.spacing - 1.0).abs() > 1e-12 {
            return Err(Error::GridMismatch("1/h is not an integer"));
        }
        if self.offset >= self.spacing {
            return Err(Error::GridMismatch("unit shifts need 0 < offset < h"));
        }
        let m = m as usize;
        if m + BOUNDARY_LAYER >= self.count {
            return Err(Error::GridMismatch("grid shorter than a unit translation"));
        }
        Ok(m)
    }

    /// Interior node range, dropping [`BOUNDARY_LAYER`] nodes at each end.
    pub fn interior(&self) -> Range<usize> {
        BOUNDARY_LAYER..self.count - BOUNDARY_LAYER
    }
}

/// Samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_samples(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.count() {
            return Err(Error::GridMismatch("sample count differs from node count"));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let samples = grid.nodes().map(&mut f).collect();
        Self { grid, samples }
    }

    pub fn try_from_fn(grid: Grid, mut f: impl FnMut(f64) -> Result<Complex64>) -> Result<Self> {
        let samples = grid.nodes().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, samples })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Trapezoid-weighted discrete `L^2` norm.
    pub fn norm(&self) -> f64 {
        self.norm_on(0..self.samples.len())
    }

    /// Trapezoid-weighted norm over the nodes in `range`.
    pub fn norm_on(&self, range: Range<usize>) -> f64 {
        weighted_norm(self.grid.spacing(), &self.samples[range])
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("grid functions live on different grids"));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, samples })
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("grid functions live on different grids"));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, samples })
    }
}

fn weighted_norm(h: f64, v: &[Complex64]) -> f64 {
    let n = v.len();
    if n == 0 {
        return 0.0;
    }
    let mut s = 0.0;
    for (j, c) in v.iter().enumerate() {
        let w = if j == 0 || j + 1 == n { 0.5 * h } else { h };
        s += w * c.norm_sqr();
    }
    s.sqrt()
}

/// Sparse row storage for finite-difference operators.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilMatrix {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl StencilMatrix {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i]
            .iter()
            .find(|(col, _)| *col == j)
            .map(|(_, v)| *v)
            .unwrap_or_default()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, a)| a * v[j]).sum())
            .collect()
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = alloc::vec![Complex64::default(); n];
                for &(j, a) in row {
                    dense[j] = a;
                }
                dense
            })
            .collect()
    }

    /// `max |M_ij - conj(M_ji)|` over the rows in `rows`.
    pub fn hermitian_defect(&self, rows: Range<usize>) -> f64 {
        let mut worst: f64 = 0.0;
        for i in rows {
            for &(j, a) in &self.rows[i] {
                worst = worst.max((a - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// `-i d/dx` with `f(0) = 0`: central differences inside, a three-point
/// stencil through the ghost value `f(0) = 0` on the first row, and the
/// one-sided second-order stencil on the last row.
pub fn build_momentum_dirichlet(grid: &Grid) -> StencilMatrix {
    let n = grid.count();
    let h = grid.spacing();
    let d = grid.offset();
    let mut rows = Vec::with_capacity(n);
    // f'(x_0) from the nodes 0, x_0, x_1 (distances d and h) with f(0) = 0.
    rows.push(alloc::vec![
        (0, -I * (1.0 / d - 1.0 / h)),
        (1, -I * (d / ((h + d) * h))),
    ]);
    for j in 1..n - 1 {
        rows.push(alloc::vec![(j - 1, I / (2.0 * h)), (j + 1, -I / (2.0 * h))]);
    }
    rows.push(alloc::vec![
        (n - 3, -I / (2.0 * h)),
        (n - 2, -I * (-4.0 / (2.0 * h))),
        (n - 1, -I * (3.0 / (2.0 * h))),
    ]);
    StencilMatrix { rows }
}

/// Claimed eigenvalue with the relative residual `||(T - lambda) v|| / ||v||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResidual {
    pub eigenvalue: ComplexValue,
    pub residual: f64,
    pub interior_only: bool,
}

fn residual_on(
    h: f64,
    applied: &[Complex64],
    v: &[Complex64],
    eigenvalue: Complex64,
    range: Range<usize>,
) -> f64 {
    let diff: Vec<Complex64> = range.clone().map(|j| applied[j] - eigenvalue * v[j]).collect();
    let base = weighted_norm(h, &v[range]);
    weighted_norm(h, &diff) / base
}

/// Residual of `g_z(x) = e^{-zx}` as an eigenfunction of the momentum matrix
/// with eigenvalue `i z`, over interior nodes.
pub fn exp_eigen_residual(z: ComplexValue, grid: &Grid) -> Result<SpectralResidual> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::Domain("e^{-zx} is square integrable only for Re z > 0"));
    }
    if grid.extent() < 30.0 / z.re {
        return Err(Error::Domain("grid extent must be at least 30 / Re z"));
    }
    let g = GridFunction::from_fn(*grid, |x| (-z * x).exp());
    let applied = build_momentum_dirichlet(grid).apply(g.samples());
    let eigenvalue = I * z;
    let residual = residual_on(grid.spacing(), &applied, g.samples(), eigenvalue, grid.interior());
    Ok(SpectralResidual { eigenvalue, residual, interior_only: true })
}

/// Ratio of discrete norms of `e^{-zx}` on the whole grid and on its first
/// half. Grows like `e^{|Re z| L / 2}` when `Re z < 0`.
pub fn exp_growth_ratio(z: ComplexValue, grid: &Grid) -> f64 {
    let g = GridFunction::from_fn(*grid, |x| (-z * x).exp());
    g.norm() / g.norm_on(0..grid.count() / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeficiencySign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeficiencyClass {
    SquareIntegrable,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeficiencyReport {
    /// `int_0^{x_max} |f|^2`.
    pub norm_estimate: f64,
    /// The same integral up to `2 x_max`.
    pub doubled_norm: f64,
    pub classification: DeficiencyClass,
}

/// Relative change under doubling below which a norm counts as saturated.
pub const SATURATION_TOL: f64 = 1e-6;

/// Square-integrability of the solutions of `p* f = +-i f`, i.e. `e^{-x}`
/// (Plus) and `e^{x}` (Minus), judged by whether `int_0^X |f|^2` saturates
/// when `X` doubles.
pub fn deficiency_diagnostic(sign: DeficiencySign, x_max: f64) -> Result<DeficiencyReport> {
    if !(10.0..=150.0).contains(&x_max) {
        return Err(Error::Domain("deficiency diagnostic needs 10 <= x_max <= 150"));
    }
    let rate = match sign {
        DeficiencySign::Plus => -2.0,
        DeficiencySign::Minus => 2.0,
    };
    let rule = GaussLegendre::new(20);
    let integrate = |upper: f64| -> f64 {
        let panels = upper.ceil() as usize;
        let step = upper / panels as f64;
        // Summed from the small end so the Plus tail does not perturb 1/2.
        let mut parts: Vec<f64> = (0..panels)
            .map(|k| {
                let a = k as f64 * step;
                rule.integrate(a, a + step, |x| (rate * x).exp()).0
            })
            .collect();
        parts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        parts.iter().sum()
    };
    let norm_estimate = integrate(x_max);
    let doubled_norm = integrate(2.0 * x_max);
    let change = (doubled_norm - norm_estimate).abs() / norm_estimate;
    let classification = if change <= SATURATION_TOL {
        DeficiencyClass::SquareIntegrable
    } else {
        DeficiencyClass::Divergent
    };
    Ok(DeficiencyReport { norm_estimate, doubled_norm, classification })
}

/// Unit right shift `S f(x) = f(x - 1)`; the first unit interval is zeroed.
pub fn shift_apply(f: &GridFunction) -> Result<GridFunction> {
    let m = f.grid.unit_shift()?;
    let n = f.samples.len();
    let mut out = alloc::vec![Complex64::default(); n];
    out[m..].copy_from_slice(&f.samples[..n - m]);
    Ok(GridFunction { grid: f.grid, samples: out })
}

/// Result of the left shift together with the end-of-grid warning.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointShift {
    pub function: GridFunction,
    /// `f` carries more than 1e-10 of its norm on the last unit interval, so
    /// the zero fill beyond the grid is not faithful.
    pub tail_mass: bool,
}

/// Left shift `S* f(x) = f(x + 1)`; values beyond the grid are taken as 0.
pub fn shift_adjoint_apply(f: &GridFunction) -> Result<AdjointShift> {
    let m = f.grid.unit_shift()?;
    let n = f.samples.len();
    let mut out = alloc::vec![Complex64::default(); n];
    out[..n - m].copy_from_slice(&f.samples[m..]);
    let total = f.norm();
    let tail_mass = total > 0.0 && f.norm_on(n - m..n) > 1e-10 * total;
    Ok(AdjointShift { function: GridFunction { grid: f.grid, samples: out }, tail_mass })
}

/// `f - P f`, with `P` the restriction to `(0, 1)`.
fn remove_unit_interval(f: &GridFunction, m: usize) -> GridFunction {
    let mut out = f.clone();
    for s in &mut out.samples[..m] {
        *s = Complex64::default();
    }
    out
}

/// Smooth random test function: three Gaussian bumps with complex amplitudes,
/// one of them inside `(0, 1)`, all below 1e-16 on the last 1.5 units.
pub fn random_test_function(grid: &Grid, rng: &mut impl Rng) -> GridFunction {
    let reach = grid.extent() - 1.5;
    let mut bumps = Vec::with_capacity(3);
    let width = rng.gen_range(0.05..0.12);
    bumps.push((rng.gen_range(0.3..0.7), width));
    for _ in 0..2 {
        let width: f64 = rng.gen_range(0.1..1.0);
        let hi = (reach - 8.6 * width).max(1.5);
        bumps.push((rng.gen_range(1.0..hi), width));
    }
    let amps: Vec<Complex64> = (0..3)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFunction::from_fn(*grid, |x| {
        bumps
            .iter()
            .zip(&amps)
            .map(|(&(c, w), &a)| {
                let s = (x - c) / w;
                a * (-0.5 * s * s).exp()
            })
            .sum()
    })
}

/// Seed for the test functions of [`shift_isometry_check`].
pub const SHIFT_CHECK_SEED: u64 = 0x5eed_0001;

/// Over `trials` random smooth functions: `r1 = max ||S*S f - f|| / ||f||` and
/// `r2 = max ||S S* f - (f - P f)|| / ||f||`.
pub fn shift_isometry_check(grid: &Grid, trials: usize) -> Result<(f64, f64)> {
    if !(10..=10_000).contains(&trials) {
        return Err(Error::Domain("shift isometry check needs 10 to 10000 trials"));
    }
    let m = grid.unit_shift()?;
    let mut rng = ChaCha8Rng::seed_from_u64(SHIFT_CHECK_SEED);
    let (mut r1, mut r2): (f64, f64) = (0.0, 0.0);
    for _ in 0..trials {
        let f = random_test_function(grid, &mut rng);
        let norm = f.norm();
        let back = shift_adjoint_apply(&shift_apply(&f)?)?.function;
        r1 = r1.max(back.sub(&f)?.norm() / norm);
        let forth = shift_apply(&shift_adjoint_apply(&f)?.function)?;
        r2 = r2.max(forth.sub(&remove_unit_interval(&f, m))?.norm() / norm);
    }
    Ok((r1, r2))
}

/// Relative residual of `S* g_z = e^{-z} g_z`, excluding the last unit
/// interval and the boundary layer before it.
pub fn shift_adjoint_eigen_residual(z: ComplexValue, grid: &Grid) -> Result<SpectralResidual> {
    if !(z.re > 0.0) {
        return Err(Error::Domain("e^{-zx} is square integrable only for Re z > 0"));
    }
    let m = grid.unit_shift()?;
    let g = GridFunction::from_fn(*grid, |x| (-z * x).exp());
    let shifted = shift_adjoint_apply(&g)?.function;
    let eigenvalue = (-z).exp();
    let range = 0..grid.count() - m - BOUNDARY_LAYER;
    let residual = residual_on(grid.spacing(), shifted.samples(), g.samples(), eigenvalue, range);
    Ok(SpectralResidual { eigenvalue, residual, interior_only: true })
}

/// Difference operator `Delta f(x) = f(x) - f(x - 1)`.
pub fn delta_apply(f: &GridFunction) -> Result<GridFunction> {
    f.sub(&shift_apply(f)?)
}

/// Sign convention for the eigenvalue of `x^{-z}` under the dilation generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenSign {
    /// `-i (z - 1/2)`
    Paper,
    /// `+i (z - 1/2)`, what `A = -i (x d/dx + 1/2)` gives directly.
    Direct,
}

impl EigenSign {
    pub fn eigenvalue(self, z: ComplexValue) -> ComplexValue {
        match self {
            EigenSign::Paper => -I * (z - 0.5),
            EigenSign::Direct => I * (z - 0.5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EigenSign::Paper => "paper",
            EigenSign::Direct => "direct",
        }
    }
}

/// `A f = -i (x f' + f / 2)` with central differences, on the nodes of `range`
/// (each must have both neighbours). Entries outside `range` are zero.
fn apply_dilation_generator(grid: &Grid, f: &[Complex64], range: Range<usize>) -> Vec<Complex64> {
    let h = grid.spacing();
    let mut out = alloc::vec![Complex64::default(); f.len()];
    for j in range {
        let x = grid.node(j);
        let derivative = (f[j + 1] - f[j - 1]) / (2.0 * h);
        out[j] = -I * (derivative * x + f[j] * 0.5);
    }
    out
}

/// Residual of `x^{-z}` under the discretized dilation generator against
/// the eigenvalue of the chosen sign convention.
pub fn dilation_generator_residual(
    z: ComplexValue,
    grid: &Grid,
    sign: EigenSign,
) -> Result<SpectralResidual> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::Domain("dilation residual needs Re z > 0"));
    }
    if grid.offset() < 10.0 * grid.spacing() {
        return Err(Error::Domain("x^{-z} is unresolved unless offset >= 10 h"));
    }
    let f = GridFunction::try_from_fn(*grid, |x| complex_power(x, z))?;
    let range = grid.interior();
    let applied = apply_dilation_generator(grid, f.samples(), range.clone());
    let eigenvalue = sign.eigenvalue(z);
    let residual = residual_on(grid.spacing(), &applied, f.samples(), eigenvalue, range);
    Ok(SpectralResidual { eigenvalue, residual, interior_only: true })
}

/// Residuals of `A (Delta psi_z) = lambda Delta psi_z` under both sign
/// conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntertwineReport {
    pub paper: SpectralResidual,
    pub direct: SpectralResidual,
}

impl IntertwineReport {
    pub fn best(&self) -> (EigenSign, SpectralResidual) {
        if self.direct.residual <= self.paper.residual {
            (EigenSign::Direct, self.direct)
        } else {
            (EigenSign::Paper, self.paper)
        }
    }
}

/// Samples `psi_z`, applies `Delta` (which should give `-x^{-z}` for `x > 1`)
/// and measures the dilation-generator residual on nodes `x > 1 + 3h`.
pub fn intertwine_check(z: ComplexValue, grid: &Grid) -> Result<IntertwineReport> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::Domain("intertwining check needs Re z > 0"));
    }
    if (z - 1.0).norm() <= INTEGRAL_POLE_GUARD {
        return Err(Error::Pole { at: z });
    }
    let m = grid.unit_shift()?;
    let psi = GridFunction::try_from_fn(*grid, |x| psi_value(z, x))?;
    let u = delta_apply(&psi)?;
    let range = m + BOUNDARY_LAYER + 1..grid.count() - BOUNDARY_LAYER;
    let applied = apply_dilation_generator(grid, u.samples(), range.clone());
    let h = grid.spacing();
    let make = |sign: EigenSign| {
        let eigenvalue = sign.eigenvalue(z);
        SpectralResidual {
            eigenvalue,
            residual: residual_on(h, &applied, u.samples(), eigenvalue, range.clone()),
            interior_only: true,
        }
    };
    Ok(IntertwineReport { paper: make(EigenSign::Paper), direct: make(EigenSign::Direct) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_validation() {
        let g = Grid::uniform(0.01, 40.0).unwrap();
        assert_eq!(g.count(), 4000);
        assert!((g.node(0) - 0.005).abs() < 1e-15);
        assert!(Grid::uniform(0.2, 40.0).is_err());
        assert!(Grid::uniform(0.01, 5.0).is_err());
        assert!(Grid::uniform(0.001, 40.0).is_err());
        assert!(Grid::new(0.05, 400, 0.0).is_err());
        assert_eq!(g.unit_shift().unwrap(), 100);
        assert!(matches!(Grid::uniform(0.03, 40.0).unwrap().unit_shift(), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn momentum_consistency_on_sine() {
        let mut last = f64::INFINITY;
        for h in [0.02, 0.01, 0.005] {
            let grid = Grid::uniform(h, 20.0).unwrap();
            let l = grid.extent() + 0.5 * h;
            let f = GridFunction::from_fn(grid, |x| c((PI * x / l).sin(), 0.0));
            let mf = build_momentum_dirichlet(&grid).apply(f.samples());
            let err = grid
                .nodes()
                .zip(&mf)
                .map(|(x, v)| (v - (-I * PI / l * (PI * x / l).cos())).norm())
                .fold(0.0, f64::max);
            assert!(err < 10.0 * h * h, "h={h} err={err}");
            assert!(last / err > 3.5);
            last = err;
        }
    }

    #[test]
    fn momentum_is_hermitian_inside() {
        let grid = Grid::uniform(0.05, 12.0).unwrap();
        let m = build_momentum_dirichlet(&grid);
        assert!(m.hermitian_defect(grid.interior()) <= 1e-14);
        // the boundary rows break the symmetry
        assert!(m.hermitian_defect(0..1) > 1.0);
        let dense = m.to_dense();
        assert_eq!(dense.len(), grid.count());
        assert_eq!(dense[5][6], m.get(5, 6));
    }

    #[test]
    fn exp_eigen_examples() {
        let grid = Grid::uniform(0.01, 40.0).unwrap();
        let r = exp_eigen_residual(c(1.0, 0.0), &grid).unwrap();
        assert!(r.residual <= 1e-3);
        let coarse = exp_eigen_residual(c(1.0, 0.0), &Grid::uniform(0.02, 40.0).unwrap()).unwrap();
        let ratio = coarse.residual / r.residual;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        let r = exp_eigen_residual(c(0.5, 2.0), &Grid::uniform(0.01, 60.0).unwrap()).unwrap();
        assert_eq!(r.eigenvalue, c(-2.0, 0.5));
        assert!(matches!(exp_eigen_residual(c(-1.0, 0.0), &grid), Err(Error::Domain(_))));
        assert!(exp_growth_ratio(c(-0.5, 1.0), &grid) > (0.5f64 * 40.0 / 4.0).exp());
    }

    #[test]
    fn deficiency_examples() {
        let plus = deficiency_diagnostic(DeficiencySign::Plus, 20.0).unwrap();
        assert!((plus.norm_estimate - 0.5).abs() <= 1e-12);
        assert_eq!(plus.classification, DeficiencyClass::SquareIntegrable);
        let plus40 = deficiency_diagnostic(DeficiencySign::Plus, 40.0).unwrap();
        assert!((plus40.norm_estimate - plus.norm_estimate).abs() <= 1e-12);
        let minus = deficiency_diagnostic(DeficiencySign::Minus, 20.0).unwrap();
        assert_eq!(minus.classification, DeficiencyClass::Divergent);
        let exact = (40.0f64.exp() - 1.0) / 2.0;
        assert!((minus.norm_estimate / exact - 1.0).abs() < 1e-12);
        assert!(minus.doubled_norm / minus.norm_estimate >= 20.0f64.exp());
    }

    #[test]
    fn shift_examples() {
        let grid = Grid::uniform(0.01, 40.0).unwrap();
        let indicator = |a: f64, b: f64| {
            GridFunction::from_fn(grid, move |x| if x > a && x < b { c(1.0, 0.0) } else { c(0.0, 0.0) })
        };
        let moved = shift_apply(&indicator(2.0, 3.0)).unwrap();
        assert_eq!(moved, indicator(3.0, 4.0));

        let g = GridFunction::from_fn(grid, |x| c((-x).exp(), 0.0));
        let sg = shift_apply(&g).unwrap();
        for (j, x) in grid.nodes().enumerate() {
            let want = if x > 1.0 { (-(x - 1.0)).exp() } else { 0.0 };
            assert!((sg.samples()[j].re - want).abs() < 1e-15);
        }

        let bump = GridFunction::from_fn(grid, |x| c((-(x - 10.0) * (x - 10.0)).exp(), 0.0));
        assert!((shift_apply(&bump).unwrap().norm() - bump.norm()).abs() < 1e-14);

        let adj = shift_adjoint_apply(&indicator(0.25, 0.75)).unwrap();
        assert!(adj.function.norm() == 0.0);
        assert!(!adj.tail_mass);
        assert!(shift_adjoint_apply(&indicator(39.5, 40.0)).unwrap().tail_mass);
    }

    #[test]
    fn shift_algebra() {
        let grid = Grid::uniform(0.01, 40.0).unwrap();
        let (r1, r2) = shift_isometry_check(&grid, 12).unwrap();
        assert!(r1 <= 1e-12 && r2 <= 1e-12, "{r1} {r2}");
        assert!(shift_isometry_check(&grid, 5).is_err());
        assert!(shift_isometry_check(&grid, 10_001).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_test_function(&grid, &mut rng);
        let mut g = f.clone();
        for k in 1..=5 {
            g = shift_apply(&g).unwrap();
            let mut back = g.clone();
            for _ in 0..k {
                back = shift_adjoint_apply(&back).unwrap().function;
            }
            assert!(back.sub(&f).unwrap().norm() <= 1e-12 * f.norm(), "k={k}");
        }
    }

    #[test]
    fn shift_adjoint_eigenpairs() {
        let grid = Grid::uniform(0.01, 40.0).unwrap();
        for z in [c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(1.0, 3.0)] {
            let r = shift_adjoint_eigen_residual(z, &grid).unwrap();
            assert!(r.residual <= 1e-9, "z={z}: {}", r.residual);
            assert!(r.eigenvalue.norm() < 1.0);
        }
        let r = shift_adjoint_eigen_residual(c(1.0, 0.0), &grid).unwrap();
        assert!((r.eigenvalue.re - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        let grid = Grid::uniform(0.01, 20.0).unwrap();
        let one = GridFunction::from_fn(grid, |_| c(1.0, 0.0));
        let d = delta_apply(&one).unwrap();
        for (j, x) in grid.nodes().enumerate() {
            let want = if x < 1.0 { 1.0 } else { 0.0 };
            assert_eq!(d.samples()[j], c(want, 0.0));
        }
        let z = c(2.0, 0.0);
        let psi = GridFunction::try_from_fn(grid, |x| psi_value(z, x)).unwrap();
        let d = delta_apply(&psi).unwrap();
        for (j, x) in grid.nodes().enumerate().filter(|(_, x)| *x > 1.0) {
            let want = -complex_power(x, z).unwrap();
            assert!((d.samples()[j] - want).norm() <= 1e-12 * want.norm().max(1e-3), "x={x}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_test_function(&grid, &mut rng);
        let g = random_test_function(&grid, &mut rng);
        let lhs = delta_apply(&f.add(&g).unwrap()).unwrap();
        let rhs = delta_apply(&f).unwrap().add(&delta_apply(&g).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-15 * lhs.norm());
    }

    #[test]
    fn dilation_examples() {
        let grid = |h: f64| Grid::with_offset(h, 40.0, 1.0).unwrap();
        for sign in [EigenSign::Paper, EigenSign::Direct] {
            let r = dilation_generator_residual(c(0.5, 0.0), &grid(0.01), sign).unwrap();
            assert_eq!(r.eigenvalue, c(0.0, 0.0));
            assert!(r.residual < 1e-3);
        }
        let fine = dilation_generator_residual(c(2.0, 0.0), &grid(0.01), EigenSign::Direct).unwrap();
        let coarse = dilation_generator_residual(c(2.0, 0.0), &grid(0.02), EigenSign::Direct).unwrap();
        assert!(fine.residual <= 1e-3);
        assert!((3.5..=4.5).contains(&(coarse.residual / fine.residual)));
        let wrong = dilation_generator_residual(c(2.0, 0.0), &grid(0.01), EigenSign::Paper).unwrap();
        assert!(wrong.residual > 1.0);
        let r = dilation_generator_residual(c(0.5, 14.13), &grid(0.01), EigenSign::Direct).unwrap();
        assert!((r.eigenvalue.norm() - 14.13).abs() < 1e-12);
        assert!(dilation_generator_residual(c(2.0, 0.0), &Grid::uniform(0.01, 40.0).unwrap(), EigenSign::Direct).is_err());
    }

    #[test]
    fn intertwine_examples() {
        let grid = Grid::uniform(0.01, 60.0).unwrap();
        let rep = intertwine_check(c(2.0, 0.0), &grid).unwrap();
        let (sign, best) = rep.best();
        assert_eq!(sign, EigenSign::Direct);
        assert!(best.residual <= 1e-3);
        assert!(rep.paper.residual > 1.0);
        let rep = intertwine_check(c(0.5, 0.0), &grid).unwrap();
        assert_eq!(rep.best().1.eigenvalue, c(0.0, 0.0));
        let rep = intertwine_check(c(0.75, 5.0), &Grid::uniform(0.02, 30.0).unwrap()).unwrap();
        assert!((rep.best().1.eigenvalue.norm() - 5.006_246_098_625_197).abs() < 1e-12);
    }
}
