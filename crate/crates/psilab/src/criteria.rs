//! The acceptance criteria as runnable checks.
//!
//! Every criterion expands into a list of [`Check`]s, each a value that must
//! lie in `[lower, upper]`. The `fast` profile uses the stated tolerances;
//! `strict` divides every absolute tolerance by ten and samples more points.

use num_complex::Complex64;
use psilab_core::operator::Grid;
use psilab_core::{
    a_alpha_eigendata, boundary_zeta_residual, convergence_classify, deficiency_diagnostic,
    dilation_generator_residual, evaluate, functional_equation_residual, intertwine_check,
    pole_probe, shift_adjoint_eigen_residual, shift_isometry_check,
    tail_exponent_fit, default_tail_samples, weighted_dilation_check, DeficiencyClass,
    DeficiencySign, EigenSign, Method, Verdict, WeightExponent,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{format_number, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Fast,
    Strict,
}

impl Profile {
    /// Factor applied to every absolute tolerance.
    pub fn scale(self) -> f64 {
        match self {
            Profile::Fast => 1.0,
            Profile::Strict => 0.1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Fast => "fast",
            Profile::Strict => "strict",
        }
    }

    fn random_points(self) -> usize {
        match self {
            Profile::Fast => 100,
            Profile::Strict => 300,
        }
    }

    /// Tail window of the exponent fit; its bias falls like `1/x`.
    pub fn tail_samples(self) -> Vec<f64> {
        match self {
            Profile::Fast => default_tail_samples(),
            Profile::Strict => default_tail_samples().into_iter().map(|x| 10.0 * x).collect(),
        }
    }

    fn shift_trials(self) -> usize {
        match self {
            Profile::Fast => 10,
            Profile::Strict => 50,
        }
    }
}

/// One bounded quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub case: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub ok: bool,
}

impl Check {
    pub fn within(case: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        let ok = value >= lower && value <= upper;
        Self { case: case.into(), value, lower, upper, ok }
    }

    pub fn at_most(case: impl Into<String>, value: f64, upper: f64) -> Self {
        Self::within(case, value, 0.0, upper)
    }

    /// A yes/no fact recorded as 1 or 0 against the bound `[1, 1]`.
    pub fn holds(case: impl Into<String>, fact: bool) -> Self {
        Self::within(case, if fact { 1.0 } else { 0.0 }, 1.0, 1.0)
    }

    /// The computation itself failed.
    pub fn error(case: impl Into<String>, err: impl std::fmt::Display) -> Self {
        let case = format!("{} error: {}", case.into(), err);
        Self { case, value: f64::NAN, lower: f64::NAN, upper: f64::NAN, ok: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub claim: &'static str,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.ok)
    }

    /// The failing check with the largest `value / upper`, else the tightest.
    pub fn worst(&self) -> Option<&Check> {
        let margin = |c: &Check| if c.ok { c.value / c.upper.max(f64::MIN_POSITIVE) } else { f64::INFINITY };
        self.checks
            .iter()
            .max_by(|a, b| margin(a).partial_cmp(&margin(b)).unwrap_or(std::cmp::Ordering::Equal))
    }
}

pub const CRITERIA_COLUMNS: [&str; 7] = ["criterion", "claim", "case", "value", "lower", "upper", "ok"];

pub fn criteria_table(criteria: &[Criterion]) -> Table {
    let mut table = Table::new(&CRITERIA_COLUMNS);
    for c in criteria {
        for check in &c.checks {
            table.push(vec![
                Cell::from(c.id as usize),
                Cell::from(c.claim),
                Cell::from(check.case.as_str()),
                Cell::from(check.value),
                Cell::from(check.lower),
                Cell::from(check.upper),
                Cell::from(check.ok),
            ]);
        }
    }
    table
}

pub fn fmt_z(z: Complex64) -> String {
    let sign = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { "-" } else { "+" };
    format!("{}{}{}i", format_number(z.re), sign, format_number(z.im.abs()))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

/// Methods defined at `z`; the plain series needs `Re z > 1`.
fn methods_at(z: Complex64) -> Vec<Method> {
    Method::ALL.into_iter().filter(|m| *m != Method::Series || z.re > 1.0).collect()
}

pub const CROSS_METHOD_SEED: u64 = 0x00c0_ffee;

/// Random sample points for the cross-method criterion.
pub fn cross_method_points(n: usize) -> Vec<(Complex64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(CROSS_METHOD_SEED);
    (0..n)
        .map(|_| {
            let z = c(rng.gen_range(1.1..=5.0), rng.gen_range(-20.0..=20.0));
            (z, rng.gen_range(0.0..=10.0))
        })
        .collect()
}

/// Pairwise agreement of the three evaluators at one point.
pub fn cross_method_checks(z: Complex64, x: f64, tol: f64, slack: f64) -> Vec<Check> {
    let label = format!("z={} x={}", fmt_z(z), format_number(x));
    let results: Result<Vec<_>, _> = Method::ALL.iter().map(|&m| evaluate(z, x, m, tol)).collect();
    let results = match results {
        Ok(r) => r,
        Err(e) => return vec![Check::error(label, e)],
    };
    let mut out = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let (a, b) = (&results[i], &results[j]);
            out.push(Check::at_most(
                format!("{label} {}-{}", a.method.name(), b.method.name()),
                (a.value - b.value).norm(),
                a.abs_err + b.abs_err + slack,
            ));
        }
    }
    out
}

pub fn cross_method(profile: Profile) -> Criterion {
    let slack = 1e-12 * profile.scale();
    let checks = cross_method_points(profile.random_points())
        .into_par_iter()
        .flat_map_iter(|(z, x)| cross_method_checks(z, x, slack, slack))
        .collect();
    Criterion { id: 1, claim: "method-agreement", title: "cross-method agreement", checks }
}

pub fn boundary_points() -> Vec<Complex64> {
    vec![c(2.0, 0.0), c(3.0, 0.0), c(0.5, 0.0), c(0.75, 0.0), c(0.5, 14.134725), c(1.5, 30.0)]
}

pub fn boundary(profile: Profile) -> Criterion {
    let bound = 1e-9 * profile.scale();
    let cases: Vec<(Complex64, Method)> = boundary_points()
        .into_iter()
        .flat_map(|z| methods_at(z).into_iter().map(move |m| (z, m)))
        .collect();
    let checks = cases
        .into_par_iter()
        .map(|(z, m)| {
            let label = format!("z={} {}", fmt_z(z), m.name());
            match boundary_zeta_residual(z, m, 0.1 * bound) {
                Ok(r) => Check::at_most(label, r.residual, bound),
                Err(e) => Check::error(label, e),
            }
        })
        .collect();
    Criterion { id: 2, claim: "boundary-zeta", title: "boundary identity psi_z(0) = zeta(z)", checks }
}

/// Imaginary part used on the functional-equation grid.
pub const FEQ_IM: f64 = 1.0;

pub fn functional_equation(profile: Profile) -> Criterion {
    let slack = 1e-12 * profile.scale();
    let mut cases = Vec::new();
    for sigma in linspace(0.3, 4.0, 6) {
        for x in linspace(0.5, 10.0, 6) {
            let z = c(sigma, FEQ_IM);
            for m in methods_at(z) {
                cases.push((z, x, m));
            }
        }
    }
    let checks = cases
        .into_par_iter()
        .map(|(z, x, m)| {
            let label = format!("z={} x={} {}", fmt_z(z), format_number(x), m.name());
            match functional_equation_residual(z, x, m, slack) {
                Ok(r) => Check::at_most(label, r.residual, r.combined_err + slack),
                Err(e) => Check::error(label, e),
            }
        })
        .collect();
    Criterion { id: 3, claim: "functional-equation", title: "functional equation", checks }
}

pub fn pole_residue(profile: Profile) -> Criterion {
    let bound = 1e-2 * profile.scale();
    let checks = [0.0, 1.0, 5.0]
        .into_iter()
        .map(|x| {
            let label = format!("x={} eps=1e-3", format_number(x));
            match pole_probe(x, 1e-3) {
                Ok(r) => Check::at_most(label, (r - 1.0).norm(), bound),
                Err(e) => Check::error(label, e),
            }
        })
        .collect();
    Criterion { id: 4, claim: "pole-residue", title: "simple pole at z = 1 with residue 1", checks }
}

pub const NORM_SIGMAS: [f64; 6] = [0.3, 0.5, 0.75, 1.25, 1.75, 2.5];
pub const NORM_ALPHAS: [f64; 4] = [-2.0, -1.0, 0.0, 1.0];
pub const NORM_TS: [f64; 2] = [0.0, 14.13];

pub fn norm_threshold(profile: Profile) -> Criterion {
    let bound = 0.05 * profile.scale();
    let mut cases = Vec::new();
    for &sigma in &NORM_SIGMAS {
        for &alpha in &NORM_ALPHAS {
            for &t in &NORM_TS {
                cases.push((c(sigma, t), alpha));
            }
        }
    }
    let samples = profile.tail_samples();
    let mut checks: Vec<Check> = cases
        .into_par_iter()
        .flat_map_iter(|(z, alpha)| {
            let label = format!("z={} alpha={}", fmt_z(z), format_number(alpha));
            let w = match WeightExponent::new(alpha) {
                Ok(w) => w,
                Err(e) => return vec![Check::error(label, e)],
            };
            let fit = match tail_exponent_fit(z, w, &samples) {
                Ok(f) => f,
                Err(e) => return vec![Check::error(label, e)],
            };
            let mut out = vec![Check::at_most(
                format!("{label} exponent error"),
                (fit - w.predicted_exponent(z)).abs(),
                bound,
            )];
            match convergence_classify(z, w) {
                Ok(v) => {
                    if v.analytic(z.re).is_some() {
                        out.push(Check::holds(
                            format!("{label} verdict {} matches threshold {}", v.verdict.name(), format_number(v.threshold_sigma)),
                            v.consistent(z.re),
                        ));
                    }
                }
                Err(e) => out.push(Check::error(label, e)),
            }
            out
        })
        .collect();
    let z = c(0.5, 14.13);
    let label = "z=0.5+14.13i alpha=0 is divergent";
    match WeightExponent::new(0.0).and_then(|w| convergence_classify(z, w)) {
        Ok(v) => checks.push(Check::holds(label, v.verdict == Verdict::Divergent)),
        Err(e) => checks.push(Check::error(label, e)),
    }
    Criterion { id: 5, claim: "norm-threshold", title: "weighted norm threshold", checks }
}

pub fn dilation_grid() -> Grid {
    Grid::uniform(0.01, 60.0).expect("fixed grid is valid")
}

pub fn weighted_dilation(profile: Profile) -> Criterion {
    let bound = 1e-6 * profile.scale();
    let grid = dilation_grid();
    let mut checks = Vec::new();
    for lambda in [0.3, 1.0, 2.0, 5.0] {
        for alpha in [-2.0, 0.0, 1.5] {
            let label = format!("lambda={} alpha={}", format_number(lambda), format_number(alpha));
            match WeightExponent::new(alpha).and_then(|w| weighted_dilation_check(lambda, w, &grid)) {
                Ok(r) => checks.push(Check::at_most(label, r, bound)),
                Err(e) => checks.push(Check::error(label, e)),
            }
        }
    }
    Criterion { id: 6, claim: "weighted-dilation", title: "weighted dilation unitarity", checks }
}

pub fn critical_line_shift(profile: Profile) -> Criterion {
    let bound = 1e-14 * profile.scale();
    let mut checks = Vec::new();
    for alpha in [-2.0, -1.0, 0.0, 1.0, 2.5] {
        let Ok(w) = WeightExponent::new(alpha) else { continue };
        let crit = 0.5 * (alpha + 1.0);
        for t in [0.0, 14.134725, -21.022040] {
            let (on, line) = a_alpha_eigendata(c(crit, t), w);
            let base = format!("alpha={} t={}", format_number(alpha), format_number(t));
            checks.push(Check::at_most(format!("{base} on line: |Im eigenvalue|"), on.im.abs(), bound));
            checks.push(Check::within(format!("{base} critical line"), line, crit, crit));
            for d in [-0.25, 0.25] {
                let (off, _) = a_alpha_eigendata(c(crit + d, t), w);
                checks.push(Check::within(
                    format!("{base} off line by {}: |Im eigenvalue|", format_number(d)),
                    off.im.abs(),
                    0.25 - bound,
                    0.25 + bound,
                ));
            }
        }
    }
    for (alpha, line) in [(0.0, 0.5), (-2.0, -0.5)] {
        let w = WeightExponent::new(alpha).expect("fixed weight");
        let (_, crit) = a_alpha_eigendata(c(0.5, 0.0), w);
        checks.push(Check::within(format!("alpha={} critical line", format_number(alpha)), crit, line, line));
    }
    let w = WeightExponent::new(-2.0).expect("fixed weight");
    let (ev, _) = a_alpha_eigendata(c(0.5, 14.134725), w);
    checks.push(Check::within("alpha=-2 z=0.5+14.134725i eigenvalue not real", ev.im.abs(), 0.5, f64::INFINITY));
    Criterion { id: 7, claim: "critical-line-shift", title: "critical line of A_alpha", checks }
}

pub fn deficiency(profile: Profile) -> Criterion {
    let bound = 1e-12 * profile.scale();
    let x_max = 20.0;
    let mut checks = Vec::new();
    match deficiency_diagnostic(DeficiencySign::Plus, x_max) {
        Ok(r) => {
            checks.push(Check::within("plus norm", r.norm_estimate, 0.5 - bound, 0.5 + bound));
            checks.push(Check::at_most("plus change under doubling", (r.doubled_norm - r.norm_estimate).abs(), bound));
            checks.push(Check::holds("plus square integrable", r.classification == DeficiencyClass::SquareIntegrable));
        }
        Err(e) => checks.push(Check::error("plus", e)),
    }
    match deficiency_diagnostic(DeficiencySign::Minus, x_max) {
        Ok(r) => {
            checks.push(Check::within(
                "minus growth under doubling",
                r.doubled_norm / r.norm_estimate,
                x_max.exp(),
                f64::INFINITY,
            ));
            checks.push(Check::holds("minus divergent", r.classification == DeficiencyClass::Divergent));
        }
        Err(e) => checks.push(Check::error("minus", e)),
    }
    Criterion { id: 8, claim: "defect-indices", title: "deficiency indices (1, 0)", checks }
}

pub fn shift_grid() -> Grid {
    Grid::uniform(0.01, 40.0).expect("fixed grid is valid")
}

pub fn shift_algebra(profile: Profile) -> Criterion {
    let grid = shift_grid();
    let mut checks = Vec::new();
    let bound = 1e-12 * profile.scale();
    match shift_isometry_check(&grid, profile.shift_trials()) {
        Ok((r1, r2)) => {
            checks.push(Check::at_most("r1 = max |S*S f - f| / |f|", r1, bound));
            checks.push(Check::at_most("r2 = max |SS* f - (I - P) f| / |f|", r2, bound));
        }
        Err(e) => checks.push(Check::error("isometry", e)),
    }
    let bound = 1e-9 * profile.scale();
    for z in [c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(1.0, 3.0)] {
        let label = format!("S* eigenvalue e^-z at z={}", fmt_z(z));
        match shift_adjoint_eigen_residual(z, &grid) {
            Ok(r) => checks.push(Check::at_most(label, r.residual, bound)),
            Err(e) => checks.push(Check::error(label, e)),
        }
    }
    Criterion { id: 9, claim: "shift-partial-isometry", title: "shift algebra", checks }
}

/// Spacings of the h-halving study.
pub const HALVING_SPACINGS: [f64; 3] = [0.02, 0.01, 0.005];
/// Start of the dilation grids; `x^{-z}` is smooth there for every spacing.
pub const DILATION_OFFSET: f64 = 1.0;
/// Right end of the dilation and intertwining grids.
pub const EIGEN_EXTENT: f64 = 40.0;

/// Grid for the dilation residual at spacing `h`.
pub fn dilation_residual_grid(h: f64) -> psilab_core::Result<Grid> {
    Grid::with_offset(h, EIGEN_EXTENT, DILATION_OFFSET)
}

/// Eigenrelation experiments studied under h-halving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Experiment {
    Dilation,
    Intertwine,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Dilation => "dilation",
            Experiment::Intertwine => "intertwine",
        }
    }

    /// Eigenvalue and residual at one spacing.
    pub fn residual(self, z: Complex64, h: f64, sign: EigenSign) -> psilab_core::Result<(Complex64, f64)> {
        match self {
            Experiment::Dilation => {
                let r = dilation_generator_residual(z, &dilation_residual_grid(h)?, sign)?;
                Ok((r.eigenvalue, r.residual))
            }
            Experiment::Intertwine => {
                let rep = intertwine_check(z, &Grid::uniform(h, EIGEN_EXTENT)?)?;
                let r = match sign {
                    EigenSign::Paper => rep.paper,
                    EigenSign::Direct => rep.direct,
                };
                Ok((r.eigenvalue, r.residual))
            }
        }
    }
}

/// Bounds on an h-halving residual ratio for a second-order stencil.
pub const RATIO_BAND: (f64, f64) = (3.5, 4.5);

/// Residual of a wrong sign convention is at least this large.
pub const WRONG_SIGN_FLOOR: f64 = 0.1;

/// The ratio band does not depend on the profile.
pub fn eigenrelations(_profile: Profile) -> Criterion {
    let zs = [c(0.5, 0.0), c(2.0, 0.0), c(0.75, 5.0)];
    let mut cases = Vec::new();
    for experiment in [Experiment::Dilation, Experiment::Intertwine] {
        for z in zs {
            for sign in [EigenSign::Direct, EigenSign::Paper] {
                for h in HALVING_SPACINGS {
                    cases.push((experiment, z, sign, h));
                }
            }
        }
    }
    let results: Vec<_> = cases
        .par_iter()
        .map(|&(e, z, sign, h)| e.residual(z, h, sign))
        .collect();
    let mut checks = Vec::new();
    for (chunk, outcome) in cases.chunks(3).zip(results.chunks(3)) {
        let (experiment, z, sign, _) = chunk[0];
        let label = format!("{} z={} {} sign", experiment.name(), fmt_z(z), sign.name());
        let values: Result<Vec<_>, _> = outcome.iter().cloned().collect();
        let values = match values {
            Ok(v) => v,
            Err(e) => {
                checks.push(Check::error(label, e));
                continue;
            }
        };
        let eigenvalue = values[0].0;
        let residuals: Vec<f64> = values.iter().map(|v| v.1).collect();
        if sign == EigenSign::Direct {
            for k in 0..2 {
                checks.push(Check::within(
                    format!("{label} ratio h={}/h={}", format_number(HALVING_SPACINGS[k]), format_number(HALVING_SPACINGS[k + 1])),
                    residuals[k] / residuals[k + 1],
                    RATIO_BAND.0,
                    RATIO_BAND.1,
                ));
            }
            if z == c(0.5, 0.0) {
                checks.push(Check::at_most(format!("{label} |eigenvalue|"), eigenvalue.norm(), residuals[2]));
            }
        } else if sign.eigenvalue(z) != EigenSign::Direct.eigenvalue(z) {
            checks.push(Check::within(
                format!("{label} residual stays O(1) at h={}", format_number(HALVING_SPACINGS[2])),
                residuals[2],
                WRONG_SIGN_FLOOR,
                f64::INFINITY,
            ));
        }
    }
    Criterion { id: 10, claim: "dilation-eigenrelation", title: "dilation and intertwining eigenrelations", checks }
}

/// Criteria 1 to 10, in order.
pub fn run_numeric(profile: Profile) -> Vec<Criterion> {
    let runners: [fn(Profile) -> Criterion; 10] = [
        cross_method,
        boundary,
        functional_equation,
        pole_residue,
        norm_threshold,
        weighted_dilation,
        critical_line_shift,
        deficiency,
        shift_algebra,
        eigenrelations,
    ];
    runners.par_iter().map(|run| run(profile)).collect()
}

/// In-process determinism: two renderings of a subset of criteria are
/// byte-identical. The full cross-process check runs the binary twice.
pub fn determinism(profile: Profile) -> Criterion {
    let render = || {
        let subset = [boundary(profile), pole_residue(profile), critical_line_shift(profile), deficiency(profile)];
        criteria_table(&subset).to_csv()
    };
    let (a, b) = rayon::join(render, render);
    let checks = vec![Check::holds("repeat rendering is byte-identical", a == b)];
    Criterion { id: 11, claim: "determinism", title: "deterministic output", checks }
}

/// All criteria, in order.
pub fn run_all(profile: Profile) -> Vec<Criterion> {
    let (mut numeric, det) = rayon::join(|| run_numeric(profile), || determinism(profile));
    numeric.push(det);
    numeric
}
