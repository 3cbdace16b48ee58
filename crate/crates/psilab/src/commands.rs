//! One function per subcommand. Each returns the report or an input error;
//! claim failures are reported through `RunReport::pass`.

use std::time::Instant;

use num_complex::Complex64;
use psilab_core::operator::SATURATION_TOL;
use psilab_core::{
    boundary_zeta_residual, build_momentum_dirichlet, convergence_classify,
    deficiency_diagnostic, evaluate, exp_eigen_residual, functional_equation_residual,
    pole_probe, shift_adjoint_eigen_residual, shift_isometry_check, DeficiencyClass,
    DeficiencySign, EigenSign, Error, Grid, Method, WeightExponent,
};
use rayon::prelude::*;
use serde_json::{Map, Value};
use thiserror::Error as ThisError;

use crate::criteria::{
    criteria_table, fmt_z, run_all, Experiment, Profile, RATIO_BAND,
};
use crate::parse::RealRange;
use crate::report::{Cell, RunReport, Table};

#[derive(Debug, ThisError)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type CommandResult = Result<RunReport, CommandError>;

fn envelope(command: &str, parameters: Map<String, Value>, table: Table, tol: f64, start: Instant) -> RunReport {
    let pass = match table.columns().iter().position(|c| *c == "ok") {
        Some(k) => table.rows().iter().all(|r| r[k] == Cell::Bool(true)),
        None => true,
    };
    RunReport {
        command: command.into(),
        parameters,
        table,
        pass,
        tolerance_used: tol,
        wall_time_ms: start.elapsed().as_millis() as u64,
    }
}

fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// `--method` values of `eval`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    One(Method),
    All,
}

impl MethodChoice {
    pub fn name(self) -> &'static str {
        match self {
            MethodChoice::One(m) => m.name(),
            MethodChoice::All => "all",
        }
    }
}

pub const EVAL_COLUMNS: [&str; 9] = ["claim", "z", "method", "re", "im", "abs_err", "bound", "flags", "ok"];

pub fn eval(z: Complex64, x: f64, method: MethodChoice, tol: f64) -> CommandResult {
    let start = Instant::now();
    check_tol(tol)?;
    let methods: Vec<Method> = match method {
        MethodChoice::One(m) => vec![m],
        MethodChoice::All => Method::ALL.into_iter().filter(|m| *m != Method::Series || z.re > 1.0).collect(),
    };
    let results = methods
        .iter()
        .map(|&m| evaluate(z, x, m, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&EVAL_COLUMNS);
    for r in &results {
        let mut flags = Vec::new();
        if r.flags.near_pole {
            flags.push("near-pole");
        }
        if r.flags.tail_truncated {
            flags.push("tail-truncated");
        }
        table.push(vec![
            "psi-value".into(),
            fmt_z(z).into(),
            r.method.name().into(),
            r.value.re.into(),
            r.value.im.into(),
            r.abs_err.into(),
            tol.into(),
            flags.join(";").into(),
            (r.abs_err <= tol).into(),
        ]);
    }
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let (a, b) = (&results[i], &results[j]);
            let d = a.value - b.value;
            let bound = a.abs_err + b.abs_err + 1e-12;
            table.push(vec![
                "method-agreement".into(),
                fmt_z(z).into(),
                format!("{}-{}", a.method.name(), b.method.name()).into(),
                d.re.into(),
                d.im.into(),
                d.norm().into(),
                bound.into(),
                Cell::Empty,
                (d.norm() <= bound).into(),
            ]);
        }
    }
    let p = params(&[
        ("z", fmt_z(z).into()),
        ("x", x.into()),
        ("method", method.name().into()),
        ("tol", tol.into()),
    ]);
    Ok(envelope("eval", p, table, tol, start))
}

fn check_tol(tol: f64) -> Result<(), CommandError> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(CommandError::Usage(format!("tolerance must lie in (0, 1), got {tol}")))
    }
}

pub const FEQ_COLUMNS: [&str; 9] = ["claim", "z_re", "z_im", "x", "method", "residual", "combined_err", "bound", "ok"];

pub fn feq(sigma: RealRange, t: RealRange, x: RealRange, method: Method, tol: f64) -> CommandResult {
    let start = Instant::now();
    check_tol(tol)?;
    let xs = x.values();
    if xs.iter().any(|&x| x <= 0.0) {
        return Err(CommandError::Usage("functional equation needs every x > 0".into()));
    }
    let mut cells = Vec::new();
    for s in sigma.values() {
        for im in t.values() {
            for &x in &xs {
                cells.push((Complex64::new(s, im), x));
            }
        }
    }
    let results = cells
        .par_iter()
        .map(|&(z, x)| functional_equation_residual(z, x, method, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&FEQ_COLUMNS);
    for (&(z, x), r) in cells.iter().zip(&results) {
        let bound = r.combined_err + 1e-12;
        table.push(vec![
            "functional-equation".into(),
            z.re.into(),
            z.im.into(),
            x.into(),
            method.name().into(),
            r.residual.into(),
            r.combined_err.into(),
            bound.into(),
            (r.residual <= bound).into(),
        ]);
    }
    let p = params(&[
        ("z", sigma.to_string().into()),
        ("t", t.to_string().into()),
        ("x", x.to_string().into()),
        ("method", method.name().into()),
        ("tol", tol.into()),
    ]);
    Ok(envelope("feq", p, table, tol, start))
}

pub const BOUNDARY_COLUMNS: [&str; 11] =
    ["claim", "z_re", "z_im", "method", "psi_re", "psi_im", "zeta_re", "zeta_im", "residual", "bound", "ok"];

pub fn boundary(zs: &[Complex64], method: MethodChoice, tol: f64) -> CommandResult {
    let start = Instant::now();
    check_tol(tol)?;
    let mut cases = Vec::new();
    for &z in zs {
        match method {
            MethodChoice::One(m) => cases.push((z, m)),
            MethodChoice::All => {
                for m in Method::ALL {
                    if m != Method::Series || z.re > 1.0 {
                        cases.push((z, m));
                    }
                }
            }
        }
    }
    let results = cases
        .par_iter()
        .map(|&(z, m)| boundary_zeta_residual(z, m, 0.1 * tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&BOUNDARY_COLUMNS);
    for (&(z, m), r) in cases.iter().zip(&results) {
        table.push(vec![
            "boundary-zeta".into(),
            z.re.into(),
            z.im.into(),
            m.name().into(),
            r.psi_at_zero.value.re.into(),
            r.psi_at_zero.value.im.into(),
            r.zeta.re.into(),
            r.zeta.im.into(),
            r.residual.into(),
            tol.into(),
            (r.residual <= tol).into(),
        ]);
    }
    let zs: Vec<Value> = zs.iter().map(|&z| fmt_z(z).into()).collect();
    let p = params(&[("z", Value::Array(zs)), ("method", method.name().into()), ("tol", tol.into())]);
    Ok(envelope("boundary", p, table, tol, start))
}

pub const POLE_COLUMNS: [&str; 8] = ["claim", "x", "eps", "residue_re", "residue_im", "deviation", "bound", "ok"];

pub fn pole(xs: &[f64], eps: f64, tol: f64) -> CommandResult {
    let start = Instant::now();
    check_tol(tol)?;
    let mut table = Table::new(&POLE_COLUMNS);
    for &x in xs {
        let r = pole_probe(x, eps)?;
        let deviation = (r - 1.0).norm();
        table.push(vec![
            "pole-residue".into(),
            x.into(),
            eps.into(),
            r.re.into(),
            r.im.into(),
            deviation.into(),
            tol.into(),
            (deviation <= tol).into(),
        ]);
    }
    let xs: Vec<Value> = xs.iter().map(|&x| x.into()).collect();
    let p = params(&[("x", Value::Array(xs)), ("eps", eps.into()), ("tol", tol.into())]);
    Ok(envelope("pole", p, table, tol, start))
}

pub const NORM_COLUMNS: [&str; 9] = [
    "sigma",
    "t",
    "alpha",
    "fitted_exponent",
    "predicted_exponent",
    "verdict",
    "threshold_sigma",
    "ok",
    "claim",
];

pub fn norm_scan(sigma: RealRange, t: RealRange, alphas: &[f64]) -> CommandResult {
    let start = Instant::now();
    let weights = alphas
        .iter()
        .map(|&a| WeightExponent::new(a))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cells = Vec::new();
    for s in sigma.values() {
        for im in t.values() {
            for &w in &weights {
                cells.push((Complex64::new(s, im), w));
            }
        }
    }
    let results = cells
        .par_iter()
        .map(|&(z, w)| convergence_classify(z, w))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&NORM_COLUMNS);
    for (&(z, w), v) in cells.iter().zip(&results) {
        table.push(vec![
            z.re.into(),
            z.im.into(),
            w.alpha().into(),
            v.fitted_exponent.into(),
            v.predicted_exponent.into(),
            v.verdict.name().into(),
            v.threshold_sigma.into(),
            v.consistent(z.re).into(),
            "norm-threshold".into(),
        ]);
    }
    let alphas: Vec<Value> = alphas.iter().map(|&a| a.into()).collect();
    let p = params(&[
        ("sigma", sigma.to_string().into()),
        ("t", t.to_string().into()),
        ("alpha", Value::Array(alphas)),
    ]);
    Ok(envelope("norm-scan", p, table, psilab_core::MARGINAL_BAND, start))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorExperiment {
    Momentum,
    Defect,
    Shift,
    Dilation,
    Intertwine,
}

impl OperatorExperiment {
    pub fn name(self) -> &'static str {
        match self {
            OperatorExperiment::Momentum => "momentum",
            OperatorExperiment::Defect => "defect",
            OperatorExperiment::Shift => "shift",
            OperatorExperiment::Dilation => "dilation",
            OperatorExperiment::Intertwine => "intertwine",
        }
    }
}

/// Flags of the `operators` subcommand.
#[derive(Debug, Clone, Copy)]
pub struct OperatorArgs {
    pub experiment: OperatorExperiment,
    pub h: f64,
    pub extent: f64,
    pub z: Complex64,
    pub sign: EigenSign,
    pub x_max: f64,
    pub trials: usize,
}

pub const OPERATOR_COLUMNS: [&str; 12] =
    ["claim", "experiment", "case", "h", "z_re", "z_im", "eigen_re", "eigen_im", "value", "lower", "upper", "ok"];

struct OperatorRows<'a> {
    table: Table,
    args: &'a OperatorArgs,
    claim: &'static str,
}

impl OperatorRows<'_> {
    fn push(&mut self, case: &str, h: Option<f64>, eigen: Option<Complex64>, value: f64, lower: f64, upper: f64) {
        let a = self.args;
        let num = |v: Option<f64>| v.map(Cell::from).unwrap_or(Cell::Empty);
        self.table.push(vec![
            self.claim.into(),
            a.experiment.name().into(),
            case.into(),
            num(h),
            a.z.re.into(),
            a.z.im.into(),
            num(eigen.map(|e| e.re)),
            num(eigen.map(|e| e.im)),
            value.into(),
            lower.into(),
            upper.into(),
            (value >= lower && value <= upper).into(),
        ]);
    }

    fn push_fact(&mut self, case: &str, fact: bool) {
        self.push(case, None, None, if fact { 1.0 } else { 0.0 }, 1.0, 1.0);
    }
}

/// Spacings `h`, `h/2`, `h/4` of the halving study.
fn halvings(h: f64) -> [f64; 3] {
    [h, h / 2.0, h / 4.0]
}

pub fn operators(args: &OperatorArgs) -> CommandResult {
    let start = Instant::now();
    if !(args.h > 0.0 && args.extent > 0.0) {
        return Err(CommandError::Usage("--h and --L must be positive".into()));
    }
    let claim = match args.experiment {
        OperatorExperiment::Momentum => "momentum-adjoint-eigenfunctions",
        OperatorExperiment::Defect => "defect-indices",
        OperatorExperiment::Shift => "shift-partial-isometry",
        OperatorExperiment::Dilation => "dilation-eigenrelation",
        OperatorExperiment::Intertwine => "intertwine-eigenrelation",
    };
    let mut rows = OperatorRows { table: Table::new(&OPERATOR_COLUMNS), args, claim };
    let tol = match args.experiment {
        OperatorExperiment::Momentum => momentum_rows(&mut rows)?,
        OperatorExperiment::Defect => defect_rows(&mut rows)?,
        OperatorExperiment::Shift => shift_rows(&mut rows)?,
        OperatorExperiment::Dilation => eigen_rows(&mut rows, Experiment::Dilation)?,
        OperatorExperiment::Intertwine => eigen_rows(&mut rows, Experiment::Intertwine)?,
    };
    let p = params(&[
        ("experiment", args.experiment.name().into()),
        ("h", args.h.into()),
        ("L", args.extent.into()),
        ("z", fmt_z(args.z).into()),
        ("sign", args.sign.name().into()),
        ("x_max", args.x_max.into()),
        ("trials", args.trials.into()),
    ]);
    Ok(envelope("operators", p, rows.table, tol, start))
}

fn ratio_rows(rows: &mut OperatorRows, label: &str, hs: &[f64; 3], residuals: &[f64]) {
    for k in 0..2 {
        rows.push(
            &format!("{label} halving ratio"),
            Some(hs[k + 1]),
            None,
            residuals[k] / residuals[k + 1],
            RATIO_BAND.0,
            RATIO_BAND.1,
        );
    }
}

fn momentum_rows(rows: &mut OperatorRows) -> Result<f64, CommandError> {
    let z = rows.args.z;
    let hs = halvings(rows.args.h);
    let mut residuals = Vec::new();
    for &h in &hs {
        let grid = Grid::uniform(h, rows.args.extent)?;
        let r = exp_eigen_residual(z, &grid)?;
        rows.push("eigen residual", Some(h), Some(r.eigenvalue), r.residual, 0.0, 0.25 * z.norm().powi(3) * h * h);
        residuals.push(r.residual);
    }
    ratio_rows(rows, "eigen residual", &hs, &residuals);
    let grid = Grid::uniform(hs[0], rows.args.extent)?;
    let defect = build_momentum_dirichlet(&grid).hermitian_defect(grid.interior());
    rows.push("interior hermitian defect", Some(hs[0]), None, defect, 0.0, 1e-14);
    Ok(1e-14)
}

fn defect_rows(rows: &mut OperatorRows) -> Result<f64, CommandError> {
    let x_max = rows.args.x_max;
    let tol = 1e-12;
    let plus = deficiency_diagnostic(DeficiencySign::Plus, x_max)?;
    let exact = -0.5 * (-2.0 * x_max).exp_m1();
    rows.push("plus norm", None, None, plus.norm_estimate, exact - tol, exact + tol);
    let change = (plus.doubled_norm - plus.norm_estimate).abs() / plus.norm_estimate;
    rows.push("plus relative change under doubling", None, None, change, 0.0, SATURATION_TOL);
    rows.push_fact("plus square integrable", plus.classification == DeficiencyClass::SquareIntegrable);
    let minus = deficiency_diagnostic(DeficiencySign::Minus, x_max)?;
    rows.push(
        "minus growth under doubling",
        None,
        None,
        minus.doubled_norm / minus.norm_estimate,
        x_max.exp(),
        f64::INFINITY,
    );
    rows.push_fact("minus divergent", minus.classification == DeficiencyClass::Divergent);
    Ok(tol)
}

fn shift_rows(rows: &mut OperatorRows) -> Result<f64, CommandError> {
    let grid = Grid::uniform(rows.args.h, rows.args.extent)?;
    let h = Some(rows.args.h);
    let (r1, r2) = shift_isometry_check(&grid, rows.args.trials)?;
    rows.push("r1 = max |S*S f - f| / |f|", h, None, r1, 0.0, 1e-12);
    rows.push("r2 = max |SS* f - (I - P) f| / |f|", h, None, r2, 0.0, 1e-12);
    let r = shift_adjoint_eigen_residual(rows.args.z, &grid)?;
    rows.push("S* eigen residual", h, Some(r.eigenvalue), r.residual, 0.0, 1e-9);
    rows.push("|S* eigenvalue|", h, None, r.eigenvalue.norm(), 0.0, 1.0 - f64::EPSILON);
    Ok(1e-12)
}

fn eigen_rows(rows: &mut OperatorRows, experiment: Experiment) -> Result<f64, CommandError> {
    let z = rows.args.z;
    let sign = rows.args.sign;
    let hs = halvings(rows.args.h);
    let results = hs
        .par_iter()
        .map(|&h| experiment.residual(z, h, sign))
        .collect::<Result<Vec<_>, _>>()?;
    let label = format!("{} sign residual", sign.name());
    for (&h, &(eigen, residual)) in hs.iter().zip(&results) {
        rows.push(&label, Some(h), Some(eigen), residual, 0.0, f64::INFINITY);
    }
    let residuals: Vec<f64> = results.iter().map(|r| r.1).collect();
    ratio_rows(rows, &label, &hs, &residuals);
    if sign.eigenvalue(z) == Complex64::new(0.0, 0.0) {
        rows.push("|eigenvalue| within residual", Some(hs[2]), None, 0.0, 0.0, residuals[2]);
    }
    let other = match sign {
        EigenSign::Direct => EigenSign::Paper,
        EigenSign::Paper => EigenSign::Direct,
    };
    let (eigen, residual) = experiment.residual(z, hs[0], other)?;
    rows.push(&format!("{} sign residual", other.name()), Some(hs[0]), Some(eigen), residual, 0.0, f64::INFINITY);
    Ok(RATIO_BAND.0)
}

pub fn suite(profile: Profile) -> (RunReport, String) {
    let start = Instant::now();
    let criteria = run_all(profile);
    let mut summary = String::new();
    for c in &criteria {
        let status = if c.pass() { "PASS" } else { "FAIL" };
        summary.push_str(&format!("criterion {:>2} {:<24} {status} ({} checks)\n", c.id, c.claim, c.checks.len()));
    }
    let table = criteria_table(&criteria);
    let p = params(&[("profile", profile.name().into())]);
    (envelope("suite", p, table, profile.scale(), start), summary)
}
