//! Flag definitions and dispatch. Exit codes: 0 pass, 1 claim failure,
//! 2 usage or domain error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use psilab_core::{EigenSign, Method};

use crate::commands::{self, CommandError, MethodChoice, OperatorArgs, OperatorExperiment};
use crate::criteria::{boundary_points, Profile};
use crate::parse::{
    parse_complex, parse_complex_list, parse_range, parse_real_list, ComplexList, RealList, RealRange,
};
use crate::report::RunReport;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CLAIM_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "psilab", version, about = "Numerical checks for psi_z(x) = sum_{n>=1} (n+x)^-z and related half-line operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the JSON report here
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Write the CSV here instead of standard output
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Series,
    Em,
    Integral,
    All,
}

impl MethodArg {
    fn choice(self) -> MethodChoice {
        match self {
            MethodArg::Series => MethodChoice::One(Method::Series),
            MethodArg::Em => MethodChoice::One(Method::EulerMaclaurin),
            MethodArg::Integral => MethodChoice::One(Method::Integral),
            MethodArg::All => MethodChoice::All,
        }
    }

    fn single(self) -> Result<Method, CommandError> {
        match self.choice() {
            MethodChoice::One(m) => Ok(m),
            MethodChoice::All => Err(CommandError::Usage("this command needs a single method".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Momentum,
    Defect,
    Shift,
    Dilation,
    Intertwine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Direct,
    Paper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Fast,
    Strict,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate psi_z(x) with one or all methods
    Eval {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Residuals of psi_z(x) - psi_z(x-1) = -x^-z over a grid
    Feq {
        /// Real parts of z, as lo..hi:count or a single value
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        z: RealRange,
        /// Imaginary parts of z
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "0")]
        t: RealRange,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        x: RealRange,
        #[arg(long, value_enum, default_value_t = MethodArg::Em)]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Compare psi_z(0) with zeta(z)
    Boundary {
        /// Comma-separated complex values
        #[arg(long, value_parser = parse_complex_list, allow_hyphen_values = true)]
        z: Option<ComplexList>,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Residue of psi_z(x) at z = 1
    Pole {
        /// Comma-separated x values
        #[arg(long, value_parser = parse_real_list, default_value = "0,1,5")]
        x: RealList,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Tail exponent and convergence verdict of the weighted norm of psi_z
    NormScan {
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        sigma: RealRange,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "0")]
        t: RealRange,
        /// Comma-separated weight exponents
        #[arg(long, value_parser = parse_real_list, allow_hyphen_values = true, default_value = "0")]
        alpha: RealList,
        #[command(flatten)]
        out: Output,
    },
    /// Discretized operator experiments
    Operators {
        #[arg(long, value_enum)]
        experiment: ExperimentArg,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        #[arg(long = "L", default_value_t = 40.0)]
        extent: f64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
        z: Complex64,
        #[arg(long, value_enum, default_value_t = SignArg::Direct)]
        sign: SignArg,
        #[arg(long, default_value_t = 20.0)]
        x_max: f64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Run every acceptance criterion
    Suite {
        #[arg(long, value_enum, default_value_t = ProfileArg::Fast)]
        profile: ProfileArg,
        #[command(flatten)]
        out: Output,
    },
}

fn emit(report: &RunReport, out: &Output) -> Result<(), CommandError> {
    match &out.csv {
        Some(path) => std::fs::write(path, report.table.to_csv())?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report.write_csv(&mut lock)?;
            lock.flush()?;
        }
    }
    if let Some(path) = &out.report {
        report.write_json(path)?;
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<(RunReport, Output), CommandError> {
    let (report, out) = match command {
        Command::Eval { z, x, method, tol, out } => (commands::eval(z, x, method.choice(), tol)?, out),
        Command::Feq { z, t, x, method, tol, out } => (commands::feq(z, t, x, method.single()?, tol)?, out),
        Command::Boundary { z, method, tol, out } => {
            let zs = z.map_or_else(boundary_points, |l| l.0);
            (commands::boundary(&zs, method.choice(), tol)?, out)
        }
        Command::Pole { x, eps, tol, out } => (commands::pole(&x.0, eps, tol)?, out),
        Command::NormScan { sigma, t, alpha, out } => (commands::norm_scan(sigma, t, &alpha.0)?, out),
        Command::Operators { experiment, h, extent, z, sign, x_max, trials, out } => {
            let args = OperatorArgs {
                experiment: match experiment {
                    ExperimentArg::Momentum => OperatorExperiment::Momentum,
                    ExperimentArg::Defect => OperatorExperiment::Defect,
                    ExperimentArg::Shift => OperatorExperiment::Shift,
                    ExperimentArg::Dilation => OperatorExperiment::Dilation,
                    ExperimentArg::Intertwine => OperatorExperiment::Intertwine,
                },
                h,
                extent,
                z,
                sign: match sign {
                    SignArg::Direct => EigenSign::Direct,
                    SignArg::Paper => EigenSign::Paper,
                },
                x_max,
                trials,
            };
            (commands::operators(&args)?, out)
        }
        Command::Suite { profile, out } => {
            let profile = match profile {
                ProfileArg::Fast => Profile::Fast,
                ProfileArg::Strict => Profile::Strict,
            };
            let (report, summary) = commands::suite(profile);
            eprint!("{summary}");
            (report, out)
        }
    };
    Ok((report, out))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let (report, out) = match dispatch(cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = emit(&report, &out) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    if report.pass {
        eprintln!("pass");
        EXIT_PASS
    } else {
        let k = report.table.columns().iter().position(|c| *c == "ok");
        let failed = k.map_or(0, |k| report.table.rows().iter().filter(|r| r[k] != true.into()).count());
        eprintln!("FAIL: {failed} of {} rows outside their bounds", report.table.rows().len());
        EXIT_CLAIM_FAILURE
    }
}
