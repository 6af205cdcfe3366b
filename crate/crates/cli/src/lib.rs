//! Command-line front end: `compute` prints one JSON document, `verify`
//! runs the verification suites.

use clap::{Args, Parser, Subcommand, ValueEnum};
use deltajet::budget::PrecisionBudget;
use deltajet::Error;
use serde_json::Value;

pub mod compute;
pub mod report;
pub mod suites;

pub const SCHEMA: &str = "deltajet/1";

/// Exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_MATH: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        EXIT_USAGE
    } else if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_MATH
    }
}

/// Dispatch a generic function over the supported primes.
#[macro_export]
macro_rules! with_prime {
    ($p:expr, $f:ident ( $($arg:expr),* )) => {
        match $p {
            5 => $f::<5>($($arg),*),
            7 => $f::<7>($($arg),*),
            11 => $f::<11>($($arg),*),
            13 => $f::<13>($($arg),*),
            p => Err(deltajet::Error::Invalid(format!("unsupported prime {p}"))),
        }
    };
}

#[derive(Parser, Debug)]
#[command(name = "deltajet", version, about = "p-adic jets, delta-characters and their verification suites")]
pub struct Cli {
    #[command(flatten)]
    pub cfg: Config,
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute one object and print it as JSON.
    Compute {
        #[arg(value_enum)]
        what: ComputeKind,
    },
    /// Run a verification suite (or `all`, or `list` to show the names).
    Verify { suite: String },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComputeKind {
    GmPsi,
    GmEval,
    GmCochar,
    GmYn,
    GmSurjWitness,
    EllAp,
    EllLog,
    EllPsi,
    EllCochar,
    QlDecompose,
    QlProlong,
    QlCover,
    ModEisenstein,
    ModF1,
    ModFlambda,
    ModCovariance,
    LimitPerfection,
    Tower,
}

/// Budgets and run options shared by every command.
#[derive(Args, Clone, Debug)]
pub struct Config {
    #[arg(long, global = true, default_value_t = 5)]
    pub p: u32,
    /// p-adic precision N.
    #[arg(long, global = true, default_value_t = 8)]
    pub prec: i64,
    /// Jet order budget n.
    #[arg(long, global = true, default_value_t = 4)]
    pub jet_order: usize,
    /// Power-series degree D.
    #[arg(long, global = true, default_value_t = 150)]
    pub deg: i64,
    /// q-expansion degree Q.
    #[arg(long, global = true, default_value_t = 50)]
    pub q_deg: i64,
    /// Limit stage budget M.
    #[arg(long, global = true, default_value_t = 6)]
    pub stages: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Suites run concurrently on at most this many threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Machine-readable output for `verify` (compute always prints JSON).
    #[arg(long, global = true)]
    pub json: bool,
}

impl Default for Config {
    fn default() -> Self {
        let b = PrecisionBudget::default();
        Config {
            p: b.p,
            prec: b.prec,
            jet_order: b.jet_order,
            deg: b.deg,
            q_deg: b.q_deg,
            stages: b.stages,
            seed: 0,
            jobs: None,
            json: false,
        }
    }
}

impl Config {
    pub fn budget(&self) -> PrecisionBudget {
        PrecisionBudget {
            p: self.p,
            prec: self.prec,
            jet_order: self.jet_order,
            deg: self.deg,
            q_deg: self.q_deg,
            stages: self.stages,
        }
    }

    pub fn validate(&self) -> deltajet::Result<()> {
        self.budget().validate()?;
        if self.jobs == Some(0) {
            return Err(Error::Invalid("--jobs must be positive".into()));
        }
        Ok(())
    }
}

/// Per-command inputs. Unused ones are ignored.
#[derive(Args, Clone, Debug, Default)]
pub struct Inputs {
    /// Number of series terms.
    #[arg(long, global = true)]
    pub terms: Option<usize>,
    /// A p-adic integer (`7`, `-3`, `2/3`).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Curve coefficient A.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<i64>,
    /// Curve coefficient B.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<i64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub i: Option<u32>,
    #[arg(long, global = true)]
    pub j: Option<usize>,
    #[arg(long, global = true)]
    pub r: Option<usize>,
    #[arg(long, global = true)]
    pub s: Option<usize>,
    /// A polynomial in the text grammar, e.g. `T^5*T'' + 3*T'`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub poly: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda1: Option<String>,
    #[arg(long, global = true)]
    pub ell: Option<u64>,
    /// Eisenstein weight.
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// `f1` or `flambda`.
    #[arg(long, global = true)]
    pub form: Option<String>,
    /// Make the synthetic quasi-linear form degenerate.
    #[arg(long, global = true)]
    pub degenerate: bool,
}

/// What the process should print and exit with.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(cli: &Cli) -> Outcome {
    if let Err(e) = cli.cfg.validate() {
        return error_outcome(&e);
    }
    match &cli.cmd {
        Command::Compute { what } => match compute::compute(*what, &cli.cfg, &cli.inputs) {
            Ok(v) => Outcome { code: EXIT_PASS, stdout: pretty(&v), stderr: String::new() },
            Err(e) => error_outcome(&e),
        },
        Command::Verify { suite } => suites::verify_command(suite, &cli.cfg, &cli.inputs),
    }
}

pub fn error_outcome(e: &Error) -> Outcome {
    let code = exit_code(e);
    let kind = match code {
        EXIT_USAGE => "usage",
        EXIT_BUDGET => "budget",
        _ => "math",
    };
    let v = serde_json::json!({ "schema": SCHEMA, "error": e.to_string(), "kind": kind });
    Outcome { code, stdout: pretty(&v), stderr: format!("error: {e}\n") }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
