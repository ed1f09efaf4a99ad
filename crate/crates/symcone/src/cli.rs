//! Command-line harness: `verify`, `sweep` and `algebra`.
//!
//! Exit codes: 0 when the suite passes (or an algebra value is printed), 1 when
//! a suite ran and failed, 2 for usage and configuration errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{ConeError, Result};
use crate::jordan::{
    determinant, inverse, power_function, principal_minor, rotated_minor, spectral, AlgebraElement,
    ConeDescriptor, MultiIndex,
};
use crate::suites::{run_suite, sweep, GridAxis, SuiteConfig, SuiteId};

#[derive(Debug, Parser)]
#[command(name = "symcone", version, about = "Verification harness for tube domains over symmetric cones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one verification suite and write its report.
    Verify {
        suite: String,
        #[command(flatten)]
        common: CommonArgs,
        /// JSON report path; without it the report goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-case CSV path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a suite over a grid of one or two parameters.
    Sweep {
        suite: String,
        /// `name=v1;v2;...` or `name=lo..hi:count`; repeat for a second axis.
        #[arg(long = "grid", required = true)]
        grid: Vec<String>,
        #[command(flatten)]
        common: CommonArgs,
        /// JSON summary path; without it the summary goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV table path; without it the table goes to standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Evaluate a Jordan-algebra quantity at a point.
    Algebra {
        #[arg(value_enum)]
        op: AlgebraOp,
        #[arg(long, default_value = "halfline")]
        cone: String,
        /// The point, as a comma list.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Minor index, one-based.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Multi-index for `power`.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        /// Use the reversed frame.
        #[arg(long)]
        rotated: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgebraOp {
    Det,
    Minor,
    Power,
    Inverse,
    Spectral,
}

/// Flags shared by `verify` and `sweep`. Later sources win: suite defaults,
/// then `--config`, then the named flags, then `--set`.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// `halfline` or `lorentz:<n>[:u=<unit vector>]`.
    #[arg(long)]
    pub cone: Option<String>,
    /// Plain-text file of `key=value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Any suite parameter or quadrature key, as `key=value`.
    #[arg(long = "set", allow_hyphen_values = true)]
    pub set: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// `tensor_gauss` or `monte_carlo`.
    #[arg(long)]
    pub scheme: Option<String>,
}

impl CommonArgs {
    pub fn config(&self, suite: &str) -> Result<SuiteConfig> {
        let suite: SuiteId = suite.parse()?;
        let mut cfg = SuiteConfig::new(suite, "halfline");
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConeError::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        let named = [
            ("cone", &self.cone),
            ("s", &self.s),
            ("p", &self.p),
            ("q", &self.q),
            ("nu", &self.nu),
            ("beta", &self.beta),
            ("alpha", &self.alpha),
            ("xi", &self.xi),
            ("y", &self.y),
            ("t", &self.t),
            ("mu", &self.mu),
            ("scheme", &self.scheme),
        ];
        for (key, value) in named {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(t) = self.tol {
            cfg.tol = Some(t);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.nodes {
            cfg.set("nodes", &n.to_string())?;
        }
        if let Some(n) = self.samples {
            cfg.set("samples", &n.to_string())?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| ConeError::Config(format!("--set expects key=value, got {kv:?}")))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

/// Exit code for an error: 1 when the numerics themselves failed, 2 otherwise.
pub fn error_code(e: &ConeError) -> i32 {
    match e {
        ConeError::Quadrature(_) => 1,
        _ => 2,
    }
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| ConeError::Config(format!("cannot write {}: {e}", path.display())))
}

fn coords(v: &[f64]) -> String {
    v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
}

fn algebra(op: AlgebraOp, cone: &str, x: &str, k: usize, s: Option<&str>, rotated: bool) -> Result<String> {
    let cone = ConeDescriptor::parse(cone)?;
    let x = AlgebraElement::parse(x)?;
    Ok(match op {
        AlgebraOp::Det => determinant(&cone, &x)?.to_string(),
        AlgebraOp::Minor if rotated => rotated_minor(&cone, k, &x)?.to_string(),
        AlgebraOp::Minor => principal_minor(&cone, k, &x)?.to_string(),
        AlgebraOp::Power => {
            let s = s.ok_or_else(|| ConeError::Config("power needs --s".into()))?;
            power_function(&cone, &MultiIndex::parse(s)?, &x, rotated)?.to_string()
        }
        AlgebraOp::Inverse => coords(inverse(&cone, &x)?.coords()),
        AlgebraOp::Spectral => {
            let sd = spectral(&cone, &x)?;
            let mut out = format!("lambda = {}", coords(&sd.eigenvalues));
            for (i, c) in sd.idempotents.iter().enumerate() {
                out.push_str(&format!("\nc_{} = {}", i + 1, coords(c.coords())));
            }
            out
        }
    })
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify { suite, common, out, csv } => {
            let cfg = common.config(&suite)?;
            let report = run_suite(&cfg)?;
            match out.or(cfg.output.clone()) {
                Some(path) => {
                    write(&path, &report.to_json())?;
                    print!("{}", report.summary());
                }
                None => {
                    eprint!("{}", report.summary());
                    println!("{}", report.to_json());
                }
            }
            if let Some(path) = csv {
                write(&path, &report.to_csv())?;
            }
            Ok(if report.aggregate_pass { 0 } else { 1 })
        }
        Command::Sweep { suite, grid, common, out, csv } => {
            let cfg = common.config(&suite)?;
            let axes: Vec<GridAxis> = grid.iter().map(|g| g.parse()).collect::<Result<_>>()?;
            let result = sweep(&cfg, &axes)?;
            match csv {
                Some(path) => write(&path, &result.to_csv())?,
                None => print!("{}", result.to_csv()),
            }
            match out {
                Some(path) => write(&path, &result.to_json())?,
                None if cfg.output.is_some() => write(cfg.output.as_ref().expect("checked"), &result.to_json())?,
                None => {}
            }
            Ok(0)
        }
        Command::Algebra { op, cone, x, k, s, rotated } => {
            println!("{}", algebra(op, &cone, &x, k, s.as_deref(), rotated)?);
            Ok(0)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_values() {
        assert_eq!(algebra(AlgebraOp::Det, "lorentz:3", "2,1,0", 1, None, false).unwrap(), "3");
        assert_eq!(algebra(AlgebraOp::Inverse, "halfline", "4", 1, None, false).unwrap(), "0.25");
        let sp = algebra(AlgebraOp::Spectral, "lorentz:3", "2,1,0", 1, None, false).unwrap();
        assert!(sp.starts_with("lambda = 3,1"), "{sp}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["symcone", "verify", "nope"]), 2);
        assert_eq!(run(["symcone", "verify", "gamma", "--cone", "lorentz:3", "--s", "1,0.4"]), 2);
        assert_eq!(run(["symcone", "sweep", "gamma", "--grid", "s="]), 2);
        assert_eq!(run(["symcone", "algebra", "det", "--cone", "lorentz:3", "--x", "2,1,0"]), 0);
        assert_eq!(run(["symcone", "verify", "gamma", "--s", "2", "--set", "alpha=1"]), 2);
    }
}
