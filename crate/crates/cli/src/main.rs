//! `approxconvex`: reproducible experiments for extremal approximately convex
//! sets. Every command prints `{command, params, results, pass, elapsed_ms}`.
//!
//! Exit codes: 0 on success, 2 when `--paper-check` is set and the bound
//! fails, 1 on usage or runtime errors.

// `!(x > 0.0)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use commands::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "approxconvex", version, about = "Experiments on extremal approximately convex sets")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Exit with code 2 when the reproduced bound fails.
    #[arg(long, global = true)]
    paper_check: bool,

    /// Comparison tolerance.
    #[arg(long, global = true, env = "APPROXCONVEX_TOL", default_value_t = 1e-9)]
    tol: f64,

    /// Seed for commands that draw random inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

pub struct Settings {
    pub tol: f64,
    pub seed: u64,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Sharp Hyers–Ulam constant κ(n) and its bounds (criterion 1).
    Kappa {
        #[arg(long)]
        n: u64,
        /// Sweep n up to this value.
        #[arg(long)]
        to: Option<u64>,
    },
    /// Largest sampled affine defect of the entropy (criterion 2).
    EntropyDefect {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Witness distance and diameter of the Euclidean entropy set (criterion 3).
    EuclidSet {
        #[arg(long)]
        n: usize,
        /// Scale M; defaults to √((2/ln2)·n·log₂n).
        #[arg(long = "M")]
        m: Option<f64>,
        /// Sample the set on this simplex grid and measure its diameter.
        #[arg(long)]
        grid: Option<usize>,
        /// Force the numeric search.
        #[arg(long)]
        numeric: bool,
    },
    /// ℓ1 bound report (criterion 7).
    L1Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        to: Option<u64>,
    },
    /// Bound report for a space at distance d from ℓ1ⁿ (criterion 7).
    GeneralBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        /// Banach–Mazur distance to ℓ1ⁿ.
        #[arg(long)]
        d: Option<f64>,
        /// Use ℓp with d = n^{(p−1)/p}.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        to: Option<u64>,
    },
    /// Sampled entropy set in ℓp: witness distance, diameter, defect (criterion 3).
    LpSet {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long = "M")]
        m: Option<f64>,
        #[arg(long, default_value_t = 4)]
        grid: usize,
        /// Interpolation grid for the convexity defect; 0 skips it.
        #[arg(long, default_value_t = 0)]
        t_grid: usize,
    },
    /// Nearby k-face of a simplex inscribed in the unit sphere (criterion 5).
    SimplexFace {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Use the regular simplex instead of a random one.
        #[arg(long)]
        regular: bool,
    },
    /// j points of a random configuration whose hull is near the origin (criterion 5).
    BestSubset {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        j: usize,
    },
    /// Minimiser of the entropy variational problem (criterion 4).
    OptEntropy {
        #[arg(long)]
        n: u64,
        #[arg(long = "M")]
        m: Option<f64>,
    },
    /// Diameter lower bound max_j f(j, n) (criterion 6).
    Lowbound3 {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        to: Option<u64>,
    },
    /// Diameter lower bound in a space of type p (criterion 10).
    TypepBound {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        tp: f64,
        #[arg(long)]
        d: f64,
        /// A measured diameter to compare against the bound.
        #[arg(long)]
        diameter: Option<f64>,
    },
    /// Tree-space norm by primal and dual LP (criterion 8).
    TreeNorm {
        /// A term LABEL=COEF, e.g. "((1,2),3)=1.5"; repeatable.
        #[arg(long = "term", required = true)]
        terms: Vec<String>,
        #[arg(long = "M")]
        m: f64,
    },
    /// Certified lower bound on the distance of the leaf average to A (criterion 9).
    TreeHaus {
        #[arg(long = "M")]
        m: u32,
        #[arg(long = "N")]
        n: u64,
    },
    /// ‖e_(b,c) − (e_b + e_c)/2‖ (criterion 9).
    TreeJensen {
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long = "M", default_value_t = 2.0)]
        m: f64,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Kappa { .. } => "kappa",
            Cmd::EntropyDefect { .. } => "entropy-defect",
            Cmd::EuclidSet { .. } => "euclid-set",
            Cmd::L1Bound { .. } => "l1-bound",
            Cmd::GeneralBound { .. } => "general-bound",
            Cmd::LpSet { .. } => "lp-set",
            Cmd::SimplexFace { .. } => "simplex-face",
            Cmd::BestSubset { .. } => "best-subset",
            Cmd::OptEntropy { .. } => "opt-entropy",
            Cmd::Lowbound3 { .. } => "lowbound3",
            Cmd::TypepBound { .. } => "typep-bound",
            Cmd::TreeNorm { .. } => "tree-norm",
            Cmd::TreeHaus { .. } => "tree-haus",
            Cmd::TreeJensen { .. } => "tree-jensen",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        eprintln!("error: tolerance must be positive, got {}", cli.tol);
        return ExitCode::from(1);
    }
    let settings = Settings { tol: cli.tol, seed: cli.seed };
    let start = Instant::now();
    let outcome = match commands::run(&cli.cmd, &settings) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let elapsed_ms = start.elapsed().as_millis() as u64;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let written = match cli.format {
        Format::Json => {
            let mut params = outcome.params;
            params["tol"] = json!(settings.tol);
            let report = json!({
                "command": cli.cmd.name(),
                "params": params,
                "results": outcome.results,
                "pass": outcome.pass,
                "elapsed_ms": elapsed_ms,
            });
            output::write_json(&mut out, &report)
        }
        Format::Csv => output::write_csv(&mut out, &outcome.results),
    };
    if let Err(e) = written.and_then(|()| out.flush()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if !outcome.pass {
        eprintln!("bound check failed");
        if cli.paper_check {
            return ExitCode::from(2);
        }
    }
    ExitCode::SUCCESS
}
