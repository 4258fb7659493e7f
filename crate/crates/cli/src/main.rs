use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use cellzeta::asymptotics::{worthiness_with, AsymptoticsError, WorthinessOptions};
use cellzeta::exact::{q_from_sum, OrbitProfile};
use cellzeta::group::orbit;
use cellzeta::highprec::decompose::{decompose, decompose_verified, DecomposeError};
use cellzeta::params::{a_to_pq, first_violated_form, hyperplane_values, ParamVec8};

mod search;
mod verify;

#[derive(Parser)]
#[command(name = "cellzeta", version, about = "Cellular integrals and linear forms in zeta(3), zeta(5)")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 40)]
    prec: u32,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write the JSON output to this file.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact triple (Q, Phat, P) of the decomposition of I(a).
    Decompose {
        #[arg(num_args = 8, allow_negative_numbers = true, required = true)]
        a: Vec<i64>,
        /// Repeat at doubled precision and require identical rationals.
        #[arg(long)]
        verify: bool,
    },
    /// Growth rates, denominator data and the worthiness exponent.
    Worthiness {
        #[arg(num_args = 8, allow_negative_numbers = true, required = true)]
        a: Vec<i64>,
        /// Take l of the five maxima from h' and the rest from h''.
        #[arg(long = "refined-m", value_name = "L")]
        refined_m: Option<usize>,
    },
    /// Orbit size, canonical representative and denominator data.
    Orbit {
        #[arg(num_args = 8, allow_negative_numbers = true, required = true)]
        a: Vec<i64>,
        /// Report Phi_n for this n.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Rank admissible parameter vectors in a box by worthiness.
    Search(search::SearchArgs),
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
pub enum Suite {
    Group,
    Graph,
    Sequences,
    Analytic,
    All,
}

/// A failure with its exit code.
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }
}

fn params(a: &[i64]) -> Result<ParamVec8, Failure> {
    let a = ParamVec8::from_slice(a).map_err(|e| Failure::new(2, e.to_string()))?;
    if let Some(f) = first_violated_form(&a) {
        return Err(Failure::new(2, format!("inadmissible: {} < 0", f.render())));
    }
    Ok(a)
}

fn asym_failure(e: AsymptoticsError) -> Failure {
    match e {
        AsymptoticsError::InvarianceViolation | AsymptoticsError::BadSplit(_) => Failure::new(1, e.to_string()),
        _ => Failure::new(4, e.to_string()),
    }
}

fn decompose_failure(e: DecomposeError) -> Failure {
    match e {
        DecomposeError::Inadmissible(f) => Failure::new(2, format!("inadmissible: {f} < 0")),
        DecomposeError::Ambiguity { .. } | DecomposeError::Unstable => Failure::new(3, e.to_string()),
        _ => Failure::new(1, e.to_string()),
    }
}

fn run(cli: &Cli) -> Result<(Value, u8), Failure> {
    let prec = cli.common.prec;
    if prec < 10 {
        return Err(Failure::new(1, "--prec must be at least 10"));
    }
    match &cli.cmd {
        Cmd::Decompose { a, verify } => {
            let a = params(a)?;
            let d = if *verify { decompose_verified(&a, prec) } else { decompose(&a, prec) };
            let d = d.map_err(decompose_failure)?;
            Ok((serde_json::to_value(&d).expect("serializable"), 0))
        }
        Cmd::Worthiness { a, refined_m } => {
            let a = params(a)?;
            let r = worthiness_with(&a, prec, WorthinessOptions { refined_l: *refined_m }).map_err(asym_failure)?;
            Ok((serde_json::to_value(&r).expect("serializable"), 0))
        }
        Cmd::Orbit { a, n } => {
            let a = params(a)?;
            let o = orbit(&a);
            let h = hyperplane_values(&a);
            let q = q_from_sum(&a_to_pq(&a)).map_err(|e| Failure::new(1, e.to_string()))?;
            let mut v = serde_json::json!({
                "a": a,
                "orbit_size": o.len(),
                "canonical": o.canonical(),
                "all_admissible": o.all_admissible,
                "h_sorted": h.sorted(),
                "m": h.five_maxima(),
                "Q": q.to_string(),
            });
            if let Some(n) = n {
                let prof = OrbitProfile::new(&a);
                v["n"] = (*n).into();
                v["log_phi_n_over_n"] = format!("{:.10}", prof.log_phi_n(*n) / *n as f64).into();
                v["phi_primes"] = prof
                    .phi_factors(*n)
                    .into_iter()
                    .map(|(p, e)| serde_json::json!([p, e]))
                    .collect::<Vec<_>>()
                    .into();
            }
            Ok((v, 0))
        }
        Cmd::Search(args) => search::run(args, prec),
        Cmd::Verify { suite } => Ok(verify::run(*suite)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok((v, code)) => {
            let text = serde_json::to_string_pretty(&v).expect("serializable");
            println!("{text}");
            if let Some(path) = &cli.common.json {
                if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
