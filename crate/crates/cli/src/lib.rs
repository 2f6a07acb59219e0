//! Command-line front end: a diagram DSL plus `eval`, `normalize`, `verify`
//! and `demo` commands that print JSON.

pub mod dsl;

use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;
use tlcalc_core::protocols::{self, IdentityReport, CATALOG};
use tlcalc_core::rewrite::normalize;
use tlcalc_core::{evaluate, ComplexMatrix, Registry, DEFAULT_TOLERANCE};

use dsl::DslError;

/// Environment variable overriding the verification tolerance.
pub const TOLERANCE_VAR: &str = "TLCALC_TOLERANCE";

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const TOO_LARGE: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "tlcalc", version, about = "Decorated Temperley–Lieb diagram calculator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an expression (or a file containing one) to a matrix.
    Eval {
        input: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// JSON file with extra matrices and vectors.
        #[arg(long)]
        registry: Option<String>,
    },
    /// Rewrite an expression to normal form and print the trace.
    Normalize {
        input: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        registry: Option<String>,
    },
    /// Check a named identity, or `all` of them.
    Verify {
        identity: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Walk through a protocol step by step.
    Demo {
        protocol: Protocol,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Teleport,
    Densecode,
    Swap,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Dsl(#[from] DslError),
    #[error("{0}")]
    Core(#[from] tlcalc_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(tlcalc_core::Error::ProblemTooLarge { .. }) => exit::TOO_LARGE,
            _ => exit::USAGE,
        }
    }
}

/// What a command prints and how the process should exit.
#[derive(Debug)]
pub struct Outcome {
    pub output: Value,
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            exit::OK
        } else {
            exit::FAILED
        }
    }
}

/// Tolerance from [`TOLERANCE_VAR`], or the default.
pub fn tolerance_from(value: Option<&str>) -> Result<f64, CliError> {
    match value {
        None => Ok(DEFAULT_TOLERANCE),
        Some(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| CliError::Usage(format!("{TOLERANCE_VAR} must be a positive number, got `{s}`"))),
    }
}

/// Round to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn matrix_json(m: &ComplexMatrix) -> Value {
    let entries: Vec<[f64; 2]> = m.entries().into_iter().map(|z| [round12(z.re), round12(z.im)]).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

fn load_registry(dim: usize, path: Option<&str>) -> Result<Registry, CliError> {
    let Some(path) = path else {
        return Ok(Registry::standard(dim)?);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    let reg = Registry::from_json(&text)?;
    if reg.dim() != dim {
        return Err(CliError::Usage(format!(
            "registry {path} has dimension {}, but --dim is {dim}",
            reg.dim()
        )));
    }
    Ok(reg)
}

/// An existing file is read; anything else is taken as the expression itself.
fn read_input(input: &str) -> Result<String, CliError> {
    if Path::new(input).is_file() {
        std::fs::read_to_string(input).map_err(|e| CliError::Usage(format!("cannot read {input}: {e}")))
    } else {
        Ok(input.to_string())
    }
}

fn check_dim(dim: usize) -> Result<(), CliError> {
    if dim < 2 {
        return Err(CliError::Usage("--dim must be at least 2".into()));
    }
    Ok(())
}

fn reports_outcome(reports: Vec<IdentityReport>) -> Outcome {
    let passed = reports.iter().all(|r| r.passed);
    Outcome {
        output: serde_json::to_value(reports).expect("reports serialize"),
        passed,
    }
}

pub fn run(command: &Command, tol: f64) -> Result<Outcome, CliError> {
    match command {
        Command::Eval { input, dim, registry } => {
            check_dim(*dim)?;
            let reg = load_registry(*dim, registry.as_deref())?;
            let diagram = dsl::compile(&read_input(input)?)?;
            let m = evaluate(&diagram, *dim, &reg)?;
            Ok(Outcome {
                output: matrix_json(&m),
                passed: true,
            })
        }
        Command::Normalize { input, dim, registry } => {
            check_dim(*dim)?;
            let reg = load_registry(*dim, registry.as_deref())?;
            let expr = dsl::parse(&read_input(input)?)?;
            let diagram = dsl::elaborate(&expr)?;
            let (normal, trace) = normalize(&diagram, &reg)?;
            let steps: Vec<Value> = trace
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "rule": s.step.rule_id(),
                        "step": s.step,
                        "before": s.before_hash,
                        "after": s.after_hash,
                    })
                })
                .collect();
            Ok(Outcome {
                output: json!({
                    "input": dsl::to_source(&expr),
                    "initial": diagram.to_string(),
                    "normal_form": normal.to_string(),
                    "digest": normal.digest(),
                    "trace": steps,
                }),
                passed: true,
            })
        }
        Command::Verify { identity, dim, seed } => {
            check_dim(*dim)?;
            let reports = if identity == "all" {
                protocols::verify_all(*dim, &[*seed], tol)?
            } else if CATALOG.contains(&identity.as_str()) {
                vec![protocols::verify_identity(identity, *dim, Some(*seed), tol)?]
            } else {
                let matching: Vec<_> = protocols::verify_all(*dim, &[*seed], tol)?
                    .into_iter()
                    .filter(|r| &r.identity_id == identity)
                    .collect();
                if matching.is_empty() {
                    return Err(tlcalc_core::Error::UnknownIdentity(identity.clone()).into());
                }
                matching
            };
            Ok(reports_outcome(reports))
        }
        Command::Demo { protocol, dim, seed } => {
            check_dim(*dim)?;
            demo(*protocol, *dim, *seed, tol)
        }
    }
}

#[derive(Serialize)]
struct DemoStep {
    description: String,
    report: IdentityReport,
}

fn demo(protocol: Protocol, d: usize, seed: u64, tol: f64) -> Result<Outcome, CliError> {
    let mut steps = Vec::new();
    let mut push = |description: String, report: IdentityReport| steps.push(DemoStep { description, report });
    let name = match protocol {
        Protocol::Teleport => {
            for n in 1..=d * d {
                push(
                    format!("Alice measures outcome {n}; Bob applies U{n}† and holds the input state"),
                    protocols::teleport_verify(d, n, seed, tol)?,
                );
            }
            push(
                format!("each of the {} outcomes has probability 1/d² and fidelity 1", d * d),
                protocols::teleport_outcomes_verify(d, seed, tol)?,
            );
            push(
                "closed form: the outcome-summed trace against an observable equals tr(ρO)".into(),
                protocols::tight_teleport_verify(d, seed, tol)?,
            );
            "teleport"
        }
        Protocol::Densecode => {
            push(
                format!("Alice encodes one of {} messages with U_n; Bob's Bell measurement returns it with certainty", d * d),
                protocols::tight_densecode_verify(d, tol)?,
            );
            "densecode"
        }
        Protocol::Swap => {
            for (l, n, m) in protocols::random_triples(d, seed, 4) {
                push(
                    format!("outcomes ({l}, {n}, {m}) leave the outer pair in a maximally entangled state"),
                    protocols::swap_verify(d, l, n, m, tol)?,
                );
            }
            push(
                "closed form: the outcome-summed trace equals (1/d)·tr(ρOᵀ)".into(),
                protocols::tight_swap_verify(d, seed, tol)?,
            );
            "swap"
        }
    };
    let passed = steps.iter().all(|s| s.report.passed);
    Ok(Outcome {
        output: json!({ "demo": name, "d": d, "seed": seed, "steps": steps, "passed": passed }),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(1.0), 1.0);
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(-2.0e-20 / 3.0), -6.66666666667e-21);
    }

    #[test]
    fn tolerance_parsing() {
        assert_eq!(tolerance_from(None).unwrap(), DEFAULT_TOLERANCE);
        assert_eq!(tolerance_from(Some("1e-6")).unwrap(), 1e-6);
        assert!(tolerance_from(Some("-1")).is_err());
        assert!(tolerance_from(Some("abc")).is_err());
    }

    #[test]
    fn eval_loop_is_one() {
        let cmd = Command::Eval {
            input: "cup ; cap".into(),
            dim: 5,
            registry: None,
        };
        let out = run(&cmd, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(out.output, json!({"rows": 1, "cols": 1, "entries": [[1.0, 0.0]]}));
    }

    #[test]
    fn error_codes() {
        let parse = run(
            &Command::Eval {
                input: "cup ;".into(),
                dim: 2,
                registry: None,
            },
            1e-9,
        )
        .unwrap_err();
        assert_eq!(parse.exit_code(), exit::USAGE);
        let big = run(
            &Command::Eval {
                input: "id(12)".into(),
                dim: 5,
                registry: None,
            },
            1e-9,
        )
        .unwrap_err();
        assert_eq!(big.exit_code(), exit::TOO_LARGE);
    }
}
