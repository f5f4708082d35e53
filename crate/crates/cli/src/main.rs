//! `qpersuade`: solve, check and fuzz quota-constrained persuasion games.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quota_persuasion::binary::solve_binary;
use quota_persuasion::error::Error;
use quota_persuasion::lab::{
    check_structural_conditions, fuzz_monotonicity, repro_examples, Example, FuzzMode, FuzzOptions,
};
use quota_persuasion::model::{
    check_constraints, classify_instance, ConstraintProfile, InstanceFile,
};
use quota_persuasion::oracle::{default_grid, solve_exante_grid};
use quota_persuasion::rational::Rational;
use quota_persuasion::sender_lp::solve_expost;

const EXIT_INVALID: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_VIOLATIONS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qpersuade",
    version,
    about = "Sender-optimal signaling under receiver quotas, in exact arithmetic"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Binary,
    Expost,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Theorem2Binary,
    Prop3Ternary,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Sec31,
    Sec4,
    Coin,
    NonalignExact,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an instance and check its quotas.
    Check { file: PathBuf },
    /// Compute a sender-optimal scheme.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Grid resolution K for the grid oracle.
        #[arg(long)]
        grid: Option<u32>,
        /// Sender tolerance for the grid oracle's receiver-best selection.
        #[arg(long)]
        band: Option<Rational>,
    },
    /// Reproduce a worked example exactly.
    Repro {
        #[arg(value_enum)]
        which: Which,
        /// Receiver payoff for the mismatched conviction (default 1/100).
        #[arg(long)]
        eps: Option<Rational>,
    },
    /// Seeded monotonicity campaign.
    Fuzz {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        grid: Option<u32>,
        /// Ternary mode: skip the structural filter and inject the ternary
        /// worked example as trial 0.
        #[arg(long)]
        no_filter: bool,
        /// Override the slack below which decreases count as borderline.
        #[arg(long)]
        slack: Option<Rational>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InfeasibleConstraints(_) | Error::NotImplementable | Error::EmptyGrid { .. } => {
            EXIT_INFEASIBLE
        }
        _ => EXIT_INVALID,
    }
}

fn run(cli: &Cli) -> Result<(Value, u8), Error> {
    match &cli.command {
        Command::Check { file } => {
            let (inst, c) = InstanceFile::load(file)?.build()?;
            let c = c.unwrap_or_else(|| ConstraintProfile::vacuous(inst.actions()));
            let check = check_constraints(&c, &inst)?;
            let out = json!({
                "states": inst.states(),
                "actions": inst.actions(),
                "classification": classify_instance(&inst),
                "constraints": check,
                "structural": check_structural_conditions(&inst),
            });
            Ok((out, 0))
        }
        Command::Solve {
            file,
            method,
            grid,
            band,
        } => {
            let (inst, c) = InstanceFile::load(file)?.build()?;
            let c = c.unwrap_or_else(|| ConstraintProfile::vacuous(inst.actions()));
            let out = match method {
                Method::Binary => serde_json::to_value(solve_binary(&inst, &c)?)?,
                Method::Expost => serde_json::to_value(solve_expost(&inst, &c)?)?,
                Method::Grid => {
                    let k = grid.unwrap_or_else(|| default_grid(&inst));
                    let r = solve_exante_grid(&inst, &c, k, band.clone())?;
                    let mut v = serde_json::to_value(&r.best)?;
                    let obj = v.as_object_mut().expect("solutions serialize as objects");
                    obj.insert("grid".into(), json!(r.grid));
                    obj.insert("band".into(), json!(r.band));
                    obj.insert("grid_max_sender_eu".into(), json!(r.grid_max_sender_eu));
                    obj.insert("sender_upper_gap".into(), json!(r.sender_upper_gap));
                    obj.insert("receiver_resolution".into(), json!(r.receiver_resolution));
                    obj.insert("schemes_visited".into(), json!(r.visited));
                    v
                }
            };
            Ok((out, 0))
        }
        Command::Repro { which, eps } => {
            let which = match which {
                Which::Sec31 => Example::Sec31,
                Which::Sec4 => Example::Sec4,
                Which::Coin => Example::Coin,
                Which::NonalignExact => Example::NonalignExact,
            };
            let r = repro_examples(which, eps.clone())?;
            let code = if r.passed() { 0 } else { EXIT_VIOLATIONS };
            let mut v = serde_json::to_value(&r)?;
            v["status"] = json!(if r.passed() { "pass" } else { "fail" });
            Ok((v, code))
        }
        Command::Fuzz {
            mode,
            trials,
            seed,
            grid,
            no_filter,
            slack,
        } => {
            let mode = match mode {
                Mode::Theorem2Binary => FuzzMode::Theorem2Binary,
                Mode::Prop3Ternary => FuzzMode::Prop3Ternary,
            };
            let opts = FuzzOptions {
                grid: *grid,
                structural_filter: !no_filter,
                slack: slack.clone(),
                ..FuzzOptions::new(mode, *trials, *seed)
            };
            let r = fuzz_monotonicity(&opts)?;
            let code = if r.passed() { 0 } else { EXIT_VIOLATIONS };
            let mut v = serde_json::to_value(&r)?;
            v["violation_count"] = json!(r.violations.len());
            v["borderline_count"] = json!(r.borderline.len());
            Ok((v, code))
        }
    }
}

/// `(path, scalar)` pairs, paths joined with dots.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_owned()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => out.push((
            prefix.to_owned(),
            xs.iter().map(scalar).collect::<Vec<_>>().join(" "),
        )),
        Value::Array(xs) => xs
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        _ => out.push((prefix.to_owned(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("values serialize"),
        Format::Text | Format::Csv => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            if let Format::Text = format {
                rows.iter()
                    .map(|(k, x)| format!("{k}: {x}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            } else {
                std::iter::once("key,value".to_owned())
                    .chain(
                        rows.iter()
                            .map(|(k, x)| format!("{},{}", csv_field(k), csv_field(x))),
                    )
                    .collect::<Vec<_>>()
                    .join("\n")
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((v, code)) => {
            println!("{}", render(&v, cli.format));
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
