//! Command-line front end: decide and eliminate formulas, compare the
//! engine against the brute-force oracle, and run the hereditarily-finite
//! set verification suites.
//!
//! Exit codes: 0 true / all-pass, 1 false verdict, 2 syntax or usage
//! error, 3 verification counterexample, 4 node budget exhausted.

use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mereo::engine::{self, EngineConfig, EngineError};
use mereo::finmodel::{self, EquivalenceOutcome};
use mereo::formula::{parse, Formula};
use mereo::generator;
use mereo::hfsets::{self, HfUniverse, Report};

const SCHEMA: &str = "mereo/1";

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "mereo", version, about = "Decision procedure for the first-order theory of set inclusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Include the stage-by-stage elimination trace.
    #[arg(long, global = true)]
    trace: bool,

    /// Node budget for quantifier elimination.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,

    /// Seed for every randomized component.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// oracle-compare: number of random formulas; hf-verify: cap on
    /// checked pairs per sweep (exhaustive when the square fits).
    #[arg(long, global = true, default_value_t = 500)]
    count: u64,

    /// Universe size for sampled oracle assignments.
    #[arg(long, global = true, default_value_t = 8)]
    universe_size: u32,

    /// Maximum rank of the hereditarily finite universe (at most 4).
    #[arg(long, global = true, default_value_t = 3)]
    max_rank: u32,

    /// The parameter set z in brace notation, e.g. "{}" or "{{}}".
    #[arg(long, global = true, default_value = "{}")]
    z: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a sentence; exits 0 when true, 1 when false.
    Decide {
        /// Sentence text, @file, or "-" for stdin.
        input: String,
    },
    /// Print a quantifier-free equivalent of a formula.
    Eliminate {
        /// Formula text, @file, or "-" for stdin.
        input: String,
    },
    /// Check eliminate against brute-force evaluation on random formulas.
    OracleCompare,
    /// Run the hereditarily-finite-set verification suites.
    HfVerify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match &cli.command {
        Command::Decide { input } => cmd_decide(&cli, input, started),
        Command::Eliminate { input } => cmd_eliminate(&cli, input, started),
        Command::OracleCompare => cmd_oracle_compare(&cli, started),
        Command::HfVerify => cmd_hf_verify(&cli, started),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("mereo: {message}");
            ExitCode::from(code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn engine_failure(err: EngineError) -> Failure {
    let code = match err {
        EngineError::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_USAGE,
    };
    Failure { code, message: err.to_string() }
}

fn read_input(input: &str) -> Result<String, Failure> {
    if input == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| usage(format!("cannot read stdin: {e}")))?;
        Ok(buf)
    } else if let Some(path) = input.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))
    } else {
        Ok(input.to_string())
    }
}

fn parse_input(input: &str) -> Result<Formula, Failure> {
    let text = read_input(input)?;
    parse(&text).map_err(|e| usage(e.to_string()))
}

#[derive(Serialize)]
struct DecideOutput<'a> {
    schema: &'static str,
    command: &'static str,
    sentence: String,
    verdict: bool,
    stages: usize,
    elapsed_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a engine::EliminationTrace>,
}

fn cmd_decide(cli: &Cli, input: &str, started: Instant) -> Result<u8, Failure> {
    let sentence = parse_input(input)?;
    let cfg = EngineConfig { max_nodes: cli.budget };
    let decision = engine::decide(&sentence, &cfg).map_err(engine_failure)?;
    match cli.format {
        Format::Text => {
            if cli.trace {
                for entry in &decision.trace {
                    println!("{}: {}  =>  {}", entry.stage, entry.before, entry.after);
                }
            }
            println!("{}", decision.verdict);
        }
        Format::Json => {
            let out = DecideOutput {
                schema: SCHEMA,
                command: "decide",
                sentence: sentence.to_string(),
                verdict: decision.verdict,
                stages: decision.trace.len(),
                elapsed_ms: started.elapsed().as_millis(),
                trace: cli.trace.then_some(&decision.trace),
            };
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        }
    }
    Ok(if decision.verdict { 0 } else { EXIT_FALSE })
}

#[derive(Serialize)]
struct EliminateOutput<'a> {
    schema: &'static str,
    command: &'static str,
    input: String,
    result: String,
    stages: usize,
    elapsed_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a engine::EliminationTrace>,
}

fn cmd_eliminate(cli: &Cli, input: &str, started: Instant) -> Result<u8, Failure> {
    let formula = parse_input(input)?;
    let cfg = EngineConfig { max_nodes: cli.budget };
    let (eliminated, trace) = engine::eliminate_traced(&formula, &cfg).map_err(engine_failure)?;
    let result = engine::canonicalize(&eliminated);
    match cli.format {
        Format::Text => {
            if cli.trace {
                for entry in &trace {
                    println!("{}: {}  =>  {}", entry.stage, entry.before, entry.after);
                }
            }
            println!("{result}");
        }
        Format::Json => {
            let out = EliminateOutput {
                schema: SCHEMA,
                command: "eliminate",
                input: formula.to_string(),
                result: result.to_string(),
                stages: trace.len(),
                elapsed_ms: started.elapsed().as_millis(),
                trace: cli.trace.then_some(&trace),
            };
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct OracleCounterexample {
    formula: String,
    eliminated: String,
    assignment: BTreeMap<String, String>,
    formula_value: bool,
    eliminated_value: bool,
}

#[derive(Serialize)]
struct OracleOutput {
    schema: &'static str,
    command: &'static str,
    count: u64,
    seed: u64,
    universe_size: u32,
    checked: u64,
    all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<OracleCounterexample>,
    elapsed_ms: u128,
}

fn cmd_oracle_compare(cli: &Cli, started: Instant) -> Result<u8, Failure> {
    let cfg = EngineConfig { max_nodes: cli.budget };
    let profile = generator::open_formula_profile();
    let corpus = generator::generate_corpus(cli.seed, cli.count as usize, &profile);
    let mut counterexample = None;
    let mut checked = 0u64;
    for (i, f) in corpus.iter().enumerate() {
        let eliminated = engine::eliminate(f, &cfg).map_err(engine_failure)?;
        let outcome = finmodel::check_equivalence(
            f,
            &eliminated,
            20,
            cli.universe_size,
            cli.seed.wrapping_add(i as u64),
        )
        .map_err(|e| usage(e.to_string()))?;
        checked += 1;
        if let EquivalenceOutcome::Counterexample { assignment, left, right } = outcome {
            counterexample = Some(OracleCounterexample {
                formula: f.to_string(),
                eliminated: eliminated.to_string(),
                assignment: assignment.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
                formula_value: left,
                eliminated_value: right,
            });
            break;
        }
    }
    let all_pass = counterexample.is_none();
    match cli.format {
        Format::Text => match &counterexample {
            None => println!(
                "oracle-compare: {checked}/{} formulas agree with the oracle (seed {})",
                cli.count, cli.seed
            ),
            Some(ce) => {
                println!("oracle-compare: disagreement on formula {}", ce.formula);
                println!("  eliminated: {}", ce.eliminated);
                for (var, set) in &ce.assignment {
                    println!("  {var} = {set}");
                }
                println!("  formula: {}, eliminated: {}", ce.formula_value, ce.eliminated_value);
            }
        },
        Format::Json => {
            let out = OracleOutput {
                schema: SCHEMA,
                command: "oracle-compare",
                count: cli.count,
                seed: cli.seed,
                universe_size: cli.universe_size,
                checked,
                all_pass,
                counterexample,
                elapsed_ms: started.elapsed().as_millis(),
            };
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        }
    }
    Ok(if all_pass { 0 } else { EXIT_COUNTEREXAMPLE })
}

#[derive(Serialize)]
struct HfOutput {
    schema: &'static str,
    command: &'static str,
    max_rank: u32,
    z: String,
    count: u64,
    seed: u64,
    all_pass: bool,
    reports: Vec<Report>,
    elapsed_ms: u128,
}

fn cmd_hf_verify(cli: &Cli, started: Instant) -> Result<u8, Failure> {
    if cli.max_rank > hfsets::MAX_RANK {
        return Err(usage(format!(
            "--max-rank {} exceeds the feasibility cap of {}",
            cli.max_rank,
            hfsets::MAX_RANK
        )));
    }
    let mut universe = HfUniverse::new();
    let z = universe.parse(&cli.z).map_err(|e| usage(e.to_string()))?;
    let ru = universe.rank_universe(cli.max_rank).map_err(|e| usage(e.to_string()))?;
    let pair_cap = cli.count.max(1);
    let mut reports = Vec::new();
    reports.push(
        hfsets::verify_same_inclusion(&mut universe, &ru, z, pair_cap, cli.seed)
            .map_err(|e| usage(e.to_string()))?,
    );
    reports.push(
        hfsets::verify_automorphism(&mut universe, &ru, z, pair_cap, cli.seed)
            .map_err(|e| usage(e.to_string()))?,
    );
    reports.push(
        hfsets::verify_eta_star(&mut universe, &ru, z, pair_cap, cli.seed)
            .map_err(|e| usage(e.to_string()))?,
    );
    reports.push(hfsets::verify_singleton_interdef(&mut universe, &ru, pair_cap, cli.seed));
    let all_pass = reports.iter().all(Report::passed);
    match cli.format {
        Format::Text => {
            for r in &reports {
                let detail = match &r.counterexample {
                    Some(ce) => format!(" [{ce}]"),
                    None => String::new(),
                };
                println!("{}: {} ({} pairs){detail}", r.check, r.verdict, r.pairs_checked);
            }
        }
        Format::Json => {
            let out = HfOutput {
                schema: SCHEMA,
                command: "hf-verify",
                max_rank: cli.max_rank,
                z: universe.render(z),
                count: cli.count,
                seed: cli.seed,
                all_pass,
                reports,
                elapsed_ms: started.elapsed().as_millis(),
            };
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        }
    }
    Ok(if all_pass { 0 } else { EXIT_COUNTEREXAMPLE })
}
