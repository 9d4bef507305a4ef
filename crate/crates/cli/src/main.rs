//! `pvg`: synthesis games for first-order specifications over data words.
//!
//! Every command prints a JSON report (or, with `--quiet`, a single verdict
//! token). Exit codes: 0 success, 1 I/O or other errors, 2 malformed input,
//! 3 budget refusal, 4 inconclusive.

mod commands;
mod inputs;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use inputs::{Caps, Inputs, Start};

#[derive(Parser, Debug)]
#[command(name = "pvg", version, about = "Synthesis games for first-order specifications over data words")]
struct Cli {
    /// Print only the verdict token.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for `decide` and `scan`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Budget for the command's search; overrides `PVG_BUDGET`.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Write the output here instead of stdout, atomically.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add wall-clock timings to the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Truth of a sentence on an execution.
    Check { formula: PathBuf, execution: PathBuf },
    /// Counting normal form of a class-only sentence.
    Normalize {
        formula: PathBuf,
        /// Letter-count bound; defaults to the formula's threshold.
        #[arg(long = "B")]
        bound: Option<u8>,
        /// Largest counting constant kept exact.
        #[arg(long)]
        mcap: Option<u32>,
    },
    /// A model of a sentence, or `unsat`.
    Sat {
        formula: PathBuf,
        /// Skip normal-form clauses needing more tokens than this on one profile.
        #[arg(long)]
        count_cap: Option<u32>,
    },
    /// The game of a sentence.
    Compile {
        formula: PathBuf,
        #[arg(long = "B")]
        bound: Option<u8>,
        /// Spell the acceptance condition out as normal-form rows.
        #[arg(long)]
        explicit: bool,
    },
    /// A sentence with the same winning configurations as a game.
    Invert { game: String },
    /// The winner from one initial configuration.
    Solve {
        game: String,
        #[command(flatten)]
        start: Start,
        #[command(flatten)]
        caps: Caps,
        /// Include a winning System strategy.
        #[arg(long)]
        emit_strategy: bool,
    },
    /// Whether System wins for some number of System tokens.
    Decide {
        /// A game file, `builtin:NAME`, or a formula file.
        input: String,
        #[arg(long, default_value_t = 0)]
        ke: u32,
        #[arg(long, default_value_t = 0)]
        kse: u32,
        /// Largest number of System tokens tried.
        #[arg(long)]
        n_max: Option<u64>,
        /// Largest constant of the acceptance condition, if not read off the game.
        #[arg(long)]
        k: Option<u32>,
        #[command(flatten)]
        caps: Caps,
    },
    /// Winners along one axis of initial configurations.
    Scan {
        game: String,
        /// `s`, `e` or `se`.
        #[arg(long)]
        axis: String,
        #[arg(long, default_value_t = 0)]
        from: u32,
        /// Last value, inclusive.
        #[arg(long)]
        to: u32,
        #[command(flatten)]
        start: Start,
        #[command(flatten)]
        caps: Caps,
    },
    /// Translate between plays and executions, or sample a random play.
    Simulate {
        game: String,
        /// A play JSON file to translate into an execution.
        #[arg(long, conflicts_with = "execution")]
        play: Option<PathBuf>,
        /// An execution file to translate into a play.
        #[arg(long)]
        execution: Option<PathBuf>,
        /// Moves of a random play, when neither file is given.
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[command(flatten)]
        start: Start,
        #[command(flatten)]
        caps: Caps,
    },
    /// The game encoding a two-counter machine.
    #[command(name = "encode-2cm")]
    Encode2cm { machine: PathBuf },
    /// Check a System strategy against every Environment reply.
    Verify {
        game: String,
        /// `builtin:NAME`, `tcm:MACHINE_FILE`, or a strategy JSON file.
        #[arg(long)]
        strategy: String,
        /// Step bound when searching for a halting run of the machine.
        #[arg(long, default_value_t = 10_000)]
        run_bound: usize,
        #[command(flatten)]
        start: Start,
        #[command(flatten)]
        caps: Caps,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Normalize { .. } => "normalize",
            Command::Sat { .. } => "sat",
            Command::Compile { .. } => "compile",
            Command::Invert { .. } => "invert",
            Command::Solve { .. } => "solve",
            Command::Decide { .. } => "decide",
            Command::Scan { .. } => "scan",
            Command::Simulate { .. } => "simulate",
            Command::Encode2cm { .. } => "encode-2cm",
            Command::Verify { .. } => "verify",
        }
    }
}

/// A failed invocation and its exit code.
#[derive(Debug)]
pub struct Fail {
    code: u8,
    message: String,
    /// Partial result to report alongside the error.
    report: Option<Value>,
}

impl Fail {
    pub fn io(message: impl Into<String>) -> Fail {
        Fail { code: 1, message: message.into(), report: None }
    }

    pub fn parse(message: impl Into<String>) -> Fail {
        Fail { code: 2, message: message.into(), report: None }
    }

    pub fn budget(message: impl Into<String>) -> Fail {
        Fail { code: 3, message: message.into(), report: None }
    }

    pub fn inconclusive(message: impl Into<String>, report: Value) -> Fail {
        Fail { code: 4, message: message.into(), report: Some(report) }
    }
}

/// What a command produced.
pub struct Output {
    pub result: Value,
    /// Printed alone under `--quiet`.
    pub token: String,
    /// A file-like product (game, formula) printed or written in place of the report.
    pub artifact: Option<String>,
}

/// Settings shared by all commands.
pub struct Global {
    pub jobs: usize,
    pub seed: u64,
    pub budget: Option<usize>,
    pub quiet: bool,
}

impl Global {
    /// The explicit `--budget`, else `PVG_BUDGET`, else `default`.
    pub fn budget_or(&self, default: usize) -> Result<usize, Fail> {
        if let Some(b) = self.budget {
            return Ok(b);
        }
        match std::env::var("PVG_BUDGET") {
            Ok(v) => v.trim().parse().map_err(|_| Fail::parse(format!("PVG_BUDGET is not a number: `{v}`"))),
            Err(_) => Ok(default),
        }
    }
}

fn write_atomically(path: &Path, text: &str) -> Result<(), Fail> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let err = |e: std::io::Error| Fail::io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(text.as_bytes()).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

fn report(command: &str, digest: &str, result: Value, millis: Option<u128>) -> String {
    let mut v = json!({
        "command": command,
        "inputs_digest": digest,
        "result": result,
        "tool_version": env!("CARGO_PKG_VERSION"),
    });
    if let Some(ms) = millis {
        v["timings"] = json!({"total_ms": ms});
    }
    let mut text = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    text.push('\n');
    text
}

fn run(cli: Cli) -> Result<(), Fail> {
    let start = Instant::now();
    let name = cli.command.name();
    let mut inputs = Inputs::new(name, &format!("{:?}", cli.command));
    let global = Global { jobs: cli.jobs.max(1), seed: cli.seed, budget: cli.budget, quiet: cli.quiet };
    let outcome = commands::dispatch(&cli.command, &mut inputs, &global);
    let millis = cli.timings.then(|| start.elapsed().as_millis());
    let out = match outcome {
        Ok(out) => out,
        Err(mut fail) => {
            if let Some(result) = fail.report.take() {
                if cli.quiet {
                    println!("inconclusive");
                } else {
                    print!("{}", report(name, &inputs.digest(), result, millis));
                }
            }
            return Err(fail);
        }
    };
    match (&out.artifact, &cli.out) {
        (Some(text), Some(path)) => {
            write_atomically(path, text)?;
            if cli.quiet {
                println!("{}", out.token);
            } else {
                print!("{}", report(name, &inputs.digest(), out.result, millis));
            }
        }
        (Some(text), None) => print!("{text}"),
        (None, Some(path)) => {
            write_atomically(path, &report(name, &inputs.digest(), out.result, millis))?;
            if cli.quiet {
                println!("{}", out.token);
            }
        }
        (None, None) if cli.quiet => println!("{}", out.token),
        (None, None) => print!("{}", report(name, &inputs.digest(), out.result, millis)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            ExitCode::from(fail.code)
        }
    }
}
