//! `efcorr`: inspect, decompose, verify and optimize over the correlation
//! polytope of a two-player extensive-form game.

mod commands;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::{ObjectiveSpec, OptimizeOptions, Outcome, Source, VerifyOptions};
use report::{exit, CliError, Format};

#[derive(Parser, Debug)]
#[command(name = "efcorr", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Game file in the text format.
    #[arg(long, global = true, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Built-in example game: EX1, EX2 or EX3.
    #[arg(long, global = true, value_name = "NAME")]
    builtin: Option<String>,
    /// Generated Goofspiel game with K ranks.
    #[arg(long, global = true, value_name = "K")]
    goofspiel: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Feasibility tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Cap on enumerated plan pairs and deterministic points.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    cap: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural counts.
    Stats,
    /// Triangle-freeness; exits 1 with a witness if the game has a triangle.
    Check,
    /// Builds the scaled-extension program.
    Decompose {
        /// Write the program, one step per line, as the main output.
        #[arg(long)]
        dump: bool,
        /// Repeat the decomposition N times and report the mean.
        #[arg(long, value_name = "N")]
        bench: Option<u32>,
    },
    /// Checks the decomposition against the constraints and the plan-pair oracle.
    Verify {
        #[arg(long, default_value_t = 100)]
        samples: u32,
    },
    /// Optimizes a linear objective over the polytope.
    Optimize {
        #[command(flatten)]
        objective: ObjectiveArgs,
        #[arg(long, default_value_t = 100_000)]
        max_iters: u64,
        #[arg(long, default_value_t = 1e-4)]
        target_gap: f64,
        /// Print progress to stderr every N iterations.
        #[arg(long, value_name = "N")]
        progress: Option<u64>,
        /// Include the averaged plan in the report.
        #[arg(long)]
        plan: bool,
    },
    /// Writes the polytope and objective as a linear program.
    ExportLp {
        #[command(flatten)]
        objective: ObjectiveArgs,
    },
}

#[derive(Args, Debug)]
struct ObjectiveArgs {
    /// Weight on Player 1's payoff.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    w1: f64,
    /// Weight on Player 2's payoff.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    w2: f64,
    /// Coefficient file with `variable coefficient` lines; overrides the weights.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["w1", "w2"])]
    objective: Option<PathBuf>,
    #[arg(long)]
    minimize: bool,
}

impl ObjectiveArgs {
    fn spec(&self) -> ObjectiveSpec {
        ObjectiveSpec {
            w1: self.w1,
            w2: self.w2,
            file: self.objective.clone(),
            minimize: self.minimize,
        }
    }
}

impl Cli {
    fn source(&self) -> Result<Source, CliError> {
        let mut found = Vec::new();
        if let Some(p) = &self.input {
            found.push(Source::File(p.clone()));
        }
        if let Some(n) = &self.builtin {
            found.push(Source::Builtin(n.clone()));
        }
        if let Some(k) = self.goofspiel {
            found.push(Source::Goofspiel(k));
        }
        match found.len() {
            1 => Ok(found.pop().unwrap()),
            0 => Err(CliError::new(
                exit::USAGE,
                "one of --input, --builtin or --goofspiel is required",
            )),
            _ => Err(CliError::new(
                exit::USAGE,
                "--input, --builtin and --goofspiel are mutually exclusive",
            )),
        }
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::new(exit::USAGE, "--tol must be positive"));
    }
    let tree = commands::load(&cli.source()?)?;
    let outcome = match &cli.command {
        Command::Stats => commands::stats(&tree),
        Command::Check => commands::check(&tree),
        Command::Decompose { dump, bench } => commands::decompose_cmd(&tree, *dump, *bench)?,
        Command::Verify { samples } => commands::verify(
            &tree,
            &VerifyOptions {
                samples: *samples,
                seed: cli.seed,
                tol: cli.tol,
                cap: cli.cap,
            },
        )?,
        Command::Optimize {
            objective,
            max_iters,
            target_gap,
            progress,
            plan,
        } => {
            if target_gap.is_nan() || *target_gap < 0.0 {
                return Err(CliError::new(exit::USAGE, "--target-gap must be non-negative"));
            }
            commands::optimize_cmd(
                &tree,
                &objective.spec(),
                &OptimizeOptions {
                    max_iters: *max_iters,
                    target_gap: *target_gap,
                    seed: cli.seed,
                    progress: *progress,
                    plan: *plan,
                },
            )?
        }
        Command::ExportLp { objective } => commands::export_lp_cmd(&tree, &objective.spec())?,
    };
    emit(cli, outcome)
}

/// The artifact, if any, goes to `--output` or stdout. The report goes to
/// whichever of the two the artifact left free, else to stderr.
fn emit(cli: &Cli, outcome: Outcome) -> Result<i32, CliError> {
    let report = outcome.report.render(cli.format);
    let write_file = |path: &PathBuf, bytes: &[u8]| {
        fs::write(path, bytes).map_err(|e| CliError::new(exit::IO, format!("{}: {e}", path.display())))
    };
    let io_err = |e: io::Error| CliError::new(exit::IO, e.to_string());
    let mut stdout = io::stdout().lock();
    match (outcome.artifact, &cli.output) {
        (Some(bytes), Some(path)) => {
            write_file(path, &bytes)?;
            stdout.write_all(report.as_bytes()).map_err(io_err)?;
        }
        (Some(bytes), None) => {
            stdout.write_all(&bytes).map_err(io_err)?;
            io::stderr().write_all(report.as_bytes()).map_err(io_err)?;
        }
        (None, Some(path)) => write_file(path, report.as_bytes())?,
        (None, None) => stdout.write_all(report.as_bytes()).map_err(io_err)?,
    }
    stdout.flush().map_err(io_err)?;
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    ExitCode::from(code as u8)
}
