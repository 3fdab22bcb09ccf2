mod commands;
mod input;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use intensio::search::SearchBounds;
use intensio::{Caps, Theory};

/// Bounded model checking for modal logics of intensional groups.
#[derive(Debug, Parser)]
#[command(name = "intensio", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Nbhd,
    Rel,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Enumerate every model instead of one per world permutation class.
    #[arg(long)]
    no_symmetry: bool,
    /// Give up after this many seconds.
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,
}

impl RunArgs {
    fn bounds(&self, max_worlds: usize, max_relations: usize) -> SearchBounds {
        let mut b = SearchBounds::new(max_worlds, max_relations);
        if let Some(w) = self.workers {
            b.workers = w.max(1);
        }
        b.symmetry = !self.no_symmetry;
        b.time_limit = self.time_limit.map(Duration::from_secs_f64);
        b
    }
}

fn theory(s: &str) -> Result<Theory, String> {
    s.parse().map_err(|e: intensio::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula (or a group term) and print its canonical rendering.
    Parse {
        #[arg(long, value_parser = theory)]
        theory: Theory,
        /// Parse a group term instead of a formula.
        #[arg(long)]
        term: bool,
        #[arg(allow_hyphen_values = true)]
        text: String,
    },
    /// Evaluate formulas on a model document.
    ///
    /// The file may hold a relational model, a neighborhood model, a
    /// countermodel or a search report. Without formulas a countermodel is
    /// re-checked against its own formula. With --world the exit code is 1
    /// unless every formula holds there.
    Check {
        file: PathBuf,
        formulas: Vec<String>,
        #[arg(long)]
        world: Option<String>,
        /// Also print the truth set of every subformula.
        #[arg(long)]
        trace: bool,
    },
    /// Look for a countermodel within bounds, smallest models first.
    Search {
        #[arg(long, value_parser = theory)]
        theory: Theory,
        #[arg(long, allow_hyphen_values = true)]
        formula: String,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long = "max-rels", default_value_t = 2)]
        max_rels: usize,
        /// Exit 0 only if a countermodel is found.
        #[arg(long, conflicts_with = "expect_valid")]
        expect_countermodel: bool,
        /// Exit 0 only if no countermodel exists within the bounds.
        #[arg(long)]
        expect_valid: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Translate between relational and neighborhood model documents.
    Translate {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Complex algebra of a model's frame, or the ultrafilter frame of a
    /// two-sorted frame document with the canonical morphism check.
    #[command(group(ArgGroup::new("mode").required(true).args(["complex", "ultrafilter"])))]
    Dual {
        file: PathBuf,
        #[arg(long)]
        complex: bool,
        #[arg(long)]
        ultrafilter: bool,
    },
    /// Greatest bisimulation between two models, pairing group variables by name.
    Bisim {
        first: PathBuf,
        second: PathBuf,
        /// Compare these two worlds and report the least separating depth.
        #[arg(long, num_args = 2, value_names = ["W1", "W2"])]
        pair: Option<Vec<String>>,
        /// Largest depth tried for --pair (defaults to |W1|·|W2|).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Soundness harness, round trips and duality checks for one theory.
    Suite {
        #[arg(long, value_parser = theory)]
        theory: Theory,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long = "max-rels", default_value_t = 2)]
        max_rels: usize,
        /// Random samples for the round-trip and duality checks.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Closure set used in the completeness argument for distributed knowledge.
    Closure {
        #[arg(long, value_parser = theory, default_value = "csl")]
        theory: Theory,
        #[arg(allow_hyphen_values = true)]
        formula: String,
    },
}

/// Why a command could not produce a verdict.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Cap(String),
}

impl From<intensio::Error> for Failure {
    fn from(e: intensio::Error) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

/// `Ok(false)` is a logical failure: an unmet expectation or a failed check.
pub type Outcome = Result<bool, Failure>;

fn run(cli: Cli, caps: &Caps) -> Outcome {
    let fmt = cli.format;
    match cli.command {
        Command::Parse { theory, term, text } => commands::parse(fmt, theory, term, &text),
        Command::Check {
            file,
            formulas,
            world,
            trace,
        } => commands::check(fmt, &file, &formulas, world.as_deref(), trace, caps),
        Command::Search {
            theory,
            formula,
            max_worlds,
            max_rels,
            expect_countermodel,
            expect_valid,
            run,
        } => {
            let expect = match (expect_countermodel, expect_valid) {
                (true, _) => Some(true),
                (_, true) => Some(false),
                _ => None,
            };
            commands::search(fmt, theory, &formula, &run.bounds(max_worlds, max_rels), expect, caps)
        }
        Command::Translate { file, to } => commands::translate(&file, to),
        Command::Dual { file, complex, .. } => {
            if complex {
                commands::dual_complex(fmt, &file, caps)
            } else {
                commands::dual_ultrafilter(fmt, &file)
            }
        }
        Command::Bisim {
            first,
            second,
            pair,
            depth,
        } => commands::bisim(fmt, &first, &second, pair.as_deref(), depth),
        Command::Suite {
            theory,
            max_worlds,
            max_rels,
            samples,
            seed,
            run,
        } => suite::run(fmt, theory, &run.bounds(max_worlds, max_rels), samples, seed, caps),
        Command::Closure { theory, formula } => commands::closure(fmt, theory, &formula),
    }
}

fn main() -> ExitCode {
    // die quietly when stdout is closed, like other Unix filters
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let caps = match Caps::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli, &caps) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("resource limit: {msg}");
            ExitCode::from(3)
        }
    }
}
