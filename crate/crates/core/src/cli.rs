//! Command-line front end. Payload goes to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::binmaps::monomial_maps;
use crate::counts::{mixed_volume, total_degree, CountError};
use crate::families::{family, Family};
use crate::homotopy::seeded_gamma_homotopy;
use crate::parse::{format_system, read_system_file, write_system_file};
use crate::poly::PolySystem;
use crate::solio::{coordinates_over, format_solution, format_solutions, parse_solutions, to_json};
use crate::solver::{resolve_seed, seeded_rng, solve, SolveOptions};
use crate::tracker::{PathStatus, PathTracker, TrackError, TrackSettings};
use crate::witness::{cascade, format_witness_set, witness_set, WitnessError};

pub const SEED_VARIABLE: &str = "HELIOS_SEED";

#[derive(Debug, Parser)]
#[command(name = "helios", version, about = "Polynomial homotopy continuation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a square system with the blackbox solver
    Solve {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Print a JSON report instead of solution blocks
        #[arg(long)]
        json: bool,
        /// Worker threads for path tracking
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        tasks: u64,
        /// Suppress the summary on stderr
        #[arg(long)]
        quiet: bool,
    },
    /// Print the total degree and the mixed volume
    Mixvol { file: PathBuf },
    /// Track paths from given start solutions
    Track {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        sols: PathBuf,
        /// Print every accepted point as a JSON line
        #[arg(long)]
        step: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compute a witness set of the given dimension
    Witness {
        file: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the cascade from the top dimension down
    Cascade {
        file: PathBuf,
        #[arg(long)]
        top: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monomial maps of a binomial system
    Maps { file: PathBuf },
    /// Write a benchmark system (cyclic, noon)
    Family {
        name: String,
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    /// Bad invocation or unusable input; exit code 2.
    Usage(String),
    /// The computation did not produce an answer; exit code 1.
    Math(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn math(e: impl ToString) -> Failure {
    Failure::Math(e.to_string())
}

fn env_seed(flag: Option<u64>) -> Result<Option<u64>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(SEED_VARIABLE) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| usage(format!("{SEED_VARIABLE} is not a seed: `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn read(path: &Path) -> Result<PolySystem, Failure> {
    read_system_file(path).map_err(usage)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(math)
}

/// Runs one invocation; `args` includes the program name. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Math(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Solve { file, seed, json, tasks, quiet } => {
            let s = read(&file)?;
            let options = SolveOptions { seed: env_seed(seed)?, tasks: tasks as usize, silent: quiet, ..Default::default() };
            let report = solve(&s, &options).map_err(|e| match e {
                crate::solver::SolveError::NonSquare { .. } | crate::solver::SolveError::ZeroEquation(_) => usage(e),
                e => math(e),
            })?;
            if json {
                emit(out, &(to_json(&report) + "\n"))?;
            } else {
                emit(out, &format_solutions(&report.solutions))?;
            }
            if report.solutions.is_empty() {
                return Err(math("no path converged"));
            }
            Ok(())
        }
        Command::Mixvol { file } => {
            let s = read(&file)?;
            let count_failure = |e: CountError| match e {
                CountError::NonSquare { .. } => usage(e),
                e => math(e),
            };
            let td = total_degree(&s).map_err(count_failure)?;
            let mv = mixed_volume(&s).map_err(count_failure)?;
            emit(out, &format!("total degree: {td}\nmixed volume: {mv}\n"))
        }
        Command::Track { target, start, sols, step, seed } => {
            let f = read(&target)?;
            let g = read(&start)?;
            let text = std::fs::read_to_string(&sols).map_err(|e| usage(format!("{}: {e}", sols.display())))?;
            let starts = parse_solutions(&text).map_err(|e| usage(format!("{}: {e}", sols.display())))?;
            let seed = resolve_seed(env_seed(seed)?);
            let vars = f.variables().clone();
            let h = seeded_gamma_homotopy(f, &g, seed).map_err(usage)?;
            let mut converged = 0;
            let mut blocks = Vec::new();
            for (i, sol) in starts.iter().enumerate() {
                let x = coordinates_over(sol, &vars).map_err(usage)?;
                let mut tracker = PathTracker::new(&h, &x, TrackSettings::default()).map_err(|e| match e {
                    TrackError::OffPath(_) => usage(format!("start solution {}: {e}", i + 1)),
                    e => math(e),
                })?;
                for p in tracker.by_ref() {
                    if step {
                        let line = json!({
                            "path": i + 1,
                            "t": p.t,
                            "step_used": p.step_used,
                            "corrector_iterations": p.corrector_iterations,
                            "corrector_residual": p.corrector_residual,
                            "x": p.x.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
                        });
                        emit(out, &format!("{line}\n"))?;
                    }
                }
                let outcome = tracker.try_outcome().expect("finished path");
                match (outcome.status, outcome.endpoint) {
                    (PathStatus::Converged, Some(sol)) => {
                        converged += 1;
                        if step {
                            emit(out, &format!("{}\n\n", format_solution(&sol)))?;
                        } else {
                            blocks.push(sol);
                        }
                    }
                    (status, _) => {
                        let _ = writeln!(err, "path {}: {status:?} at t = {}", i + 1, outcome.last.0);
                    }
                }
            }
            emit(out, &format_solutions(&blocks))?;
            if converged == 0 {
                return Err(math("no path converged"));
            }
            Ok(())
        }
        Command::Witness { file, dim, seed } => {
            let s = read(&file)?;
            let seed = resolve_seed(env_seed(seed)?);
            let w = witness_set(&s, dim, &mut seeded_rng(seed), &SolveOptions::default()).map_err(witness_failure)?;
            emit(out, &format_witness_set(&w))
        }
        Command::Cascade { file, top, seed } => {
            let s = read(&file)?;
            let seed = resolve_seed(env_seed(seed)?);
            let result = cascade(&s, top, &mut seeded_rng(seed), &SolveOptions::default()).map_err(witness_failure)?;
            let mut sections = Vec::new();
            for (d, level) in result.levels.iter().rev() {
                let mut text = format!("dimension {d}\n{}\n", level.candidates.len());
                if !level.candidates.is_empty() {
                    text.push('\n');
                    text.push_str(&format_solutions(&level.candidates));
                }
                if !level.ambiguous.is_empty() {
                    let _ = writeln!(err, "dimension {d}: {} ambiguous points", level.ambiguous.len());
                }
                sections.push(text);
            }
            emit(out, &sections.join("\n"))
        }
        Command::Maps { file } => {
            let s = read(&file)?;
            let maps = monomial_maps(&s).map_err(usage)?;
            let text: String = maps.iter().map(|m| format!("{m}\n")).collect();
            emit(out, &text)
        }
        Command::Family { name, n, output } => {
            let kind: Family = name.parse().map_err(usage)?;
            let s = family(kind, n).map_err(usage)?;
            match output {
                Some(path) => write_system_file(&s, path).map_err(math),
                None => emit(out, &format_system(&s)),
            }
        }
    }
}

fn witness_failure(e: WitnessError) -> Failure {
    match e {
        WitnessError::Dimension { .. } | WitnessError::TooFewEquations { .. } => usage(e),
        e => math(e),
    }
}
