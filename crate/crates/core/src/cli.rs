//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse or validation error,
//! 3 simulation or output error. Diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::coverage::{emit_report, evaluate_suite, read_matrix, render, ReportFormat, TestSuite};
use crate::mutation::{apply, canonical_operators, generate_mutants};
use crate::oracles::OracleThresholds;
use crate::planner::{plan, PlannerConfig, Weights};
use crate::scenario::parse_scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SIMULATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "weightcov", version, about = "Path-planner weight coverage via mutation analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan one scenario and write the ego path as CSV.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Apply a single mutation first, e.g. `3:0.5`.
        #[arg(long, value_name = "i:K", value_parser = parse_mutation)]
        mutate: Option<(usize, f64)>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the canonical mutants of a weight vector, one JSON file each.
    Mutants {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full mutation analysis over a suite.
    Analyze {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        theta_p: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_s: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_c: f64,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-render the coverage report of a finished analysis.
    Report {
        #[arg(long)]
        analysis: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

fn parse_mutation(s: &str) -> Result<(usize, f64), String> {
    let (i, k) = s.split_once(':').ok_or("expected i:K")?;
    let i: usize = i.trim().parse().map_err(|_| format!("bad weight index `{i}`"))?;
    let k: f64 = k.trim().parse().map_err(|_| format!("bad factor `{k}`"))?;
    Ok((i, k))
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn input(message: impl ToString) -> Failure {
    Failure { code: EXIT_INPUT, message: message.to_string() }
}

fn simulation(message: impl ToString) -> Failure {
    Failure { code: EXIT_SIMULATION, message: message.to_string() }
}

fn read(path: &FsPath) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_weights(path: &FsPath) -> Result<Weights, Failure> {
    Weights::from_json(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_config(path: Option<&FsPath>) -> Result<PlannerConfig, Failure> {
    let Some(path) = path else { return Ok(PlannerConfig::default()) };
    PlannerConfig::from_json(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &FsPath, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| simulation(format!("{}: {e}", path.display())))
}

pub fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Plan { scenario, weights, config, mutate, out } => {
            let s = parse_scenario(&read(&scenario)?).map_err(|e| input(format!("{}: {e}", scenario.display())))?;
            let mut w = load_weights(&weights)?;
            let cfg = load_config(config.as_deref())?;
            if let Some((i, k)) = mutate {
                w = apply(&w, i, k).map_err(input)?;
            }
            let path = plan(&s, &w, &cfg).map_err(simulation)?;
            write(&out, &path.to_csv_string())
        }
        Command::Mutants { weights, out } => {
            let w = load_weights(&weights)?;
            let mutants = generate_mutants(&w, &canonical_operators()).map_err(input)?;
            fs::create_dir_all(&out).map_err(|e| simulation(format!("{}: {e}", out.display())))?;
            for m in &mutants {
                write(&out.join(format!("{}.json", m.file_stem())), &(m.weights.to_json() + "\n"))?;
            }
            Ok(())
        }
        Command::Analyze { suite, weights, config, theta_p, theta_s, theta_c, jobs, out } => {
            let scenarios = TestSuite::load(&suite).map_err(input)?;
            let w = load_weights(&weights)?;
            let cfg = load_config(config.as_deref())?;
            let thresholds = OracleThresholds { theta_p, theta_s, theta_c };
            if !thresholds.is_valid() {
                return Err(input("thresholds must be finite and >= 0"));
            }
            let jobs = jobs
                .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
                .max(1);
            let matrix = evaluate_suite(&scenarios, &w, &canonical_operators(), &cfg, &thresholds, jobs).map_err(simulation)?;
            emit_report(&matrix, &out).map_err(simulation)?;
            Ok(())
        }
        Command::Report { analysis, format, out } => {
            let matrix = read_matrix(&analysis).map_err(input)?;
            let format = match format {
                Format::Csv => ReportFormat::Csv,
                Format::Text => ReportFormat::Text,
            };
            let text = render(&matrix, format);
            match out {
                Some(path) => write(&path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutation_argument() {
        assert_eq!(parse_mutation("3:0.5"), Ok((3, 0.5)));
        assert_eq!(parse_mutation("1:10"), Ok((1, 10.0)));
        assert!(parse_mutation("3").is_err());
        assert!(parse_mutation("x:1").is_err());
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run(["weightcov", "plan", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["weightcov"]), EXIT_USAGE);
        assert_eq!(run(["weightcov", "--help"]), EXIT_OK);
    }
}
