//! Batch experiment runner for convolution of measures over group actions.
//!
//! Exit codes: 0 all checks passed; 1 usage or configuration error; 2 a
//! check failed (an exact-mode violation or a statistical miss); 3 an
//! approximation request was unsolvable as posed.

mod config;
mod report;
mod runner;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use config::{load_scenario, Mode, Overrides, ReportFormat, Scenario};
use runner::{run_scenario, RunError};

#[derive(Parser)]
#[command(
    name = "convact",
    version,
    about = "Convolution of probability measures over group actions: \
             exact law verification, Monte Carlo experiments, reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the law-verification suites of one or more scenarios
    Verify(RunArgs),
    /// Approximate a measure's convolution action by an empirical average
    Approximate(RunArgs),
    /// Check the finite enveloping-semigroup equality on a simplex grid
    Ellis(RunArgs),
    /// Convolve two serialized measures through a system, one shot
    Convolve(ConvolveArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configs: paths, names under $CONVACT_SCENARIO_DIR, or
    /// built-in catalog names (z2-swap, z3-rotation, s3-natural,
    /// dihedral-4, circle-rotation-uniform)
    #[arg(long = "config", required = true, num_args = 1..)]
    configs: Vec<String>,
    /// Override the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the arithmetic mode
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Write the report here instead of the configured path (single scenario)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
    /// Run multiple scenarios in parallel (reports still written serially)
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct ConvolveArgs {
    /// Built-in system name or table file path
    #[arg(long)]
    system: String,
    /// Serialized measure on the group
    #[arg(long)]
    mu: PathBuf,
    /// Serialized measure on the space
    #[arg(long)]
    nu: PathBuf,
    /// Output path for the convolved measure (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(args) => run_batch("verify", args),
        Command::Approximate(args) => run_batch("approximate", args),
        Command::Ellis(args) => run_batch("ellis", args),
        Command::Convolve(args) => run_convolve(args),
    };
    ExitCode::from(code)
}

fn run_batch(command: &str, args: RunArgs) -> u8 {
    if args.configs.len() > 1 && args.out.is_some() {
        eprintln!("error: --out conflicts with multiple --config values");
        return 1;
    }
    let overrides = Overrides {
        seed: args.seed,
        mode: args.mode,
        out: args.out.clone(),
        format: args.format,
    };
    let mut scenarios = Vec::new();
    for name in &args.configs {
        match load_scenario(name, command, &overrides) {
            Ok(s) => scenarios.push(s),
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    }
    let outcomes: Vec<(usize, Result<report::Report, RunError>)> = if args.parallel {
        scenarios
            .par_iter()
            .enumerate()
            .map(|(i, s)| (i, run_scenario(s)))
            .collect()
    } else {
        scenarios
            .iter()
            .enumerate()
            .map(|(i, s)| (i, run_scenario(s)))
            .collect()
    };
    // report writing is serialized, in scenario order
    let mut worst = 0u8;
    for (index, outcome) in outcomes {
        let scenario = &scenarios[index];
        match outcome {
            Ok(rep) => {
                if let Err(e) = emit_report(scenario, &rep) {
                    eprintln!("error: {e}");
                    worst = worst.max(1);
                    continue;
                }
                if !rep.passed {
                    eprintln!(
                        "{}: FAILED ({})",
                        scenario.label,
                        failed_summary(&rep)
                    );
                    worst = worst.max(2);
                }
            }
            Err(RunError::Unsolvable(message)) => {
                eprintln!("{}: {message}", scenario.label);
                worst = worst.max(3);
            }
            Err(e) => {
                eprintln!("{}: {e}", scenario.label);
                worst = worst.max(1);
            }
        }
    }
    worst
}

fn failed_summary(rep: &report::Report) -> String {
    if let Some(suites) = &rep.suites {
        let failed: Vec<&str> = suites
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.name.as_str())
            .collect();
        return format!("suites: {}", failed.join(", "));
    }
    if rep.approximation.is_some() {
        return "approximation missed the neighborhood".to_string();
    }
    "ellis check failed".to_string()
}

fn emit_report(scenario: &Scenario, rep: &report::Report) -> std::io::Result<()> {
    let text = rep.render(scenario.format);
    match &scenario.output_path {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, text)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())
        }
    }
}

fn run_convolve(args: ConvolveArgs) -> u8 {
    match convolve_files(&args) {
        Ok(text) => match &args.out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    1
                }
            },
            None => {
                print!("{text}");
                0
            }
        },
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn convolve_files(args: &ConvolveArgs) -> Result<String, String> {
    use convact_core::convolution::convolve;
    use convact_core::io::{
        angle_point, index_point, measure_to_text_float, measure_to_text_rational, parse_measure,
        ParsedMeasure,
    };
    use convact_core::system::CircleRotation;

    let system = config::system_by_name(&args.system).map_err(|e| e.to_string())?;
    let mu_text = std::fs::read_to_string(&args.mu)
        .map_err(|e| format!("cannot read {}: {e}", args.mu.display()))?;
    let nu_text = std::fs::read_to_string(&args.nu)
        .map_err(|e| format!("cannot read {}: {e}", args.nu.display()))?;
    match system {
        config::SystemSpec::Finite { system, .. } => {
            let order = system.group().order();
            let space = system.space_size();
            let mu = parse_measure(&mu_text, move |t| {
                let i: usize = t.parse().map_err(|_| format!("bad element '{t}'"))?;
                if i >= order {
                    return Err(format!("element {i} out of group order {order}"));
                }
                Ok(convact_core::GroupIndex(i))
            })
            .map_err(|e| format!("{}: {e}", args.mu.display()))?;
            let nu = parse_measure(&nu_text, index_point(space))
                .map_err(|e| format!("{}: {e}", args.nu.display()))?;
            match (mu, nu) {
                (ParsedMeasure::Rational(mu), ParsedMeasure::Rational(nu)) => {
                    Ok(measure_to_text_rational(&convolve(&system, &mu, &nu)))
                }
                (ParsedMeasure::Float(mu), ParsedMeasure::Float(nu)) => {
                    Ok(measure_to_text_float(&convolve(&system, &mu, &nu)))
                }
                _ => Err("mu and nu use different arithmetic modes".to_string()),
            }
        }
        config::SystemSpec::Circle => {
            let mu = parse_measure(&mu_text, angle_point)
                .map_err(|e| format!("{}: {e}", args.mu.display()))?;
            let nu = parse_measure(&nu_text, angle_point)
                .map_err(|e| format!("{}: {e}", args.nu.display()))?;
            match (mu, nu) {
                (ParsedMeasure::Rational(mu), ParsedMeasure::Rational(nu)) => {
                    Ok(measure_to_text_rational(&convolve(&CircleRotation, &mu, &nu)))
                }
                (ParsedMeasure::Float(mu), ParsedMeasure::Float(nu)) => {
                    Ok(measure_to_text_float(&convolve(&CircleRotation, &mu, &nu)))
                }
                _ => Err("mu and nu use different arithmetic modes".to_string()),
            }
        }
    }
}
