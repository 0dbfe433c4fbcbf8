use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use infospace::cli::emit::{canonical_json, write_outputs};
use infospace::cli::run::{run, RunOverrides, RunReport};
use infospace::cli::scenario::{load_scenario, LoadedScenario, Mode, Scenario};
use infospace::constants::UnitMode;
use infospace::error::Error;

const EXIT_GATE: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "infospace", version, about = "Information-space kinematics, fields and dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Unit system for the constants.
    #[arg(long, global = true, value_parser = ["si", "natural"])]
    units: Option<String>,
    /// Output directory; the report goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write CSV dumps of fields and tables.
    #[arg(long, global = true)]
    csv: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived constants.
    Constants,
    /// Run a scenario file.
    Run { scenario: PathBuf },
    /// Check a scenario file without running it.
    Validate { scenario: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let units = cli.units.as_deref().map(|u| u.parse::<UnitMode>().expect("validated by clap"));
    let overrides = RunOverrides { units, seed: cli.seed };
    match &cli.command {
        Command::Constants => {
            let loaded = LoadedScenario {
                scenario: Scenario::bare(Mode::Constants, units.unwrap_or(UnitMode::Natural)),
                base_dir: PathBuf::from("."),
            };
            execute(&loaded, &overrides, &cli)
        }
        Command::Run { scenario } => match load_checked(scenario) {
            Ok(loaded) => execute(&loaded, &overrides, &cli),
            Err(code) => code,
        },
        Command::Validate { scenario } => match load_checked(scenario) {
            Ok(loaded) => {
                println!("{}: valid ({} mode)", scenario.display(), loaded.scenario.mode.name());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
    }
}

fn load_checked(path: &Path) -> Result<LoadedScenario, ExitCode> {
    load_scenario(path).map_err(|e| {
        for line in e.to_string().lines() {
            eprintln!("error: {line}");
        }
        ExitCode::from(EXIT_INPUT)
    })
}

fn execute(loaded: &LoadedScenario, overrides: &RunOverrides, cli: &Cli) -> ExitCode {
    let start = Instant::now();
    let report = match run(loaded, overrides) {
        Ok(r) => r,
        Err(e @ (Error::Undersampled { .. } | Error::Convergence { .. })) => {
            eprintln!("gate failure: {e}");
            return ExitCode::from(EXIT_GATE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    if let Err(e) = emit(&report, cli) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    eprintln!("{}: {:.3} s", report.scenario.mode.name(), start.elapsed().as_secs_f64());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        for g in report.failed_gates() {
            eprintln!("gate failed: {} ({}): {:e} > {:e}", g.name, g.invariant, g.value, g.threshold);
        }
        ExitCode::from(EXIT_GATE)
    }
}

fn emit(report: &RunReport, cli: &Cli) -> infospace::error::Result<()> {
    let csv = cli.csv || report.scenario.output.csv;
    match &cli.out {
        Some(dir) => {
            for p in write_outputs(report, dir, csv)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print!("{}", canonical_json(&report.to_value()?)),
    }
    Ok(())
}
