//! `ranksel`: runs one configured experiment and writes its rows.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ranksel_core::experiment::{run_experiment, write_output, ExperimentConfig, ExperimentKind, OutputFormat};
use ranksel_core::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Kind {
    StrategyMap,
    WelfareSweep,
    RegretCurve,
    MonotoneCheck,
    MarketSim,
    OracleDump,
}

impl From<Kind> for ExperimentKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::StrategyMap => ExperimentKind::StrategyMap,
            Kind::WelfareSweep => ExperimentKind::WelfareSweep,
            Kind::RegretCurve => ExperimentKind::RegretCurve,
            Kind::MonotoneCheck => ExperimentKind::MonotoneCheck,
            Kind::MarketSim => ExperimentKind::MarketSim,
            Kind::OracleDump => ExperimentKind::OracleDump,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ranksel", version, about = "Candidate selection experiments over noisy rankings")]
struct Args {
    /// Experiment to run; overrides `experiment` in the config.
    #[arg(value_enum)]
    kind: Kind,
    /// TOML config file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; defaults to `<kind>.<format>` in the working directory.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

fn exit_code(e: &Error) -> (u8, &'static str) {
    match e {
        Error::Capacity { .. } => (EXIT_CAPACITY, "capacity error"),
        Error::Config(_)
        | Error::InvalidInput(_)
        | Error::DegenerateParameters(_)
        | Error::DegenerateComparison(_) => (EXIT_USAGE, "usage error"),
        Error::ImpossibleStatus | Error::Io(_) => (EXIT_FAILURE, "runtime error"),
    }
}

fn run(args: Args) -> Result<serde_json::Value, Error> {
    let mut config = ExperimentConfig::from_path(&args.config)?;
    config.experiment = args.kind.into();
    if args.seed.is_some() {
        config.rng.seed = args.seed;
    }
    if let Some(f) = args.format {
        config.output.format = Some(match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        });
    }
    if args.out.is_some() {
        config.output.path = args.out;
    }
    if config.output.path.is_none() {
        let ext = match config.format() {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        config.output.path = Some(format!("{}.{ext}", config.experiment.as_str()));
    }
    config.check()?;
    let out = run_experiment(&config)?;
    write_output(&config, &out)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(summary) => {
            // A closed stdout is not a failure of the run itself.
            let _ = writeln!(std::io::stdout(), "{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (code, label) = exit_code(&e);
            eprintln!("ranksel: {label}: {e}");
            ExitCode::from(code)
        }
    }
}
