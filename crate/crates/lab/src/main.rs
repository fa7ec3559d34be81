use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rwrs_lab::{emit, run, Experiment, ExperimentSpec, Format, LabError, Preset};

/// Monte Carlo experiments for random walks in random scenery.
///
/// Exit status: 0 when the run completed with no statistical flag, 1 on a
/// configuration or I/O error, 2 when a statistical flag was raised.
#[derive(Debug, Parser)]
#[command(name = "rwrs", version)]
struct Cli {
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON experiment spec; defaults come from --preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "quick")]
    preset: Preset,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn spec_for(cli: &Cli) -> Result<ExperimentSpec, LabError> {
    let mut spec = match &cli.config {
        Some(path) => {
            let spec = ExperimentSpec::from_json(&std::fs::read_to_string(path)?)?;
            if spec.experiment != cli.experiment {
                return Err(LabError::Config(format!(
                    "config describes {}, not {}",
                    spec.experiment.name(),
                    cli.experiment.name()
                )));
            }
            spec
        }
        None => ExperimentSpec::preset(cli.experiment, cli.preset),
    };
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(workers) = cli.workers {
        spec.workers = workers;
    }
    spec.validate()?;
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = spec_for(&cli).and_then(|spec| {
        let report = run(&spec)?;
        match &cli.out {
            Some(path) => emit(&report, cli.format, path)?,
            None => match cli.format {
                Format::Csv => print!("{}", report.to_csv()?),
                Format::Json => println!("{}", report.to_json()?),
            },
        }
        Ok(report)
    });
    match result {
        Ok(report) => {
            for flag in &report.flags {
                eprintln!("flag: {flag}");
            }
            if report.flagged() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
