mod analyze;
mod config;
mod error;
mod figures;
mod output;

use analyze::AnalyzeArgs;
use clap::{Parser, Subcommand};
use config::{output_dir, SimulateArgs};
use error::CliError;
use masersim_core::io::Manifest;
use masersim_core::sweep::{figure_preset, run_sweep, RunRecord, RunStatus, SweepSpec};
use output::{now, write_manifest, write_records, OutputSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Maser population and photon-number dynamics.
#[derive(Debug, Parser)]
#[command(name = "masersim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one model run and analyze it.
    Simulate(Box<SimulateArgs>),
    /// Regenerate a figure dataset (fig1..fig8).
    Figure {
        name: String,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep from a spec file or from an earlier manifest.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze an existing trajectory CSV.
    Analyze(Box<AnalyzeArgs>),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion)
                || e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            {
                e.exit();
            }
            return report(CliError::Config(e.to_string().trim_end().to_string()));
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Simulate(args) => simulate(&args),
        Command::Figure { name, jobs, out } => {
            let spec = figure_preset(&name)?;
            let dir = output_dir(out.as_deref(), None).join(&name);
            let records = run_and_write(&spec, jobs, &dir, Some(&name))?;
            fail_on_integration(&records)
        }
        Command::Sweep { spec, jobs, out } => {
            let spec = load_sweep_spec(&spec)?;
            let dir = output_dir(out.as_deref(), None);
            let records = run_and_write(&spec, jobs, &dir, None)?;
            fail_on_integration(&records)
        }
        Command::Analyze(args) => {
            let results = args.run()?;
            print_json(&results)?;
            match results.errors.iter().next() {
                Some((name, msg)) => Err(CliError::Analysis(format!("{name}: {msg}"))),
                None => Ok(()),
            }
        }
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let (spec, dir) = args.resolve()?;
    let started = now();
    let mut outcome = run_sweep(&spec, Some(1))?;
    if let Some(RunStatus::Failed { error }) = outcome.records.first().map(|r| &r.status) {
        return Err(CliError::Integration(error.clone()));
    }
    let mut out = OutputSet::new(&dir);
    write_records(&mut out, &spec, &mut outcome.records, true)?;
    let manifest = write_manifest(&mut out, &spec, outcome, started)?;
    let record = &manifest.records[0];
    print_json(&record.analyses)?;
    match record.analyses.errors.iter().next() {
        Some((name, msg)) => Err(CliError::Analysis(format!("{name}: {msg}"))),
        None => Ok(()),
    }
}

fn run_and_write(
    spec: &SweepSpec,
    jobs: Option<usize>,
    dir: &Path,
    figure: Option<&str>,
) -> Result<Vec<RunRecord>, CliError> {
    let started = now();
    let mut outcome = run_sweep(spec, jobs)?;
    let mut out = OutputSet::new(dir);
    write_records(&mut out, spec, &mut outcome.records, false)?;
    if let Some(name) = figure {
        if outcome.records.iter().all(RunRecord::is_ok) {
            figures::write_extras(name, &outcome.records, &mut out)?;
        }
    }
    let manifest = write_manifest(&mut out, spec, outcome, started)?;
    println!("{}", dir.join("manifest.json").display());
    Ok(manifest.records)
}

fn fail_on_integration(records: &[RunRecord]) -> Result<(), CliError> {
    let failed: Vec<String> = records
        .iter()
        .filter_map(|r| match &r.status {
            RunStatus::Failed { error } => Some(format!("run {}: {error}", r.index)),
            RunStatus::Ok => None,
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Integration(failed.join("; ")))
    }
}

/// Accepts either a bare sweep spec or a manifest, whose embedded spec is
/// rerun as is.
fn load_sweep_spec(path: &Path) -> Result<SweepSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let spec = if value.get("spec").is_some() {
        serde_json::from_value::<Manifest>(value).map(|m| m.spec)
    } else {
        serde_json::from_value::<SweepSpec>(value)
    }
    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}
