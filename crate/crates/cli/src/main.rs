//! `qqb` - command-line front end for the qubit-qutrit quantum battery
//! simulator.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical-invariant violation,
//! 3 io error. Diagnostics go to stderr; data goes to the `--out` path or
//! stdout.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use qqb_core::audit::{run_audit, write_report, write_report_to_path, AuditConfig};
use qqb_core::config::{apply_config_str, to_config_string};
use qqb_core::scenario::{
    base_scenario, preset, preset_names, run, write_csv, write_json, write_to_path, OutputFormat,
    Scenario,
};
use qqb_core::{Backend, CoherenceBasis, Error, EvolutionMode};

#[derive(Parser)]
#[command(
    name = "qqb",
    version,
    about = "Hybrid qubit-qutrit Heisenberg-dimer quantum battery simulator",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its observable table.
    Simulate(RunArgs),
    /// Run a scenario that must carry a sweep axis.
    Sweep(RunArgs),
    /// Print the resolved config of a named preset.
    Preset {
        /// One of: fig1 fig2 fig3 fig4 fig7 fig8 nickel_T nickel_B.
        name: String,
        /// Destination path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate the closed-form and numeric backends on a random
    /// parameter grid and write the discrepancy report.
    Audit {
        /// Grid spec, currently `random:<points>`.
        #[arg(long, default_value = "random:100")]
        grid: String,
        /// Seed for the parameter grid.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Destination path for the report JSON; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print version information.
    Version,
}

#[derive(Args)]
struct RunArgs {
    /// Start from a named preset.
    #[arg(long)]
    preset: Option<String>,
    /// Apply a key-value config file (over the preset, when both given).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Destination path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Evolution mode: charger-only or total.
    #[arg(long)]
    mode: Option<String>,
    /// Evolution backend: numeric or closed-form.
    #[arg(long)]
    backend: Option<String>,
    /// Coherence reference basis: computational or eigen.
    #[arg(long)]
    coherence_basis: Option<String>,
}

fn resolve_scenario(args: &RunArgs) -> Result<Scenario, Error> {
    let mut scenario = match &args.preset {
        Some(name) => preset(name)?,
        None => base_scenario(),
    };
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        scenario = apply_config_str(&text, &scenario)?;
    }
    if let Some(mode) = &args.mode {
        scenario.mode = match mode.as_str() {
            "charger-only" => EvolutionMode::ChargerOnly,
            "total" => EvolutionMode::TotalHamiltonian,
            other => {
                return Err(Error::InvalidScenario(format!(
                    "unknown mode '{other}' (expected charger-only or total)"
                )))
            }
        };
    }
    if let Some(backend) = &args.backend {
        scenario.backend = match backend.as_str() {
            "numeric" => Backend::Numeric,
            "closed-form" => Backend::ClosedForm,
            other => {
                return Err(Error::InvalidScenario(format!(
                    "unknown backend '{other}' (expected numeric or closed-form)"
                )))
            }
        };
    }
    if let Some(basis) = &args.coherence_basis {
        scenario.coherence_basis = match basis.as_str() {
            "computational" => CoherenceBasis::Computational,
            "eigen" => CoherenceBasis::BatteryEigenbasis,
            other => {
                return Err(Error::InvalidScenario(format!(
                    "unknown coherence basis '{other}' (expected computational or eigen)"
                )))
            }
        };
    }
    scenario.validate()?;
    Ok(scenario)
}

fn run_scenario(args: &RunArgs, require_sweep: bool) -> Result<(), Error> {
    let scenario = resolve_scenario(args)?;
    if require_sweep && scenario.sweep.is_none() {
        return Err(Error::InvalidScenario(
            "the sweep command needs a scenario with a sweep axis (set sweep_param/sweep_values or use a sweeping preset)"
                .into(),
        ));
    }
    let format = OutputFormat::from_str(&args.format)?;
    let table = run(&scenario)?;
    match &args.out {
        Some(path) => {
            write_to_path(&table, format, path)?;
            eprintln!(
                "wrote {} rows ({} sweep branches) to {}",
                table.rows.len(),
                table.metadata.sweep_values.len().max(1),
                path.display()
            );
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match format {
                OutputFormat::Csv => write_csv(&table, &mut lock).map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })?,
                OutputFormat::Json => write_json(&table, &mut lock)?,
            }
        }
    }
    Ok(())
}

fn parse_grid_spec(spec: &str) -> Result<usize, Error> {
    match spec.split_once(':') {
        Some(("random", n)) => n
            .parse::<usize>()
            .map_err(|_| Error::InvalidScenario(format!("bad grid size in '{spec}'"))),
        _ => Err(Error::InvalidScenario(format!(
            "unknown grid spec '{spec}' (expected random:<points>)"
        ))),
    }
}

fn run_command(command: Command) -> Result<(), Error> {
    match command {
        Command::Simulate(args) => run_scenario(&args, false),
        Command::Sweep(args) => run_scenario(&args, true),
        Command::Preset { name, out } => {
            let scenario = preset(&name)?;
            let text = to_config_string(&scenario);
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    source: e,
                })?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Audit { grid, seed, out } => {
            let points = parse_grid_spec(&grid)?;
            let report = run_audit(&AuditConfig { points, seed })?;
            match out {
                Some(path) => {
                    write_report_to_path(&report, &path)?;
                    eprintln!("wrote discrepancy report to {}", path.display());
                }
                None => {
                    let stdout = std::io::stdout();
                    write_report(&report, stdout.lock())?;
                }
            }
            eprintln!(
                "audit over {} points (seed {}): thermal max |closed - numeric| = {:.3e}, spectrum max = {:.3e}",
                report.points,
                report.seed,
                report.thermal_state.max_abs_deviation,
                report.spectrum.max_abs_deviation,
            );
            if report.passes {
                Ok(())
            } else {
                Err(Error::InvariantViolation(format!(
                    "{} thermal-state entries deviate beyond {:.1e}; see the report",
                    report.thermal_state.violations.len(),
                    qqb_core::audit::THERMAL_AGREEMENT_TOL,
                )))
            }
        }
        Command::Version => {
            println!("qqb {}", env!("CARGO_PKG_VERSION"));
            println!("presets: {}", preset_names().join(" "));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                _ => {
                    let _ = write!(std::io::stderr(), "{err}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
