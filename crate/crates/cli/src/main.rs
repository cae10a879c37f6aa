use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use dotprobe_cli::config::{self, ParamMap, RunMode, ScenarioName};
use dotprobe_cli::scenario::run_scenario;
use dotprobe_cli::table::Table;
use dotprobe_cli::{commands, ParamValue};

/// Transport in detector-coupled quantum dots: evolutions, stationary
/// states, parameter sweeps and named studies, emitted as CSV.
#[derive(Parser)]
#[command(name = "dotprobe", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Sectioned config file ([model], [params], [run])
    #[arg(long)]
    config: PathBuf,
    /// Override a config key: --set gamma_L=50, --set run.tmax=20
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the density vector over a time grid
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
        /// Propagation route: exact | rk-adaptive
        #[arg(long)]
        method: Option<String>,
        /// Integrator tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Solve the stationary state
    Steady {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Scan one parameter and tabulate stationary currents
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a named study: fig3 | zeno | noninvasive | reduction
    Scenario {
        name: String,
        /// Optional config file; its [params] override the study defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a parameter or run key
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output CSV path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Evolve { common, method, tol } => {
            let mut overrides = common.set.clone();
            // Mode and flag overrides win over the config's [run] section.
            overrides.push("run.mode=evolve".into());
            if let Some(m) = method {
                overrides.push(format!("run.method={m}"));
            }
            if let Some(t) = tol {
                overrides.push(format!("run.tol={t}"));
            }
            let cfg = load(&common.config, &overrides)?;
            let table = commands::run_command(&cfg)?;
            emit(&table, common.out.as_deref(), &[])
        }
        Cmd::Steady { common } => {
            let overrides = with_mode(&common.set, "steady");
            let cfg = load(&common.config, &overrides)?;
            let table = commands::run_command(&cfg)?;
            emit(&table, common.out.as_deref(), &[])
        }
        Cmd::Sweep { common } => {
            let overrides = with_mode(&common.set, "sweep");
            let cfg = load(&common.config, &overrides)?;
            let table = commands::run_command(&cfg)?;
            emit(&table, common.out.as_deref(), &[])
        }
        Cmd::Scenario { name, config, set, out } => {
            let scenario = ScenarioName::parse(&name)?;
            let (params, run_settings) = match config {
                Some(path) => {
                    let mut overrides = set.clone();
                    overrides.push("run.mode=scenario".to_string());
                    overrides.push(format!("run.name={name}"));
                    let cfg = load(&path, &overrides)?;
                    debug_assert!(matches!(cfg.run, RunMode::Scenario { .. }));
                    (cfg.raw_params, cfg.run_settings)
                }
                None => overrides_only(&set)?,
            };
            let output = run_scenario(scenario, &params, &run_settings)?;
            emit(&output.table, out.as_deref(), &output.summary)
        }
    }
}

fn with_mode(set: &[String], mode: &str) -> Vec<String> {
    let mut overrides = set.to_vec();
    overrides.push(format!("run.mode={mode}"));
    overrides
}

fn load(path: &PathBuf, overrides: &[String]) -> Result<config::RunConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    Ok(config::parse_config_with_overrides(&text, overrides)?)
}

/// Scenario without a config file: interpret `--set` entries directly as
/// parameter (or `run.`) assignments.
fn overrides_only(set: &[String]) -> Result<(ParamMap, BTreeMap<String, ParamValue>)> {
    let mut params = ParamMap::new();
    let mut run_settings = BTreeMap::new();
    for item in set {
        let (path, value) = item
            .split_once('=')
            .ok_or_else(|| config::ConfigError::BadOverride(item.clone()))?;
        let parsed = match value.trim().parse::<f64>() {
            Ok(v) => ParamValue::Number(v),
            Err(_) => ParamValue::Text(value.trim().to_string()),
        };
        match path.trim().split_once('.') {
            Some(("run", key)) => {
                run_settings.insert(key.to_string(), parsed);
            }
            Some(("params", key)) => {
                params.insert(key.to_string(), parsed);
            }
            Some((section, _)) => {
                return Err(config::ConfigError::UnknownSection(section.to_string()).into())
            }
            None => {
                params.insert(path.trim().to_string(), parsed);
            }
        }
    }
    Ok((params, run_settings))
}

fn emit(table: &Table, out: Option<&std::path::Path>, summary: &[String]) -> Result<()> {
    match out {
        Some(path) => {
            table
                .write_csv(path)
                .with_context(|| format!("cannot write {}", path.display()))?;
            for line in summary {
                println!("{line}");
            }
            println!("wrote {} rows to {}", table.n_rows(), path.display());
        }
        None => {
            // CSV on stdout stays clean for piping; summaries go to stderr.
            print!("{}", table.to_csv_string());
            std::io::stdout().flush().ok();
            for line in summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}
