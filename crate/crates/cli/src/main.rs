use std::path::PathBuf;
use std::process::ExitCode;

use bohmflow_cli::{run_scenario, CliError, CliResult, ConfigLayer, Preset, ScenarioConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bohmflow",
    version,
    about = "Bohmian trajectories of Gaussian two-slit systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset scenario and write its grids, trajectories and reports.
    Run(RunArgs),
    /// List the available presets.
    List,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Preset name (fig1..fig6, s2..s5).
    name: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    /// Flat TOML file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $BOHMFLOW_OUT, else ./bohmflow-out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Samples per spatial grid axis.
    #[arg(long)]
    grid: Option<usize>,
}

impl RunArgs {
    fn layer(&self) -> CliResult<ConfigLayer> {
        let preset = match (&self.name, &self.preset) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::config(
                    "preset",
                    format!("positional `{a}` conflicts with --preset `{b}`"),
                ))
            }
            (Some(a), _) | (None, Some(a)) => Some(a.parse::<Preset>()?),
            (None, None) => None,
        };
        Ok(ConfigLayer {
            preset,
            out: self.out.clone(),
            dt: self.dt,
            t_end: self.t_end,
            grid: self.grid,
            ..ConfigLayer::default()
        })
    }
}

fn run(args: RunArgs) -> CliResult<()> {
    let mut layer = ConfigLayer::default();
    if let Some(path) = &args.config {
        layer = layer.overlay(ConfigLayer::from_file(path)?);
    }
    layer = layer.overlay(args.layer()?);
    let cfg = ScenarioConfig::resolve(layer)?;
    let manifest = run_scenario(&cfg)?;
    println!(
        "{}: {} artifacts in {}",
        manifest.preset,
        manifest.artifacts.len(),
        cfg.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::List => {
            for p in Preset::ALL {
                println!("{:<5} {}", p.name(), p.describe());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
