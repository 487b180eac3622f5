use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use v2x_core::engine::{run_campaign, run_campaign_with_workers, CampaignConfig, ScenarioKind};
use v2x_core::metrics::PdrReport;

use crate::config::{parse_config, render_config};
use crate::plot::emit_plot_data;
use crate::report::{emit_report, load_reports, Format};
use crate::sweep::SweepSpec;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "v2xsim", version, about = "Monte Carlo V2X broadcast PDR campaigns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one campaign and write report.<format> into the output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides campaign.seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides campaign.snapshots.
        #[arg(long)]
        snapshots: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
        /// Worker threads (defaults to all cores). Does not affect results.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the cross product of scenarios, contention windows and densities.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "31,127")]
        cw: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "suburban-cross,urban-grid")]
        scenario: Vec<ScenarioKind>,
        /// Defaults to scenario.density from the config.
        #[arg(long, value_delimiter = ',')]
        density: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        snapshots: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Turn a sweep report directory into grouped-bar plot data.
    Plotdata {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(config: &Path, seed: Option<u64>, snapshots: Option<usize>) -> Result<CampaignConfig, CliError> {
    let mut cfg = parse_config(config)?;
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    if let Some(n) = snapshots {
        cfg.snapshots = n;
    }
    cfg.validate().map_err(|e| CliError::Usage(format!("invalid override: {e}")))?;
    Ok(cfg)
}

fn campaign(cfg: &CampaignConfig, workers: Option<usize>) -> Result<PdrReport, CliError> {
    Ok(match workers {
        Some(w) => run_campaign_with_workers(cfg, w)?,
        None => run_campaign(cfg)?,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_outputs(out: &Path, cfg: &CampaignConfig, reports: &[PdrReport], format: Format) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write(&out.join("config.toml"), render_config(cfg).as_bytes())?;
    let path = out.join(format!("report.{}", format.extension()));
    write(&path, &emit_report(reports, format))?;
    Ok(path)
}

/// Runs every cell of `spec` on top of `base`, in cell order.
pub fn run_sweep(base: &CampaignConfig, spec: &SweepSpec, workers: Option<usize>) -> Result<Vec<PdrReport>, CliError> {
    spec.cells()
        .iter()
        .map(|cell| {
            let mut cfg = base.clone();
            cfg.scenario.kind = cell.scenario;
            cfg.mac.cw = cell.cw;
            cfg.scenario.density = cell.density;
            cfg.validate().map_err(|e| CliError::Usage(format!("cell {}: {e}", cell.name())))?;
            campaign(&cfg, workers)
        })
        .collect()
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, seed, snapshots, out, format, workers } => {
            let cfg = load(&config, seed, snapshots)?;
            let report = campaign(&cfg, workers)?;
            let path = write_outputs(&out, &cfg, std::slice::from_ref(&report), format)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Sweep { config, cw, scenario, density, seed, snapshots, out, format, workers } => {
            let cfg = load(&config, seed, snapshots)?;
            let densities = if density.is_empty() { vec![cfg.scenario.density] } else { density };
            let spec = SweepSpec::cross(&scenario, &cw, &densities)?;
            let reports = run_sweep(&cfg, &spec, workers)?;
            let path = write_outputs(&out, &cfg, &reports, format)?;
            eprintln!("wrote {} ({} cells)", path.display(), reports.len());
        }
        Command::Plotdata { input, out } => {
            let reports = load_reports(&input)?;
            write(&out, &emit_plot_data(&reports)?)?;
            eprintln!("wrote {}", out.display());
        }
    }
    Ok(())
}
