use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use quann_experiment::config::{RqaConfig, SeriesKind};
use quann_experiment::{linspace, parse_config, preset, preset_names, run_experiment, run_sweep, ExperimentConfig};

#[derive(Parser)]
#[command(name = "quann", version, about = "Quantum recurrent neural network experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Experiment config file
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset instead of a config file
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (overrides the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated recurrence radii, e.g. 0,0.001,0.01
    #[arg(long, value_delimiter = ',')]
    radius_list: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment
    Run(Source),
    /// Repeat an experiment over evenly spaced r values
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        r_from: f64,
        #[arg(long)]
        r_to: f64,
        #[arg(long)]
        r_steps: usize,
        /// Parallel experiments
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// List bundled presets
    Presets,
}

fn load(source: &Source) -> Result<(ExperimentConfig, String)> {
    match (&source.preset, &source.config) {
        (Some(name), _) => Ok((preset(name)?, name.clone())),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cfg = parse_config(&text).with_context(|| format!("in {}", path.display()))?;
            let stem = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
            Ok((cfg, stem))
        }
        (None, None) => bail!("give a config file or --preset"),
    }
}

fn out_dir(source: &Source, cfg: &ExperimentConfig, name: &str) -> PathBuf {
    source
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| Path::new("out").join(name))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Presets => {
            for name in preset_names() {
                println!("{name}");
            }
        }
        Command::Run(source) => {
            let (mut cfg, name) = load(&source)?;
            if let Some(radii) = &source.radius_list {
                let series = cfg.analyses.rqa.as_ref().map_or(SeriesKind::MeanField, |r| r.series);
                cfg.analyses.rqa = Some(RqaConfig {
                    series,
                    radii: radii.clone(),
                });
                cfg.validate()?;
            }
            let dir = out_dir(&source, &cfg, &name);
            let report = run_experiment(&cfg, &dir)?;
            for f in &report.manifest.files {
                println!("{}", dir.join(&f.name).display());
            }
            println!(
                "{} ({:.2} s)",
                dir.join(quann_experiment::run::MANIFEST_FILE).display(),
                report.manifest.duration.as_secs_f64()
            );
        }
        Command::Sweep {
            source,
            r_from,
            r_to,
            r_steps,
            workers,
        } => {
            let (mut cfg, name) = load(&source)?;
            if let Some(radii) = &source.radius_list {
                cfg.sweep_radii = radii.clone();
                cfg.validate()?;
            }
            let dir = out_dir(&source, &cfg, &format!("{name}-sweep"));
            let rows = run_sweep(&cfg, &linspace(r_from, r_to, r_steps), &dir, workers)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("{}", dir.join(quann_experiment::sweep::SWEEP_FILE).display());
            if failed > 0 {
                eprintln!("{failed} of {} rows failed; see the error column", rows.len());
            }
        }
    }
    Ok(())
}
