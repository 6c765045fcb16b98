//! Parameter sweeps over the rotation parameter `r`.

use std::fs;
use std::path::Path;

use quann_core::rqa::{diagonal_profiles, recurrence_stats, RecurrenceConfig};
use rayon::prelude::*;

use crate::config::{fmt_f64, ConfigError, ExperimentConfig, ObserverKind, SeriesKind};
use crate::run::{run_experiment, ExperimentError};

pub const SWEEP_FILE: &str = "sweep.csv";

/// `steps` evenly spaced values from `from` to `to`, both included.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    to
                } else {
                    from + (to - from) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    pub correlation: Option<f64>,
    /// `(min, max, mean)` per neuron.
    pub entropy: Vec<(f64, f64, f64)>,
    /// Recurrence probability of the mean field at each sweep radius.
    pub recurrence_probability: Vec<f64>,
    pub error: Option<String>,
}

fn sweep_row(base: &ExperimentConfig, r: f64, dir: &Path) -> Result<SweepRow, ExperimentError> {
    let mut cfg = base.with_r(r)?;
    cfg.observers.insert(ObserverKind::MeanField);
    cfg.observers.insert(ObserverKind::Entropy);
    cfg.analyses.correlation = Some(SeriesKind::MeanField);
    cfg.analyses.stats = true;
    let report = run_experiment(&cfg, dir)?;
    let mean_field = report.mean_field.as_ref().expect("mean field observed");
    let radii: Vec<RecurrenceConfig> = cfg
        .sweep_radii
        .iter()
        .map(|&x| RecurrenceConfig::new(x))
        .collect::<Result<_, _>>()
        .map_err(|source| ExperimentError::Stage {
            stage: "sweep recurrence",
            source,
        })?;
    let profiles = diagonal_profiles(mean_field, &radii).map_err(|source| ExperimentError::Stage {
        stage: "sweep recurrence",
        source,
    })?;
    Ok(SweepRow {
        r,
        correlation: report.correlation(SeriesKind::MeanField, 0, 1),
        entropy: report
            .entropy_stats
            .expect("stats requested")
            .neurons
            .iter()
            .map(|s| (s.min, s.max, s.mean))
            .collect(),
        recurrence_probability: profiles.iter().map(|p| recurrence_stats(p).recurrence_probability).collect(),
        error: None,
    })
}

/// Runs `base` once per `r` value, each in its own subdirectory `r_<index>`,
/// and writes one summary row per value to `sweep.csv`.
///
/// A failing row is recorded with its error and the sweep carries on.
pub fn run_sweep(
    base: &ExperimentConfig,
    r_values: &[f64],
    out_dir: &Path,
    workers: usize,
) -> Result<Vec<SweepRow>, ExperimentError> {
    if base.r().is_none() {
        return Err(ConfigError::Invalid {
            field: "network.gates".into(),
            message: "sweeps need gates = qrnn".into(),
        }
        .into());
    }
    fs::create_dir_all(out_dir).map_err(|source| ExperimentError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let width = r_values.len().saturating_sub(1).to_string().len().max(3);
    let job = |(i, &r): (usize, &f64)| {
        let dir = out_dir.join(format!("r_{i:0width$}"));
        sweep_row(base, r, &dir).unwrap_or_else(|e| SweepRow {
            r,
            correlation: None,
            entropy: Vec::new(),
            recurrence_probability: Vec::new(),
            error: Some(e.to_string()),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExperimentError::Output {
            stage: "sweep",
            message: e.to_string(),
        })?;
    let rows: Vec<SweepRow> = pool.install(|| r_values.par_iter().enumerate().map(job).collect());

    let n = base.network.neurons;
    let mut header = vec!["r".to_string(), "correlation".to_string()];
    for k in 0..n {
        for stat in ["min", "max", "mean"] {
            header.push(format!("S{k}_{stat}"));
        }
    }
    for radius in &base.sweep_radii {
        header.push(format!("recurrence_probability_{}", fmt_f64(*radius)));
    }
    header.push("error".into());

    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| ExperimentError::Output {
        stage: "sweep",
        message: e.to_string(),
    };
    w.write_record(&header).map_err(csv_err)?;
    for row in &rows {
        let mut rec = vec![fmt_f64(row.r), row.correlation.map(fmt_f64).unwrap_or_default()];
        for k in 0..n {
            match row.entropy.get(k) {
                Some(&(lo, hi, mean)) => rec.extend([fmt_f64(lo), fmt_f64(hi), fmt_f64(mean)]),
                None => rec.extend([String::new(), String::new(), String::new()]),
            }
        }
        for j in 0..base.sweep_radii.len() {
            rec.push(row.recurrence_probability.get(j).map(|&x| fmt_f64(x)).unwrap_or_default());
        }
        rec.push(row.error.clone().unwrap_or_default());
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| ExperimentError::Output {
        stage: "sweep",
        message: e.to_string(),
    })?;
    let path = out_dir.join(SWEEP_FILE);
    fs::write(&path, bytes).map_err(|source| ExperimentError::Io { path, source })?;
    Ok(rows)
}
