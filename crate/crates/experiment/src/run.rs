//! Executes one configured experiment and writes its outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use quann_core::entropy::{entropy_stats, EntropyObserver, EntropyStats};
use quann_core::field::MeanFieldObserver;
use quann_core::rqa::{
    diagonal_profile, diagonal_profiles, full_recurrence_line_gaps, pearson_correlation,
    recurrence_stats, render_recurrence_plot, LineDistanceHistogram, RecurrenceConfig,
    RecurrenceStats,
};
use quann_core::spectral::{loglog_slope, power_spectrum, Periodogram};
use quann_core::trajectory::{run_trajectory, Observer, StateTap, Trajectory};
use quann_core::StateVector;
use sha2::{Digest, Sha256};

use crate::config::{fmt_f64, ConfigError, ExperimentConfig, ObserverKind, SeriesKind};

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: quann_core::Error,
    },
    #[error("{stage}: {message}")]
    Output { stage: &'static str, message: String },
    #[error("writing {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn stage(stage: &'static str) -> impl FnOnce(quann_core::Error) -> ExperimentError {
    move |source| ExperimentError::Stage { stage, source }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestFile {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Config echo, software version, timing and checksummed output inventory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: Vec<(String, String)>,
    pub version: String,
    pub duration: Duration,
    pub files: Vec<ManifestFile>,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "version = {}\nduration_seconds = {:.6}\n",
            self.version,
            self.duration.as_secs_f64()
        );
        for (k, v) in &self.config {
            out.push_str(&format!("config.{k} = {v}\n"));
        }
        out.push_str(&format!("files = {}\n", self.files.len()));
        for f in &self.files {
            out.push_str(&format!("file.{}.bytes = {}\n", f.name, f.bytes));
            out.push_str(&format!("file.{}.sha256 = {}\n", f.name, f.sha256));
        }
        out
    }

    /// Re-hashes every listed file under `dir`; returns the names that are missing or differ.
    pub fn verify(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|f| match fs::read(dir.join(&f.name)) {
                Ok(bytes) => sha256_hex(&bytes) != f.sha256 || bytes.len() != f.bytes,
                Err(_) => true,
            })
            .map(|f| f.name.clone())
            .collect()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub series: SeriesKind,
    pub neuron_a: usize,
    pub neuron_b: usize,
    /// `None` when either series is constant.
    pub correlation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSummary {
    pub neuron: usize,
    pub periodogram: Periodogram,
    pub slope: f64,
    pub median_power: f64,
    /// Prominent peaks above the fit band, `(frequency, power / median)`.
    pub high_frequency_peaks: Vec<(f64, f64)>,
}

/// Everything an experiment computed, alongside the files it wrote.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub manifest: RunManifest,
    pub mean_field: Option<Trajectory>,
    pub entropy: Option<Trajectory>,
    pub correlations: Vec<CorrelationRow>,
    pub entropy_stats: Option<EntropyStats>,
    pub rqa: Vec<(f64, RecurrenceStats)>,
    pub line_gaps: Option<LineDistanceHistogram>,
    pub spectra: Vec<SpectrumSummary>,
}

impl RunReport {
    pub fn series(&self, kind: SeriesKind) -> Option<&Trajectory> {
        match kind {
            SeriesKind::MeanField => self.mean_field.as_ref(),
            SeriesKind::Entropy => self.entropy.as_ref(),
        }
    }

    pub fn correlation(&self, series: SeriesKind, a: usize, b: usize) -> Option<f64> {
        self.correlations
            .iter()
            .find(|c| c.series == series && c.neuron_a == a && c.neuron_b == b)
            .and_then(|c| c.correlation)
    }
}

/// Observed series of one run, before any analysis.
pub struct Observations {
    pub mean_field: Option<Trajectory>,
    pub entropy: Option<Trajectory>,
    pub states: Option<Vec<StateVector>>,
}

impl Observations {
    fn series(&self, kind: SeriesKind) -> Result<&Trajectory, ExperimentError> {
        match kind {
            SeriesKind::MeanField => self.mean_field.as_ref(),
            SeriesKind::Entropy => self.entropy.as_ref(),
        }
        .ok_or_else(|| ExperimentError::Output {
            stage: "analysis",
            message: format!("series {} was not observed", kind.as_str()),
        })
    }
}

/// Iterates the configured map once, feeding every requested observer.
///
/// `transient` iterations are dropped, so the first recorded state is the
/// `(transient + 1)`-th image of the initial state.
pub fn observe(cfg: &ExperimentConfig) -> Result<Observations, ExperimentError> {
    let map = cfg.build_map()?;
    let v0 = cfg.initial_vector()?;
    let (n, l) = (cfg.network.neurons, cfg.network.levels);
    let mut mean_field = cfg
        .observers
        .contains(&ObserverKind::MeanField)
        .then(|| MeanFieldObserver::with_capacity(n, cfg.samples));
    let mut entropy = cfg
        .observers
        .contains(&ObserverKind::Entropy)
        .then(|| EntropyObserver::with_capacity(n, l, cfg.samples));
    let mut tap = cfg.observers.contains(&ObserverKind::RawState).then(StateTap::new);

    {
        let mut observers: Vec<&mut dyn Observer> = Vec::new();
        if let Some(o) = mean_field.as_mut() {
            observers.push(o);
        }
        if let Some(o) = entropy.as_mut() {
            observers.push(o);
        }
        if let Some(o) = tap.as_mut() {
            observers.push(o);
        }
        run_trajectory(&map, &v0, cfg.transient + 1, cfg.samples, &mut observers)
            .map_err(stage("trajectory"))?;
    }
    Ok(Observations {
        mean_field: mean_field.map(MeanFieldObserver::into_trajectory),
        entropy: entropy.map(EntropyObserver::into_trajectory),
        states: tap.map(StateTap::into_states),
    })
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, ExperimentError> {
    w.into_inner().map_err(|e| ExperimentError::Output {
        stage: "csv",
        message: e.to_string(),
    })
}

fn csv_err(e: csv::Error) -> ExperimentError {
    ExperimentError::Output {
        stage: "csv",
        message: e.to_string(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Output files kept in memory until the run succeeds.
#[derive(Default)]
struct Files(Vec<(String, Vec<u8>)>);

impl Files {
    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.0.push((name.into(), bytes));
    }

    fn csv(&mut self, name: impl Into<String>, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), ExperimentError> {
        let mut w = csv_writer();
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row).map_err(csv_err)?;
        }
        self.add(name, finish_csv(w)?);
        Ok(())
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport, ExperimentError> {
    let start = Instant::now();
    cfg.validate()?;
    let obs = observe(cfg)?;
    let n = cfg.network.neurons;
    let mut files = Files::default();

    if cfg.output.series_csv {
        let first = cfg.transient + 1;
        let mut header = vec!["t".to_string()];
        if obs.mean_field.is_some() {
            header.extend((0..n).map(|k| format!("N{k}")));
        }
        if obs.entropy.is_some() {
            header.extend((0..n).map(|k| format!("S{k}")));
        }
        if header.len() > 1 {
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = (0..cfg.samples).map(|i| {
                let mut row = vec![(first + i).to_string()];
                for traj in [&obs.mean_field, &obs.entropy].into_iter().flatten() {
                    row.extend(traj.point(i).iter().map(|&x| fmt_f64(x)));
                }
                row
            });
            files.csv("series.csv", &header, rows)?;
        }
        if let Some(states) = &obs.states {
            let dim = states.first().map_or(0, |s| s.dim());
            let mut header = vec!["t".to_string()];
            for j in 0..dim {
                header.push(format!("re{j}"));
                header.push(format!("im{j}"));
            }
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = states.iter().enumerate().map(|(i, s)| {
                let mut row = vec![(first + i).to_string()];
                for z in s.amplitudes() {
                    row.push(fmt_f64(z.re));
                    row.push(fmt_f64(z.im));
                }
                row
            });
            files.csv("states.csv", &header, rows)?;
        }
    }

    let a = &cfg.analyses;
    let mut correlations = Vec::new();
    if let Some(series) = a.correlation {
        let traj = obs.series(series)?;
        for i in 0..n {
            for j in i + 1..n {
                let c = pearson_correlation(&traj.column(i), &traj.column(j))
                    .map_err(stage("correlation"))?;
                correlations.push(CorrelationRow {
                    series,
                    neuron_a: i,
                    neuron_b: j,
                    correlation: c,
                });
            }
        }
        files.csv(
            "correlation.csv",
            &["series", "neuron_a", "neuron_b", "correlation"],
            correlations.iter().map(|c| {
                vec![
                    c.series.as_str().to_string(),
                    c.neuron_a.to_string(),
                    c.neuron_b.to_string(),
                    opt(c.correlation),
                ]
            }),
        )?;
    }

    let mut stats = None;
    if a.stats {
        let s = entropy_stats(obs.series(SeriesKind::Entropy)?).map_err(stage("entropy statistics"))?;
        files.csv(
            "entropy_stats.csv",
            &["neuron", "min", "max", "mean"],
            s.neurons.iter().enumerate().map(|(k, st)| {
                vec![k.to_string(), fmt_f64(st.min), fmt_f64(st.max), fmt_f64(st.mean)]
            }),
        )?;
        stats = Some(s);
    }

    let mut rqa = Vec::new();
    if let Some(cfg_rqa) = &a.rqa {
        let traj = obs.series(cfg_rqa.series)?;
        let radii: Vec<RecurrenceConfig> = cfg_rqa
            .radii
            .iter()
            .map(|&r| RecurrenceConfig::new(r))
            .collect::<Result<_, _>>()
            .map_err(stage("recurrence analysis"))?;
        let profiles = diagonal_profiles(traj, &radii).map_err(stage("recurrence analysis"))?;
        rqa = cfg_rqa
            .radii
            .iter()
            .zip(&profiles)
            .map(|(&r, p)| (r, recurrence_stats(p)))
            .collect();
        files.csv(
            format!("rqa_{}.csv", cfg_rqa.series.as_str()),
            &[
                "radius",
                "recurrence_probability",
                "mean_recurrence_strength",
                "conditional_full_recurrence_probability",
            ],
            rqa.iter().map(|(r, s)| {
                vec![
                    fmt_f64(*r),
                    fmt_f64(s.recurrence_probability),
                    opt(s.mean_recurrence_strength),
                    opt(s.conditional_full_recurrence_probability),
                ]
            }),
        )?;
    }

    let mut line_gaps = None;
    if let Some(g) = &a.line_gaps {
        let traj = obs.series(g.series)?;
        let rc = RecurrenceConfig::new(g.radius).map_err(stage("line gaps"))?;
        let hist = full_recurrence_line_gaps(&diagonal_profile(traj, &rc).map_err(stage("line gaps"))?);
        files.csv(
            format!("line_gaps_{}.csv", g.series.as_str()),
            &["distance", "frequency", "percent"],
            hist.bins
                .iter()
                .map(|b| vec![b.gap.to_string(), b.frequency.to_string(), fmt_f64(b.percent)]),
        )?;
        line_gaps = Some(hist);
    }

    let mut spectra = Vec::new();
    if let Some(sp) = &a.spectrum {
        let traj = obs.series(sp.series)?;
        let (lo, hi) = sp.band;
        for k in 0..n {
            let p = power_spectrum(&traj.column(k)).map_err(stage("spectrum"))?;
            let slope = loglog_slope(&p, lo, hi).map_err(stage("spectrum"))?;
            let median = p.median_power();
            let high_frequency_peaks = p
                .prominent_peaks(sp.peak_factor)
                .into_iter()
                .filter(|&i| p.frequencies()[i] > hi)
                .map(|i| (p.frequencies()[i], p.power()[i] / median))
                .collect();
            spectra.push(SpectrumSummary {
                neuron: k,
                periodogram: p,
                slope,
                median_power: median,
                high_frequency_peaks,
            });
        }
        let mut header = vec!["frequency".to_string()];
        header.extend((0..n).map(|k| format!("power_neuron{k}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let bins = spectra.first().map_or(0, |s| s.periodogram.len());
        let rows = (0..bins).map(|j| {
            let mut row = vec![fmt_f64(spectra[0].periodogram.frequencies()[j])];
            row.extend(spectra.iter().map(|s| fmt_f64(s.periodogram.power()[j])));
            row
        });
        files.csv(format!("spectrum_{}.csv", sp.series.as_str()), &header, rows)?;
        files.csv(
            format!("spectrum_fit_{}.csv", sp.series.as_str()),
            &[
                "neuron",
                "band_low",
                "band_high",
                "slope",
                "median_power",
                "high_frequency_peaks",
                "strongest_peak_frequency",
                "strongest_peak_ratio",
            ],
            spectra.iter().map(|s| {
                let top = s
                    .high_frequency_peaks
                    .iter()
                    .max_by(|a, b| a.1.total_cmp(&b.1));
                vec![
                    s.neuron.to_string(),
                    fmt_f64(lo),
                    fmt_f64(hi),
                    fmt_f64(s.slope),
                    fmt_f64(s.median_power),
                    s.high_frequency_peaks.len().to_string(),
                    opt(top.map(|t| t.0)),
                    opt(top.map(|t| t.1)),
                ]
            }),
        )?;
    }

    if let (Some(plot), true) = (&a.plot, cfg.output.plots) {
        let traj = obs.series(plot.series)?;
        let rc = RecurrenceConfig::new(plot.radius).map_err(stage("recurrence plot"))?;
        for &w in &plot.windows {
            let img = render_recurrence_plot(traj, &rc, 0..w).map_err(stage("recurrence plot"))?;
            files.add(format!("plot_{}_{w}.pgm", plot.series.as_str()), img.to_pgm());
        }
    }

    fs::create_dir_all(out_dir).map_err(|source| ExperimentError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut inventory = Vec::with_capacity(files.0.len());
    for (name, bytes) in &files.0 {
        let path = out_dir.join(name);
        fs::write(&path, bytes).map_err(|source| ExperimentError::Io { path, source })?;
        inventory.push(ManifestFile {
            name: name.clone(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
    }
    let manifest = RunManifest {
        config: cfg
            .entries()
            .into_iter()
            .filter(|(_, k, _)| !k.is_empty())
            .map(|(s, k, v)| (format!("{s}.{k}"), v))
            .chain(cfg.analyses.stats.then(|| ("stats".into(), "true".into())))
            .collect(),
        version: VERSION.into(),
        duration: start.elapsed(),
        files: inventory,
    };
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, manifest.to_text()).map_err(|source| ExperimentError::Io { path, source })?;

    Ok(RunReport {
        manifest,
        mean_field: obs.mean_field,
        entropy: obs.entropy,
        correlations,
        entropy_stats: stats,
        rqa,
        line_gaps,
        spectra,
    })
}
