//! Experiment configuration files.
//!
//! The format is line oriented:
//!
//! ```text
//! # comment (also allowed after a value)
//! [section]
//! key = value
//! ```
//!
//! Sections and keys:
//!
//! | section          | keys                                                                  |
//! |------------------|-----------------------------------------------------------------------|
//! | `network`        | `neurons`, `levels`, `edges` (`0->1, 1->0`), `gates` (`qrnn`/`explicit`), `r`, `order` |
//! | `gate.<k>`       | `table.<digits>` = `l*l` row-major entries, each `re` or `re:im`     |
//! | `initial_state`  | `state` (`plus-plus`, `basis:<digits>`, `amplitudes`), `amplitudes`   |
//! | `run`            | `transient`, `samples`, `observers` (`mean-field, entropy, raw-state`) |
//! | `correlation`    | `series`                                                              |
//! | `stats`          | (none; presence enables entropy statistics)                           |
//! | `rqa`            | `series`, `radii`                                                     |
//! | `line_gaps`      | `series`, `radius`                                                    |
//! | `spectrum`       | `series`, `band` (`lo, hi`), `peak_factor`                            |
//! | `plot`           | `series`, `radius`, `windows`                                         |
//! | `sweep`          | `radii`                                                               |
//! | `output`         | `dir`, `series_csv`, `plots`                                          |
//!
//! An analysis runs iff its section is present. Unknown sections or keys, repeated
//! sections or keys, and malformed values are errors carrying the line number.
//!
//! `transient` counts dropped iterations: with `transient = 10000` the first recorded
//! state is the one after the 10001st application of the map.
//! Explicit amplitudes are normalized on load. `table.<digits>` lists the firing
//! values of the target's inputs in ascending neuron order; a neuron without inputs
//! uses the bare key `table`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use quann_core::model::{
    build_network_map, build_qrnn_map_with_order, ActivationOrder, ConditionalGateSpec,
    NetworkTopology, QrnnParams, UnitaryNeuralMap,
};
use quann_core::{BasisIndex, Complex64, DenseOperator, StateVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            line,
            message: message.into(),
        }
    }

    fn invalid(field: impl Into<String>, message: impl fmt::Display) -> Self {
        Self::Invalid {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeriesKind {
    MeanField,
    Entropy,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MeanField => "mean-field",
            Self::Entropy => "entropy",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "mean-field" => Some(Self::MeanField),
            "entropy" => Some(Self::Entropy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObserverKind {
    MeanField,
    Entropy,
    RawState,
}

impl ObserverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MeanField => "mean-field",
            Self::Entropy => "entropy",
            Self::RawState => "raw-state",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "mean-field" => Some(Self::MeanField),
            "entropy" => Some(Self::Entropy),
            "raw-state" => Some(Self::RawState),
            _ => None,
        }
    }
}

impl From<SeriesKind> for ObserverKind {
    fn from(s: SeriesKind) -> Self {
        match s {
            SeriesKind::MeanField => Self::MeanField,
            SeriesKind::Entropy => Self::Entropy,
        }
    }
}

/// Gate table for one neuron: `(input pattern, row-major l x l entries)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateTable {
    pub target: usize,
    pub entries: BTreeMap<Vec<usize>, Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gates {
    Qrnn { r: f64 },
    Explicit(Vec<GateTable>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub neurons: usize,
    pub levels: usize,
    pub edges: Vec<(usize, usize)>,
    pub gates: Gates,
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// `|+>` on every neuron.
    PlusPlus,
    Basis(Vec<usize>),
    Amplitudes(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RqaConfig {
    pub series: SeriesKind,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineGapConfig {
    pub series: SeriesKind,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumConfig {
    pub series: SeriesKind,
    pub band: (f64, f64),
    pub peak_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotConfig {
    pub series: SeriesKind,
    pub radius: f64,
    pub windows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Analyses {
    pub correlation: Option<SeriesKind>,
    pub stats: bool,
    pub rqa: Option<RqaConfig>,
    pub line_gaps: Option<LineGapConfig>,
    pub spectrum: Option<SpectrumConfig>,
    pub plot: Option<PlotConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub series_csv: bool,
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            series_csv: true,
            plots: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub network: NetworkConfig,
    pub initial_state: InitialState,
    pub transient: usize,
    pub samples: usize,
    pub observers: BTreeSet<ObserverKind>,
    pub analyses: Analyses,
    /// Radii at which sweeps report the recurrence probability.
    pub sweep_radii: Vec<f64>,
    pub output: OutputConfig,
}

pub const DEFAULT_SWEEP_RADIUS: f64 = 0.1;
pub const DEFAULT_PEAK_FACTOR: f64 = 10.0;

impl ExperimentConfig {
    /// The two-neuron network with the given rotation parameter and no analyses.
    pub fn qrnn(r: f64, transient: usize, samples: usize) -> Result<Self, ConfigError> {
        let cfg = Self {
            network: NetworkConfig {
                neurons: 2,
                levels: 2,
                edges: vec![(0, 1), (1, 0)],
                gates: Gates::Qrnn { r },
                order: vec![1, 0],
            },
            initial_state: InitialState::PlusPlus,
            transient,
            samples,
            observers: [ObserverKind::MeanField].into(),
            analyses: Analyses::default(),
            sweep_radii: vec![DEFAULT_SWEEP_RADIUS],
            output: OutputConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn r(&self) -> Option<f64> {
        match self.network.gates {
            Gates::Qrnn { r } => Some(r),
            Gates::Explicit(_) => None,
        }
    }

    /// Copy with a different rotation parameter; only for `gates = qrnn`.
    pub fn with_r(&self, r: f64) -> Result<Self, ConfigError> {
        if self.r().is_none() {
            return Err(ConfigError::invalid("network.r", "only qrnn networks have an r parameter"));
        }
        let mut cfg = self.clone();
        cfg.network.gates = Gates::Qrnn { r };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn topology(&self) -> Result<NetworkTopology, ConfigError> {
        let n = &self.network;
        NetworkTopology::new(n.neurons, n.levels, n.edges.iter().copied())
            .map_err(|e| ConfigError::invalid("network.edges", e))
    }

    pub fn build_map(&self) -> Result<UnitaryNeuralMap, ConfigError> {
        let order = ActivationOrder::new(self.network.order.clone())
            .map_err(|e| ConfigError::invalid("network.order", e))?;
        match &self.network.gates {
            Gates::Qrnn { r } => {
                let params = QrnnParams::new(*r).map_err(|e| ConfigError::invalid("network.r", e))?;
                build_qrnn_map_with_order(params, &order)
                    .map_err(|e| ConfigError::invalid("network", e))
            }
            Gates::Explicit(tables) => {
                let topo = self.topology()?;
                let l = self.network.levels;
                let mut specs = Vec::with_capacity(tables.len());
                for t in tables {
                    let field = format!("gate.{}", t.target);
                    let mut table = Vec::with_capacity(t.entries.len());
                    for (pattern, data) in &t.entries {
                        let op = DenseOperator::from_row_major(l, data.clone())
                            .map_err(|e| ConfigError::invalid(&field, e))?;
                        table.push((pattern.clone(), op));
                    }
                    let inputs = topo.in_neighbors(t.target);
                    specs.push(ConditionalGateSpec::new(t.target, inputs, table));
                }
                build_network_map(&topo, &specs, &order).map_err(|e| ConfigError::invalid("gate", e))
            }
        }
    }

    pub fn initial_vector(&self) -> Result<StateVector, ConfigError> {
        let (n, l) = (self.network.neurons, self.network.levels);
        let field = "initial_state";
        match &self.initial_state {
            InitialState::PlusPlus => {
                if l != 2 {
                    return Err(ConfigError::invalid(field, "plus-plus needs levels = 2"));
                }
                Ok(StateVector::plus_state(n))
            }
            InitialState::Basis(digits) => {
                if digits.len() != n {
                    return Err(ConfigError::invalid(
                        field,
                        format!("basis label has {} digits for {n} neurons", digits.len()),
                    ));
                }
                let idx = BasisIndex::new(l, digits.clone()).map_err(|e| ConfigError::invalid(field, e))?;
                Ok(StateVector::basis(&idx))
            }
            InitialState::Amplitudes(a) => {
                let dim = l.pow(n as u32);
                if a.len() != dim {
                    return Err(ConfigError::invalid(
                        "initial_state.amplitudes",
                        format!("{} amplitudes for dimension {dim}", a.len()),
                    ));
                }
                StateVector::normalized(a.clone())
                    .map_err(|e| ConfigError::invalid("initial_state.amplitudes", e))
            }
        }
    }

    /// Cross-field checks; builds the map and initial state once to surface errors early.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = &self.network;
        if let Gates::Qrnn { r } = n.gates {
            if n.neurons != 2 || n.levels != 2 {
                return Err(ConfigError::invalid("network.gates", "qrnn requires neurons = 2, levels = 2"));
            }
            let edges: BTreeSet<_> = n.edges.iter().copied().collect();
            if edges != [(0, 1), (1, 0)].into() {
                return Err(ConfigError::invalid("network.edges", "qrnn requires edges 0->1, 1->0"));
            }
            QrnnParams::new(r).map_err(|e| ConfigError::invalid("network.r", e))?;
        }
        if let Gates::Explicit(tables) = &n.gates {
            let targets: BTreeSet<usize> = tables.iter().map(|t| t.target).collect();
            if targets.len() != tables.len() || targets != (0..n.neurons).collect() {
                return Err(ConfigError::invalid(
                    "gate",
                    format!("explicit gates need one [gate.k] section for each k in 0..{}", n.neurons),
                ));
            }
        }
        self.build_map()?;
        self.initial_vector()?;

        if self.samples == 0 {
            return Err(ConfigError::invalid("run.samples", "must be positive"));
        }
        if self.observers.contains(&ObserverKind::MeanField) && n.levels != 2 {
            return Err(ConfigError::invalid("run.observers", "mean-field needs levels = 2"));
        }
        let a = &self.analyses;
        let need = |s: SeriesKind, field: &str| -> Result<(), ConfigError> {
            if self.observers.contains(&s.into()) {
                Ok(())
            } else {
                Err(ConfigError::invalid(field, format!("series `{}` is not observed", s.as_str())))
            }
        };
        if let Some(s) = a.correlation {
            need(s, "correlation.series")?;
        }
        if a.stats {
            need(SeriesKind::Entropy, "stats")?;
        }
        if let Some(rqa) = &a.rqa {
            need(rqa.series, "rqa.series")?;
            check_radii(&rqa.radii, "rqa.radii")?;
        }
        if let Some(g) = &a.line_gaps {
            need(g.series, "line_gaps.series")?;
            check_radii(&[g.radius], "line_gaps.radius")?;
        }
        if let Some(s) = &a.spectrum {
            need(s.series, "spectrum.series")?;
            let (lo, hi) = s.band;
            if !(lo >= 0.0 && lo < hi && hi <= 0.5) {
                return Err(ConfigError::invalid("spectrum.band", "need 0 <= lo < hi <= 0.5"));
            }
            if !(s.peak_factor.is_finite() && s.peak_factor > 0.0) {
                return Err(ConfigError::invalid("spectrum.peak_factor", "must be positive"));
            }
        }
        if let Some(p) = &a.plot {
            need(p.series, "plot.series")?;
            check_radii(&[p.radius], "plot.radius")?;
            if p.windows.is_empty() || p.windows.iter().any(|&w| w == 0 || w > self.samples) {
                return Err(ConfigError::invalid("plot.windows", "each window must be in 1..=samples"));
            }
        }
        check_radii(&self.sweep_radii, "sweep.radii")?;
        Ok(())
    }

    /// `(section, key, value)` triples that reproduce this config when parsed.
    pub fn entries(&self) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        let mut put = |section: &str, key: &str, value: String| {
            out.push((section.to_string(), key.to_string(), value));
        };
        let n = &self.network;
        put("network", "neurons", n.neurons.to_string());
        put("network", "levels", n.levels.to_string());
        put(
            "network",
            "edges",
            join(n.edges.iter().map(|(a, b)| format!("{a}->{b}"))),
        );
        match &n.gates {
            Gates::Qrnn { r } => {
                put("network", "gates", "qrnn".into());
                put("network", "r", fmt_f64(*r));
            }
            Gates::Explicit(_) => put("network", "gates", "explicit".into()),
        }
        put("network", "order", join(n.order.iter()));
        if let Gates::Explicit(tables) = &n.gates {
            for t in tables {
                let section = format!("gate.{}", t.target);
                for (pattern, data) in &t.entries {
                    put(&section, &table_key(pattern), join(data.iter().map(|z| fmt_complex(*z))));
                }
            }
        }
        match &self.initial_state {
            InitialState::PlusPlus => put("initial_state", "state", "plus-plus".into()),
            InitialState::Basis(d) => put(
                "initial_state",
                "state",
                format!("basis:{}", d.iter().map(|x| x.to_string()).collect::<String>()),
            ),
            InitialState::Amplitudes(a) => {
                put("initial_state", "state", "amplitudes".into());
                put("initial_state", "amplitudes", join(a.iter().map(|z| fmt_complex(*z))));
            }
        }
        put("run", "transient", self.transient.to_string());
        put("run", "samples", self.samples.to_string());
        put("run", "observers", join(self.observers.iter().map(|o| o.as_str())));
        let a = &self.analyses;
        if let Some(s) = a.correlation {
            put("correlation", "series", s.as_str().into());
        }
        if a.stats {
            put("stats", "", String::new());
        }
        if let Some(r) = &a.rqa {
            put("rqa", "series", r.series.as_str().into());
            put("rqa", "radii", join(r.radii.iter().map(|x| fmt_f64(*x))));
        }
        if let Some(g) = &a.line_gaps {
            put("line_gaps", "series", g.series.as_str().into());
            put("line_gaps", "radius", fmt_f64(g.radius));
        }
        if let Some(s) = &a.spectrum {
            put("spectrum", "series", s.series.as_str().into());
            put("spectrum", "band", format!("{}, {}", fmt_f64(s.band.0), fmt_f64(s.band.1)));
            put("spectrum", "peak_factor", fmt_f64(s.peak_factor));
        }
        if let Some(p) = &a.plot {
            put("plot", "series", p.series.as_str().into());
            put("plot", "radius", fmt_f64(p.radius));
            put("plot", "windows", join(p.windows.iter()));
        }
        put("sweep", "radii", join(self.sweep_radii.iter().map(|x| fmt_f64(*x))));
        if let Some(dir) = &self.output.dir {
            put("output", "dir", dir.display().to_string());
        }
        put("output", "series_csv", self.output.series_csv.to_string());
        put("output", "plots", self.output.plots.to_string());
        out
    }

    /// Canonical config text; `parse_config(&cfg.to_text()) == Ok(cfg)`.
    pub fn to_text(&self) -> String {
        let mut text = String::new();
        let mut current = String::new();
        for (section, key, value) in self.entries() {
            if section != current {
                if !text.is_empty() {
                    text.push('\n');
                }
                text.push_str(&format!("[{section}]\n"));
                current = section;
            }
            if !key.is_empty() {
                text.push_str(&format!("{key} = {value}\n"));
            }
        }
        text
    }
}

fn check_radii(radii: &[f64], field: &str) -> Result<(), ConfigError> {
    if radii.is_empty() {
        return Err(ConfigError::invalid(field, "empty radius list"));
    }
    if radii.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(ConfigError::invalid(field, "radii must be finite and nonnegative"));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::invalid(field, "radii must be strictly ascending"));
    }
    Ok(())
}

fn join<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Shortest decimal that reads back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_f64(z.re)
    } else {
        format!("{}:{}", fmt_f64(z.re), fmt_f64(z.im))
    }
}

fn table_key(pattern: &[usize]) -> String {
    if pattern.is_empty() {
        "table".into()
    } else {
        format!("table.{}", pattern.iter().map(|d| d.to_string()).collect::<String>())
    }
}

struct Value<'a> {
    line: usize,
    text: &'a str,
}

impl Value<'_> {
    fn err(&self, msg: impl Into<String>) -> ConfigError {
        ConfigError::parse(self.line, msg)
    }

    fn usize(&self) -> Result<usize, ConfigError> {
        self.text
            .parse()
            .map_err(|_| self.err(format!("expected a nonnegative integer, got `{}`", self.text)))
    }

    fn f64(&self) -> Result<f64, ConfigError> {
        parse_f64(self.text).ok_or_else(|| self.err(format!("expected a number, got `{}`", self.text)))
    }

    fn bool(&self) -> Result<bool, ConfigError> {
        match self.text {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(self.err(format!("expected true or false, got `{other}`"))),
        }
    }

    fn list(&self) -> impl Iterator<Item = &str> {
        self.text.split(',').map(str::trim).filter(|s| !s.is_empty())
    }

    fn usize_list(&self) -> Result<Vec<usize>, ConfigError> {
        self.list()
            .map(|s| s.parse().map_err(|_| self.err(format!("bad integer `{s}`"))))
            .collect()
    }

    fn f64_list(&self) -> Result<Vec<f64>, ConfigError> {
        self.list()
            .map(|s| parse_f64(s).ok_or_else(|| self.err(format!("bad number `{s}`"))))
            .collect()
    }

    fn complex_list(&self) -> Result<Vec<Complex64>, ConfigError> {
        self.list()
            .map(|s| {
                let (re, im) = s.split_once(':').unwrap_or((s, "0"));
                match (parse_f64(re.trim()), parse_f64(im.trim())) {
                    (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                    _ => Err(self.err(format!("bad amplitude `{s}`, expected `re` or `re:im`"))),
                }
            })
            .collect()
    }

    fn series(&self) -> Result<SeriesKind, ConfigError> {
        SeriesKind::parse(self.text)
            .ok_or_else(|| self.err(format!("unknown series `{}`, expected mean-field or entropy", self.text)))
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

type Section<'a> = (usize, BTreeMap<&'a str, Value<'a>>);

fn tokenize(text: &str) -> Result<BTreeMap<String, Section<'_>>, ConfigError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::parse(line, "unterminated section header"))?
                .trim();
            if sections.contains_key(name) {
                return Err(ConfigError::parse(line, format!("section [{name}] repeated")));
            }
            sections.insert(name.to_string(), (line, BTreeMap::new()));
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::parse(line, "expected `key = value` or `[section]`"))?;
        let (key, value) = (key.trim(), value.trim());
        let section = current
            .as_ref()
            .ok_or_else(|| ConfigError::parse(line, "key outside of any section"))?;
        let entries = &mut sections.get_mut(section).expect("current section exists").1;
        if entries.contains_key(key) {
            return Err(ConfigError::parse(line, format!("key `{key}` repeated in [{section}]")));
        }
        entries.insert(key, Value { line, text: value });
    }
    Ok(sections)
}

/// Pops keys from one section; whatever is left at `finish` is an unknown key.
struct Reader<'a> {
    name: String,
    line: usize,
    entries: BTreeMap<&'a str, Value<'a>>,
}

impl<'a> Reader<'a> {
    fn take(&mut self, key: &str) -> Option<Value<'a>> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Value<'a>, ConfigError> {
        self.take(key).ok_or_else(|| {
            ConfigError::parse(self.line, format!("[{}] is missing `{key}`", self.name))
        })
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.entries.iter().min_by_key(|(_, v)| v.line) {
            None => Ok(()),
            Some((key, v)) => Err(v.err(format!("unknown key `{key}` in [{}]", self.name))),
        }
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut sections = tokenize(text)?;
    let mut open = |name: &str| -> Option<Reader> {
        sections.remove(name).map(|(line, entries)| Reader {
            name: name.to_string(),
            line,
            entries,
        })
    };

    let mut net = open("network").ok_or_else(|| ConfigError::parse(1, "missing [network] section"))?;
    let neurons = net.require("neurons")?.usize()?;
    let levels = match net.take("levels") {
        Some(v) => v.usize()?,
        None => 2,
    };
    let gates_kind = net.require("gates")?;
    let r = net.take("r");
    let gates = match gates_kind.text {
        "qrnn" => {
            let r = r.ok_or_else(|| gates_kind.err("gates = qrnn needs `r`"))?;
            Gates::Qrnn { r: r.f64()? }
        }
        "explicit" => {
            if let Some(r) = r {
                return Err(r.err("`r` only applies to gates = qrnn"));
            }
            Gates::Explicit(Vec::new())
        }
        other => return Err(gates_kind.err(format!("unknown gates `{other}`, expected qrnn or explicit"))),
    };
    let edges = match net.take("edges") {
        Some(v) => v
            .list()
            .map(|e| {
                let (a, b) = e.split_once("->").ok_or_else(|| v.err(format!("bad edge `{e}`, expected a->b")))?;
                match (a.trim().parse(), b.trim().parse()) {
                    (Ok(a), Ok(b)) => Ok((a, b)),
                    _ => Err(v.err(format!("bad edge `{e}`"))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?,
        None if matches!(gates, Gates::Qrnn { .. }) => vec![(0, 1), (1, 0)],
        None => {
            return Err(ConfigError::parse(net.line, "[network] is missing `edges` (required for explicit gates)"))
        }
    };
    let order = match net.take("order") {
        Some(v) => v.usize_list()?,
        None if matches!(gates, Gates::Qrnn { .. }) => vec![1, 0],
        None => (0..neurons).collect(),
    };
    net.finish()?;

    let gates = match gates {
        Gates::Explicit(_) => {
            let mut tables = Vec::new();
            for k in 0..neurons {
                let Some(mut sec) = open(&format!("gate.{k}")) else {
                    continue;
                };
                let mut entries = BTreeMap::new();
                let keys: Vec<&str> = sec.entries.keys().copied().collect();
                for key in keys {
                    let pattern = if key == "table" {
                        Vec::new()
                    } else if let Some(d) = key.strip_prefix("table.") {
                        let digits: Option<Vec<usize>> =
                            d.chars().map(|c| c.to_digit(10).map(|x| x as usize)).collect();
                        match digits {
                            Some(p) if !p.is_empty() => p,
                            _ => continue, // reported as unknown by finish()
                        }
                    } else {
                        continue;
                    };
                    let v = sec.take(key).expect("key listed");
                    entries.insert(pattern, v.complex_list()?);
                }
                sec.finish()?;
                tables.push(GateTable { target: k, entries });
            }
            Gates::Explicit(tables)
        }
        g => g,
    };

    let initial_state = match open("initial_state") {
        None => InitialState::PlusPlus,
        Some(mut sec) => {
            let state = sec.require("state")?;
            let amps = sec.take("amplitudes");
            if let (Some(v), false) = (&amps, state.text == "amplitudes") {
                return Err(v.err("`amplitudes` only applies to state = amplitudes"));
            }
            let parsed = match state.text {
                "plus-plus" | "plus" => InitialState::PlusPlus,
                "amplitudes" => {
                    let v = amps.ok_or_else(|| state.err("state = amplitudes needs `amplitudes`"))?;
                    InitialState::Amplitudes(v.complex_list()?)
                }
                s => match s.strip_prefix("basis:") {
                    Some(d) if !d.is_empty() => InitialState::Basis(
                        d.chars()
                            .map(|c| c.to_digit(10).map(|x| x as usize))
                            .collect::<Option<Vec<_>>>()
                            .ok_or_else(|| state.err(format!("bad basis label `{d}`")))?,
                    ),
                    _ => return Err(state.err(format!("unknown initial state `{s}`"))),
                },
            };
            sec.finish()?;
            parsed
        }
    };

    let mut run = open("run").ok_or_else(|| ConfigError::parse(1, "missing [run] section"))?;
    let transient = run.require("transient")?.usize()?;
    let samples = run.require("samples")?.usize()?;
    let observers = match run.take("observers") {
        Some(v) => v
            .list()
            .map(|s| ObserverKind::parse(s).ok_or_else(|| v.err(format!("unknown observer `{s}`"))))
            .collect::<Result<BTreeSet<_>, _>>()?,
        None => [ObserverKind::MeanField].into(),
    };
    run.finish()?;

    let mut analyses = Analyses::default();
    if let Some(mut sec) = open("correlation") {
        analyses.correlation = Some(match sec.take("series") {
            Some(v) => v.series()?,
            None => SeriesKind::MeanField,
        });
        sec.finish()?;
    }
    if let Some(sec) = open("stats") {
        analyses.stats = true;
        sec.finish()?;
    }
    if let Some(mut sec) = open("rqa") {
        let series = sec.take("series").map(|v| v.series()).transpose()?.unwrap_or(SeriesKind::MeanField);
        let radii = sec.require("radii")?.f64_list()?;
        sec.finish()?;
        analyses.rqa = Some(RqaConfig { series, radii });
    }
    if let Some(mut sec) = open("line_gaps") {
        let series = sec.take("series").map(|v| v.series()).transpose()?.unwrap_or(SeriesKind::MeanField);
        let radius = sec.require("radius")?.f64()?;
        sec.finish()?;
        analyses.line_gaps = Some(LineGapConfig { series, radius });
    }
    if let Some(mut sec) = open("spectrum") {
        let series = sec.take("series").map(|v| v.series()).transpose()?.unwrap_or(SeriesKind::Entropy);
        let band_v = sec.require("band")?;
        let band = match band_v.f64_list()?[..] {
            [lo, hi] => (lo, hi),
            _ => return Err(band_v.err("band needs exactly two numbers: lo, hi")),
        };
        let peak_factor = sec.take("peak_factor").map(|v| v.f64()).transpose()?.unwrap_or(DEFAULT_PEAK_FACTOR);
        sec.finish()?;
        analyses.spectrum = Some(SpectrumConfig {
            series,
            band,
            peak_factor,
        });
    }
    if let Some(mut sec) = open("plot") {
        let series = sec.take("series").map(|v| v.series()).transpose()?.unwrap_or(SeriesKind::MeanField);
        let radius = sec.require("radius")?.f64()?;
        let windows = sec.require("windows")?.usize_list()?;
        sec.finish()?;
        analyses.plot = Some(PlotConfig {
            series,
            radius,
            windows,
        });
    }
    let mut sweep_radii = vec![DEFAULT_SWEEP_RADIUS];
    if let Some(mut sec) = open("sweep") {
        if let Some(v) = sec.take("radii") {
            sweep_radii = v.f64_list()?;
        }
        sec.finish()?;
    }
    let mut output = OutputConfig::default();
    if let Some(mut sec) = open("output") {
        if let Some(v) = sec.take("dir") {
            output.dir = Some(PathBuf::from(v.text));
        }
        if let Some(v) = sec.take("series_csv") {
            output.series_csv = v.bool()?;
        }
        if let Some(v) = sec.take("plots") {
            output.plots = v.bool()?;
        }
        sec.finish()?;
    }

    if let Some((name, (line, _))) = sections.iter().min_by_key(|(_, (line, _))| *line) {
        return Err(ConfigError::parse(*line, format!("unknown section [{name}]")));
    }

    let cfg = ExperimentConfig {
        network: NetworkConfig {
            neurons,
            levels,
            edges,
            gates,
            order,
        },
        initial_state,
        transient,
        samples,
        observers,
        analyses,
        sweep_radii,
        output,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[network]\nneurons = 2\ngates = qrnn\nr = 0.0005\n\n[run]\ntransient = 10\nsamples = 20\n";

    fn with(extra: &str) -> Result<ExperimentConfig, ConfigError> {
        parse_config(&format!("{MINIMAL}{extra}"))
    }

    fn line_of(err: ConfigError) -> usize {
        match err {
            ConfigError::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.r(), Some(0.0005));
        assert_eq!(cfg.network.order, vec![1, 0]);
        assert_eq!(cfg.initial_state, InitialState::PlusPlus);
        assert_eq!(cfg.observers, [ObserverKind::MeanField].into());
        assert_eq!(cfg.analyses, Analyses::default());
        assert_eq!(cfg, ExperimentConfig::qrnn(0.0005, 10, 20).unwrap());
    }

    #[test]
    fn basis_label() {
        let cfg = with("[initial_state]\nstate = basis:01\n").unwrap();
        let v = cfg.initial_vector().unwrap();
        let want = [0.0, 1.0, 0.0, 0.0];
        for (z, w) in v.amplitudes().iter().zip(want) {
            assert_eq!(*z, Complex64::new(w, 0.0));
        }
    }

    #[test]
    fn amplitudes_are_normalized() {
        let cfg = with("[initial_state]\nstate = amplitudes\namplitudes = 1, 0:1, 0, 1\n").unwrap();
        let v = cfg.initial_vector().unwrap();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((v.amplitudes()[1] - Complex64::new(0.0, 1.0 / 3f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = parse_config(
            "# header\n\n[network]   # inline\nneurons = 2 # two\ngates = qrnn\nr = 0.25\n[run]\ntransient = 0\nsamples = 5\n",
        )
        .unwrap();
        assert_eq!(cfg.r(), Some(0.25));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of(with("[run2]\n").unwrap_err()), 9);
        assert_eq!(line_of(parse_config(&MINIMAL.replace("samples", "sample")).unwrap_err()), 6);
        assert_eq!(line_of(with("[plot]\nradius = 0.1\nwindows = 5\nextra = 1\n").unwrap_err()), 12);
        assert_eq!(line_of(with("[rqa]\nradii = 0, x\n").unwrap_err()), 10);
        assert_eq!(line_of(with("[stats]\nwhat = 1\n").unwrap_err()), 10);
        assert_eq!(line_of(parse_config("neurons = 2\n").unwrap_err()), 1);
        assert_eq!(line_of(with("[network]\n").unwrap_err()), 9);
        let doubled = MINIMAL.replace("gates = qrnn", "gates = qrnn\ngates = qrnn");
        assert_eq!(line_of(parse_config(&doubled).unwrap_err()), 4);
    }

    #[test]
    fn validation_names_the_field() {
        let err = parse_config(&MINIMAL.replace("0.0005", "1.5")).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "network.r"), "{err}");
        let err = with("[rqa]\nradii = 0.1, 0.01\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "rqa.radii"), "{err}");
        let err = with("[rqa]\nradii = -0.1\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "rqa.radii"), "{err}");
        let err = with("[stats]\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "stats"), "{err}");
        let err = with("[initial_state]\nstate = basis:012\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "initial_state"), "{err}");
        let err = with("[initial_state]\nstate = amplitudes\namplitudes = 0, 0, 0, 0\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { .. }), "{err}");
        let err = parse_config(&MINIMAL.replace("neurons = 2", "neurons = 3")).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "network.gates"), "{err}");
    }

    #[test]
    fn explicit_gates() {
        // neuron 1 flips when neuron 0 fires; neuron 0 is a fixed Hadamard
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(
            "[network]\nneurons = 2\ngates = explicit\nedges = 0->1\n\n\
             [gate.0]\ntable = {h}, {h}, {h}, -{h}\n\n\
             [gate.1]\ntable.0 = 1, 0, 0, 1\ntable.1 = 0, 1, 1, 0\n\n\
             [initial_state]\nstate = basis:00\n\n[run]\ntransient = 0\nsamples = 4\n"
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.network.order, vec![0, 1]);
        let map = cfg.build_map().unwrap();
        // Hadamard then CNOT on |00> gives a Bell state
        let v = map.apply(&cfg.initial_vector().unwrap()).unwrap();
        let a = v.amplitudes();
        assert!((a[0].re - h).abs() < 1e-15 && (a[3].re - h).abs() < 1e-15);
        assert!(a[1].norm() < 1e-15 && a[2].norm() < 1e-15);
        assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);

        let missing = text.replace("table.1 = 0, 1, 1, 0\n", "");
        assert!(matches!(parse_config(&missing), Err(ConfigError::Invalid { .. })));
        let not_unitary = text.replace("table.1 = 0, 1, 1, 0", "table.1 = 0, 1, 1, 1");
        assert!(matches!(parse_config(&not_unitary), Err(ConfigError::Invalid { .. })));
        let stray = text.replace("table.0 =", "tabel.0 =");
        assert!(matches!(parse_config(&stray), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn canonical_text_round_trips() {
        let cfg = with(
            "[initial_state]\nstate = amplitudes\namplitudes = 0.1, 0.2:-0.3, 0, 1e-3\n\
             [correlation]\n[stats]\n[rqa]\nradii = 0, 0.001, 0.1\n[line_gaps]\nradius = 0.1\n\
             [spectrum]\nseries = entropy\nband = 0.001, 0.05\n[plot]\nradius = 0.1\nwindows = 10, 20\n\
             [output]\ndir = some/where\nplots = false\n",
        );
        // entropy must be observed for stats and spectrum
        assert!(cfg.is_err());
        let cfg = parse_config(&format!(
            "{}observers = mean-field, entropy, raw-state\n[correlation]\n[stats]\n[rqa]\nradii = 0, 0.001, 0.1\n\
             [line_gaps]\nradius = 0.1\n[spectrum]\nband = 0.001, 0.05\n[plot]\nradius = 0.1\nwindows = 10, 20\n\
             [sweep]\nradii = 0.05\n[output]\ndir = some/where\nplots = false\n",
            MINIMAL
        ))
        .unwrap();
        assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);
    }
}
