//! Configuration-driven experiments over the quantum recurrent network:
//! config parsing, bundled presets, single runs and parameter sweeps.

pub mod config;
pub mod presets;
pub mod run;
pub mod sweep;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use presets::{preset, preset_names};
pub use run::{run_experiment, ExperimentError, RunManifest, RunReport};
pub use sweep::{linspace, run_sweep, SweepRow};
