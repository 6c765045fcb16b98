//! Bundled configurations, one per reference figure or table.

use crate::config::{parse_config, ConfigError, ExperimentConfig};

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        /// `(name, config text)` for every bundled preset.
        pub const PRESETS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../presets/", $name, ".conf")))),*
        ];
    };
}

presets!(
    "figure1", "figure2a", "figure2b", "figure2c", "figure3", "figure4a", "figure4b", "figure5",
    "figure6", "figure7", "table1", "table2", "table3", "table4", "table5", "table6",
);

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn preset(name: &str) -> Result<ExperimentConfig, ConfigError> {
    let text = preset_text(name).ok_or_else(|| ConfigError::Invalid {
        field: "preset".into(),
        message: format!(
            "unknown preset `{name}`; available: {}",
            preset_names().collect::<Vec<_>>().join(", ")
        ),
    })?;
    parse_config(text)
}
