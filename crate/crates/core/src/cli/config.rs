//! Experiment configuration and run manifests.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::ensemble::{FieldSpec, WaveSample};
use crate::field::Window;
use crate::nodal::testfields::TestField;
use crate::specfun::verify::SpecfunCheckConfig;

pub const CONFIG_SCHEMA: &str = "monowave.config/1";
pub const MANIFEST_SCHEMA: &str = "monowave.run_manifest/1";
pub const MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Scaling,
    Concentration,
}

/// Where windows of a given side sit: centred at the origin or spanning `[0, side]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    #[default]
    Centered,
    Origin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessConfig {
    pub dim: usize,
    pub n_dirs: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self { dim: 2, n_dirs: 256 }
    }
}

/// Input of every command. Unknown keys are rejected; missing keys take
/// their defaults. Command-line flags override the corresponding keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub schema: String,
    /// Ensemble to sample from.
    pub spec: Option<FieldSpec>,
    /// A fixed realization (takes precedence over `spec`).
    pub sample: Option<WaveSample>,
    /// A deterministic test field (takes precedence over `sample` and `spec`).
    pub test_field: Option<TestField>,
    pub experiment: Option<ExperimentKind>,
    /// Side lengths of the window for single-window commands.
    pub window: Option<Vec<f64>>,
    /// Window schedule (side lengths) for experiments.
    pub windows: Vec<f64>,
    pub anchor: Anchor,
    pub trials: usize,
    /// Grid spacing override; otherwise the resolution default of the field.
    pub spacing: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub bootstrap_resamples: usize,
    /// `sample` also writes the rasterized grid.
    pub grid_dump: bool,
    pub specfun: SpecfunCheckConfig,
    pub witness: WitnessConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema: CONFIG_SCHEMA.into(),
            spec: None,
            sample: None,
            test_field: None,
            experiment: None,
            window: None,
            windows: Vec::new(),
            anchor: Anchor::Centered,
            trials: 30,
            spacing: None,
            out_dir: None,
            bootstrap_resamples: 2000,
            grid_dump: false,
            specfun: SpecfunCheckConfig::default(),
            witness: WitnessConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != CONFIG_SCHEMA {
            return Err(CliError::Validation(format!("unknown config schema {:?}", self.schema)));
        }
        if let Some(spec) = &self.spec {
            spec.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        }
        if let Some(s) = &self.sample {
            s.check_consistency().map_err(|e| CliError::Validation(e.to_string()))?;
        }
        if let Some(w) = &self.window {
            if w.is_empty() || w.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
                return Err(CliError::Validation(format!("window sides must be positive, got {w:?}")));
            }
        }
        if self.windows.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(CliError::Validation(format!("window schedule must be positive, got {:?}", self.windows)));
        }
        if let Some(h) = self.spacing {
            if !(h > 0.0) || !h.is_finite() {
                return Err(CliError::Validation(format!("spacing must be positive, got {h}")));
            }
        }
        Ok(())
    }

    /// Dimension of the configured field source.
    pub fn dim(&self) -> Option<usize> {
        if let Some(t) = &self.test_field {
            Some(t.dim())
        } else if let Some(s) = &self.sample {
            Some(s.dim())
        } else {
            self.spec.as_ref().map(|s| s.dim)
        }
    }

    /// Box of the given sides under the configured anchor.
    pub fn window_for(&self, sides: &[f64]) -> Window {
        match self.anchor {
            Anchor::Centered => Window::centered(sides),
            Anchor::Origin => Window::new(vec![0.0; sides.len()], sides.to_vec()),
        }
    }

    /// Expands a schedule entry to a box of the configured dimension.
    pub fn cube_window(&self, side: f64, dim: usize) -> Window {
        self.window_for(&vec![side; dim])
    }
}

/// Everything needed to repeat a run: the resolved configuration (flags
/// already folded in), the seed derivation and what was written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub config: ExperimentConfig,
    /// How per-trial seeds are derived from the ensemble seed.
    pub seed_rule: String,
    /// Derived seeds, one list per window of the schedule.
    pub derived_seeds: Vec<Vec<u64>>,
    pub threads: usize,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// File names, relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let m: RunManifest =
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("manifest: {e}")))?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(CliError::Validation(format!("unknown manifest schema {:?}", m.schema)));
        }
        m.config.validate()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"trials": 5}"#).is_ok());
        assert!(matches!(ExperimentConfig::from_json(r#"{"trails": 5}"#), Err(CliError::Validation(_))));
        assert!(ExperimentConfig::from_json(r#"{"specfun": {"ell_max": 2, "bogus": 1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"schema": "other/1"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"spacing": -1.0}"#).is_err());
    }

    #[test]
    fn config_round_trips() {
        let mut c = ExperimentConfig::default();
        c.spec = Some(FieldSpec::plane_wave(3, 16, 1.0, 4));
        c.test_field = Some(TestField::SineLattice { cells: 4 });
        c.windows = vec![1.0, 2.5];
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }
}
