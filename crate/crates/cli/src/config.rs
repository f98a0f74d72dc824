use std::fs;
use std::path::{Path, PathBuf};

use grn_eval::baselines::MethodConfig;
use grn_eval::qc::QcConfig;
use grn_eval::synthetic::{SweepConfig, SyntheticSpec, REG_VALUES};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything a subcommand may need. Loaded from a TOML file; command-line
/// flags override individual keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Accept negative expression values (synthetic exports).
    pub allow_negative: bool,
    /// Record wall-clock timings in a `timing.json` sidecar.
    pub timing: bool,
    pub qc: QcSection,
    pub split: SplitSection,
    pub method: MethodConfig,
    pub eval: EvalSection,
    pub synth: SynthSection,
    pub rank: RankSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QcSection {
    pub enabled: bool,
    pub knockdown: Option<PathBuf>,
    pub de_alpha: f64,
    pub min_de_genes: usize,
    pub min_cells: usize,
    pub min_knockdown: f64,
    pub cell_percentile: f64,
}

impl Default for QcSection {
    fn default() -> Self {
        let q = QcConfig::default();
        Self {
            enabled: true,
            knockdown: None,
            de_alpha: q.de_alpha,
            min_de_genes: q.min_de_genes,
            min_cells: q.min_cells,
            min_knockdown: q.min_knockdown,
            cell_percentile: q.cell_percentile,
        }
    }
}

impl QcSection {
    pub fn params(&self) -> QcConfig {
        QcConfig {
            de_alpha: self.de_alpha,
            min_de_genes: self.min_de_genes,
            min_cells: self.min_cells,
            min_knockdown: self.min_knockdown,
            cell_percentile: self.cell_percentile,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    /// Held-out fraction of every label stratum.
    pub test_fraction: f64,
    /// Optional subsampling of the training split.
    pub cell_fraction: Option<f64>,
    pub intervention_fraction: Option<f64>,
}

impl Default for SplitSection {
    fn default() -> Self {
        Self {
            test_fraction: 0.2,
            cell_fraction: None,
            intervention_fraction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub test: Option<PathBuf>,
    pub references: Vec<PathBuf>,
    pub n_pairs: usize,
    pub alpha: f64,
}

impl Default for EvalSection {
    fn default() -> Self {
        let e = grn_eval::eval::EvalConfig::default();
        Self {
            test: None,
            references: Vec::new(),
            n_pairs: e.n_pairs,
            alpha: e.alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub reg_values: Vec<f64>,
    pub repeats: usize,
    pub spec: SyntheticSpec,
    pub sweep: SweepConfig,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self {
            reg_values: REG_VALUES.to_vec(),
            repeats: 5,
            spec: SyntheticSpec::default(),
            sweep: SweepConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankSection {
    pub inputs: Vec<PathBuf>,
    /// Merge against the hull of the current group instead of its worst
    /// member.
    pub hull: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}
