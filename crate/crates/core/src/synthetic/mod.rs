//! Ground-truth synthetic data: random DAGs, additive noise models with
//! random-Fourier-feature mechanisms, interventions, and the sweep that
//! checks the statistical metrics against structural ones.

mod anm;
mod dag;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use anm::{gene_names, sample_anm, sample_anm_seeded, Mechanism, SyntheticDataset};
pub use dag::gen_dag;
pub use sweep::{
    cell_seeds, summarize, sweep_csv, trade_off_preset, validate_metrics, MeanSd, SweepConfig, SweepDesign, SweepResult, SweepRow,
    SweepSummary, REG_VALUES,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    ErdosRenyi { edge_prob: f64 },
    ScaleFree { attach_m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Intervention {
    SetToZero,
    /// Adds `delta` to the intervened variable's assignment.
    Shift { delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub d: usize,
    pub graph: GraphKind,
    pub rff_features: usize,
    pub length_scale: f64,
    /// Multiplier on the random-feature amplitudes.
    pub amplitude: f64,
    pub noise_std: f64,
    pub intervention: Intervention,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            d: 20,
            graph: GraphKind::ErdosRenyi { edge_prob: 0.2 },
            rff_features: 100,
            length_scale: 1.0,
            amplitude: 1.0,
            noise_std: 0.5,
            intervention: Intervention::SetToZero,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid(format!("d must be >= 2, got {}", self.d)));
        }
        match self.graph {
            GraphKind::ErdosRenyi { edge_prob } if !(0.0..=1.0).contains(&edge_prob) => {
                return Err(Error::invalid(format!("edge_prob must be in [0, 1], got {edge_prob}")));
            }
            GraphKind::ScaleFree { attach_m: 0 } => return Err(Error::invalid("attach_m must be >= 1")),
            _ => {}
        }
        if self.rff_features == 0 {
            return Err(Error::invalid("rff_features must be >= 1"));
        }
        if !(self.length_scale > 0.0 && self.length_scale.is_finite()) {
            return Err(Error::invalid("length_scale must be > 0"));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid("amplitude must be >= 0"));
        }
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return Err(Error::invalid("noise_std must be > 0"));
        }
        if let Intervention::Shift { delta } = self.intervention {
            if !delta.is_finite() {
                return Err(Error::invalid("shift delta must be finite"));
            }
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}
