//! Scoring of predicted networks: biological precision/recall against
//! reference databases and the interventional statistical metrics.

mod bio;
mod reference;
mod statistical;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::PerturbDataset;
use crate::error::{Error, Result};
use crate::graph::{from_edge_list, Conversion, EdgeList};

pub use bio::{bio_precision_recall, BioScore, PrScore};
pub use reference::ReferenceNetwork;
pub use statistical::{false_omission_rate, mean_wasserstein_score, ForScore, WassersteinScore};

/// Default number of sampled negative pairs for the FOR estimate.
pub const DEFAULT_N_PAIRS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub n_pairs: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n_pairs: DEFAULT_N_PAIRS,
            alpha: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatScore {
    pub mean_wasserstein: Option<f64>,
    pub n_evaluated: usize,
    pub n_skipped: usize,
    pub for_rate: Option<f64>,
    pub n_pairs: usize,
    pub n_pairs_rejected: usize,
    pub n_pairs_requested: usize,
    pub pairs_complete: bool,
    pub alpha: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub bio: f64,
    pub wasserstein: f64,
    pub false_omission: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub engine: String,
    pub config: EvalConfig,
    pub conversion: Conversion,
    pub bio: BioScore,
    pub stat: StatScore,
    /// Wall-clock seconds. Left out of serialized output when `None` so that
    /// reports stay byte-reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_seconds: Option<Timing>,
}

impl EvalReport {
    pub fn without_timing(&self) -> EvalReport {
        EvalReport {
            timing_seconds: None,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Run every metric on one predicted network. An empty or fully
/// unresolvable prediction still gets a FOR estimate (every sampled pair is
/// negative); a test split without any intervened gene leaves the FOR
/// undefined.
pub fn evaluate(
    pred: &EdgeList,
    test: &PerturbDataset,
    refs: &[ReferenceNetwork],
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let genes = test.genes();
    let t0 = Instant::now();
    let (_, conversion) = from_edge_list(pred, genes);

    let bio = bio_precision_recall(pred, refs, genes);
    let t_bio = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let w = mean_wasserstein_score(pred, test, genes)?;
    let t_w = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let f = match false_omission_rate(pred, test, genes, cfg.n_pairs, cfg.alpha, cfg.seed) {
        Ok(f) => f,
        Err(Error::NoInterventions) => ForScore {
            rate: None,
            n_tested: 0,
            n_rejected: 0,
            n_requested: cfg.n_pairs,
            complete: false,
            alpha: cfg.alpha,
        },
        Err(e) => return Err(e),
    };
    let t_f = t2.elapsed().as_secs_f64();

    Ok(EvalReport {
        engine: crate::ENGINE_VERSION.to_string(),
        config: *cfg,
        conversion,
        bio,
        stat: StatScore {
            mean_wasserstein: w.mean,
            n_evaluated: w.n_evaluated,
            n_skipped: w.n_skipped,
            for_rate: f.rate,
            n_pairs: f.n_tested,
            n_pairs_rejected: f.n_rejected,
            n_pairs_requested: f.n_requested,
            pairs_complete: f.complete,
            alpha: f.alpha,
            seed: cfg.seed,
        },
        timing_seconds: Some(Timing {
            bio: t_bio,
            wasserstein: t_w,
            false_omission: t_f,
            total: t0.elapsed().as_secs_f64(),
        }),
    })
}
