use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::reference::{unordered, ReferenceNetwork};
use crate::data::GeneTable;
use crate::graph::EdgeList;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrScore {
    pub precision: f64,
    pub recall: f64,
    pub n_predicted: usize,
    pub n_reference: usize,
    pub n_true_positive: usize,
}

impl PrScore {
    fn compute(pred: &BTreeSet<(String, String)>, reference: &BTreeSet<(String, String)>) -> Self {
        let tp = pred.intersection(reference).count();
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        Self {
            precision: ratio(tp, pred.len()),
            recall: ratio(tp, reference.len()),
            n_predicted: pred.len(),
            n_reference: reference.len(),
            n_true_positive: tp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BioScore {
    pub per_ref: BTreeMap<String, PrScore>,
    pub pooled: PrScore,
    /// Set when the prediction has no usable edge; scores are then 0.
    pub empty_prediction: bool,
}

/// Precision and recall of the predicted network read as undirected pairs,
/// against each reference restricted to the gene universe, and against the
/// union of all references.
pub fn bio_precision_recall(pred: &EdgeList, refs: &[ReferenceNetwork], genes: &GeneTable) -> BioScore {
    let predicted: BTreeSet<(String, String)> = pred
        .edges
        .iter()
        .filter(|e| e.source != e.target && genes.contains(&e.source) && genes.contains(&e.target))
        .map(|e| unordered(&e.source, &e.target))
        .collect();

    let mut pooled_ref = BTreeSet::new();
    let mut per_ref = BTreeMap::new();
    for r in refs {
        let restricted = r.restricted_to(genes);
        per_ref.insert(r.name.clone(), PrScore::compute(&predicted, &restricted));
        pooled_ref.extend(restricted);
    }
    BioScore {
        per_ref,
        pooled: PrScore::compute(&predicted, &pooled_ref),
        empty_prediction: predicted.is_empty(),
    }
}
