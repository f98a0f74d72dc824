//! Interventional metrics on held-out data.
//!
//! For a predicted edge A→B the interventional distribution of B under a
//! knockdown of A is compared with B's control distribution. Predicted
//! edges are scored by the Wasserstein distance between the two (higher
//! means a stronger effect); predicted non-edges are checked with a
//! Mann–Whitney U test, and a rejection counts as a false omission.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{GeneTable, PerturbDataset};
use crate::error::{Error, Result};
use crate::graph::{from_edge_list, sample_negative_pairs, EdgeList};
use crate::stats::{mann_whitney_u, wasserstein_1d};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WassersteinScore {
    /// `None` when no edge could be evaluated.
    pub mean: Option<f64>,
    pub n_evaluated: usize,
    pub n_skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForScore {
    /// `None` when no negative pair could be tested.
    pub rate: Option<f64>,
    pub n_tested: usize,
    pub n_rejected: usize,
    pub n_requested: usize,
    /// False when fewer negative pairs than requested were available.
    pub complete: bool,
    pub alpha: f64,
}

/// Cached row groups of a test split.
struct Groups<'a> {
    ds: &'a PerturbDataset,
    control: Vec<usize>,
    by_label: BTreeMap<&'a str, Vec<usize>>,
}

impl<'a> Groups<'a> {
    fn new(ds: &'a PerturbDataset) -> Result<Self> {
        let control = ds.control_rows();
        if control.is_empty() {
            return Err(Error::NoControlCells);
        }
        let by_label = ds.strata();
        Ok(Self { ds, control, by_label })
    }

    fn intervened(&self, label: &str) -> Option<&Vec<usize>> {
        if crate::data::is_control(label) {
            return None;
        }
        self.by_label.get(label).filter(|rows| !rows.is_empty())
    }

    /// (values of `target` under σ(source), values of `target` in control)
    fn samples(&self, source: &str, target: &str) -> Option<(Vec<f64>, Vec<f64>)> {
        let rows = self.intervened(source)?;
        let col = self.ds.genes().index_of(target)?;
        Some((self.ds.column_values(col, rows), self.ds.column_values(col, &self.control)))
    }
}

/// Mean Wasserstein distance over the distinct predicted edges A→B whose
/// source was intervened on in `test` and whose target is measured. Other
/// edges (including self-loops and symbols outside `genes`) are skipped and
/// counted.
pub fn mean_wasserstein_score(pred: &EdgeList, test: &PerturbDataset, genes: &GeneTable) -> Result<WassersteinScore> {
    let groups = Groups::new(test)?;
    let edges: BTreeSet<(&str, &str)> = pred
        .edges
        .iter()
        .map(|e| (e.source.as_str(), e.target.as_str()))
        .collect();
    let edges: Vec<(&str, &str)> = edges.into_iter().collect();

    let distances: Vec<Option<f64>> = edges
        .par_iter()
        .map(|&(a, b)| {
            if a == b || !genes.contains(a) || !genes.contains(b) {
                return Ok(None);
            }
            match groups.samples(a, b) {
                Some((int, ctl)) => wasserstein_1d(&int, &ctl).map(Some),
                None => Ok(None),
            }
        })
        .collect::<Result<_>>()?;

    let evaluated: Vec<f64> = distances.iter().flatten().copied().collect();
    let n_evaluated = evaluated.len();
    let mean = (n_evaluated > 0).then(|| evaluated.iter().sum::<f64>() / n_evaluated as f64);
    Ok(WassersteinScore {
        mean,
        n_evaluated,
        n_skipped: edges.len() - n_evaluated,
    })
}

/// Estimate the false omission rate of the predicted network: sample
/// negative pairs (A, B) with A intervened in `test` and no path A→B, test
/// σ(A)-vs-control samples of B with a two-sided Mann–Whitney U test, and
/// report the fraction with `p < alpha`.
pub fn false_omission_rate(
    pred: &EdgeList,
    test: &PerturbDataset,
    genes: &GeneTable,
    n_pairs: usize,
    alpha: f64,
    seed: u64,
) -> Result<ForScore> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let groups = Groups::new(test)?;
    let (graph, _) = from_edge_list(pred, genes);
    let sources: Vec<usize> = genes
        .names()
        .iter()
        .enumerate()
        .filter(|(_, g)| groups.intervened(g).is_some())
        .map(|(i, _)| i)
        .collect();
    if sources.is_empty() {
        return Err(Error::NoInterventions);
    }
    let sample = sample_negative_pairs(&graph, &sources, n_pairs, seed)?;

    let pvals: Vec<Option<f64>> = sample
        .pairs
        .par_iter()
        .map(|&(a, b)| match groups.samples(genes.name(a), genes.name(b)) {
            Some((int, ctl)) => mann_whitney_u(&int, &ctl).map(|r| Some(r.p_value)),
            None => Ok(None),
        })
        .collect::<Result<_>>()?;

    let tested: Vec<f64> = pvals.into_iter().flatten().collect();
    let n_rejected = tested.iter().filter(|&&p| p < alpha).count();
    let n_tested = tested.len();
    Ok(ForScore {
        rate: (n_tested > 0).then(|| n_rejected as f64 / n_tested as f64),
        n_tested,
        n_rejected,
        n_requested: n_pairs,
        complete: sample.complete,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::CONTROL_LABEL;
    use nalgebra::DMatrix;

    /// Genes A, B, C. Control cells have B = base; cells under σ(A) have
    /// B = base + shift. C is never intervened on.
    fn fixture(shift: f64) -> PerturbDataset {
        let base = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for &b in &base {
            rows.extend([1.0, b, 0.0]);
            labels.push(CONTROL_LABEL.to_string());
        }
        for &b in &base {
            rows.extend([0.0, b + shift, 0.0]);
            labels.push("A".to_string());
        }
        let m = DMatrix::from_row_slice(labels.len(), 3, &rows);
        PerturbDataset::new(m, labels, GeneTable::new(["A", "B", "C"]).unwrap()).unwrap()
    }

    #[test]
    fn identical_distributions_score_zero() {
        let ds = fixture(0.0);
        let s = mean_wasserstein_score(&EdgeList::from_pairs([("A", "B")]), &ds, ds.genes()).unwrap();
        assert_eq!(s.mean, Some(0.0));
    }

    #[test]
    fn shifted_distribution() {
        let ds = fixture(2.0);
        let s = mean_wasserstein_score(&EdgeList::from_pairs([("A", "B")]), &ds, ds.genes()).unwrap();
        assert!((s.mean.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unperturbed_source_is_skipped() {
        let ds = fixture(2.0);
        let el = EdgeList::from_pairs([("A", "B"), ("C", "B"), ("A", "B")]);
        let s = mean_wasserstein_score(&el, &ds, ds.genes()).unwrap();
        assert_eq!((s.n_evaluated, s.n_skipped), (1, 1));
        assert!((s.mean.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn no_evaluable_edge_is_undefined() {
        let ds = fixture(2.0);
        let s = mean_wasserstein_score(&EdgeList::from_pairs([("C", "B")]), &ds, ds.genes()).unwrap();
        assert_eq!(s.mean, None);
    }

    #[test]
    fn requires_controls() {
        let ds = fixture(0.0);
        let no_ctl = ds.select_rows(&ds.rows_with_label("A"));
        assert!(matches!(
            mean_wasserstein_score(&EdgeList::default(), &no_ctl, ds.genes()),
            Err(Error::NoControlCells)
        ));
        assert!(matches!(
            false_omission_rate(&EdgeList::default(), &no_ctl, ds.genes(), 5, 0.05, 0),
            Err(Error::NoControlCells)
        ));
    }

    #[test]
    fn for_counts_rejections() {
        // Only A is intervened, so negatives are (A,B) and (A,C).
        let ds = fixture(0.0);
        let f = false_omission_rate(&EdgeList::default(), &ds, ds.genes(), 2, 0.05, 1).unwrap();
        assert_eq!((f.n_tested, f.n_rejected, f.rate), (2, 0, Some(0.0)));

        let ds = fixture(10.0);
        let pred = EdgeList::from_pairs([("A", "C")]);
        let f = false_omission_rate(&pred, &ds, ds.genes(), 1, 0.05, 1).unwrap();
        // only (A,B) is negative; 6 vs 6 fully separated → exact p = 2/924
        assert_eq!((f.n_tested, f.n_rejected), (1, 1));
        assert_eq!(f.rate, Some(1.0));
    }

    #[test]
    fn for_without_negatives() {
        let ds = fixture(0.0);
        let pred = EdgeList::from_pairs([("A", "B"), ("A", "C")]);
        let f = false_omission_rate(&pred, &ds, ds.genes(), 3, 0.05, 1).unwrap();
        assert_eq!(f.rate, None);
        assert!(!f.complete);
    }
}
