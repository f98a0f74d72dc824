use rand::seq::SliceRandom;
use serde::Serialize;

use super::{is_control, round_half_up, PerturbDataset};
use crate::error::{Error, Result};
use crate::rng::derived_rng;

/// Train/test partition of a dataset, stratified by intervention label.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: PerturbDataset,
    pub test: PerturbDataset,
    pub fraction: f64,
    pub seed: u64,
    /// Source row indices of the training and test cells.
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitSummary {
    pub fraction: f64,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
}

impl DatasetSplit {
    pub fn summary(&self) -> SplitSummary {
        SplitSummary {
            fraction: self.fraction,
            seed: self.seed,
            n_train: self.train_rows.len(),
            n_test: self.test_rows.len(),
        }
    }
}

/// Shuffle each label stratum with its own stream and keep the first
/// `round(fraction * n)` rows of every stratum. Returns (kept, rest), both in
/// source row order.
fn take_per_stratum(ds: &PerturbDataset, fraction: f64, seed: u64, stream: &str) -> (Vec<usize>, Vec<usize>) {
    let mut kept = Vec::new();
    let mut rest = Vec::new();
    for (label, mut rows) in ds.strata() {
        let mut rng = derived_rng(seed, &format!("{stream}:{label}"), 0);
        rows.shuffle(&mut rng);
        let k = round_half_up(fraction * rows.len() as f64).min(rows.len());
        kept.extend_from_slice(&rows[..k]);
        rest.extend_from_slice(&rows[k..]);
    }
    kept.sort_unstable();
    rest.sort_unstable();
    (kept, rest)
}

/// Hold out `round(fraction * n_s)` cells of every label stratum as the test
/// set.
pub fn stratified_split(ds: &PerturbDataset, fraction: f64, seed: u64) -> Result<DatasetSplit> {
    if ds.n_cells() == 0 {
        return Err(Error::EmptyDataset);
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!("split fraction must be in (0, 1), got {fraction}")));
    }
    let (test_rows, train_rows) = take_per_stratum(ds, fraction, seed, "split");
    Ok(DatasetSplit {
        train: ds.select_rows(&train_rows),
        test: ds.select_rows(&test_rows),
        fraction,
        seed,
        train_rows,
        test_rows,
    })
}

/// Keep `round(fraction * n_s)` uniformly chosen cells of every stratum.
pub fn subsample_cells(ds: &PerturbDataset, fraction: f64, seed: u64) -> Result<PerturbDataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("cell fraction must be in (0, 1], got {fraction}")));
    }
    if fraction == 1.0 {
        return Ok(ds.clone());
    }
    let (kept, _) = take_per_stratum(ds, fraction, seed, "cells");
    Ok(ds.select_rows(&kept))
}

/// Keep `round(fraction * T)` of the `T` distinct intervention targets, all
/// of their cells, and every control cell.
pub fn subsample_interventions(ds: &PerturbDataset, fraction: f64, seed: u64) -> Result<PerturbDataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "intervention fraction must be in (0, 1], got {fraction}"
        )));
    }
    if fraction == 1.0 {
        return Ok(ds.clone());
    }
    let mut targets: Vec<&str> = ds.targets().into_iter().collect();
    let mut rng = derived_rng(seed, "interventions", 0);
    targets.shuffle(&mut rng);
    let k = round_half_up(fraction * targets.len() as f64).min(targets.len());
    let keep: std::collections::HashSet<&str> = targets[..k].iter().copied().collect();
    let rows: Vec<usize> = ds
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| is_control(l) || keep.contains(l.as_str()))
        .map(|(i, _)| i)
        .collect();
    Ok(ds.select_rows(&rows))
}
