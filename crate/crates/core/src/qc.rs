//! Two-level quality control for perturbational datasets.
//!
//! Cell level: a cell targeting gene X is removed when its own expression of
//! X is above the `cell_percentile`-th percentile of X in control cells, i.e.
//! the knockdown did not take. Perturbation level: a label is kept only if it
//! has enough cells, induces enough differentially expressed genes, and (when
//! measured) reaches the minimum on-target knockdown.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{is_control, PerturbDataset};
use crate::error::{Error, Result};
use crate::stats::{anderson_darling_2s, benjamini_hochberg, AD_MIN_SAMPLE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QcConfig {
    pub de_alpha: f64,
    pub min_de_genes: usize,
    pub min_cells: usize,
    pub min_knockdown: f64,
    pub cell_percentile: f64,
}

impl Default for QcConfig {
    fn default() -> Self {
        Self {
            de_alpha: 0.05,
            min_de_genes: 50,
            min_cells: 25,
            min_knockdown: 0.30,
            cell_percentile: 10.0,
        }
    }
}

impl QcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.de_alpha > 0.0 && self.de_alpha < 1.0) {
            return Err(Error::invalid(format!("de_alpha must be in (0, 1), got {}", self.de_alpha)));
        }
        if !(self.cell_percentile > 0.0 && self.cell_percentile < 100.0) {
            return Err(Error::invalid(format!(
                "cell_percentile must be in (0, 100), got {}",
                self.cell_percentile
            )));
        }
        if self.min_de_genes == 0 || self.min_cells == 0 || !(self.min_knockdown > 0.0) {
            return Err(Error::invalid("QC thresholds must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    MinCells,
    MinDeGenes,
    Knockdown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelQc {
    pub n_cells: usize,
    pub n_de_genes: usize,
    pub knockdown: Option<f64>,
    pub reasons: Vec<ExclusionReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QcReport {
    pub retained: BTreeSet<String>,
    pub labels: BTreeMap<String, LabelQc>,
    pub cells_removed: usize,
}

/// Nearest-rank percentile: the value at order statistic `ceil(p/100 · n)`
/// (1-based, at least 1).
pub fn nearest_rank_percentile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((p * v.len() as f64) / 100.0 - 1e-9).ceil().max(1.0) as usize;
    Some(v[rank.min(v.len()) - 1])
}

/// Remove perturbed cells whose expression of their own (measured) target
/// is strictly above the control percentile threshold. Returns the filtered
/// dataset and the number of removed cells.
pub fn filter_cells_on_target(ds: &PerturbDataset, cfg: &QcConfig) -> Result<(PerturbDataset, usize)> {
    cfg.validate()?;
    let control = ds.control_rows();
    if control.is_empty() {
        return Err(Error::NoControlCells);
    }
    let mut thresholds: BTreeMap<&str, f64> = BTreeMap::new();
    for target in ds.targets() {
        if let Some(col) = ds.genes().index_of(target) {
            let t = nearest_rank_percentile(&ds.column_values(col, &control), cfg.cell_percentile)
                .expect("control set is non-empty");
            thresholds.insert(target, t);
        }
    }
    let m = ds.matrix();
    let keep: Vec<usize> = (0..ds.n_cells())
        .filter(|&r| {
            let label = ds.labels()[r].as_str();
            match (thresholds.get(label), ds.genes().index_of(label)) {
                (Some(&t), Some(col)) => m[(r, col)] <= t,
                _ => true,
            }
        })
        .collect();
    let removed = ds.n_cells() - keep.len();
    Ok((ds.select_rows(&keep), removed))
}

/// Screen every perturbation label against the three strong-perturbation
/// criteria. The DE screen runs a two-sample Anderson–Darling test of each
/// measured gene (perturbed vs control cells) and counts Benjamini–Hochberg
/// rejections at `de_alpha`, per label.
pub fn strong_perturbations(
    ds: &PerturbDataset,
    cfg: &QcConfig,
    knockdown: Option<&BTreeMap<String, f64>>,
) -> Result<QcReport> {
    cfg.validate()?;
    let control = ds.control_rows();
    if control.is_empty() {
        return Err(Error::NoControlCells);
    }
    let control_cols: Vec<Vec<f64>> = (0..ds.n_genes())
        .map(|c| ds.column_values(c, &control))
        .collect();

    let strata: Vec<(String, Vec<usize>)> = ds
        .strata()
        .into_iter()
        .filter(|(l, _)| !is_control(l))
        .map(|(l, rows)| (l.to_string(), rows))
        .collect();

    let per_label: Vec<(String, LabelQc)> = strata
        .par_iter()
        .map(|(label, rows)| {
            let n_de_genes = if rows.len() >= AD_MIN_SAMPLE && control.len() >= AD_MIN_SAMPLE {
                count_de_genes(ds, rows, &control_cols, cfg.de_alpha)?
            } else {
                0
            };
            let kd = knockdown.and_then(|k| k.get(label)).copied();
            let mut reasons = Vec::new();
            if rows.len() < cfg.min_cells {
                reasons.push(ExclusionReason::MinCells);
            }
            if n_de_genes < cfg.min_de_genes {
                reasons.push(ExclusionReason::MinDeGenes);
            }
            if kd.is_some_and(|k| k < cfg.min_knockdown) {
                reasons.push(ExclusionReason::Knockdown);
            }
            Ok((
                label.clone(),
                LabelQc {
                    n_cells: rows.len(),
                    n_de_genes,
                    knockdown: kd,
                    reasons,
                },
            ))
        })
        .collect::<Result<_>>()?;

    let retained = per_label
        .iter()
        .filter(|(_, q)| q.reasons.is_empty())
        .map(|(l, _)| l.clone())
        .collect();
    Ok(QcReport {
        retained,
        labels: per_label.into_iter().collect(),
        cells_removed: 0,
    })
}

fn count_de_genes(ds: &PerturbDataset, rows: &[usize], control_cols: &[Vec<f64>], alpha: f64) -> Result<usize> {
    let pvals: Vec<f64> = control_cols
        .iter()
        .enumerate()
        .map(|(c, ctl)| anderson_darling_2s(&ds.column_values(c, rows), ctl).map(|r| r.p_value))
        .collect::<Result<_>>()?;
    if pvals.is_empty() {
        return Ok(0);
    }
    Ok(benjamini_hochberg(&pvals, alpha)?.n_rejected())
}

/// Cell-level filtering followed by the perturbation-level screen on the
/// filtered cells. The output keeps control cells and cells of retained
/// labels.
pub fn apply_qc(
    ds: &PerturbDataset,
    cfg: &QcConfig,
    knockdown: Option<&BTreeMap<String, f64>>,
) -> Result<(PerturbDataset, QcReport)> {
    let (filtered, removed) = filter_cells_on_target(ds, cfg)?;
    let mut report = strong_perturbations(&filtered, cfg, knockdown)?;
    report.cells_removed = removed;
    let rows: Vec<usize> = filtered
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| is_control(l) || report.retained.contains(l.as_str()))
        .map(|(i, _)| i)
        .collect();
    Ok((filtered.select_rows(&rows), report))
}

/// Read a `label<TAB>fraction` knockdown sidecar.
pub fn read_knockdown_tsv(path: impl AsRef<Path>) -> Result<BTreeMap<String, f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = line
            .split_once('\t')
            .and_then(|(l, f)| f.trim().parse::<f64>().ok().map(|f| (l.to_string(), f)))
            .filter(|(l, f)| !l.is_empty() && f.is_finite());
        match parsed {
            Some((l, f)) => {
                out.insert(l, f);
            }
            None => {
                return Err(Error::Parse {
                    file: path.display().to_string(),
                    line: i + 1,
                    message: "expected `label<TAB>fraction`".into(),
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{GeneTable, CONTROL_LABEL};
    use nalgebra::DMatrix;

    #[test]
    fn percentile_of_hundred_values() {
        let v: Vec<f64> = (0..100).map(f64::from).collect();
        assert_eq!(nearest_rank_percentile(&v, 10.0), Some(9.0));
        assert_eq!(nearest_rank_percentile(&v, 0.5), Some(0.0));
        assert_eq!(nearest_rank_percentile(&[], 10.0), None);
    }

    fn one_gene(control: &[f64], perturbed: &[(&str, f64)]) -> PerturbDataset {
        let mut labels: Vec<String> = vec![CONTROL_LABEL.to_string(); control.len()];
        let mut values = control.to_vec();
        for (l, v) in perturbed {
            labels.push(l.to_string());
            values.push(*v);
        }
        let m = DMatrix::from_column_slice(values.len(), 1, &values);
        PerturbDataset::new(m, labels, GeneTable::new(["X"]).unwrap()).unwrap()
    }

    #[test]
    fn on_target_threshold() {
        let control: Vec<f64> = (0..100).map(f64::from).collect();
        let ds = one_gene(&control, &[("X", 5.0), ("X", 50.0), ("X", 9.0), ("X", 0.0), ("Q", 80.0)]);
        let (out, removed) = filter_cells_on_target(&ds, &QcConfig::default()).unwrap();
        assert_eq!(removed, 1);
        // 5 and 9 (== threshold) and 0 are kept; the unmeasured target Q is exempt
        let kept: Vec<f64> = out.rows_with_label("X").iter().map(|&r| out.matrix()[(r, 0)]).collect();
        assert_eq!(kept, [5.0, 9.0, 0.0]);
        assert_eq!(out.rows_with_label("Q").len(), 1);
        assert_eq!(out.control_rows().len(), 100);
    }

    #[test]
    fn requires_control_cells() {
        let ds = one_gene(&[], &[("X", 1.0)]);
        assert!(matches!(
            filter_cells_on_target(&ds, &QcConfig::default()),
            Err(Error::NoControlCells)
        ));
        assert!(matches!(
            strong_perturbations(&ds, &QcConfig::default(), None),
            Err(Error::NoControlCells)
        ));
    }

    #[test]
    fn config_validation() {
        assert!(QcConfig::default().validate().is_ok());
        let bad = QcConfig { de_alpha: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = QcConfig { cell_percentile: 100.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn knockdown_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("knockdown.tsv");
        fs::write(&p, "A\t0.2\nB\t0.9\n").unwrap();
        let k = read_knockdown_tsv(&p).unwrap();
        assert_eq!(k["A"], 0.2);
        fs::write(&p, "A 0.2\n").unwrap();
        assert!(read_knockdown_tsv(&p).is_err());
    }
}
