//! Interval-merging scoreboard.
//!
//! Each metric gets its own ranking: models are sorted best first, then
//! walked from the worst upward, and every model whose `mean ± std` interval
//! overlaps the current group joins it. A group shares the worst position it
//! covers. The final score of a model is its mean rank across metrics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::EvalReport;

pub const WASSERSTEIN: &str = "wasserstein";
pub const FOR: &str = "for";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherIsBetter,
    LowerIsBetter,
}

/// Declared direction of a known metric.
pub fn direction(metric: &str) -> Result<Direction> {
    match metric {
        WASSERSTEIN => Ok(Direction::HigherIsBetter),
        FOR => Ok(Direction::LowerIsBetter),
        _ => Err(Error::invalid(format!("unknown metric '{metric}' (expected {WASSERSTEIN} or {FOR})"))),
    }
}

/// Which interval a candidate must overlap to join the group being built.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapRule {
    /// The interval of the group's worst member.
    #[default]
    Anchor,
    /// The union of all intervals already in the group.
    Hull,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub mean: f64,
    pub std: f64,
}

impl MetricScore {
    fn lo(&self) -> f64 {
        self.mean - self.std
    }

    fn hi(&self) -> f64 {
        self.mean + self.std
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScores {
    pub model: String,
    pub metrics: BTreeMap<String, MetricScore>,
}

impl ModelScores {
    pub fn new(model: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, metric: &str, mean: f64, std: f64) -> Self {
        self.metrics.insert(metric.to_string(), MetricScore { mean, std });
        self
    }
}

/// One line of the long score format `model,metric,mean,std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub model: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
}

/// Group long-format records by model. Duplicate (model, metric) pairs are
/// rejected.
pub fn models_from_records(records: &[ScoreRecord]) -> Result<Vec<ModelScores>> {
    let mut by_model: BTreeMap<&str, ModelScores> = BTreeMap::new();
    for r in records {
        let entry = by_model.entry(&r.model).or_insert_with(|| ModelScores::new(&r.model));
        let score = MetricScore { mean: r.mean, std: r.std };
        if entry.metrics.insert(r.metric.clone(), score).is_some() {
            return Err(Error::InconsistentMetrics(format!(
                "metric '{}' listed twice for model '{}'",
                r.metric, r.model
            )));
        }
    }
    Ok(by_model.into_values().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub model: String,
    pub ranks: BTreeMap<String, usize>,
    pub mean_rank: f64,
    pub scores: BTreeMap<String, MetricScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scoreboard {
    pub metrics: Vec<String>,
    pub rule: OverlapRule,
    pub rows: Vec<ScoreRow>,
}

impl Scoreboard {
    pub fn row(&self, model: &str) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.model == model)
    }
}

fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Shared ranks for one metric, indexed like `scores`.
pub fn rank_metric(scores: &[(&str, MetricScore)], dir: Direction, rule: OverlapRule) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let (na, sa) = scores[a];
        let (nb, sb) = scores[b];
        let by_mean = match dir {
            Direction::HigherIsBetter => sb.mean.total_cmp(&sa.mean),
            Direction::LowerIsBetter => sa.mean.total_cmp(&sb.mean),
        };
        by_mean.then_with(|| na.cmp(nb))
    });

    let mut ranks = vec![0; scores.len()];
    let mut end = order.len();
    while end > 0 {
        let bottom = scores[order[end - 1]].1;
        let mut group = (bottom.lo(), bottom.hi());
        let mut start = end - 1;
        while start > 0 {
            let cand = scores[order[start - 1]].1;
            let iv = (cand.lo(), cand.hi());
            let reference = match rule {
                OverlapRule::Anchor => (bottom.lo(), bottom.hi()),
                OverlapRule::Hull => group,
            };
            if !overlaps(iv, reference) {
                break;
            }
            group = (group.0.min(iv.0), group.1.max(iv.1));
            start -= 1;
        }
        for &i in &order[start..end] {
            ranks[i] = end;
        }
        end = start;
    }
    ranks
}

fn validate(scores: &[ModelScores]) -> Result<Vec<String>> {
    let first = scores
        .first()
        .ok_or_else(|| Error::invalid("ranking needs at least one model"))?;
    let metrics: BTreeSet<&String> = first.metrics.keys().collect();
    if metrics.is_empty() {
        return Err(Error::InconsistentMetrics(format!("model '{}' has no metrics", first.model)));
    }
    let mut names = BTreeSet::new();
    for m in scores {
        if !names.insert(m.model.as_str()) {
            return Err(Error::InconsistentMetrics(format!("model '{}' listed twice", m.model)));
        }
        let these: BTreeSet<&String> = m.metrics.keys().collect();
        if these != metrics {
            return Err(Error::InconsistentMetrics(format!(
                "model '{}' has metrics {:?}, expected {:?}",
                m.model, these, metrics
            )));
        }
        for (k, s) in &m.metrics {
            if !s.mean.is_finite() || !s.std.is_finite() || s.std < 0.0 {
                return Err(Error::invalid(format!("invalid score for {}/{k}: {} ± {}", m.model, s.mean, s.std)));
            }
        }
    }
    for k in &metrics {
        direction(k)?;
    }
    Ok(metrics.into_iter().cloned().collect())
}

pub fn rank_models(scores: &[ModelScores]) -> Result<Scoreboard> {
    rank_models_with(scores, OverlapRule::Anchor)
}

/// Rank every metric, average the ranks and sort by mean rank, then by the
/// FOR rank when present, then by model name.
pub fn rank_models_with(scores: &[ModelScores], rule: OverlapRule) -> Result<Scoreboard> {
    let metrics = validate(scores)?;
    let mut rows: Vec<ScoreRow> = scores
        .iter()
        .map(|m| ScoreRow {
            model: m.model.clone(),
            ranks: BTreeMap::new(),
            mean_rank: 0.0,
            scores: m.metrics.clone(),
        })
        .collect();
    for metric in &metrics {
        let column: Vec<(&str, MetricScore)> = scores.iter().map(|m| (m.model.as_str(), m.metrics[metric])).collect();
        let ranks = rank_metric(&column, direction(metric)?, rule);
        for (row, r) in rows.iter_mut().zip(ranks) {
            row.ranks.insert(metric.clone(), r);
        }
    }
    for row in &mut rows {
        row.mean_rank = row.ranks.values().sum::<usize>() as f64 / metrics.len() as f64;
    }
    rows.sort_by(|a, b| {
        a.mean_rank
            .partial_cmp(&b.mean_rank)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.ranks.get(FOR).cmp(&b.ranks.get(FOR)))
            .then_with(|| a.model.cmp(&b.model))
    });
    Ok(Scoreboard { metrics, rule, rows })
}

fn mean_std(values: &[f64]) -> MetricScore {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    MetricScore { mean, std: var.sqrt() }
}

/// Mean and population standard deviation of mean Wasserstein and FOR over
/// each model's reports, then [`rank_models`]. Undefined values are left
/// out of the aggregate; a model with no defined value for a metric is an
/// error.
pub fn scoreboard_from_reports(reports: &[(String, Vec<EvalReport>)]) -> Result<Scoreboard> {
    let mut scores = Vec::with_capacity(reports.len());
    for (model, runs) in reports {
        if runs.is_empty() {
            return Err(Error::invalid(format!("model '{model}' has no reports")));
        }
        let mut m = ModelScores::new(model);
        for (metric, values) in [
            (WASSERSTEIN, runs.iter().filter_map(|r| r.stat.mean_wasserstein).collect::<Vec<_>>()),
            (FOR, runs.iter().filter_map(|r| r.stat.for_rate).collect()),
        ] {
            if values.is_empty() {
                return Err(Error::invalid(format!("model '{model}' has no defined {metric} value")));
            }
            m.metrics.insert(metric.to_string(), mean_std(&values));
        }
        scores.push(m);
    }
    rank_models(&scores)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(name: &str, w: (f64, f64), f: (f64, f64)) -> ModelScores {
        ModelScores::new(name).with(WASSERSTEIN, w.0, w.1).with(FOR, f.0, f.1)
    }

    #[test]
    fn single_model() {
        let b = rank_models(&[m("a", (0.1, 0.0), (0.2, 0.0))]).unwrap();
        assert_eq!(b.rows[0].ranks[WASSERSTEIN], 1);
        assert_eq!(b.rows[0].ranks[FOR], 1);
        assert_eq!(b.rows[0].mean_rank, 1.0);
    }

    #[test]
    fn disjoint_intervals() {
        let b = rank_models(&[m("lo", (0.1, 0.01), (0.2, 0.0)), m("hi", (0.3, 0.01), (0.2, 0.0))]).unwrap();
        assert_eq!(b.row("hi").unwrap().ranks[WASSERSTEIN], 1);
        assert_eq!(b.row("lo").unwrap().ranks[WASSERSTEIN], 2);
        assert_eq!(b.row("lo").unwrap().ranks[FOR], 2);
    }

    #[test]
    fn groups_take_the_worst_position() {
        let s = MetricScore { mean: 0.0, std: 0.0 };
        let col = [
            ("a", MetricScore { mean: 5.0, ..s }),
            ("b", MetricScore { mean: 3.0, std: 1.0 }),
            ("c", MetricScore { mean: 2.5, ..s }),
            ("d", MetricScore { mean: 1.0, ..s }),
        ];
        assert_eq!(rank_metric(&col, Direction::HigherIsBetter, OverlapRule::Anchor), [1, 3, 3, 4]);
    }

    #[test]
    fn anchor_and_hull_differ_on_chains() {
        // c anchors [0.9, 1.1]; b overlaps it; a overlaps b only.
        let col = [
            ("a", MetricScore { mean: 1.5, std: 0.15 }),
            ("b", MetricScore { mean: 1.2, std: 0.2 }),
            ("c", MetricScore { mean: 1.0, std: 0.1 }),
        ];
        assert_eq!(rank_metric(&col, Direction::HigherIsBetter, OverlapRule::Anchor), [1, 3, 3]);
        assert_eq!(rank_metric(&col, Direction::HigherIsBetter, OverlapRule::Hull), [3, 3, 3]);
    }

    #[test]
    fn inconsistent_metric_sets() {
        let bad = [m("a", (0.1, 0.0), (0.2, 0.0)), ModelScores::new("b").with(WASSERSTEIN, 0.1, 0.0)];
        assert!(matches!(rank_models(&bad), Err(Error::InconsistentMetrics(_))));
        assert!(rank_models(&[]).is_err());
        assert!(rank_models(&[ModelScores::new("x").with("auc", 1.0, 0.0)]).is_err());
        assert!(rank_models(&[m("a", (0.1, -1.0), (0.2, 0.0))]).is_err());
    }

    #[test]
    fn duplicate_records_rejected() {
        let r = ScoreRecord {
            model: "a".into(),
            metric: FOR.into(),
            mean: 0.1,
            std: 0.0,
        };
        assert!(models_from_records(&[r.clone(), r]).is_err());
    }

    #[test]
    fn tie_break_by_for_rank() {
        let b = rank_models(&[m("x", (0.9, 0.0), (0.9, 0.0)), m("y", (0.1, 0.0), (0.1, 0.0))]).unwrap();
        assert_eq!(b.rows[0].mean_rank, b.rows[1].mean_rank);
        assert_eq!(b.rows[0].model, "y");
    }
}
