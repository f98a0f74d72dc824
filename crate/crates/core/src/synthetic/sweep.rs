use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gen_dag, sample_anm_seeded, SyntheticSpec};
use crate::baselines::{notears_linear, NotearsParams};
use crate::error::{Error, Result};
use crate::eval::{false_omission_rate, mean_wasserstein_score};
use crate::graph::{from_edge_list, shd};
use crate::rng::derive_seed;
use crate::stats::spearman;

/// Regularization grid of the published sparsity sweep.
pub const REG_VALUES: [f64; 7] = [0.025, 0.05, 0.1, 0.2, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub n_obs_train: usize,
    pub n_obs_test: usize,
    pub n_int_per_var: usize,
    pub n_pairs: usize,
    pub alpha: f64,
    pub design: SweepDesign,
    /// `lambda1` is overwritten per sweep value.
    pub notears: NotearsParams,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_obs_train: 500,
            n_obs_test: 1500,
            n_int_per_var: 30,
            n_pairs: 500,
            alpha: 0.05,
            design: SweepDesign::Fresh,
            notears: NotearsParams::default(),
        }
    }
}

/// Settings under which the recall/omission trade-off spans the whole
/// [`REG_VALUES`] grid at d = 20: a denser graph, unit noise and
/// mechanisms with larger, smoother random features, one model per master
/// seed. With the default generator most mechanisms are too flat for
/// lambda >= 0.5 to keep any edge.
pub fn trade_off_preset(seed: u64) -> (SyntheticSpec, SweepConfig) {
    let spec = SyntheticSpec {
        d: 20,
        graph: super::GraphKind::ErdosRenyi { edge_prob: 0.3 },
        length_scale: 4.0,
        amplitude: 4.0,
        noise_std: 1.0,
        seed,
        ..Default::default()
    };
    let cfg = SweepConfig {
        design: SweepDesign::FixedModel,
        ..Default::default()
    };
    (spec, cfg)
}

/// How sweep cells share randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDesign {
    /// New graph, mechanisms and cells for every (lambda, repeat) cell.
    Fresh,
    /// New graph, mechanisms and cells per repeat, shared across lambdas.
    Paired,
    /// One graph and mechanism set from the master seed; each repeat draws
    /// new cells, shared across lambdas.
    FixedModel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub repeat: usize,
    pub seed: u64,
    pub mean_w: Option<f64>,
    pub for_rate: Option<f64>,
    pub shd: usize,
    pub n_edges: usize,
    pub n_true_edges: usize,
    pub converged: bool,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl MeanSd {
    /// Mean and sample standard deviation (0 for a single value); `None` for
    /// an empty input.
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, sd, n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub lambda: f64,
    pub mean_w: Option<MeanSd>,
    pub for_rate: Option<MeanSd>,
    pub shd: MeanSd,
    pub n_edges: MeanSd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummary>,
    /// Spearman correlation between per-run mean_w and SHD over runs where
    /// mean_w is defined.
    pub spearman_w_shd: Option<f64>,
}

/// (model seed, cell seed) of sweep cell (`lambda_index`, `repeat`). The
/// model seed fixes graph and mechanisms; the cell seed fixes the cells.
pub fn cell_seeds(master: u64, lambda_index: usize, repeat: usize, design: SweepDesign) -> (u64, u64) {
    let repeat_seed = |base: u64| derive_seed(base, "repeat", repeat as u64);
    match design {
        SweepDesign::Fresh => {
            let s = repeat_seed(derive_seed(master, "lambda", lambda_index as u64));
            (s, s)
        }
        SweepDesign::Paired => {
            let s = repeat_seed(master);
            (s, s)
        }
        SweepDesign::FixedModel => (master, repeat_seed(master)),
    }
}

fn run_cell(spec: &SyntheticSpec, cfg: &SweepConfig, lambda: f64, repeat: usize, seeds: (u64, u64)) -> Result<SweepRow> {
    let (model_seed, seed) = seeds;
    let spec = spec.with_seed(model_seed);
    let dag = gen_dag(&spec)?;
    let ds = sample_anm_seeded(&dag, &spec, seed, cfg.n_obs_train, cfg.n_obs_test, cfg.n_int_per_var)?;
    let params = NotearsParams { lambda1: lambda, ..cfg.notears };
    let fit = notears_linear(&ds.data, &params)?;
    let genes = ds.test.genes();
    let w = mean_wasserstein_score(&fit.edges, &ds.test, genes)?;
    let f = false_omission_rate(&fit.edges, &ds.test, genes, cfg.n_pairs, cfg.alpha, derive_seed(seed, "pairs", 0))?;
    let (pred, _) = from_edge_list(&fit.edges, genes);
    Ok(SweepRow {
        lambda,
        repeat,
        seed,
        mean_w: w.mean,
        for_rate: f.rate,
        shd: shd(&pred, &dag)?,
        n_edges: pred.n_edges(),
        n_true_edges: dag.n_edges(),
        converged: fit.diagnostics.converged,
        h: fit.diagnostics.h,
    })
}

/// For each `lambda` and repeat: fresh data from a derived seed, linear
/// NOTEARS with `lambda1 = lambda`, then mean Wasserstein, FOR and SHD
/// against the truth. Cells run in parallel; rows come back in
/// (lambda, repeat) order.
pub fn validate_metrics(spec: &SyntheticSpec, reg_values: &[f64], repeats: usize, cfg: &SweepConfig) -> Result<SweepResult> {
    spec.validate()?;
    if reg_values.is_empty() {
        return Err(Error::invalid("reg_values must not be empty"));
    }
    if repeats == 0 {
        return Err(Error::invalid("repeats must be >= 1"));
    }
    if let Some(l) = reg_values.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::invalid(format!("regularization values must be >= 0, got {l}")));
    }
    let cells: Vec<(usize, usize)> = (0..reg_values.len())
        .flat_map(|li| (0..repeats).map(move |r| (li, r)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(li, r)| run_cell(spec, cfg, reg_values[li], r, cell_seeds(spec.seed, li, r, cfg.design)))
        .collect::<Result<Vec<_>>>()?;

    let summary = summarize(&rows, reg_values);
    let (ws, shds): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.mean_w.map(|w| (w, r.shd as f64)))
        .unzip();
    let rho = if ws.len() >= 2 { spearman(&ws, &shds).ok().filter(|r| r.is_finite()) } else { None };
    Ok(SweepResult {
        rows,
        summary,
        spearman_w_shd: rho,
    })
}

pub fn summarize(rows: &[SweepRow], reg_values: &[f64]) -> Vec<SweepSummary> {
    reg_values
        .iter()
        .map(|&lambda| {
            let cell: Vec<&SweepRow> = rows.iter().filter(|r| r.lambda == lambda).collect();
            let collect = |f: &dyn Fn(&SweepRow) -> Option<f64>| cell.iter().filter_map(|r| f(r)).collect::<Vec<_>>();
            SweepSummary {
                lambda,
                mean_w: MeanSd::of(&collect(&|r| r.mean_w)),
                for_rate: MeanSd::of(&collect(&|r| r.for_rate)),
                shd: MeanSd::of(&collect(&|r| Some(r.shd as f64))).unwrap_or(MeanSd { mean: 0.0, sd: 0.0, n: 0 }),
                n_edges: MeanSd::of(&collect(&|r| Some(r.n_edges as f64))).unwrap_or(MeanSd { mean: 0.0, sd: 0.0, n: 0 }),
            }
        })
        .collect()
}

/// Plot-ready CSV: `lambda,repeat,mean_w,for,shd,n_edges`, empty fields for
/// undefined metrics.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("lambda,repeat,mean_w,for,shd,n_edges\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.lambda,
            r.repeat,
            opt(r.mean_w),
            opt(r.for_rate),
            r.shd,
            r.n_edges
        );
    }
    out
}
