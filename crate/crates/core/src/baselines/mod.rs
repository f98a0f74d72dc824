//! Reference inference methods and the variable-partitioned runner.
//!
//! Every method consumes the full expression matrix of a training split
//! (control and perturbed cells alike) and emits an [`EdgeList`].

mod notears;
mod random;
mod sortnregress;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::PerturbDataset;
use crate::error::{Error, Result};
use crate::graph::{self, DirectedGraph, Edge, EdgeList};
use crate::rng::{derive_seed, derived_rng};

pub use notears::{
    acyclicity, fit as notears_fit, h, notears_linear, NotearsDiagnostics, NotearsParams, NotearsResult, Objective,
    WeightedAdjacency,
};
pub use random::random_k;
pub use sortnregress::{sortnregress, variance_order, MIN_CELLS as SORTNREGRESS_MIN_CELLS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Random,
    Sortnregress,
    NotearsLinear,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Random, Method::Sortnregress, Method::NotearsLinear];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Sortnregress => "sortnregress",
            Method::NotearsLinear => "notears_linear",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method '{s}' (expected random, sortnregress or notears_linear)")))
    }
}

/// Partition sizes used for external methods in published benchmark runs;
/// `None` means the method ran on all genes at once.
pub fn default_partition_size(model: &str) -> Option<usize> {
    match model.to_ascii_lowercase().as_str() {
        "pc" | "ges" | "gies" => Some(30),
        "dcdi-g" | "dcdi-dsf" | "dcdi" => Some(50),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodConfig {
    pub name: Method,
    pub seed: u64,
    pub partition_size: Option<usize>,
    /// Edge count for `random`.
    pub k: usize,
    pub lambda1: f64,
    pub max_outer_iters: usize,
    pub h_tolerance: f64,
    pub weight_threshold: f64,
    pub max_inner_iters: usize,
}

impl Default for MethodConfig {
    fn default() -> Self {
        let nt = NotearsParams::default();
        Self {
            name: Method::NotearsLinear,
            seed: 0,
            partition_size: None,
            k: 1000,
            lambda1: nt.lambda1,
            max_outer_iters: nt.max_outer_iters,
            h_tolerance: nt.h_tolerance,
            weight_threshold: nt.weight_threshold,
            max_inner_iters: nt.max_inner_iters,
        }
    }
}

impl MethodConfig {
    pub fn new(name: Method) -> Self {
        Self {
            name,
            ..Default::default()
        }
    }

    pub fn notears_params(&self) -> NotearsParams {
        NotearsParams {
            lambda1: self.lambda1,
            max_outer_iters: self.max_outer_iters,
            h_tolerance: self.h_tolerance,
            weight_threshold: self.weight_threshold,
            max_inner_iters: self.max_inner_iters,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.partition_size {
            if p < 2 {
                return Err(Error::invalid(format!("partition_size must be >= 2, got {p}")));
            }
        }
        match self.name {
            Method::Random if self.k == 0 => Err(Error::invalid("k must be >= 1")),
            Method::NotearsLinear => self.notears_params().validate(),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockReport {
    pub block: usize,
    pub n_genes: usize,
    pub seed: u64,
    pub n_edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notears: Option<NotearsDiagnostics>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub edges: EdgeList,
    pub blocks: Vec<BlockReport>,
}

impl RunOutput {
    /// False when any NOTEARS block stopped short of the h tolerance.
    pub fn converged(&self) -> bool {
        self.blocks.iter().all(|b| b.notears.is_none_or(|d| d.converged))
    }
}

fn run_block(cfg: &MethodConfig, train: &PerturbDataset, seed: u64) -> Result<(EdgeList, Option<NotearsDiagnostics>)> {
    match cfg.name {
        Method::Random => Ok((random_k(train.genes(), cfg.k, seed)?, None)),
        Method::Sortnregress => Ok((sortnregress(train)?, None)),
        Method::NotearsLinear => {
            let r = notears_linear(train, &cfg.notears_params())?;
            Ok((r.edges, Some(r.diagnostics)))
        }
    }
}

/// Run the configured method, partitioned when `cfg.partition_size` is set.
pub fn run_method(cfg: &MethodConfig, train: &PerturbDataset) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.partition_size {
        Some(p) => partitioned_run(cfg, train, p, cfg.seed),
        None => direct(cfg, train, cfg.seed),
    }
}

fn direct(cfg: &MethodConfig, train: &PerturbDataset, seed: u64) -> Result<RunOutput> {
    let (edges, notears) = run_block(cfg, train, seed)?;
    Ok(RunOutput {
        blocks: vec![BlockReport {
            block: 0,
            n_genes: train.n_genes(),
            seed,
            n_edges: edges.len(),
            notears,
        }],
        edges,
    })
}

/// Shuffle genes by `seed`, cut them into blocks of at most
/// `partition_size`, run the method on each block in parallel and return the
/// union of the block networks. Single-gene blocks contribute no edges.
pub fn partitioned_run(cfg: &MethodConfig, train: &PerturbDataset, partition_size: usize, seed: u64) -> Result<RunOutput> {
    if partition_size < 2 {
        return Err(Error::invalid(format!("partition_size must be >= 2, got {partition_size}")));
    }
    let d = train.n_genes();
    if partition_size >= d {
        return direct(cfg, train, seed);
    }
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(&mut derived_rng(seed, "partition", 0));
    let blocks: Vec<Vec<usize>> = perm
        .chunks(partition_size)
        .map(|c| {
            let mut c = c.to_vec();
            c.sort_unstable();
            c
        })
        .collect();

    let results: Vec<Result<(EdgeList, BlockReport)>> = blocks
        .par_iter()
        .enumerate()
        .map(|(i, cols)| {
            let block_seed = derive_seed(seed, "block", i as u64);
            let (edges, notears) = if cols.len() < 2 {
                (EdgeList::default(), None)
            } else {
                run_block(cfg, &train.select_genes(cols), block_seed)
                    .map_err(|e| Error::Block { block: i, source: Box::new(e) })?
            };
            let report = BlockReport {
                block: i,
                n_genes: cols.len(),
                seed: block_seed,
                n_edges: edges.len(),
                notears,
            };
            Ok((edges, report))
        })
        .collect();

    let genes = train.genes();
    let mut graphs = Vec::with_capacity(blocks.len());
    let mut weights: HashMap<(usize, usize), Option<f64>> = HashMap::new();
    let mut reports = Vec::with_capacity(blocks.len());
    for r in results {
        let (edges, report) = r?;
        let mut pairs = Vec::with_capacity(edges.len());
        for e in &edges.edges {
            let (a, b) = match (genes.index_of(&e.source), genes.index_of(&e.target)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::invalid(format!("block {} returned an unknown gene", report.block))),
            };
            weights.insert((a, b), e.weight);
            pairs.push((a, b));
        }
        graphs.push(DirectedGraph::from_edges(d, pairs)?);
        reports.push(report);
    }
    let merged = graph::union(&graphs)?;
    let edges = merged
        .edges()
        .map(|(a, b)| Edge {
            source: genes.name(a).to_string(),
            target: genes.name(b).to_string(),
            weight: weights[&(a, b)],
        })
        .collect();
    Ok(RunOutput {
        edges: EdgeList::new(edges),
        blocks: reports,
    })
}
