//! Evaluation engine and reference baselines for causal gene-network
//! inference from mixed observational / interventional single-cell data.
//!
//! The crate is organised around the life of a benchmark run:
//!
//! - [`data`]: perturbational datasets, loading, stratified splits and the
//!   subsampling used for scaling studies
//! - [`qc`]: perturbation-level and cell-level quality control
//! - [`graph`]: predicted networks, reachability, negative-pair sampling, SHD
//! - [`stats`]: Wasserstein distance, Mann–Whitney U, Anderson–Darling,
//!   Benjamini–Hochberg
//! - [`eval`]: biological precision/recall and the interventional mean
//!   Wasserstein / false-omission-rate metrics
//! - [`baselines`]: Random(k), Sortnregress, linear NOTEARS and the
//!   partitioned runner
//! - [`synthetic`]: ground-truth generators and the metric validation sweep
//! - [`ranking`]: the interval-merging scoreboard

pub mod baselines;
pub mod data;
mod error;
pub mod eval;
pub mod graph;
pub mod qc;
pub mod ranking;
pub mod rng;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};

/// Engine version embedded in every report.
pub const ENGINE_VERSION: &str = concat!("grn-eval ", env!("CARGO_PKG_VERSION"));

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/qc.md")]
    mod qc {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
    #[doc = include_str!("../../../book/src/ranking.md")]
    mod ranking {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
