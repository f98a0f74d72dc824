use rand::seq::index;

use crate::data::GeneTable;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeList};
use crate::rng::derived_rng;

/// `k` distinct ordered pairs of distinct genes, drawn uniformly without
/// replacement and listed in (source, target) index order.
pub fn random_k(genes: &GeneTable, k: usize, seed: u64) -> Result<EdgeList> {
    let d = genes.len();
    let total = d * d.saturating_sub(1);
    if k == 0 || k > total {
        return Err(Error::invalid(format!("k must be in 1..={total}, got {k}")));
    }
    let mut rng = derived_rng(seed, "random_k", 0);
    let mut picked = index::sample(&mut rng, total, k).into_vec();
    picked.sort_unstable();
    let edges = picked
        .into_iter()
        .map(|i| {
            let a = i / (d - 1);
            let r = i % (d - 1);
            let b = if r < a { r } else { r + 1 };
            Edge::new(genes.name(a), genes.name(b))
        })
        .collect();
    Ok(EdgeList::new(edges))
}
