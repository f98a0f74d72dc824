use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;
use serde::Serialize;

use super::DirectedGraph;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Nodes reachable from `a` (including `a`) by breadth-first search.
fn descendants(g: &DirectedGraph, a: usize) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for &w in g.successors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// True iff a directed path `a → … → b` exists; `a` reaches itself.
pub fn reachable(g: &DirectedGraph, a: usize, b: usize) -> Result<bool> {
    for i in [a, b] {
        if i >= g.n() {
            return Err(Error::NodeOutOfRange { index: i, n: g.n() });
        }
    }
    if a == b {
        return Ok(true);
    }
    let mut seen = vec![false; g.n()];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for &w in g.successors(v) {
            if w == b {
                return Ok(true);
            }
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(false)
}

/// Reachability queries with the visited set of each source memoised, for
/// workloads where many queries share a handful of sources.
#[derive(Debug)]
pub struct Reachability<'g> {
    graph: &'g DirectedGraph,
    cache: HashMap<usize, Vec<bool>>,
}

impl<'g> Reachability<'g> {
    pub fn new(graph: &'g DirectedGraph) -> Self {
        Self {
            graph,
            cache: HashMap::new(),
        }
    }

    pub fn reachable(&mut self, a: usize, b: usize) -> Result<bool> {
        let n = self.graph.n();
        for i in [a, b] {
            if i >= n {
                return Err(Error::NodeOutOfRange { index: i, n });
            }
        }
        let graph = self.graph;
        Ok(self.cache.entry(a).or_insert_with(|| descendants(graph, a))[b])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NegativePairs {
    /// Ordered pairs `(a, b)` with no path from `a` to `b`, in draw order.
    pub pairs: Vec<(usize, usize)>,
    /// False when fewer than the requested number of pairs were found.
    pub complete: bool,
}

/// Sample up to `count` distinct ordered pairs `(a, b)` with `a ∈ sources`,
/// `b ≠ a`, and no directed path from `a` to `b`.
///
/// Candidates are drawn uniformly from `sources × (nodes \ {a})` and
/// rejected when reachable or already taken, so accepted pairs are uniform
/// over the valid set. At most `100 · count` candidates are drawn.
pub fn sample_negative_pairs(
    g: &DirectedGraph,
    sources: &[usize],
    count: usize,
    seed: u64,
) -> Result<NegativePairs> {
    if count == 0 {
        return Err(Error::invalid("negative-pair count must be at least 1"));
    }
    let mut sources: Vec<usize> = sources.to_vec();
    sources.sort_unstable();
    sources.dedup();
    if sources.is_empty() {
        return Err(Error::invalid("negative-pair sampling needs at least one source"));
    }
    if let Some(&s) = sources.iter().find(|&&s| s >= g.n()) {
        return Err(Error::NodeOutOfRange { index: s, n: g.n() });
    }

    let n = g.n();
    let mut pairs = Vec::with_capacity(count);
    if n < 2 {
        return Ok(NegativePairs { pairs, complete: false });
    }
    let mut reach = Reachability::new(g);
    let mut taken = HashSet::with_capacity(count);
    let mut rng = rng_from_seed(seed);
    let budget = count.saturating_mul(100);
    for _ in 0..budget {
        let a = sources[rng.random_range(0..sources.len())];
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        if reach.reachable(a, b)? || !taken.insert((a, b)) {
            continue;
        }
        pairs.push((a, b));
        if pairs.len() == count {
            break;
        }
    }
    let complete = pairs.len() == count;
    Ok(NegativePairs { pairs, complete })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> DirectedGraph {
        DirectedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn chain_reachability() {
        let g = chain();
        assert!(reachable(&g, 0, 2).unwrap());
        assert!(!reachable(&g, 2, 0).unwrap());
        assert!(reachable(&g, 1, 1).unwrap());
        assert!(reachable(&g, 0, 3).is_err());
    }

    #[test]
    fn two_cycle() {
        let g = DirectedGraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert!(reachable(&g, 1, 0).unwrap());
        let mut r = Reachability::new(&g);
        assert!(r.reachable(1, 0).unwrap());
    }

    #[test]
    fn edgeless_graph_everything_negative() {
        let g = DirectedGraph::empty(10);
        let s = sample_negative_pairs(&g, &[3, 7], 5, 1).unwrap();
        assert!(s.complete);
        assert_eq!(s.pairs.len(), 5);
        for (a, b) in s.pairs {
            assert!(a == 3 || a == 7);
            assert_ne!(a, b);
        }
    }

    #[test]
    fn deterministic() {
        let g = chain();
        let a = sample_negative_pairs(&g, &[0, 1, 2], 3, 42).unwrap();
        let b = sample_negative_pairs(&g, &[0, 1, 2], 3, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn runs_out_of_pairs() {
        // Only (2,0), (2,1), (1,0) are unreachable.
        let g = chain();
        let s = sample_negative_pairs(&g, &[0, 1, 2], 10, 0).unwrap();
        assert!(!s.complete);
        assert_eq!(s.pairs.len(), 3);
        let none = sample_negative_pairs(&g, &[0], 2, 0).unwrap();
        assert!(none.pairs.is_empty() && !none.complete);
    }

    #[test]
    fn bad_arguments() {
        let g = chain();
        assert!(sample_negative_pairs(&g, &[], 1, 0).is_err());
        assert!(sample_negative_pairs(&g, &[0], 0, 0).is_err());
        assert!(sample_negative_pairs(&g, &[5], 1, 0).is_err());
    }
}
