//! Predicted networks as directed graphs over gene indices.
//!
//! Acyclicity is not required: inference methods may emit cycles and the
//! evaluation metrics handle them.

mod edge_list;
mod reach;

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub use edge_list::{from_edge_list, to_edge_list, Conversion, Edge, EdgeList};
pub use reach::{reachable, sample_negative_pairs, NegativePairs, Reachability};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectedGraph {
    /// Sorted, duplicate-free out-neighbours per node.
    adjacency: Vec<Vec<usize>>,
}

impl DirectedGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Build from an edge iterator; rejects self-loops and out-of-range
    /// endpoints, collapses duplicates.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            g.check(a)?;
            g.check(b)?;
            if a == b {
                return Err(Error::invalid(format!("self-loop on node {a}")));
            }
            g.insert(a, b);
        }
        Ok(g)
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            Err(Error::NodeOutOfRange { index: i, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// Insert `a → b` (indices already validated). Returns false when the
    /// edge was present.
    pub(crate) fn insert(&mut self, a: usize, b: usize) -> bool {
        let out = &mut self.adjacency[a];
        match out.binary_search(&b) {
            Ok(_) => false,
            Err(pos) => {
                out.insert(pos, b);
                true
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n() && self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn successors(&self, a: usize) -> &[usize] {
        &self.adjacency[a]
    }

    /// Edges in (source, target) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, out)| out.iter().map(move |&b| (a, b)))
    }

    /// Kahn topological order, or `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.n();
        let mut indeg = vec![0usize; n];
        for (_, b) in self.edges() {
            indeg[b] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(a) = queue.pop_front() {
            order.push(a);
            for &b in &self.adjacency[a] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    queue.push_back(b);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Parents of every node.
    pub fn parents(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.n()];
        for (a, b) in self.edges() {
            p[b].push(a);
        }
        p
    }
}

/// Edge-set union of graphs over the same node universe.
pub fn union(graphs: &[DirectedGraph]) -> Result<DirectedGraph> {
    let first = graphs
        .first()
        .ok_or_else(|| Error::invalid("union of an empty list of graphs"))?;
    let mut out = DirectedGraph::empty(first.n());
    for g in graphs {
        if g.n() != first.n() {
            return Err(Error::NodeCountMismatch(first.n(), g.n()));
        }
        for (a, b) in g.edges() {
            out.insert(a, b);
        }
    }
    Ok(out)
}

/// Structural Hamming distance: the number of unordered node pairs whose
/// edge status (none, a→b, b→a, both) differs. A reversal counts once.
pub fn shd(g1: &DirectedGraph, g2: &DirectedGraph) -> Result<usize> {
    if g1.n() != g2.n() {
        return Err(Error::NodeCountMismatch(g1.n(), g2.n()));
    }
    let mut pairs: Vec<(usize, usize)> = g1
        .edges()
        .chain(g2.edges())
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    Ok(pairs
        .into_iter()
        .filter(|&(a, b)| (g1.has_edge(a, b), g1.has_edge(b, a)) != (g2.has_edge(a, b), g2.has_edge(b, a)))
        .count())
}
