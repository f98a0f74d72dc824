use rand::seq::SliceRandom;
use rand::Rng;

use super::{GraphKind, SyntheticSpec};
use crate::error::Result;
use crate::graph::DirectedGraph;
use crate::rng::derived_rng;

/// Random DAG for `spec`. Erdős–Rényi graphs draw each pair of a seeded
/// node permutation once, oriented along the permutation. Scale-free graphs
/// attach each arriving node to `min(attach_m, t)` earlier nodes with
/// probability proportional to degree + 1, oriented from earlier to later.
pub fn gen_dag(spec: &SyntheticSpec) -> Result<DirectedGraph> {
    spec.validate()?;
    let d = spec.d;
    let mut rng = derived_rng(spec.seed, "dag", 0);
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(&mut rng);

    let mut edges = Vec::new();
    match spec.graph {
        GraphKind::ErdosRenyi { edge_prob } => {
            for i in 0..d {
                for j in i + 1..d {
                    if rng.random::<f64>() < edge_prob {
                        edges.push((perm[i], perm[j]));
                    }
                }
            }
        }
        GraphKind::ScaleFree { attach_m } => {
            let mut degree = vec![0usize; d];
            for t in 1..d {
                let m = attach_m.min(t);
                let mut chosen: Vec<usize> = Vec::with_capacity(m);
                while chosen.len() < m {
                    let total: usize = (0..t).filter(|s| !chosen.contains(s)).map(|s| degree[s] + 1).sum();
                    let mut r = rng.random_range(0..total);
                    for s in (0..t).filter(|s| !chosen.contains(s)) {
                        if r < degree[s] + 1 {
                            chosen.push(s);
                            break;
                        }
                        r -= degree[s] + 1;
                    }
                }
                for s in chosen {
                    degree[s] += 1;
                    degree[t] += 1;
                    edges.push((perm[s], perm[t]));
                }
            }
        }
    }
    DirectedGraph::from_edges(d, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn er(d: usize, p: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            d,
            graph: GraphKind::ErdosRenyi { edge_prob: p },
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn er_extremes() {
        assert_eq!(gen_dag(&er(7, 0.0, 1)).unwrap().n_edges(), 0);
        let full = gen_dag(&er(5, 1.0, 1)).unwrap();
        assert_eq!(full.n_edges(), 10);
        assert!(full.is_acyclic());
    }

    #[test]
    fn scale_free_tree() {
        for seed in 0..10 {
            let spec = SyntheticSpec {
                d: 20,
                graph: GraphKind::ScaleFree { attach_m: 1 },
                seed,
                ..Default::default()
            };
            let g = gen_dag(&spec).unwrap();
            assert_eq!(g.n_edges(), 19);
            assert!(g.is_acyclic());
        }
    }

    #[test]
    fn scale_free_edge_count() {
        let spec = SyntheticSpec {
            d: 30,
            graph: GraphKind::ScaleFree { attach_m: 3 },
            ..Default::default()
        };
        // 1 + 2 + 3·27
        assert_eq!(gen_dag(&spec).unwrap().n_edges(), 84);
    }

    #[test]
    fn invalid_spec() {
        assert!(gen_dag(&er(1, 0.5, 0)).is_err());
        assert!(gen_dag(&er(4, 1.5, 0)).is_err());
    }
}
