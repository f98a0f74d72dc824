use grn_eval::baselines::{h, random_k, sortnregress, variance_order, Objective};
use grn_eval::rng::rng_from_seed;
use rand::Rng;
use grn_eval::data::{GeneTable, PerturbDataset, CONTROL_LABEL};
use grn_eval::graph::{from_edge_list, DirectedGraph};
use grn_eval::ranking::{rank_metric, rank_models, rank_models_with, Direction, MetricScore, ModelScores, OverlapRule, FOR, WASSERSTEIN};
use grn_eval::synthetic::{gen_dag, sample_anm, GraphKind, SyntheticSpec};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn scores(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..0.1), 1..max)
}

fn named(raw: &[(f64, f64)]) -> Vec<(String, MetricScore)> {
    raw.iter()
        .enumerate()
        .map(|(i, &(mean, std))| (format!("m{i:02}"), MetricScore { mean, std }))
        .collect()
}

fn ranks(raw: &[(f64, f64)], dir: Direction, rule: OverlapRule) -> Vec<usize> {
    let n = named(raw);
    let view: Vec<(&str, MetricScore)> = n.iter().map(|(k, s)| (k.as_str(), *s)).collect();
    rank_metric(&view, dir, rule)
}

proptest! {
    #[test]
    fn ranks_are_bounded_and_monotone(raw in scores(15), hull in any::<bool>()) {
        let rule = if hull { OverlapRule::Hull } else { OverlapRule::Anchor };
        let r = ranks(&raw, Direction::HigherIsBetter, rule);
        let n = raw.len();
        prop_assert!(r.iter().all(|&k| (1..=n).contains(&k)));
        prop_assert!(r.contains(&n));
        for i in 0..n {
            for j in 0..n {
                if raw[i].0 > raw[j].0 {
                    prop_assert!(r[i] <= r[j]);
                }
            }
        }
    }

    #[test]
    fn zero_width_intervals_give_competition_ranks(means in prop::collection::btree_set(0u32..1000, 1..12)) {
        let raw: Vec<(f64, f64)> = means.iter().rev().map(|&m| (f64::from(m), 0.0)).collect();
        prop_assert_eq!(ranks(&raw, Direction::HigherIsBetter, OverlapRule::Anchor), (1..=raw.len()).collect::<Vec<_>>());
    }

    #[test]
    fn input_order_does_not_matter(raw in scores(10), shift in 0usize..10) {
        let mut rotated = raw.clone();
        let k = shift % raw.len();
        rotated.rotate_left(k);
        let models = |v: &[(f64, f64)], off: usize| -> Vec<ModelScores> {
            v.iter().enumerate().map(|(i, &(m, s))| {
                ModelScores::new(format!("m{:02}", (i + off) % v.len())).with(WASSERSTEIN, m, s).with(FOR, 1.0 - m, s)
            }).collect()
        };
        let a = rank_models(&models(&raw, 0)).unwrap();
        let b = rank_models(&models(&rotated, k)).unwrap();
        prop_assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn positive_rescaling_keeps_ranks(raw in scores(10), scale in 0.1f64..10.0, offset in -5.0f64..5.0) {
        let scaled: Vec<(f64, f64)> = raw.iter().map(|&(m, s)| (m * scale + offset, s * scale)).collect();
        for rule in [OverlapRule::Anchor, OverlapRule::Hull] {
            prop_assert_eq!(ranks(&raw, Direction::LowerIsBetter, rule), ranks(&scaled, Direction::LowerIsBetter, rule));
        }
    }

    #[test]
    fn hull_groups_are_at_least_as_coarse(raw in scores(12)) {
        let a = ranks(&raw, Direction::HigherIsBetter, OverlapRule::Anchor);
        let h = ranks(&raw, Direction::HigherIsBetter, OverlapRule::Hull);
        let distinct = |v: &[usize]| v.iter().collect::<std::collections::BTreeSet<_>>().len();
        prop_assert!(distinct(&h) <= distinct(&a));
        prop_assert!(h.iter().zip(&a).all(|(x, y)| x >= y));
    }

    #[test]
    fn mean_rank_is_the_average(raw in scores(8), hull in any::<bool>()) {
        let models: Vec<ModelScores> = raw.iter().enumerate()
            .map(|(i, &(m, s))| ModelScores::new(format!("m{i}")).with(WASSERSTEIN, m, s).with(FOR, m * m, s))
            .collect();
        let rule = if hull { OverlapRule::Hull } else { OverlapRule::Anchor };
        let b = rank_models_with(&models, rule).unwrap();
        for row in &b.rows {
            let avg = (row.ranks[WASSERSTEIN] + row.ranks[FOR]) as f64 / 2.0;
            prop_assert_eq!(row.mean_rank, avg);
        }
        prop_assert!(b.rows.windows(2).all(|w| w[0].mean_rank <= w[1].mean_rank));
    }
}

fn random_matrix(d: usize, seed: u64, density: f64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    DMatrix::from_fn(d, d, |i, j| {
        if i == j || rng.random::<f64>() > density {
            0.0
        } else {
            let m = rng.random_range(1.0..2.0);
            if rng.random::<bool>() { m } else { -m }
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn notears_gradient_matches_central_differences(d in 2usize..=10, seed in any::<u64>(), rho in 0.1f64..10.0, alpha in 0.0f64..2.0) {
        let mut rng = rng_from_seed(seed);
        let a = DMatrix::from_fn(d + 3, d, |_, _| rng.random_range(-1.0..1.0));
        let sigma = a.transpose() * &a / (d + 3) as f64;
        let obj = Objective::new(sigma, 0.05, rho, alpha);
        let x: Vec<f64> = (0..obj.n_vars()).map(|k| {
            let (i, j) = ((k % (d * d)) % d, (k % (d * d)) / d);
            if i == j { 0.0 } else { rng.random_range(0.05..0.5) }
        }).collect();
        let (_, g) = obj.value_grad(&x);
        for k in 0..x.len() {
            let (i, j) = ((k % (d * d)) % d, (k % (d * d)) / d);
            if i == j {
                continue;
            }
            let step = 1e-6;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += step;
            xm[k] -= step;
            let fd = (obj.value_grad(&xp).0 - obj.value_grad(&xm).0) / (2.0 * step);
            let err = (fd - g[k]).abs() / g[k].abs().max(1.0);
            prop_assert!(err < 1e-5, "k={k} fd={fd} analytic={}", g[k]);
        }
    }

    #[test]
    fn h_vanishes_exactly_on_acyclic_supports(d in 2usize..=8, seed in any::<u64>(), density in 0.05f64..0.6) {
        let w = random_matrix(d, seed, density);
        let g = DirectedGraph::from_edges(d, (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).filter(|&(i, j)| w[(i, j)].abs() > 0.3)).unwrap();
        prop_assert_eq!(h(&w) < 1e-8, g.is_acyclic());
    }

    #[test]
    fn random_k_is_exact_and_loop_free(d in 2usize..30, k in 0usize..200, seed in any::<u64>()) {
        let genes = GeneTable::new((0..d).map(|i| format!("g{i}"))).unwrap();
        match random_k(&genes, k, seed) {
            Ok(el) => {
                prop_assert!((1..=d * (d - 1)).contains(&k));
                let (g, conv) = from_edge_list(&el, &genes);
                prop_assert_eq!(g.n_edges(), k);
                prop_assert_eq!(conv.n_duplicates + conv.n_self_loops, 0);
                prop_assert_eq!(el, random_k(&genes, k, seed).unwrap());
            }
            Err(_) => prop_assert!(k == 0 || k > d * (d - 1)),
        }
    }

    #[test]
    fn sortnregress_respects_variance_order(d in 2usize..8, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let n = 60;
        let x = DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0));
        let genes = GeneTable::new((0..d).map(|i| format!("g{i}"))).unwrap();
        let ds = PerturbDataset::new_signed(x.clone(), vec![CONTROL_LABEL.to_string(); n], genes.clone()).unwrap();
        let el = sortnregress(&ds).unwrap();
        let order = variance_order(&x);
        let pos: Vec<usize> = (0..d).map(|i| order.iter().position(|&o| o == i).unwrap()).collect();
        let (g, _) = from_edge_list(&el, &genes);
        prop_assert!(g.is_acyclic());
        for (a, b) in g.edges() {
            prop_assert!(pos[a] < pos[b]);
        }
    }

    #[test]
    fn synthetic_graphs_are_acyclic_and_reproducible(d in 2usize..40, p in 0.0f64..1.0, m in 1usize..4, seed in any::<u64>(), sf in any::<bool>()) {
        let graph = if sf { GraphKind::ScaleFree { attach_m: m } } else { GraphKind::ErdosRenyi { edge_prob: p } };
        let spec = SyntheticSpec { d, graph, seed, ..Default::default() };
        let g = gen_dag(&spec).unwrap();
        prop_assert!(g.is_acyclic());
        prop_assert_eq!(&g, &gen_dag(&spec).unwrap());
        let ds = sample_anm(&g, &spec, 5, 5, 2).unwrap();
        let again = sample_anm(&g, &spec, 5, 5, 2).unwrap();
        prop_assert_eq!(ds.test, again.test);
        prop_assert_eq!(ds.data.n_cells(), 5);
    }
}

#[test]
fn h_of_the_unit_two_cycle() {
    let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    assert!((h(&w) - (2.0 * 1f64.cosh() - 2.0)).abs() < 1e-9);
}
