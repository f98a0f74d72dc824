use grn_eval::stats::{benjamini_hochberg, midranks, mann_whitney_u, spearman, wasserstein_1d, TestMethod};
use proptest::prelude::*;

fn sample(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..max)
}

/// W1 for equal sizes: mean absolute difference of the sorted samples.
fn sorted_oracle(xs: &[f64], ys: &[f64]) -> f64 {
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

proptest! {
    #[test]
    fn wasserstein_matches_sorted_oracle(pairs in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..60)) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let w = wasserstein_1d(&xs, &ys).unwrap();
        let o = sorted_oracle(&xs, &ys);
        prop_assert!((w - o).abs() <= 1e-12 * o.max(1.0));
    }

    #[test]
    fn wasserstein_is_a_metric(xs in sample(30), ys in sample(30), zs in sample(30)) {
        let xy = wasserstein_1d(&xs, &ys).unwrap();
        prop_assert!(xy >= 0.0);
        prop_assert!((xy - wasserstein_1d(&ys, &xs).unwrap()).abs() < 1e-9);
        prop_assert_eq!(wasserstein_1d(&xs, &xs).unwrap(), 0.0);
        let tri = wasserstein_1d(&xs, &zs).unwrap() + wasserstein_1d(&zs, &ys).unwrap();
        prop_assert!(xy <= tri + 1e-9);
    }

    #[test]
    fn wasserstein_shift(xs in sample(40), c in -10.0f64..10.0) {
        let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
        prop_assert!((wasserstein_1d(&xs, &shifted).unwrap() - c.abs()).abs() < 1e-9);
    }

    #[test]
    fn mann_whitney_is_well_formed(xs in sample(25), ys in sample(25)) {
        let r = mann_whitney_u(&xs, &ys).unwrap();
        let s = mann_whitney_u(&ys, &xs).unwrap();
        let nm = (xs.len() * ys.len()) as f64;
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        prop_assert!((r.statistic + s.statistic - nm).abs() < 1e-9);
        prop_assert!((r.p_value - s.p_value).abs() < 1e-12);
    }

    #[test]
    fn mann_whitney_exact_when_small_and_untied(xs in prop::collection::btree_set(0u32..1000, 2..9)) {
        let v: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        let half = v.len() / 2;
        let r = mann_whitney_u(&v[..half.max(1)], &v[half.max(1)..]).unwrap();
        prop_assert_eq!(r.method, TestMethod::Exact);
    }

    #[test]
    fn midranks_sum(xs in prop::collection::vec(0u8..6, 1..40)) {
        let v: Vec<f64> = xs.iter().map(|&x| f64::from(x)).collect();
        let (r, ties) = midranks(&v);
        let n = v.len() as f64;
        prop_assert!((r.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
        prop_assert_eq!(ties.iter().sum::<usize>(), v.len());
    }

    #[test]
    fn bh_adjusted_is_monotone_and_bounded(ps in prop::collection::vec(0.0f64..=1.0, 1..80), alpha in 0.01f64..0.5) {
        let bh = benjamini_hochberg(&ps, alpha).unwrap();
        let mut order: Vec<usize> = (0..ps.len()).collect();
        order.sort_by(|&a, &b| ps[a].total_cmp(&ps[b]));
        for w in order.windows(2) {
            prop_assert!(bh.adjusted[w[0]] <= bh.adjusted[w[1]] + 1e-15);
        }
        for (p, q) in ps.iter().zip(&bh.adjusted) {
            prop_assert!(*q >= p * (1.0 - 1e-12) && *q <= 1.0);
        }
        // a rejected p-value is never larger than a kept one
        let max_rejected = ps.iter().zip(&bh.reject).filter(|(_, r)| **r).map(|(p, _)| *p).fold(f64::NEG_INFINITY, f64::max);
        let min_kept = ps.iter().zip(&bh.reject).filter(|(_, r)| !**r).map(|(p, _)| *p).fold(f64::INFINITY, f64::min);
        prop_assert!(max_rejected <= min_kept);
    }

    #[test]
    fn spearman_bounded_and_symmetric(pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..40)) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let r = spearman(&x, &y).unwrap();
        if r.is_finite() {
            prop_assert!(r.abs() <= 1.0 + 1e-12);
            prop_assert!((r - spearman(&y, &x).unwrap()).abs() < 1e-12);
        }
    }
}
