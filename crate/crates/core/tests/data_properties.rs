use std::collections::BTreeMap;

use grn_eval::data::{
    load_dataset, save_dataset, stratified_split, subsample_cells, subsample_interventions, GeneTable, MatrixFormat,
    PerturbDataset, CONTROL_LABEL,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = PerturbDataset> {
    (1usize..6, 1usize..40).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..100.0], n * d),
            prop::collection::vec(0usize..5, n),
        )
            .prop_map(move |(vals, labs)| {
                let labels = labs
                    .into_iter()
                    .map(|l| if l == 0 { CONTROL_LABEL.to_string() } else { format!("g{}", l % d) })
                    .collect();
                let genes = GeneTable::new((0..d).map(|i| format!("g{i}"))).unwrap();
                PerturbDataset::new(DMatrix::from_row_slice(n, d, &vals), labels, genes).unwrap()
            })
    })
}

fn counts(ds: &PerturbDataset) -> BTreeMap<String, usize> {
    ds.strata().into_iter().map(|(k, v)| (k.to_string(), v.len())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_load_round_trip(ds in dataset(), mtx in any::<bool>()) {
        let dir = tempfile::tempdir().unwrap();
        let fmt = if mtx { MatrixFormat::MatrixMarket } else { MatrixFormat::Dense };
        save_dataset(&ds, dir.path(), fmt).unwrap();
        prop_assert_eq!(load_dataset(dir.path()).unwrap(), ds);
    }

    #[test]
    fn split_partitions_every_stratum(ds in dataset(), f in 0.05f64..0.95, seed in any::<u64>()) {
        let s = stratified_split(&ds, f, seed).unwrap();
        prop_assert_eq!(s.train.n_cells() + s.test.n_cells(), ds.n_cells());
        let mut all: Vec<usize> = s.train_rows.iter().chain(&s.test_rows).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..ds.n_cells()).collect::<Vec<_>>());
        let test = counts(&s.test);
        for (label, n) in counts(&ds) {
            let expect = (f * n as f64 + 0.5).floor() as usize;
            prop_assert_eq!(test.get(&label).copied().unwrap_or(0), expect.min(n));
        }
        prop_assert_eq!(stratified_split(&ds, f, seed).unwrap().test_rows, s.test_rows);
    }

    #[test]
    fn cell_subsample_is_a_subset(ds in dataset(), f in 0.05f64..=1.0, seed in any::<u64>()) {
        let sub = subsample_cells(&ds, f, seed).unwrap();
        let full = counts(&ds);
        for (label, n) in counts(&sub) {
            prop_assert!(n <= full[&label]);
        }
    }

    #[test]
    fn intervention_subsample_keeps_controls(ds in dataset(), f in 0.05f64..=1.0, seed in any::<u64>()) {
        let sub = subsample_interventions(&ds, f, seed).unwrap();
        prop_assert_eq!(sub.control_rows().len(), ds.control_rows().len());
        prop_assert!(sub.targets().iter().all(|t| ds.targets().contains(t)));
    }
}
