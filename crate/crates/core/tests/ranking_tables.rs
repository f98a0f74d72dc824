//! Published scoreboards: feeding the reported mean ± std values must give
//! back the reported rank columns.

use grn_eval::ranking::{rank_models, ModelScores, Scoreboard, FOR, WASSERSTEIN};

/// (model, rank_w, rank_for, mean_rank, w_mean, w_std, for_mean, for_std)
type Row = (&'static str, usize, usize, f64, f64, f64, f64, f64);

pub const K562: &[Row] = &[
    ("GRNBoost", 12, 1, 6.5, 0.133, 0.000, 0.126, 0.000),
    ("DCDI-G", 1, 12, 6.5, 0.183, 0.001, 0.182, 0.021),
    ("Sortnregress", 2, 12, 7.0, 0.171, 0.000, 0.184, 0.000),
    ("DCDI-DSF", 5, 12, 8.5, 0.163, 0.003, 0.181, 0.017),
    ("GES", 5, 12, 8.5, 0.164, 0.006, 0.185, 0.025),
    ("NOTEARS (Linear)", 5, 12, 8.5, 0.164, 0.000, 0.188, 0.027),
    ("GIES", 7, 12, 9.5, 0.155, 0.004, 0.183, 0.025),
    ("PC", 7, 12, 9.5, 0.152, 0.002, 0.187, 0.025),
    ("NOTEARS (MLP)", 12, 12, 12.0, 0.139, 0.000, 0.179, 0.003),
    ("DCDFG-MLP", 12, 12, 12.0, 0.143, 0.004, 0.180, 0.000),
    ("NOTEARS (Linear,L1)", 12, 12, 12.0, 0.140, 0.000, 0.188, 0.027),
    ("NOTEARS (MLP,L1)", 12, 12, 12.0, 0.113, 0.032, 0.188, 0.027),
];

pub const RPE1: &[Row] = &[
    ("Sortnregress", 2, 3, 2.5, 0.170, 0.000, 0.114, 0.000),
    ("GRNBoost", 12, 1, 6.5, 0.110, 0.000, 0.110, 0.000),
    ("DCDI-G", 1, 12, 6.5, 0.188, 0.005, 0.135, 0.007),
    ("NOTEARS (MLP)", 11, 3, 7.0, 0.138, 0.000, 0.111, 0.012),
    ("PC", 7, 12, 9.5, 0.164, 0.004, 0.131, 0.020),
    ("DCDI-DSF", 7, 12, 9.5, 0.166, 0.003, 0.133, 0.007),
    ("NOTEARS (MLP,L1)", 7, 12, 9.5, 0.166, 0.004, 0.138, 0.016),
    ("NOTEARS (Linear)", 7, 12, 9.5, 0.164, 0.000, 0.138, 0.016),
    ("NOTEARS (Linear,L1)", 7, 12, 9.5, 0.164, 0.000, 0.138, 0.016),
    ("DCDFG-MLP", 11, 12, 11.5, 0.132, 0.018, 0.129, 0.009),
    ("GES", 11, 12, 11.5, 0.151, 0.012, 0.133, 0.017),
    ("GIES", 11, 12, 11.5, 0.143, 0.004, 0.140, 0.008),
];

fn board(rows: &[Row]) -> Scoreboard {
    let models: Vec<ModelScores> = rows
        .iter()
        .map(|r| ModelScores::new(r.0).with(WASSERSTEIN, r.4, r.5).with(FOR, r.6, r.7))
        .collect();
    rank_models(&models).unwrap()
}

/// Rows whose ranks differ from the published ones.
fn discrepancies(rows: &[Row]) -> Vec<String> {
    let b = board(rows);
    rows.iter()
        .filter_map(|r| {
            let got = b.row(r.0).unwrap();
            let (w, f) = (got.ranks[WASSERSTEIN], got.ranks[FOR]);
            (w != r.1 || f != r.2 || (got.mean_rank - r.3).abs() > 1e-12)
                .then(|| format!("{}: got ({w}, {f}, {}), published ({}, {}, {})", r.0, got.mean_rank, r.1, r.2, r.3))
        })
        .collect()
}

#[test]
fn k562_scoreboard() {
    assert_eq!(discrepancies(K562), Vec::<String>::new());
    let b = board(K562);
    let top: Vec<&str> = b.rows.iter().take(3).map(|r| r.model.as_str()).collect();
    assert_eq!(top, ["GRNBoost", "DCDI-G", "Sortnregress"]);
}

#[test]
fn rpe1_scoreboard() {
    assert_eq!(discrepancies(RPE1), Vec::<String>::new());
    assert_eq!(board(RPE1).rows[0].model, "Sortnregress");
}
