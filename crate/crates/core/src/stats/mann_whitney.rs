use statrs::function::erf::erfc;

use super::{check_sample, midranks, TestMethod, TestResult};
use crate::error::Result;

#[derive(Debug, Clone, Copy)]
pub struct MannWhitneyConfig {
    /// Use the exact null distribution when both samples have at most this
    /// many values and there are no ties.
    pub exact_max_size: usize,
    pub continuity_correction: bool,
}

impl Default for MannWhitneyConfig {
    fn default() -> Self {
        Self {
            exact_max_size: 8,
            continuity_correction: true,
        }
    }
}

/// Two-sided Mann–Whitney U test. The statistic is U of `xs`: the number of
/// pairs with `x > y`, plus one half per tied pair.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<TestResult> {
    mann_whitney_u_with(xs, ys, MannWhitneyConfig::default())
}

pub fn mann_whitney_u_with(xs: &[f64], ys: &[f64], cfg: MannWhitneyConfig) -> Result<TestResult> {
    check_sample(xs)?;
    check_sample(ys)?;
    let (n, m) = (xs.len(), ys.len());
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum: f64 = ranks[..n].iter().sum();
    let u = rank_sum - (n * (n + 1)) as f64 / 2.0;

    if ties.len() == 1 {
        return Ok(TestResult {
            statistic: u,
            p_value: 1.0,
            method: TestMethod::Degenerate,
        });
    }

    let has_ties = ties.iter().any(|&t| t > 1);
    if !has_ties && n <= cfg.exact_max_size && m <= cfg.exact_max_size {
        let counts = exact_u_distribution(n, m);
        let total: f64 = counts.iter().sum();
        let k = u.round() as usize;
        let cdf: f64 = counts[..=k].iter().sum::<f64>() / total;
        let sf: f64 = counts[k..].iter().sum::<f64>() / total;
        return Ok(TestResult {
            statistic: u,
            p_value: (2.0 * cdf.min(sf)).min(1.0),
            method: TestMethod::Exact,
        });
    }

    let (nf, mf) = (n as f64, m as f64);
    let big_n = nf + mf;
    let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum();
    let var = nf * mf / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    let mut dev = (u - nf * mf / 2.0).abs();
    if cfg.continuity_correction {
        dev -= 0.5;
    }
    let z = dev / var.sqrt();
    // two-sided: 2·(1 − Φ(z)) = erfc(z/√2)
    let p = if z <= 0.0 { 1.0 } else { erfc(z / std::f64::consts::SQRT_2).min(1.0) };
    Ok(TestResult {
        statistic: u,
        p_value: p,
        method: TestMethod::NormalApprox,
    })
}

/// Number of rank arrangements giving each value of U (index = U) for sample
/// sizes `n` and `m` without ties; sums to C(n+m, n).
///
/// Uses c(n, m, u) = c(n−1, m, u−m) + c(n, m−1, u): the largest pooled value
/// belongs either to the first sample (beating all m of the second) or to the
/// second.
pub fn exact_u_distribution(n: usize, m: usize) -> Vec<f64> {
    // table[i][j] = distribution for sizes (i, j)
    let mut table: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); m + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=m {
            let mut dist = vec![0.0; i * j + 1];
            if i == 0 || j == 0 {
                dist[0] = 1.0;
            } else {
                for (u, c) in table[i - 1][j].iter().enumerate() {
                    dist[u + j] += c;
                }
                for (u, c) in table[i][j - 1].iter().enumerate() {
                    dist[u] += c;
                }
            }
            table[i][j] = dist;
        }
    }
    std::mem::take(&mut table[n][m])
}
