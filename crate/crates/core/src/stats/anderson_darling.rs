//! Two-sample Anderson–Darling test in the Scholz–Stephens k-sample form
//! (k = 2) with midrank handling of ties.

use rand::seq::SliceRandom;

use super::{check_sample, TestMethod, TestResult};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const AD_MIN_SAMPLE: usize = 5;

/// Significance levels of the critical-value table, largest first.
const SIG_LEVELS: [f64; 7] = [0.25, 0.1, 0.05, 0.025, 0.01, 0.005, 0.001];
// Critical values of the standardized statistic are b0 + b1/√m + b2/m with
// m = k − 1 (Scholz & Stephens, Table 1 fit).
const B0: [f64; 7] = [0.675, 1.281, 1.645, 1.96, 2.326, 2.573, 3.085];
const B1: [f64; 7] = [-0.245, 0.25, 0.678, 1.149, 1.822, 2.364, 3.615];
const B2: [f64; 7] = [-0.105, -0.305, -0.362, -0.391, -0.396, -0.345, -0.154];

/// Two-sample AD test. The statistic is standardized,
/// `(A²akN − (k−1)) / σ`; the p-value is interpolated from the critical value
/// table (quadratic fit of log-significance) and clamped to `[0.001, 0.25]`
/// outside it.
pub fn anderson_darling_2s(xs: &[f64], ys: &[f64]) -> Result<TestResult> {
    check_sizes(xs, ys)?;
    let statistic = standardized_statistic(xs, ys);
    let (p_value, method) = table_p_value(statistic);
    Ok(TestResult {
        statistic,
        p_value,
        method,
    })
}

/// Permutation p-value for the same statistic: `(1 + #{A*_r ≥ A}) / (1 + R)`.
/// Slow; meant for checking the table interpolation.
pub fn anderson_darling_permutation_p(xs: &[f64], ys: &[f64], resamples: usize, seed: u64) -> Result<f64> {
    check_sizes(xs, ys)?;
    let observed = standardized_statistic(xs, ys);
    let mut pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let mut rng = rng_from_seed(seed);
    let mut hits = 0usize;
    for _ in 0..resamples {
        pooled.shuffle(&mut rng);
        let (a, b) = pooled.split_at(xs.len());
        if standardized_statistic(a, b) >= observed - 1e-12 {
            hits += 1;
        }
    }
    Ok((1 + hits) as f64 / (1 + resamples) as f64)
}

fn check_sizes(xs: &[f64], ys: &[f64]) -> Result<()> {
    check_sample(xs)?;
    check_sample(ys)?;
    let got = xs.len().min(ys.len());
    if got < AD_MIN_SAMPLE {
        return Err(Error::SampleTooSmall {
            min: AD_MIN_SAMPLE,
            got,
        });
    }
    Ok(())
}

fn standardized_statistic(xs: &[f64], ys: &[f64]) -> f64 {
    let samples = [sorted(xs), sorted(ys)];
    let mut pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let big_n = pooled.len();
    let nf = big_n as f64;

    // Distinct pooled values z*_j with multiplicities l_j and midrank
    // positions B_j = (#pooled < z*_j) + l_j/2.
    let mut distinct: Vec<(f64, f64, f64)> = Vec::new();
    let mut i = 0;
    while i < big_n {
        let mut j = i + 1;
        while j < big_n && pooled[j] == pooled[i] {
            j += 1;
        }
        let l = (j - i) as f64;
        distinct.push((pooled[i], l, i as f64 + l / 2.0));
        i = j;
    }

    let mut a2 = 0.0;
    for s in &samples {
        let ni = s.len() as f64;
        let mut inner = 0.0;
        for &(z, l, b) in &distinct {
            let below = s.partition_point(|&v| v < z) as f64;
            let upto = s.partition_point(|&v| v <= z) as f64;
            let m_ij = upto - (upto - below) / 2.0;
            let denom = b * (nf - b) - nf * l / 4.0;
            if denom > 0.0 {
                inner += l / nf * (nf * m_ij - b * ni).powi(2) / denom;
            }
        }
        a2 += inner / ni;
    }
    a2 *= (nf - 1.0) / nf;

    let k = 2.0;
    let h_sum: f64 = samples.iter().map(|s| 1.0 / s.len() as f64).sum();
    // h = Σ_{i=1}^{N-1} 1/i ; g = Σ_{i=1}^{N-2} Σ_{j=i+1}^{N-1} 1/((N−i)·j)
    let h: f64 = (1..big_n).map(|i| 1.0 / i as f64).sum();
    let mut g = 0.0;
    let mut tail = 0.0; // Σ_{j=i+1}^{N-1} 1/j, built from the top
    for i in (1..big_n - 1).rev() {
        tail += 1.0 / (i + 1) as f64;
        g += tail / (big_n - i) as f64;
    }
    let a = (4.0 * g - 6.0) * (k - 1.0) + (10.0 - 6.0 * g) * h_sum;
    let b = (2.0 * g - 4.0) * k * k + 8.0 * h * k + (2.0 * g - 14.0 * h - 4.0) * h_sum - 8.0 * h
        + 4.0 * g
        - 6.0;
    let c = (6.0 * h + 2.0 * g - 2.0) * k * k + (4.0 * h - 4.0 * g + 6.0) * k + (2.0 * h - 6.0) * h_sum
        + 4.0 * h;
    let d = (2.0 * h + 6.0) * k * k - 4.0 * h * k;
    let var = (a * nf.powi(3) + b * nf.powi(2) + c * nf + d) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0));
    (a2 - (k - 1.0)) / var.sqrt()
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn critical_values() -> [f64; 7] {
    let m: f64 = 1.0;
    std::array::from_fn(|i| B0[i] + B1[i] / m.sqrt() + B2[i] / m)
}

fn table_p_value(statistic: f64) -> (f64, TestMethod) {
    let crit = critical_values();
    if statistic < crit[0] {
        return (SIG_LEVELS[0], TestMethod::TableClamped);
    }
    if statistic > crit[6] {
        return (SIG_LEVELS[6], TestMethod::TableClamped);
    }
    let ln_sig = SIG_LEVELS.map(f64::ln);
    let [c0, c1, c2] = quadratic_fit(&crit, &ln_sig);
    let p = (c0 + c1 * statistic + c2 * statistic * statistic).exp();
    (p.clamp(SIG_LEVELS[6], SIG_LEVELS[0]), TestMethod::TableInterp)
}

/// Least-squares `y ≈ c0 + c1·x + c2·x²` via the 3×3 normal equations.
fn quadratic_fit(x: &[f64], y: &[f64]) -> [f64; 3] {
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let row = [1.0, xi, xi * xi];
        for r in 0..3 {
            aty[r] += row[r] * yi;
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    let m = nalgebra::Matrix3::from_fn(|r, c| ata[r][c]);
    let v = nalgebra::Vector3::from_row_slice(&aty);
    let sol = m.lu().solve(&v).expect("critical values are distinct");
    [sol[0], sol[1], sol[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_hit_ceiling() {
        let x: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let r = anderson_darling_2s(&x, &x).unwrap();
        assert_eq!(r.p_value, 0.25);
        assert_eq!(r.method, TestMethod::TableClamped);
    }

    #[test]
    fn separated_samples_hit_floor() {
        let x: Vec<f64> = (0..25).map(|i| i as f64 / 25.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v + 10.0).collect();
        let r = anderson_darling_2s(&x, &y).unwrap();
        assert_eq!(r.p_value, 0.001);
        assert_eq!(r.method, TestMethod::TableClamped);
    }

    #[test]
    fn undersized() {
        assert!(matches!(
            anderson_darling_2s(&[1.0, 2.0], &[1.0, 2.0, 3.0, 4.0, 5.0]),
            Err(Error::SampleTooSmall { min: 5, got: 2 })
        ));
    }

    #[test]
    fn all_identical_is_not_significant() {
        let r = anderson_darling_2s(&[0.0; 8], &[0.0; 12]).unwrap();
        assert_eq!(r.p_value, 0.25);
    }

    #[test]
    fn interpolation_passes_through_table() {
        let crit = critical_values();
        for (c, s) in crit.iter().zip(SIG_LEVELS) {
            let (p, _) = table_p_value(*c);
            assert!((p.ln() - s.ln()).abs() < 0.15, "{c} -> {p} vs {s}");
        }
    }
}
