use super::check_sample;
use crate::error::Result;

/// Order-1 Wasserstein distance between the equal-weight empirical
/// distributions of `xs` and `ys`.
///
/// Integrates `|F⁻¹(q) − G⁻¹(q)|` exactly over the merged breakpoint grid
/// `{i/n} ∪ {j/m}`. Breakpoints are compared as integers (`i·m` vs `j·n`) so
/// the grid is exact.
pub fn wasserstein_1d(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_sample(xs)?;
    check_sample(ys)?;
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as u128, b.len() as u128);
    let total = n * m;

    // Current quantile segment of each sample, and the position reached on
    // the common grid (in units of 1/(n·m)).
    let (mut i, mut j) = (0usize, 0usize);
    let mut pos: u128 = 0;
    let mut acc = 0.0;
    while pos < total {
        let end_a = (i as u128 + 1) * m;
        let end_b = (j as u128 + 1) * n;
        let end = end_a.min(end_b);
        acc += (end - pos) as f64 * (a[i] - b[j]).abs();
        pos = end;
        if end == end_a {
            i += 1;
        }
        if end == end_b {
            j += 1;
        }
    }
    Ok(acc / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_zero() {
        assert_eq!(wasserstein_1d(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn shift_by_one() {
        assert_eq!(wasserstein_1d(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap(), 1.0);
    }

    #[test]
    fn unequal_sizes_sixths_grid() {
        // Oracle: quantile functions sampled at q = k/6, k = 1..6.
        // F⁻¹: 0 0 0 1 1 1 ; G⁻¹: 0 0 0 0 3 3  → |diff| = 0 0 0 1 2 2 → 5/6
        let w = wasserstein_1d(&[0.0, 1.0], &[0.0, 0.0, 3.0]).unwrap();
        assert!((w - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn empty_is_error() {
        assert!(wasserstein_1d(&[], &[1.0]).is_err());
        assert!(wasserstein_1d(&[1.0], &[]).is_err());
        assert!(wasserstein_1d(&[f64::NAN], &[1.0]).is_err());
    }
}
