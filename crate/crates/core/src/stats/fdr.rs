use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BhResult {
    /// Adjusted p-values in input order.
    pub adjusted: Vec<f64>,
    pub reject: Vec<bool>,
}

impl BhResult {
    pub fn n_rejected(&self) -> usize {
        self.reject.iter().filter(|&&r| r).count()
    }
}

/// Benjamini–Hochberg step-up adjustment:
/// `adj_(i) = min_{j ≥ i} p_(j)·m/j`, capped at 1; reject where `adj ≤ alpha`.
pub fn benjamini_hochberg(pvals: &[f64], alpha: f64) -> Result<BhResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if let Some(p) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid(format!("p-value out of [0, 1]: {p}")));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]));

    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank0, &idx) in order.iter().enumerate().rev() {
        let scaled = pvals[idx] * m as f64 / (rank0 + 1) as f64;
        running = running.min(scaled);
        adjusted[idx] = running;
    }
    let reject = adjusted.iter().map(|&a| a <= alpha).collect();
    Ok(BhResult { adjusted, reject })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value() {
        let r = benjamini_hochberg(&[0.01], 0.05).unwrap();
        assert_eq!(r.adjusted, [0.01]);
        assert_eq!(r.reject, [true]);
    }

    #[test]
    fn hand_computed_step_up() {
        // p·m/j: 0.02, 0.02, 0.04, 0.04 ; already monotone
        let r = benjamini_hochberg(&[0.005, 0.01, 0.03, 0.04], 0.05).unwrap();
        for (a, e) in r.adjusted.iter().zip([0.02, 0.02, 0.04, 0.04]) {
            assert!((a - e).abs() < 1e-15);
        }
        assert!(r.reject.iter().all(|&x| x));
    }

    #[test]
    fn flat_vector() {
        let r = benjamini_hochberg(&[0.05; 10], 0.05).unwrap();
        assert!(r.adjusted.iter().all(|&a| (a - 0.05).abs() < 1e-15));
        assert_eq!(r.n_rejected(), 10);
    }

    #[test]
    fn input_order_is_preserved() {
        let r = benjamini_hochberg(&[0.04, 0.005, 0.03, 0.01], 0.05).unwrap();
        assert!((r.adjusted[1] - 0.02).abs() < 1e-15);
        assert!((r.adjusted[0] - 0.04).abs() < 1e-15);
    }

    #[test]
    fn capped_at_one() {
        let r = benjamini_hochberg(&[0.9, 0.95], 0.05).unwrap();
        assert!(r.adjusted.iter().all(|&a| a <= 1.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(benjamini_hochberg(&[1.2], 0.05).is_err());
        assert!(benjamini_hochberg(&[0.2], 0.0).is_err());
        assert!(benjamini_hochberg(&[f64::NAN], 0.05).is_err());
    }
}
