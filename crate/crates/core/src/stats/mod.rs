//! Statistical kernels used by the evaluation and QC layers.
//!
//! All functions are pure and allocation-local, so callers may run them in
//! parallel over genes or gene pairs.

mod anderson_darling;
mod correlation;
mod fdr;
mod mann_whitney;
mod ranks;
mod wasserstein;

use serde::Serialize;

pub use correlation::spearman;
pub use anderson_darling::{anderson_darling_2s, anderson_darling_permutation_p, AD_MIN_SAMPLE};
pub use fdr::{benjamini_hochberg, BhResult};
pub use mann_whitney::{exact_u_distribution, mann_whitney_u, mann_whitney_u_with, MannWhitneyConfig};
pub use ranks::midranks;
pub use wasserstein::wasserstein_1d;

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    /// Exact null distribution by enumeration.
    Exact,
    /// Normal approximation with tie and continuity correction.
    NormalApprox,
    /// Interpolated from a table of critical values.
    TableInterp,
    /// Statistic fell outside the table; the p-value is the table's floor or
    /// ceiling.
    TableClamped,
    /// Every pooled value is identical; the test carries no information and
    /// p is set to 1.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: TestMethod,
}

pub(crate) fn check_sample(xs: &[f64]) -> crate::Result<()> {
    if xs.is_empty() {
        return Err(crate::Error::EmptySample);
    }
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(crate::Error::invalid("sample contains a non-finite value"));
    }
    Ok(())
}
