//! Variance-sorted regression: genes are ordered by marginal variance and
//! each is regressed on all lower-variance genes with an adaptive Lasso whose
//! penalty is chosen by BIC.

use nalgebra::{DMatrix, DVector};

use crate::data::PerturbDataset;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeList};

pub const MIN_CELLS: usize = 10;
const PATH_LEN: usize = 100;
const PATH_RATIO: f64 = 1e-4;
const VAR_EPS: f64 = 1e-12;

/// Gene indices in increasing order of marginal variance; ties keep index
/// order.
pub fn variance_order(x: &DMatrix<f64>) -> Vec<usize> {
    let vars = column_variances(x);
    let mut order: Vec<usize> = (0..x.ncols()).collect();
    order.sort_by(|&a, &b| vars[a].total_cmp(&vars[b]));
    order
}

fn column_variances(x: &DMatrix<f64>) -> Vec<f64> {
    x.column_iter().map(|c| c.variance()).collect()
}

pub fn sortnregress(train: &PerturbDataset) -> Result<EdgeList> {
    let d = train.n_genes();
    if d < 2 {
        return Ok(EdgeList::default());
    }
    let n = train.n_cells();
    if n < MIN_CELLS {
        return Err(Error::SampleTooSmall { min: MIN_CELLS, got: n });
    }
    let genes = train.genes();
    let w = fit(train.matrix());
    let mut edges = Vec::new();
    for (target, parents) in w.iter().enumerate() {
        for &(source, coef) in parents {
            edges.push(Edge::weighted(genes.name(source), genes.name(target), coef));
        }
    }
    edges.sort_by(|a, b| {
        let key = |e: &Edge| (genes.index_of(&e.source), genes.index_of(&e.target));
        key(a).cmp(&key(b))
    });
    Ok(EdgeList::new(edges))
}

/// Per target gene, the selected parents with their coefficients.
pub fn fit(x: &DMatrix<f64>) -> Vec<Vec<(usize, f64)>> {
    let n = x.nrows() as f64;
    let d = x.ncols();
    let vars = column_variances(x);
    let order = variance_order(x);
    let sigma = super::notears::second_moment(x);

    let mut out = vec![Vec::new(); d];
    for (k, &target) in order.iter().enumerate() {
        if vars[target] <= VAR_EPS {
            continue;
        }
        let covs: Vec<usize> = order[..k].iter().copied().filter(|&c| vars[c] > VAR_EPS).collect();
        if covs.is_empty() {
            continue;
        }
        let gram = DMatrix::from_fn(covs.len(), covs.len(), |a, b| sigma[(covs[a], covs[b])]);
        let xty = DVector::from_fn(covs.len(), |a, _| sigma[(covs[a], target)]);
        let yty = sigma[(target, target)];

        let ols = least_squares(&gram, &xty);
        let scale: Vec<f64> = ols.iter().map(|c| c.abs()).collect();
        let gz = DMatrix::from_fn(covs.len(), covs.len(), |a, b| gram[(a, b)] * scale[a] * scale[b]);
        let cz = DVector::from_fn(covs.len(), |a, _| xty[a] * scale[a]);
        let beta = lasso_bic(&gz, &cz, yty, n);
        for (a, &b) in beta.iter().enumerate() {
            let coef = b * scale[a];
            if coef != 0.0 {
                out[target].push((covs[a], coef));
            }
        }
        out[target].sort_by_key(|&(c, _)| c);
    }
    out
}

fn least_squares(gram: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    if let Some(ch) = gram.clone().cholesky() {
        return ch.solve(rhs);
    }
    let svd = gram.clone().svd(true, true);
    svd.solve(rhs, 1e-12 * svd.singular_values.max().max(1e-300))
        .unwrap_or_else(|_| DVector::zeros(rhs.len()))
}

fn soft(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Coordinate descent for `½βᵀGβ − cᵀβ + λ‖β‖₁` from a warm start.
fn lasso_cd(g: &DMatrix<f64>, c: &DVector<f64>, lambda: f64, beta: &mut DVector<f64>) {
    let p = c.len();
    let scale = c.amax().max(1e-300);
    for _ in 0..1000 {
        let mut max_delta: f64 = 0.0;
        for j in 0..p {
            let gjj = g[(j, j)];
            if gjj <= 0.0 {
                beta[j] = 0.0;
                continue;
            }
            let r = c[j] - g.column(j).dot(beta) + gjj * beta[j];
            let new = soft(r, lambda) / gjj;
            max_delta = max_delta.max(((new - beta[j]) * gjj).abs());
            beta[j] = new;
        }
        if max_delta <= 1e-10 * scale {
            break;
        }
    }
}

/// Select along a log-spaced Lasso path by BIC; the empty model is a
/// candidate. `yty` is `yᵀy/n` and all moments are per-sample.
fn lasso_bic(g: &DMatrix<f64>, c: &DVector<f64>, yty: f64, n: f64) -> DVector<f64> {
    let p = c.len();
    let bic = |beta: &DVector<f64>| {
        let rss = (yty - 2.0 * c.dot(beta) + beta.dot(&(g * beta))).max(1e-300);
        let df = beta.iter().filter(|b| **b != 0.0).count() as f64;
        n * rss.ln() + df * n.ln()
    };
    let mut best = DVector::zeros(p);
    let mut best_bic = bic(&best);
    let lambda_max = c.amax();
    if lambda_max <= 0.0 {
        return best;
    }
    let mut beta = DVector::zeros(p);
    for step in 0..PATH_LEN {
        let t = step as f64 / (PATH_LEN - 1) as f64;
        let lambda = lambda_max * PATH_RATIO.powf(t);
        lasso_cd(g, c, lambda, &mut beta);
        let b = bic(&beta);
        if b < best_bic {
            best_bic = b;
            best = beta.clone();
        }
    }
    best
}
