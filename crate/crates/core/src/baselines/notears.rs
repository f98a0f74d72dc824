//! Linear NOTEARS: least squares under the smooth acyclicity constraint
//! `h(W) = tr(exp(W∘W)) − d = 0`, solved by an augmented Lagrangian.
//!
//! The L1 term is handled by splitting `W = W⁺ − W⁻` with `W± ≥ 0`, which
//! makes the subproblem smooth and bound-constrained. Subproblems are solved
//! with a spectral projected gradient method (Barzilai–Borwein steps and a
//! nonmonotone Armijo line search).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::PerturbDataset;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeList};

const RHO_MAX: f64 = 1e16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NotearsParams {
    pub lambda1: f64,
    pub max_outer_iters: usize,
    pub h_tolerance: f64,
    pub weight_threshold: f64,
    pub max_inner_iters: usize,
}

impl Default for NotearsParams {
    fn default() -> Self {
        Self {
            lambda1: 0.0,
            max_outer_iters: 100,
            h_tolerance: 1e-8,
            weight_threshold: 0.3,
            max_inner_iters: 2000,
        }
    }
}

impl NotearsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda1.is_finite() && self.lambda1 >= 0.0) {
            return Err(Error::invalid(format!("lambda1 must be >= 0, got {}", self.lambda1)));
        }
        if !(self.h_tolerance > 0.0) {
            return Err(Error::invalid("h_tolerance must be > 0"));
        }
        if !(self.weight_threshold >= 0.0) {
            return Err(Error::invalid("weight_threshold must be >= 0"));
        }
        if self.max_outer_iters == 0 || self.max_inner_iters == 0 {
            return Err(Error::invalid("iteration limits must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NotearsDiagnostics {
    pub converged: bool,
    pub h: f64,
    pub rho: f64,
    pub alpha: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
}

/// Real-valued d×d adjacency with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAdjacency {
    w: DMatrix<f64>,
}

impl WeightedAdjacency {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::invalid("adjacency must be square"));
        }
        if (0..w.nrows()).any(|i| w[(i, i)] != 0.0) {
            return Err(Error::invalid("adjacency must have a zero diagonal"));
        }
        Ok(Self { w })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn d(&self) -> usize {
        self.w.nrows()
    }
}

#[derive(Debug, Clone)]
pub struct NotearsResult {
    pub adjacency: WeightedAdjacency,
    pub edges: EdgeList,
    pub diagnostics: NotearsDiagnostics,
}

/// `h(W) = tr(exp(W∘W)) − d`.
pub fn h(w: &DMatrix<f64>) -> f64 {
    acyclicity(w).0
}

/// `h(W)` and its gradient `exp(W∘W)ᵀ ∘ 2W`.
pub fn acyclicity(w: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let e = w.component_mul(w).exp();
    let d = w.nrows() as f64;
    let grad = e.transpose().component_mul(w) * 2.0;
    (e.trace() - d, grad)
}

/// Augmented-Lagrangian objective of one subproblem, on the split variable
/// `x = [vec(W⁺); vec(W⁻)]` (column-major blocks).
#[derive(Debug, Clone)]
pub struct Objective {
    sigma: DMatrix<f64>,
    pub lambda1: f64,
    pub rho: f64,
    pub alpha: f64,
}

impl Objective {
    /// `sigma` is the empirical second-moment matrix `XᵀX / n` of the
    /// centered data.
    pub fn new(sigma: DMatrix<f64>, lambda1: f64, rho: f64, alpha: f64) -> Self {
        Self { sigma, lambda1, rho, alpha }
    }

    pub fn from_data(x: &DMatrix<f64>) -> Self {
        Self::new(second_moment(x), 0.0, 1.0, 0.0)
    }

    pub fn d(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn n_vars(&self) -> usize {
        2 * self.d() * self.d()
    }

    pub fn adjacency(&self, x: &[f64]) -> DMatrix<f64> {
        let dd = self.d() * self.d();
        let d = self.d();
        DMatrix::from_fn(d, d, |i, j| x[j * d + i] - x[dd + j * d + i])
    }

    /// Least-squares loss `(1/2n)‖X − XW‖²` and its gradient.
    pub fn loss(&self, w: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
        let d = self.d();
        let r = DMatrix::<f64>::identity(d, d) - w;
        let sr = &self.sigma * &r;
        let value = 0.5 * (r.transpose() * &sr).trace();
        (value, -sr)
    }

    /// Objective value and gradient with respect to `x`.
    pub fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let w = self.adjacency(x);
        let (loss, g_loss) = self.loss(&w);
        let (hv, g_h) = acyclicity(&w);
        let value = loss + 0.5 * self.rho * hv * hv + self.alpha * hv + self.lambda1 * x.iter().sum::<f64>();
        let g_smooth = g_loss + g_h * (self.rho * hv + self.alpha);
        let dd = self.d() * self.d();
        let mut grad = vec![0.0; 2 * dd];
        for (k, g) in g_smooth.as_slice().iter().enumerate() {
            grad[k] = g + self.lambda1;
            grad[dd + k] = -g + self.lambda1;
        }
        (value, grad)
    }

    /// Box for each variable: `[0, ∞)` off the diagonal, `{0}` on it.
    fn upper(&self, k: usize) -> f64 {
        let d = self.d();
        let k = k % (d * d);
        if k % d == k / d {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn project(&self, x: &mut [f64]) {
        for (k, v) in x.iter_mut().enumerate() {
            *v = v.clamp(0.0, self.upper(k));
        }
    }
}

pub(crate) fn second_moment(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let mut c = x.clone();
    for mut col in c.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    (c.transpose() * &c) / n
}

struct SpgOutcome {
    x: Vec<f64>,
    iters: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn projected_gradient_norm(obj: &Objective, x: &[f64], g: &[f64]) -> f64 {
    let mut y: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
    obj.project(&mut y);
    y.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Spectral projected gradient for `min f(x)` over the box.
fn spg(obj: &Objective, x0: Vec<f64>, max_iters: usize) -> SpgOutcome {
    const MEMORY: usize = 10;
    const GAMMA: f64 = 1e-4;
    const PG_TOL: f64 = 1e-6;
    const F_TOL: f64 = 1e-12;
    const STEP_MIN: f64 = 1e-30;
    const STEP_MAX: f64 = 1e30;

    let mut x = x0;
    obj.project(&mut x);
    let (mut f, mut g) = obj.value_grad(&x);
    let mut history = vec![f];
    let pg0 = projected_gradient_norm(obj, &x, &g);
    let mut step = if pg0 > 0.0 { (1.0 / pg0).clamp(STEP_MIN, STEP_MAX) } else { 1.0 };

    let mut iters = 0;
    while iters < max_iters {
        if projected_gradient_norm(obj, &x, &g) <= PG_TOL {
            break;
        }
        iters += 1;

        let mut trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
        obj.project(&mut trial);
        let dir: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let slope = dot(&g, &dir);
        if slope >= 0.0 {
            break;
        }
        let f_ref = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let mut t = 1.0;
        let (x_new, f_new, g_new) = loop {
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            let (fc, gc) = obj.value_grad(&cand);
            if fc.is_finite() && fc <= f_ref + GAMMA * t * slope {
                break (cand, fc, gc);
            }
            // safeguarded quadratic interpolation
            let t_q = if fc.is_finite() {
                -0.5 * slope * t * t / (fc - f - slope * t)
            } else {
                0.1 * t
            };
            t = if t_q >= 0.1 * t && t_q <= 0.5 * t { t_q } else { 0.5 * t };
            if t < 1e-20 {
                break (x.clone(), f, g.clone());
            }
        };
        if t < 1e-20 {
            break;
        }

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sty = dot(&s, &y);
        step = if sty > 0.0 {
            (dot(&s, &s) / sty).clamp(STEP_MIN, STEP_MAX)
        } else {
            STEP_MAX.min(1e10)
        };

        let converged = (f - f_new).abs() <= F_TOL * f.abs().max(f_new.abs()).max(1.0);
        x = x_new;
        f = f_new;
        g = g_new;
        history.push(f);
        if history.len() > MEMORY {
            history.remove(0);
        }
        if converged {
            break;
        }
    }
    SpgOutcome { x, iters }
}

/// Fit linear NOTEARS to the expression matrix of `train` (all rows).
pub fn notears_linear(train: &PerturbDataset, params: &NotearsParams) -> Result<NotearsResult> {
    params.validate()?;
    let d = train.n_genes();
    if d < 2 {
        return Err(Error::SampleTooSmall { min: 2, got: d });
    }
    if train.n_cells() < 2 {
        return Err(Error::SampleTooSmall { min: 2, got: train.n_cells() });
    }
    let (w, diagnostics) = fit(train.matrix(), params);
    let genes = train.genes();
    let mut edges = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if w[(i, j)].abs() > params.weight_threshold {
                edges.push(Edge::weighted(genes.name(i), genes.name(j), w[(i, j)]));
            }
        }
    }
    Ok(NotearsResult {
        adjacency: WeightedAdjacency::new(w)?,
        edges: EdgeList::new(edges),
        diagnostics,
    })
}

/// Run the augmented Lagrangian on a raw data matrix (rows = samples).
pub fn fit(x: &DMatrix<f64>, params: &NotearsParams) -> (DMatrix<f64>, NotearsDiagnostics) {
    let mut obj = Objective::from_data(x);
    obj.lambda1 = params.lambda1;
    let mut est = vec![0.0; obj.n_vars()];
    let mut h_cur = f64::INFINITY;
    let mut inner_iters = 0;
    let mut outer_iters = 0;

    for _ in 0..params.max_outer_iters {
        outer_iters += 1;
        let (cand, h_new) = loop {
            let out = spg(&obj, est.clone(), params.max_inner_iters);
            inner_iters += out.iters;
            let h_new = h(&obj.adjacency(&out.x));
            if h_new > 0.25 * h_cur && obj.rho < RHO_MAX {
                obj.rho *= 10.0;
            } else {
                break (out.x, h_new);
            }
        };
        est = cand;
        h_cur = h_new;
        obj.alpha += obj.rho * h_cur;
        if h_cur <= params.h_tolerance || obj.rho >= RHO_MAX {
            break;
        }
    }

    let w = obj.adjacency(&est);
    let diagnostics = NotearsDiagnostics {
        converged: h_cur <= params.h_tolerance,
        h: h_cur,
        rho: obj.rho,
        alpha: obj.alpha,
        outer_iters,
        inner_iters,
    };
    (w, diagnostics)
}
