use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::{Intervention, SyntheticSpec};
use crate::data::{GeneTable, PerturbDataset, CONTROL_LABEL};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::rng::{derived_rng, EngineRng};

/// Symbols of the synthetic variables: `G0`, `G1`, ...
pub fn gene_names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("G{i}")).collect()
}

/// `f(x) = Σ_m a_m cos(ω_m·x + b_m)` over the parents of one variable.
#[derive(Debug, Clone)]
pub struct Mechanism {
    parents: Vec<usize>,
    omega: Vec<Vec<f64>>,
    phase: Vec<f64>,
    amp: Vec<f64>,
}

impl Mechanism {
    fn draw(parents: Vec<usize>, spec: &SyntheticSpec, rng: &mut EngineRng) -> Self {
        let m = spec.rff_features;
        if parents.is_empty() {
            return Self {
                parents,
                omega: Vec::new(),
                phase: Vec::new(),
                amp: Vec::new(),
            };
        }
        let freq = Normal::new(0.0, 1.0 / spec.length_scale).expect("validated length scale");
        let omega = (0..m)
            .map(|_| (0..parents.len()).map(|_| freq.sample(rng)).collect())
            .collect();
        let phase = (0..m).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let scale = spec.amplitude / (m as f64).sqrt();
        let amp = (0..m)
            .map(|_| {
                let a: f64 = rng.sample(StandardNormal);
                a * scale
            })
            .collect();
        Self { parents, omega, phase, amp }
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut out = 0.0;
        for ((w, b), a) in self.omega.iter().zip(&self.phase).zip(&self.amp) {
            let arg: f64 = w.iter().zip(&self.parents).map(|(wi, &p)| wi * x[p]).sum::<f64>() + b;
            out += a * arg.cos();
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub truth: DirectedGraph,
    /// Observational training cells.
    pub data: PerturbDataset,
    /// Observational cells plus `n_int_per_var` cells per intervened variable.
    pub test: PerturbDataset,
}

struct Model<'a> {
    spec: &'a SyntheticSpec,
    order: Vec<usize>,
    mechanisms: Vec<Mechanism>,
}

impl Model<'_> {
    fn sample_row(&self, target: Option<usize>, rng: &mut EngineRng, row: &mut [f64]) {
        for &i in &self.order {
            let eps: f64 = rng.sample::<f64, _>(StandardNormal) * self.spec.noise_std;
            let value = self.mechanisms[i].eval(row) + eps;
            row[i] = match (target, self.spec.intervention) {
                (Some(t), Intervention::SetToZero) if t == i => 0.0,
                (Some(t), Intervention::Shift { delta }) if t == i => value + delta,
                _ => value,
            };
        }
    }

    fn sample(&self, n: usize, target: Option<usize>, rng: &mut EngineRng, out: &mut Vec<f64>) {
        let d = self.order.len();
        let mut row = vec![0.0; d];
        for _ in 0..n {
            self.sample_row(target, rng, &mut row);
            out.extend_from_slice(&row);
        }
    }
}

/// Sample an additive noise model over `dag`. Mechanisms are drawn from
/// `spec.seed` and fixed; training data holds `n_obs_train` observational
/// cells; the test split holds `n_obs_test` observational cells plus
/// `n_int_per_var` cells for each variable, labelled with its symbol.
pub fn sample_anm(
    dag: &DirectedGraph,
    spec: &SyntheticSpec,
    n_obs_train: usize,
    n_obs_test: usize,
    n_int_per_var: usize,
) -> Result<SyntheticDataset> {
    sample_anm_seeded(dag, spec, spec.seed, n_obs_train, n_obs_test, n_int_per_var)
}

/// As [`sample_anm`], with cells drawn from `sample_seed` while the
/// mechanisms stay tied to `spec.seed`.
pub fn sample_anm_seeded(
    dag: &DirectedGraph,
    spec: &SyntheticSpec,
    sample_seed: u64,
    n_obs_train: usize,
    n_obs_test: usize,
    n_int_per_var: usize,
) -> Result<SyntheticDataset> {
    spec.validate()?;
    if dag.n() != spec.d {
        return Err(Error::NodeCountMismatch(spec.d, dag.n()));
    }
    let order = dag.topological_order().ok_or(Error::Cyclic)?;
    if n_obs_train == 0 || n_obs_test == 0 {
        return Err(Error::invalid("observational sample sizes must be >= 1"));
    }
    let parents = dag.parents();
    let mechanisms = parents
        .into_iter()
        .enumerate()
        .map(|(i, p)| Mechanism::draw(p, spec, &mut derived_rng(spec.seed, "mechanism", i as u64)))
        .collect();
    let model = Model { spec, order, mechanisms };
    let d = spec.d;
    let names = gene_names(d);
    let genes = GeneTable::new(names.iter())?;

    let mut train = Vec::with_capacity(n_obs_train * d);
    model.sample(n_obs_train, None, &mut derived_rng(sample_seed, "train", 0), &mut train);

    let mut test = Vec::with_capacity((n_obs_test + d * n_int_per_var) * d);
    let mut labels = vec![CONTROL_LABEL.to_string(); n_obs_test];
    model.sample(n_obs_test, None, &mut derived_rng(sample_seed, "test", 0), &mut test);
    for (t, name) in names.iter().enumerate() {
        model.sample(n_int_per_var, Some(t), &mut derived_rng(sample_seed, "intervention", t as u64), &mut test);
        labels.extend(std::iter::repeat_n(name.clone(), n_int_per_var));
    }

    let train = PerturbDataset::new_signed(
        DMatrix::from_row_slice(n_obs_train, d, &train),
        vec![CONTROL_LABEL.to_string(); n_obs_train],
        genes.clone(),
    )?;
    let test = PerturbDataset::new_signed(DMatrix::from_row_slice(labels.len(), d, &test), labels, genes)?;
    Ok(SyntheticDataset {
        truth: dag.clone(),
        data: train,
        test,
    })
}
