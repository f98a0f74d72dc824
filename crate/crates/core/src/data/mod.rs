//! Perturbational expression datasets: gene tables, labelled cell-by-gene
//! matrices, file I/O, and the stratified splitting and subsampling used by
//! the scaling studies.

mod io;
mod sampling;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use io::{load_dataset, load_dataset_with, save_dataset, LoadOptions, MatrixFormat};
pub use sampling::{stratified_split, subsample_cells, subsample_interventions, DatasetSplit};

/// Label carried by observational (non-targeting guide) cells.
pub const CONTROL_LABEL: &str = "non-targeting";

pub fn is_control(label: &str) -> bool {
    label == CONTROL_LABEL
}

/// Ordered gene symbols with a reverse index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl GeneTable {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateGene(name.clone()));
            }
        }
        Ok(Self { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index.contains_key(symbol)
    }

    /// Table restricted to `cols`, in the given order.
    pub fn subset(&self, cols: &[usize]) -> GeneTable {
        let names: Vec<String> = cols.iter().map(|&c| self.names[c].clone()).collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        GeneTable { names, index }
    }
}

/// Cells × genes expression matrix with one intervention label per cell.
///
/// Cells labelled [`CONTROL_LABEL`] are observational; every other label is
/// the symbol of the targeted gene, which need not be a measured gene.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbDataset {
    matrix: DMatrix<f64>,
    labels: Vec<String>,
    genes: GeneTable,
}

impl PerturbDataset {
    /// Build an expression dataset. Entries must be finite and non-negative.
    pub fn new(matrix: DMatrix<f64>, labels: Vec<String>, genes: GeneTable) -> Result<Self> {
        Self::build(matrix, labels, genes, false)
    }

    /// Build a dataset whose entries may be negative (synthetic structural
    /// equation data). Entries must still be finite.
    pub fn new_signed(matrix: DMatrix<f64>, labels: Vec<String>, genes: GeneTable) -> Result<Self> {
        Self::build(matrix, labels, genes, true)
    }

    fn build(
        matrix: DMatrix<f64>,
        labels: Vec<String>,
        genes: GeneTable,
        allow_negative: bool,
    ) -> Result<Self> {
        if labels.len() != matrix.nrows() {
            return Err(Error::RowCountMismatch {
                labels: labels.len(),
                rows: matrix.nrows(),
            });
        }
        if genes.len() != matrix.ncols() {
            return Err(Error::ColumnCountMismatch {
                genes: genes.len(),
                cols: matrix.ncols(),
            });
        }
        for col in 0..matrix.ncols() {
            for (row, &value) in matrix.column(col).iter().enumerate() {
                if !value.is_finite() || (!allow_negative && value < 0.0) {
                    return Err(Error::InvalidValue { row, col, value });
                }
            }
        }
        if let Some(row) = labels.iter().position(|l| l.is_empty()) {
            return Err(Error::invalid(format!("empty label for cell {row}")));
        }
        Ok(Self {
            matrix,
            labels,
            genes,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_genes(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn genes(&self) -> &GeneTable {
        &self.genes
    }

    pub fn control_rows(&self) -> Vec<usize> {
        self.rows_with_label(CONTROL_LABEL)
    }

    pub fn rows_with_label(&self, label: &str) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.as_str() == label)
            .map(|(i, _)| i)
            .collect()
    }

    /// Row indices grouped by label, in label order.
    pub fn strata(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut out: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, l) in self.labels.iter().enumerate() {
            out.entry(l.as_str()).or_default().push(i);
        }
        out
    }

    /// Distinct non-control labels.
    pub fn targets(&self) -> BTreeSet<&str> {
        self.labels
            .iter()
            .map(String::as_str)
            .filter(|l| !is_control(l))
            .collect()
    }

    /// Values of gene column `col` at the given rows.
    pub fn column_values(&self, col: usize, rows: &[usize]) -> Vec<f64> {
        let column = self.matrix.column(col);
        rows.iter().map(|&r| column[r]).collect()
    }

    /// New dataset made of `rows` (in the given order).
    pub fn select_rows(&self, rows: &[usize]) -> PerturbDataset {
        PerturbDataset {
            matrix: self.matrix.select_rows(rows.iter()),
            labels: rows.iter().map(|&r| self.labels[r].clone()).collect(),
            genes: self.genes.clone(),
        }
    }

    /// New dataset restricted to gene columns `cols` (labels kept as is).
    pub fn select_genes(&self, cols: &[usize]) -> PerturbDataset {
        PerturbDataset {
            matrix: self.matrix.select_columns(cols.iter()),
            labels: self.labels.clone(),
            genes: self.genes.subset(cols),
        }
    }
}

/// `floor(x + 1/2)` with a small guard against representation error, so that
/// products like `0.25 * 10` land on the intended half.
pub(crate) fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}
