use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DirectedGraph;
use crate::data::GeneTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub weight: Option<f64>,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            weight: None,
        }
    }

    pub fn weighted(source: impl Into<String>, target: impl Into<String>, weight: f64) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            weight: Some(weight),
        }
    }
}

/// A predicted network as gene-symbol pairs: the only output an inference
/// method has to produce. TSV form is `source<TAB>target[<TAB>weight]`, no
/// header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeList {
    pub edges: Vec<Edge>,
}

impl EdgeList {
    pub fn new(edges: Vec<Edge>) -> Self {
        Self { edges }
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        Self {
            edges: pairs.into_iter().map(|(a, b)| Edge::new(a, b)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn read_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse_tsv(&text, &name)
    }

    /// Parse TSV text. Blank lines are skipped; any other line must have two
    /// or three tab-separated fields.
    pub fn parse_tsv(text: &str, file: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                file: file.to_string(),
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&fields.len()) || fields[..2].iter().any(|f| f.is_empty()) {
                return Err(err(format!("expected `source<TAB>target[<TAB>weight]`, got {line:?}")));
            }
            let weight = match fields.get(2) {
                Some(w) => Some(
                    w.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| err(format!("bad weight {w:?}")))?,
                ),
                None => None,
            };
            edges.push(Edge {
                source: fields[0].to_string(),
                target: fields[1].to_string(),
                weight,
            });
        }
        Ok(Self { edges })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            match e.weight {
                Some(w) => writeln!(out, "{}\t{}\t{}", e.source, e.target, w),
                None => writeln!(out, "{}\t{}", e.source, e.target),
            }
            .unwrap();
        }
        out
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// What was lost converting an edge list into a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conversion {
    pub n_input: usize,
    pub n_unresolved: usize,
    pub n_self_loops: usize,
    pub n_duplicates: usize,
}

/// Resolve symbols against `genes`. Unknown symbols and self-loops are
/// dropped, duplicates collapsed; all three are counted.
pub fn from_edge_list(el: &EdgeList, genes: &GeneTable) -> (DirectedGraph, Conversion) {
    let mut g = DirectedGraph::empty(genes.len());
    let mut conv = Conversion {
        n_input: el.len(),
        ..Default::default()
    };
    for e in &el.edges {
        match (genes.index_of(&e.source), genes.index_of(&e.target)) {
            (Some(a), Some(b)) if a == b => conv.n_self_loops += 1,
            (Some(a), Some(b)) => {
                if !g.insert(a, b) {
                    conv.n_duplicates += 1;
                }
            }
            _ => conv.n_unresolved += 1,
        }
    }
    (g, conv)
}

/// Edge list of `g` in edge order, using gene symbols.
pub fn to_edge_list(g: &DirectedGraph, genes: &GeneTable) -> EdgeList {
    EdgeList {
        edges: g
            .edges()
            .map(|(a, b)| Edge::new(genes.name(a), genes.name(b)))
            .collect(),
    }
}
