use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::data::GeneTable;
use crate::error::{Error, Result};

/// Undirected gene-pair set exported from a biological interaction database
/// (`geneA<TAB>geneB` per line, no header).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceNetwork {
    pub name: String,
    pairs: BTreeSet<(String, String)>,
}

pub(crate) fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl ReferenceNetwork {
    /// Build from symbol pairs; self-pairs are dropped and pairs are
    /// deduplicated as unordered.
    pub fn new<I, S>(name: impl Into<String>, pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let pairs = pairs
            .into_iter()
            .filter(|(a, b)| a.as_ref() != b.as_ref())
            .map(|(a, b)| unordered(a.as_ref(), b.as_ref()))
            .collect();
        Self {
            name: name.into(),
            pairs,
        }
    }

    pub fn read_tsv(name: impl Into<String>, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
                return Err(Error::Parse {
                    file: path.display().to_string(),
                    line: i + 1,
                    message: "expected `geneA<TAB>geneB`".into(),
                });
            }
            pairs.push((fields[0].to_string(), fields[1].to_string()));
        }
        Ok(Self::new(name, pairs))
    }

    pub fn pairs(&self) -> &BTreeSet<(String, String)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs whose both genes are in `genes`.
    pub fn restricted_to(&self, genes: &GeneTable) -> BTreeSet<(String, String)> {
        self.pairs
            .iter()
            .filter(|(a, b)| genes.contains(a) && genes.contains(b))
            .cloned()
            .collect()
    }
}
