//! Dataset directory layout:
//!
//! - `genes.tsv`: one gene symbol per line, line order = column order
//! - `interventions.tsv`: one label per line, line order = row order
//! - `expression.mtx` (Matrix Market coordinate, cells × genes) or
//!   `expression.tsv` (dense, header row of gene symbols)

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::{GeneTable, PerturbDataset};
use crate::error::{Error, Result};

pub const GENES_FILE: &str = "genes.tsv";
pub const LABELS_FILE: &str = "interventions.tsv";
pub const MTX_FILE: &str = "expression.mtx";
pub const DENSE_FILE: &str = "expression.tsv";

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Accept negative entries (synthetic exports). Non-finite values are
    /// always rejected.
    pub allow_negative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Dense,
    MatrixMarket,
}

pub fn load_dataset(dir: impl AsRef<Path>) -> Result<PerturbDataset> {
    load_dataset_with(dir, LoadOptions::default())
}

pub fn load_dataset_with(dir: impl AsRef<Path>, opts: LoadOptions) -> Result<PerturbDataset> {
    let dir = dir.as_ref();
    let genes = GeneTable::new(read_lines(&dir.join(GENES_FILE))?)?;
    let labels = read_lines(&dir.join(LABELS_FILE))?;

    let mtx = dir.join(MTX_FILE);
    let dense = dir.join(DENSE_FILE);
    let matrix = if mtx.is_file() {
        read_mtx(&mtx, labels.len(), genes.len())?
    } else if dense.is_file() {
        read_dense(&dense, &genes)?
    } else {
        return Err(Error::MissingFile(dir.join(format!("{MTX_FILE} | {DENSE_FILE}"))));
    };

    if opts.allow_negative {
        PerturbDataset::new_signed(matrix, labels, genes)
    } else {
        PerturbDataset::new(matrix, labels, genes)
    }
}

pub fn save_dataset(ds: &PerturbDataset, dir: impl AsRef<Path>, format: MatrixFormat) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut genes = String::new();
    for g in ds.genes().names() {
        genes.push_str(g);
        genes.push('\n');
    }
    write(&dir.join(GENES_FILE), &genes)?;

    let mut labels = String::new();
    for l in ds.labels() {
        labels.push_str(l);
        labels.push('\n');
    }
    write(&dir.join(LABELS_FILE), &labels)?;

    let m = ds.matrix();
    match format {
        MatrixFormat::Dense => {
            let mut out = ds.genes().names().join("\t");
            out.push('\n');
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    if c > 0 {
                        out.push('\t');
                    }
                    write!(out, "{}", m[(r, c)]).unwrap();
                }
                out.push('\n');
            }
            let _ = fs::remove_file(dir.join(MTX_FILE));
            write(&dir.join(DENSE_FILE), &out)
        }
        MatrixFormat::MatrixMarket => {
            // Only +0.0 is implicit, so a -0.0 entry survives the round trip.
            let entries: Vec<(usize, usize, f64)> = (0..m.nrows())
                .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
                .map(|(r, c)| (r, c, m[(r, c)]))
                .filter(|(_, _, v)| v.to_bits() != 0)
                .collect();
            let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
            writeln!(out, "{} {} {}", m.nrows(), m.ncols(), entries.len()).unwrap();
            for (r, c, v) in entries {
                writeln!(out, "{} {} {}", r + 1, c + 1, v).unwrap();
            }
            let _ = fs::remove_file(dir.join(DENSE_FILE));
            write(&dir.join(MTX_FILE), &out)
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-empty lines of a one-item-per-line file. A single trailing newline is
/// allowed; blank lines elsewhere are an error.
fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = read_text(path)?;
    let body = text.strip_suffix('\n').unwrap_or(&text);
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split('\n')
        .enumerate()
        .map(|(i, line)| {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                Err(Error::Parse {
                    file: file_name(path),
                    line: i + 1,
                    message: "blank line".into(),
                })
            } else {
                Ok(line.to_string())
            }
        })
        .collect()
}

fn parse_f64(token: &str, path: &Path, line: usize) -> Result<f64> {
    token.parse::<f64>().map_err(|_| Error::Parse {
        file: file_name(path),
        line,
        message: format!("not a number: {token:?}"),
    })
}

fn read_dense(path: &Path, genes: &GeneTable) -> Result<DMatrix<f64>> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h.trim_end_matches('\r'),
        None => {
            return Err(Error::Parse {
                file: file_name(path),
                line: 1,
                message: "missing header row".into(),
            })
        }
    };
    let symbols: Vec<&str> = header.split('\t').collect();
    if symbols.len() != genes.len() || symbols.iter().zip(genes.names()).any(|(a, b)| a != b) {
        return Err(Error::Parse {
            file: file_name(path),
            line: 1,
            message: format!("header does not match {GENES_FILE}"),
        });
    }
    let mut values = Vec::new();
    let mut n_rows = 0;
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split('\t')
            .map(|t| parse_f64(t, path, i + 1))
            .collect::<Result<_>>()?;
        if row.len() != genes.len() {
            return Err(Error::Parse {
                file: file_name(path),
                line: i + 1,
                message: format!("expected {} fields, got {}", genes.len(), row.len()),
            });
        }
        values.extend(row);
        n_rows += 1;
    }
    Ok(DMatrix::from_row_slice(n_rows, genes.len(), &values))
}

fn read_mtx(path: &Path, n_labels: usize, n_genes: usize) -> Result<DMatrix<f64>> {
    let text = read_text(path)?;
    let perr = |line: usize, message: String| Error::Parse {
        file: file_name(path),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines.next().ok_or_else(|| perr(1, "empty file".into()))?;
    let banner_lc = banner.to_ascii_lowercase();
    if !banner_lc.starts_with("%%matrixmarket matrix coordinate")
        || !(banner_lc.contains(" real") || banner_lc.contains(" integer"))
        || !banner_lc.contains("general")
    {
        return Err(perr(1, "expected a real/integer general coordinate Matrix Market file".into()));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut matrix = DMatrix::<f64>::zeros(0, 0);
    let mut seen = 0usize;
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(perr(i + 1, "bad size line".into()));
                }
                let parse = |t: &str| t.parse::<usize>().map_err(|_| perr(i + 1, format!("bad integer {t:?}")));
                let (r, c, nnz) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                if r != n_labels {
                    return Err(Error::RowCountMismatch { labels: n_labels, rows: r });
                }
                if c != n_genes {
                    return Err(Error::ColumnCountMismatch { genes: n_genes, cols: c });
                }
                matrix = DMatrix::zeros(r, c);
                size = Some((r, c, nnz));
            }
            Some((r, c, _)) => {
                if fields.len() != 3 {
                    return Err(perr(i + 1, "expected `row col value`".into()));
                }
                let idx = |t: &str, max: usize| match t.parse::<usize>() {
                    Ok(v) if v >= 1 && v <= max => Ok(v - 1),
                    _ => Err(perr(i + 1, format!("index {t:?} out of range 1..={max}"))),
                };
                let (ri, ci) = (idx(fields[0], r)?, idx(fields[1], c)?);
                matrix[(ri, ci)] = parse_f64(fields[2], path, i + 1)?;
                seen += 1;
            }
        }
    }
    match size {
        None => Err(perr(1, "missing size line".into())),
        Some((_, _, nnz)) if nnz != seen => Err(perr(
            text.lines().count(),
            format!("header declares {nnz} entries, found {seen}"),
        )),
        Some(_) => Ok(matrix),
    }
}
