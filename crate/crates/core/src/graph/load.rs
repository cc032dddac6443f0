use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

const ASYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    MatrixMarket,
    EdgeList,
}

impl GraphFormat {
    /// Guesses the format from the file extension (`.mtx` is Matrix Market).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") | Some("mm") => Self::MatrixMarket,
            _ => Self::EdgeList,
        }
    }
}

/// Non-fatal irregularities repaired while loading.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LoadWarning {
    DiagonalDropped { count: usize },
    Asymmetric { pairs: usize },
    ZeroWeightDropped { count: usize },
}

impl std::fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::DiagonalDropped { count } => write!(f, "dropped {count} diagonal entries"),
            Self::Asymmetric { pairs } => write!(
                f,
                "{pairs} vertex pairs had asymmetric weights; symmetrized with max(W, W^T)"
            ),
            Self::ZeroWeightDropped { count } => write!(f, "dropped {count} zero-weight entries"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub warnings: Vec<LoadWarning>,
}

pub fn load_graph(path: &Path, format: GraphFormat) -> Result<LoadedGraph> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        GraphFormat::MatrixMarket => read_matrix_market(reader, path),
        GraphFormat::EdgeList => read_edge_list(reader, path),
    }
}

/// Accumulates directed entries and resolves them into an undirected graph.
struct EntrySink {
    path: PathBuf,
    /// (lo, hi) -> (weight stored as lo->hi, weight stored as hi->lo)
    pairs: HashMap<(usize, usize), (Option<f64>, Option<f64>)>,
    diagonal: usize,
    zeros: usize,
    directed: bool,
}

impl EntrySink {
    fn new(path: &Path, directed: bool) -> Self {
        Self {
            path: path.to_path_buf(),
            pairs: HashMap::new(),
            diagonal: 0,
            zeros: 0,
            directed,
        }
    }

    fn push(&mut self, line: usize, i: usize, j: usize, w: f64) -> Result<()> {
        if !w.is_finite() {
            return Err(self.parse_error(line, format!("non-finite weight {w}")));
        }
        if w < 0.0 {
            return Err(Error::NegativeWeight {
                row: i,
                col: j,
                weight: w,
            });
        }
        if i == j {
            self.diagonal += 1;
            return Ok(());
        }
        if w == 0.0 {
            self.zeros += 1;
            return Ok(());
        }
        let slot = self.pairs.entry((i.min(j), i.max(j))).or_default();
        let side = if i < j || !self.directed {
            &mut slot.0
        } else {
            &mut slot.1
        };
        *side = Some(side.map_or(w, |old: f64| old.max(w)));
        Ok(())
    }

    fn parse_error(&self, line: usize, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }

    fn finish(self, n: usize) -> Result<LoadedGraph> {
        let mut warnings = Vec::new();
        if self.diagonal > 0 {
            warnings.push(LoadWarning::DiagonalDropped {
                count: self.diagonal,
            });
        }
        if self.zeros > 0 {
            warnings.push(LoadWarning::ZeroWeightDropped { count: self.zeros });
        }
        let mut asymmetric = 0;
        let mut edges = Vec::with_capacity(self.pairs.len());
        for ((i, j), (a, b)) in self.pairs {
            let w = match (a, b) {
                (Some(a), Some(b)) => {
                    if (a - b).abs() > ASYMMETRY_TOL * a.max(b) {
                        asymmetric += 1;
                    }
                    a.max(b)
                }
                (Some(w), None) | (None, Some(w)) => {
                    if self.directed {
                        asymmetric += 1;
                    }
                    w
                }
                (None, None) => unreachable!(),
            };
            edges.push((i, j, w));
        }
        if asymmetric > 0 {
            warnings.push(LoadWarning::Asymmetric { pairs: asymmetric });
        }
        for w in &warnings {
            log::warn!("{}: {w}", self.path.display());
        }
        Ok(LoadedGraph {
            graph: Graph::from_edges(n, edges)?,
            warnings,
        })
    }
}

/// Reads a Matrix Market `coordinate` file (`real`, `integer` or `pattern`; `general`
/// or `symmetric`) as a weighted adjacency matrix. Pattern entries get weight 1.
pub fn read_matrix_market(reader: impl BufRead, path: &Path) -> Result<LoadedGraph> {
    let mut lines = reader.lines().enumerate();
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let (_, header) = lines
        .next()
        .ok_or_else(|| perr(1, "empty file".into()))?;
    let header = header?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(perr(1, format!("not a Matrix Market header: {header}")));
    }
    if tokens[2] != "coordinate" {
        return Err(perr(1, format!("unsupported storage `{}`", tokens[2])));
    }
    let pattern = match tokens[3].as_str() {
        "real" | "integer" | "double" => false,
        "pattern" => true,
        other => return Err(perr(1, format!("unsupported field `{other}`"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(perr(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut sink = EntrySink::new(path, !symmetric);
    let mut seen = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((rows, cols, _)) = size else {
            if fields.len() != 3 {
                return Err(perr(lineno, format!("bad size line `{line}`")));
            }
            let parsed: Vec<usize> = fields
                .iter()
                .map(|f| f.parse().map_err(|e| perr(lineno, format!("{e}"))))
                .collect::<Result<_>>()?;
            if parsed[0] != parsed[1] {
                return Err(perr(
                    lineno,
                    format!("adjacency must be square, got {} x {}", parsed[0], parsed[1]),
                ));
            }
            size = Some((parsed[0], parsed[1], parsed[2]));
            continue;
        };
        let want = if pattern { 2 } else { 3 };
        if fields.len() < want {
            return Err(perr(lineno, format!("expected {want} fields, got `{line}`")));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|e| perr(lineno, format!("row index: {e}")))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|e| perr(lineno, format!("column index: {e}")))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(perr(lineno, format!("index ({i}, {j}) out of range")));
        }
        let w = if pattern {
            1.0
        } else {
            fields[2]
                .parse::<f64>()
                .map_err(|e| perr(lineno, format!("value: {e}")))?
        };
        sink.push(lineno, i - 1, j - 1, w)?;
        seen += 1;
    }
    let (n, _, nnz) = size.ok_or_else(|| perr(1, "missing size line".into()))?;
    if seen != nnz {
        return Err(perr(0, format!("header announces {nnz} entries, found {seen}")));
    }
    sink.finish(n)
}

/// Reads `src dst [weight]` lines with 0-based ids; missing weights are 1. Lines starting
/// with `#` or `%` are comments. Each undirected edge may appear once or in both directions.
pub fn read_edge_list(reader: impl BufRead, path: &Path) -> Result<LoadedGraph> {
    let mut sink = EntrySink::new(path, false);
    let mut n = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(sink.parse_error(lineno, format!("expected `src dst [weight]`, got `{line}`")));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|e| sink.parse_error(lineno, format!("source id: {e}")))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|e| sink.parse_error(lineno, format!("target id: {e}")))?;
        let w = match fields.get(2) {
            Some(f) => f
                .parse::<f64>()
                .map_err(|e| sink.parse_error(lineno, format!("weight: {e}")))?,
            None => 1.0,
        };
        n = n.max(i + 1).max(j + 1);
        sink.push(lineno, i, j, w)?;
    }
    sink.finish(n)
}

/// Writes the lower triangle as a `real symmetric` Matrix Market file.
pub fn write_matrix_market(graph: &Graph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    let n = graph.n_vertices();
    writeln!(out, "{n} {n} {}", graph.n_edges())?;
    for (i, j, w) in graph.edges() {
        writeln!(out, "{} {} {w}", j + 1, i + 1)?;
    }
    Ok(())
}

pub fn write_edge_list(graph: &Graph, mut out: impl Write) -> std::io::Result<()> {
    for (i, j, w) in graph.edges() {
        writeln!(out, "{i} {j} {w}")?;
    }
    Ok(())
}
