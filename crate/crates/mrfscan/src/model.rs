//! Core types: the interaction model, symmetric parameter matrices,
//! time-indexed datasets, and node group labels.
//!
//! A [`ModelSpec`] fixes the alphabet and the sufficient statistics `b0`
//! (node-wise) and `b` (pairwise, symmetric) once; every other module works
//! with alphabet *indices* and reads the statistics out of tables cached
//! here. [`SymmetricParams`] stores one triangle of a symmetric `p x p`
//! matrix — entry `(j, j)` is the node potential of `j`, entry `(j, k)` the
//! interaction weight of the pair — and serializes as a sparse list of
//! non-zero triangle entries. [`Dataset`] is a dense `T x p` matrix of
//! alphabet indices in temporal order, and [`TimeRange`] selects a 1-based
//! inclusive window `[start, end]` of it.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read as _, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Current on-disk schema version stamped into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

pub(crate) fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

// ---------------------------------------------------------------------------
// ModelSpec
// ---------------------------------------------------------------------------

/// Alphabet and sufficient statistics of the random field.
///
/// Symbols are identified by their index `0..m`; `symbol_values` records the
/// numeric value each index stands for (used when evaluating user-supplied
/// statistic functions, and for display). The statistic tables are evaluated
/// once at construction:
///
/// * `b0[u]` — node statistic of symbol `u`,
/// * `b[u * m + v]` — pair statistic of symbols `(u, v)`, symmetric.
///
/// `c0` is the oscillation constant `max(osc(b0), osc(b))`, where `osc(b0)`
/// is the largest gap `|b0(u) - b0(v)|` and `osc(b)` the largest gap
/// `|b(x, u) - b(x, v)|` with one argument held fixed. It scales the penalty
/// schedule and bounds how fast the pseudo-likelihood can vary in any single
/// parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    symbol_values: Vec<f64>,
    b0: Vec<f64>,
    b: Vec<f64>,
    c0: f64,
}

impl ModelSpec {
    /// Builds a spec from symbol values and statistic functions.
    ///
    /// Errors if fewer than two symbols are given, symbols repeat, any
    /// statistic value is non-finite, or `b` is not exactly symmetric.
    pub fn new(
        symbol_values: Vec<f64>,
        b0: impl Fn(f64) -> f64,
        b: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let m = symbol_values.len();
        if m < 2 {
            return Err(Error::config("alphabet must contain at least two symbols"));
        }
        if m > 256 {
            return Err(Error::config("alphabets larger than 256 symbols are not supported"));
        }
        for (i, &s) in symbol_values.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::config(format!("symbol value {i} is not finite")));
            }
            if symbol_values[..i].contains(&s) {
                return Err(Error::config(format!("duplicate symbol value {s}")));
            }
        }
        let b0_table: Vec<f64> = symbol_values.iter().map(|&s| b0(s)).collect();
        let mut b_table = vec![0.0; m * m];
        for u in 0..m {
            for v in 0..m {
                b_table[u * m + v] = b(symbol_values[u], symbol_values[v]);
            }
        }
        if b0_table.iter().any(|v| !v.is_finite()) || b_table.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("statistic tables contain non-finite values"));
        }
        for u in 0..m {
            for v in 0..u {
                if b_table[u * m + v] != b_table[v * m + u] {
                    return Err(Error::config(format!(
                        "pair statistic is not symmetric at symbols ({u}, {v})"
                    )));
                }
            }
        }
        let c0 = compute_c0(&b0_table, &b_table, m);
        Ok(ModelSpec { symbol_values, b0: b0_table, b: b_table, c0 })
    }

    /// The binary Ising model: alphabet `{0, 1}`, `b0(x) = x`, `b(x, y) = x*y`.
    pub fn ising() -> Self {
        ModelSpec::new(vec![0.0, 1.0], |x| x, |x, y| x * y)
            .expect("the Ising specification is always valid")
    }

    /// Number of symbols in the alphabet.
    #[inline]
    pub fn alphabet_size(&self) -> usize {
        self.symbol_values.len()
    }

    /// Numeric values of the symbols, in index order.
    pub fn symbol_values(&self) -> &[f64] {
        &self.symbol_values
    }

    /// Node statistic of symbol `u`.
    #[inline]
    pub fn b0(&self, u: usize) -> f64 {
        self.b0[u]
    }

    /// Pair statistic of symbols `(u, v)`.
    #[inline]
    pub fn b(&self, u: usize, v: usize) -> f64 {
        self.b[u * self.symbol_values.len() + v]
    }

    /// Full node-statistic table, indexed by symbol.
    #[inline]
    pub fn b0_table(&self) -> &[f64] {
        &self.b0
    }

    /// Full pair-statistic table, row-major `m x m`.
    #[inline]
    pub fn b_table(&self) -> &[f64] {
        &self.b
    }

    /// Oscillation constant of the statistics (see type docs).
    #[inline]
    pub fn c0(&self) -> f64 {
        self.c0
    }
}

/// Largest oscillation of the statistic tables: the maximum over
/// `|b0(u) - b0(v)|` and `|b(x, u) - b(x, v)|`.
///
/// Exposed separately so tests can recompute it against the cached value.
pub fn compute_c0(b0: &[f64], b: &[f64], m: usize) -> f64 {
    let mut osc = 0.0f64;
    for u in 0..m {
        for v in 0..m {
            osc = osc.max((b0[u] - b0[v]).abs());
            for x in 0..m {
                osc = osc.max((b[x * m + u] - b[x * m + v]).abs());
            }
        }
    }
    osc
}

// ---------------------------------------------------------------------------
// SymmetricParams
// ---------------------------------------------------------------------------

/// Number of free parameters of a symmetric `p x p` matrix: `p (p + 1) / 2`.
#[inline]
pub fn triangle_len(p: usize) -> usize {
    p * (p + 1) / 2
}

/// Position of entry `(j, k)`, `k <= j`, in triangle storage.
#[inline]
pub fn triangle_index(j: usize, k: usize) -> usize {
    debug_assert!(k <= j);
    j * (j + 1) / 2 + k
}

/// A symmetric `p x p` parameter matrix stored as one triangle.
///
/// Reads and writes are symmetric: `get(j, k) == get(k, j)`, and `set`
/// updates the single stored entry behind both. The L1/L0 norms used by the
/// estimator count every stored entry once (diagonal included, off-diagonal
/// pairs not double-counted), matching the penalty in the fitting objective.
///
/// Serializes as `{"schema_version": 1, "p": p, "entries": [[j, k, value], ...]}`
/// with 0-based indices, `j >= k`, non-zero entries only, in row-major
/// triangle order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SparseParamsRepr", try_from = "SparseParamsRepr")]
pub struct SymmetricParams {
    p: usize,
    tri: Vec<f64>,
}

impl SymmetricParams {
    /// The zero matrix of side `p`.
    pub fn zeros(p: usize) -> Self {
        SymmetricParams { p, tri: vec![0.0; triangle_len(p)] }
    }

    /// Builds a matrix from explicit triangle entries `(j, k, value)` with
    /// `k <= j`. Unlisted entries are zero. Errors on out-of-range indices,
    /// upper-triangle coordinates (`k > j`), duplicates, or non-finite values.
    pub fn from_entries(p: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut m = SymmetricParams::zeros(p);
        let mut seen = vec![false; triangle_len(p)];
        for &(j, k, v) in entries {
            if j >= p || k > j {
                return Err(Error::data(format!(
                    "entry ({j}, {k}) out of range for p = {p}; entries must satisfy k <= j < p"
                )));
            }
            if !v.is_finite() {
                return Err(Error::data(format!("entry ({j}, {k}) has non-finite value {v}")));
            }
            let idx = triangle_index(j, k);
            if seen[idx] {
                return Err(Error::data(format!("duplicate entry ({j}, {k})")));
            }
            seen[idx] = true;
            m.tri[idx] = v;
        }
        Ok(m)
    }

    /// Matrix side length.
    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of stored (triangle) entries.
    #[inline]
    pub fn len(&self) -> usize {
        self.tri.len()
    }

    /// True when `p == 0` (no parameters at all).
    pub fn is_empty(&self) -> bool {
        self.tri.is_empty()
    }

    /// Symmetric read of entry `(j, k)`.
    #[inline]
    pub fn get(&self, j: usize, k: usize) -> f64 {
        if k <= j {
            self.tri[triangle_index(j, k)]
        } else {
            self.tri[triangle_index(k, j)]
        }
    }

    /// Symmetric write of entry `(j, k)`.
    #[inline]
    pub fn set(&mut self, j: usize, k: usize, value: f64) {
        if k <= j {
            self.tri[triangle_index(j, k)] = value;
        } else {
            self.tri[triangle_index(k, j)] = value;
        }
    }

    /// Triangle storage, row-major: entry `(j, k)` at `j (j + 1) / 2 + k`.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.tri
    }

    /// Mutable triangle storage (used by the solver's inner loop).
    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.tri
    }

    /// Wraps an existing triangle buffer. Panics if the length is not
    /// `triangle_len(p)`; intended for solver internals and tests.
    pub fn from_triangle(p: usize, tri: Vec<f64>) -> Self {
        assert_eq!(tri.len(), triangle_len(p), "triangle buffer has wrong length");
        SymmetricParams { p, tri }
    }

    /// Iterates all triangle entries `(j, k, value)` with `k <= j`, in
    /// row-major order.
    pub fn iter_triangle(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.p).flat_map(move |j| (0..=j).map(move |k| (j, k, self.tri[triangle_index(j, k)])))
    }

    /// Iterates the non-zero triangle entries, in row-major order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.iter_triangle().filter(|&(_, _, v)| v != 0.0)
    }

    /// Sum of `|value|` over the stored triangle (diagonal included).
    pub fn l1_norm(&self) -> f64 {
        self.tri.iter().map(|v| v.abs()).sum()
    }

    /// Number of exactly non-zero stored entries.
    pub fn l0_count(&self) -> usize {
        self.tri.iter().filter(|v| **v != 0.0).count()
    }

    /// Largest `|value|` over the stored triangle.
    pub fn linf_norm(&self) -> f64 {
        self.tri.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Square root of the sum of squared stored entries (each symmetric pair
    /// counted once).
    pub fn frobenius_triangle(&self) -> f64 {
        self.tri.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Number of non-zero off-diagonal entries (edges of the interaction
    /// graph), each pair counted once.
    pub fn edge_count(&self) -> usize {
        self.iter_nonzero().filter(|&(j, k, _)| j != k).count()
    }

    /// True if every stored entry is finite.
    pub fn is_finite(&self) -> bool {
        self.tri.iter().all(|v| v.is_finite())
    }

    /// Reads a sparse-JSON parameter file.
    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let mut buf = String::new();
        std::fs::File::open(path)?.read_to_string(&mut buf)?;
        Ok(serde_json::from_str(&buf)?)
    }

    /// Writes the sparse-JSON representation to a file.
    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        let s = serde_json::to_string_pretty(self)?;
        f.write_all(s.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// On-disk shape of [`SymmetricParams`].
#[derive(Serialize, Deserialize)]
struct SparseParamsRepr {
    #[serde(default = "default_schema_version")]
    schema_version: u32,
    p: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl From<SymmetricParams> for SparseParamsRepr {
    fn from(m: SymmetricParams) -> Self {
        SparseParamsRepr {
            schema_version: SCHEMA_VERSION,
            p: m.p,
            entries: m.iter_nonzero().collect(),
        }
    }
}

impl TryFrom<SparseParamsRepr> for SymmetricParams {
    type Error = Error;

    fn try_from(repr: SparseParamsRepr) -> Result<Self> {
        if repr.schema_version != SCHEMA_VERSION {
            return Err(Error::data(format!(
                "unsupported schema_version {} (expected {})",
                repr.schema_version, SCHEMA_VERSION
            )));
        }
        SymmetricParams::from_entries(repr.p, &repr.entries)
    }
}

/// Per-row L1 distance between two symmetric matrices: for each row `j`,
/// the sum of `|a[j][k] - b[j][k]|` over the full row `k = 0..p` (diagonal
/// included, off-diagonal entries read symmetrically).
///
/// Errors if the two matrices have different side lengths.
pub fn rowwise_l1_gap(a: &SymmetricParams, b: &SymmetricParams) -> Result<Vec<f64>> {
    if a.p() != b.p() {
        return Err(Error::config(format!(
            "matrix sizes differ: {} vs {}",
            a.p(),
            b.p()
        )));
    }
    let p = a.p();
    let mut gaps = vec![0.0; p];
    for (j, gap) in gaps.iter_mut().enumerate() {
        let mut s = 0.0;
        for k in 0..p {
            s += (a.get(j, k) - b.get(j, k)).abs();
        }
        *gap = s;
    }
    Ok(gaps)
}

// ---------------------------------------------------------------------------
// TimeRange
// ---------------------------------------------------------------------------

/// A 1-based inclusive window `[start, end]` of observation times.
///
/// Mirrors the convention that a change point `tau` splits a series of `T`
/// observations into `[1, tau]` and `[tau + 1, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeRange {
    /// First observation time in the window (1-based, inclusive).
    pub start: usize,
    /// Last observation time in the window (1-based, inclusive).
    pub end: usize,
}

impl TimeRange {
    /// Builds `[start, end]`, requiring `1 <= start <= end`.
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start == 0 || start > end {
            return Err(Error::config(format!(
                "invalid time range [{start}, {end}]: need 1 <= start <= end"
            )));
        }
        Ok(TimeRange { start, end })
    }

    /// Number of observations in the window.
    #[inline]
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    /// Always false: construction requires at least one observation.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based row indices covered by the window.
    #[inline]
    pub fn rows(&self) -> std::ops::Range<usize> {
        (self.start - 1)..self.end
    }

    /// Errors unless the window fits a series of length `t_len`.
    pub fn check_within(&self, t_len: usize) -> Result<()> {
        if self.end > t_len {
            return Err(Error::config(format!(
                "time range [{}, {}] exceeds series length {t_len}",
                self.start, self.end
            )));
        }
        Ok(())
    }
}

impl fmt::Display for TimeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

/// A time-ordered sample: `T` rows of `p` alphabet indices.
///
/// Rows are stored row-major as `u8` indices into the model alphabet (which
/// is capped at 256 symbols). Node labels name the columns; optional time
/// labels (e.g. ISO dates from ingested vote data) name the rows.
///
/// CSV form: a header row of node labels, then one row of indices per
/// observation. Change-point analysis needs `T >= 2`, which the CSV loader
/// and the scan entry points enforce; directly constructed datasets (e.g.
/// single-draw sampler output) may have `T = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    p: usize,
    values: Vec<u8>,
    node_labels: Vec<String>,
    time_labels: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from rows of alphabet indices with default node
    /// labels `v1..vp`. Errors on `p == 0`, no rows, or ragged rows.
    pub fn from_rows(p: usize, rows: &[Vec<u8>]) -> Result<Self> {
        if p == 0 {
            return Err(Error::config("dataset must have at least one node"));
        }
        if rows.is_empty() {
            return Err(Error::data("dataset must have at least one observation"));
        }
        let mut values = Vec::with_capacity(p * rows.len());
        for (t, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::data(format!(
                    "row {} has {} values, expected {p}",
                    t + 1,
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(Dataset {
            p,
            values,
            node_labels: default_node_labels(p),
            time_labels: None,
        })
    }

    /// Builds a dataset from a flat row-major buffer of `T * p` indices.
    pub fn from_flat(p: usize, values: Vec<u8>) -> Result<Self> {
        if p == 0 {
            return Err(Error::config("dataset must have at least one node"));
        }
        if values.is_empty() || values.len() % p != 0 {
            return Err(Error::data(format!(
                "flat buffer length {} is not a positive multiple of p = {p}",
                values.len()
            )));
        }
        Ok(Dataset {
            p,
            values,
            node_labels: default_node_labels(p),
            time_labels: None,
        })
    }

    /// Replaces the node labels. Errors if the count is not `p`.
    pub fn with_node_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.p {
            return Err(Error::data(format!(
                "{} node labels for {} nodes",
                labels.len(),
                self.p
            )));
        }
        self.node_labels = labels;
        Ok(self)
    }

    /// Attaches per-row time labels. Errors if the count is not `T`.
    pub fn with_time_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_rows() {
            return Err(Error::data(format!(
                "{} time labels for {} rows",
                labels.len(),
                self.n_rows()
            )));
        }
        self.time_labels = Some(labels);
        Ok(self)
    }

    /// Number of nodes `p`.
    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of observations `T`.
    #[inline]
    pub fn n_rows(&self) -> usize {
        self.values.len() / self.p
    }

    /// Row at 0-based index `t0`.
    #[inline]
    pub fn row(&self, t0: usize) -> &[u8] {
        &self.values[t0 * self.p..(t0 + 1) * self.p]
    }

    /// Column labels.
    pub fn node_labels(&self) -> &[String] {
        &self.node_labels
    }

    /// Row labels, when present.
    pub fn time_labels(&self) -> Option<&[String]> {
        self.time_labels.as_deref()
    }

    /// Errors unless every cell is a valid symbol index for `spec`.
    pub fn validate_for(&self, spec: &ModelSpec) -> Result<()> {
        let m = spec.alphabet_size() as u8;
        for (i, &v) in self.values.iter().enumerate() {
            if v >= m {
                return Err(Error::data(format!(
                    "cell at row {}, column {} has symbol index {v}, outside alphabet of size {m}",
                    i / self.p + 1,
                    i % self.p
                )));
            }
        }
        Ok(())
    }

    /// The same observations in reverse temporal order.
    pub fn reversed(&self) -> Dataset {
        let t_len = self.n_rows();
        let mut values = Vec::with_capacity(self.values.len());
        for t0 in (0..t_len).rev() {
            values.extend_from_slice(self.row(t0));
        }
        Dataset {
            p: self.p,
            values,
            node_labels: self.node_labels.clone(),
            time_labels: self
                .time_labels
                .as_ref()
                .map(|ls| ls.iter().rev().cloned().collect()),
        }
    }

    /// Reads the CSV form (header of node labels, rows of indices).
    /// Requires at least two observations.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(&path)?;
        Self::from_csv_reader(file)
    }

    /// Reads the CSV form from any reader.
    pub fn from_csv_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let p = headers.len();
        if p == 0 {
            return Err(Error::data("dataset CSV has an empty header"));
        }
        let node_labels: Vec<String> = headers.iter().map(|s| s.to_string()).collect();
        let mut values = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != p {
                return Err(Error::data(format!(
                    "dataset CSV row {} has {} fields, expected {p}",
                    i + 1,
                    record.len()
                )));
            }
            for field in record.iter() {
                let v: u16 = field.trim().parse().map_err(|_| {
                    Error::data(format!(
                        "dataset CSV row {} has non-index cell {field:?}",
                        i + 1
                    ))
                })?;
                if v > u8::MAX as u16 {
                    return Err(Error::data(format!(
                        "dataset CSV row {} has symbol index {v} > 255",
                        i + 1
                    )));
                }
                values.push(v as u8);
            }
        }
        if values.len() < 2 * p {
            return Err(Error::data("dataset CSV must contain at least two observations"));
        }
        Ok(Dataset {
            p,
            values,
            node_labels,
            time_labels: None,
        })
    }

    /// Writes the CSV form.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        wtr.write_record(&self.node_labels)?;
        for t0 in 0..self.n_rows() {
            wtr.write_record(self.row(t0).iter().map(|v| v.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn default_node_labels(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("v{j}")).collect()
}

// ---------------------------------------------------------------------------
// GroupLabels
// ---------------------------------------------------------------------------

/// A category label per node (e.g. party membership, community id).
///
/// CSV form: header `node,group`, one row per node in column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupLabels {
    labels: Vec<String>,
}

impl GroupLabels {
    /// Wraps a label per node. Errors on an empty list.
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::config("group labels must cover at least one node"));
        }
        Ok(GroupLabels { labels })
    }

    /// Number of nodes covered.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when no nodes are covered (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Label of node `j`.
    pub fn label(&self, j: usize) -> &str {
        &self.labels[j]
    }

    /// All labels in node order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Distinct group names, sorted.
    pub fn groups(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.labels.iter().map(|s| s.as_str()).collect();
        set.into_iter().collect()
    }

    /// Node indices belonging to `group`.
    pub fn members(&self, group: &str) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.as_str() == group)
            .map(|(j, _)| j)
            .collect()
    }

    /// Reads the CSV form (`node,group` header, one row per node in order).
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(&path)?;
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let mut labels = Vec::new();
        for record in rdr.records() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::data("group CSV rows need node and group columns"));
            }
            labels.push(record[1].trim().to_string());
        }
        GroupLabels::new(labels)
    }

    /// Writes the CSV form using the given node labels.
    pub fn write_csv(&self, path: impl AsRef<Path>, node_labels: &[String]) -> Result<()> {
        if node_labels.len() != self.labels.len() {
            return Err(Error::config("node label count does not match group label count"));
        }
        let mut wtr = csv::Writer::from_path(path)?;
        wtr.write_record(["node", "group"])?;
        for (node, group) in node_labels.iter().zip(&self.labels) {
            wtr.write_record([node.as_str(), group.as_str()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
