//! Stability selection for the estimated segment networks: refit the
//! penalized model on bootstrap resamples of a segment, count how often each
//! edge is selected, and keep the edges whose selection frequency strictly
//! exceeds a threshold.
//!
//! Each resample draws rows of the segment with replacement from its own
//! deterministic child random stream, so the set of resamples — and with it
//! every count — depends only on the master seed, never on how many worker
//! threads process them. Selection counts are exact integers; thresholds
//! compare against `count / n_resamples`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{default_schema_version, Dataset, ModelSpec, SymmetricParams, TimeRange, SCHEMA_VERSION};
use crate::sim::child_rng;
use crate::solver::{fit_penalized, select_lambda_bic, FitOptions};

/// How the penalty is chosen on each resample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ResamplePenalty {
    /// BIC selection over a fixed grid, independently per resample.
    BicGrid {
        /// Candidate penalties.
        grid: Vec<f64>,
    },
    /// One fixed penalty for every resample.
    Fixed {
        /// The penalty.
        lambda: f64,
    },
}

/// Options for [`stability_select`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    /// Number of bootstrap resamples.
    pub n_resamples: usize,
    /// Selection frequency an edge must strictly exceed to count as stable.
    pub threshold: f64,
    /// Per-resample penalty rule.
    pub penalty: ResamplePenalty,
    /// Solver settings for the per-resample fits.
    pub fit: FitOptions,
}

impl StabilityOptions {
    /// Fifty resamples at threshold 0.6 with the given penalty rule.
    pub fn new(penalty: ResamplePenalty) -> Self {
        StabilityOptions { n_resamples: 50, threshold: 0.6, penalty, fit: FitOptions::default() }
    }
}

/// Selection counts per edge over the bootstrap resamples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityResult {
    /// File format version.
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Number of nodes.
    pub p: usize,
    /// Number of resamples the counts are out of.
    pub n_resamples: usize,
    /// The threshold stable edges strictly exceed.
    pub threshold: f64,
    /// The penalty rule the resamples were fitted with.
    pub penalty: ResamplePenalty,
    /// Selection count per strictly-lower-triangle edge, row-major:
    /// `(1,0), (2,0), (2,1), (3,0), ...`
    pub counts: Vec<u32>,
}

/// Position of edge `(j, k)`, `k < j`, in the strictly-lower-triangle order.
fn edge_index(j: usize, k: usize) -> usize {
    j * (j - 1) / 2 + k
}

impl StabilityResult {
    /// Selection frequency of edge `(j, k)` (either order; `j != k`).
    pub fn frequency(&self, j: usize, k: usize) -> f64 {
        let (j, k) = (j.max(k), j.min(k));
        self.counts[edge_index(j, k)] as f64 / self.n_resamples as f64
    }

    /// Edges whose frequency strictly exceeds `threshold`, ascending in
    /// `(j, k)` with `k < j`.
    pub fn stable_edges_at(&self, threshold: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 1..self.p {
            for k in 0..j {
                if self.frequency(j, k) > threshold {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// Edges stable at the result's own threshold.
    pub fn stable_edges(&self) -> Vec<(usize, usize)> {
        self.stable_edges_at(self.threshold)
    }

    /// Writes the stable edges as CSV with columns
    /// `node_a,node_b,frequency`, ordered by decreasing frequency and then
    /// by node index.
    pub fn write_stable_csv(
        &self,
        path: impl AsRef<std::path::Path>,
        node_labels: &[String],
    ) -> Result<()> {
        if node_labels.len() != self.p {
            return Err(Error::config(format!(
                "{} node labels for p = {} nodes",
                node_labels.len(),
                self.p
            )));
        }
        let mut edges = self.stable_edges();
        edges.sort_by(|&(j1, k1), &(j2, k2)| {
            self.counts[edge_index(j2, k2)]
                .cmp(&self.counts[edge_index(j1, k1)])
                .then(j1.cmp(&j2))
                .then(k1.cmp(&k2))
        });
        let mut wtr = csv::Writer::from_path(path)?;
        wtr.write_record(["node_a", "node_b", "frequency"])?;
        for (j, k) in edges {
            wtr.write_record([
                node_labels[k].as_str(),
                node_labels[j].as_str(),
                &format!("{:?}", self.frequency(j, k)),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Serializes to pretty JSON.
    pub fn write_json(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }
}

/// Runs stability selection on one segment of the series.
///
/// Resample `r` draws `range.len()` rows of the segment with replacement
/// from child stream `r` of `seed`, refits with the resample's penalty, and
/// marks the edges of the fit's support. Counts are summed in resample
/// order, so the outcome is a pure function of the inputs.
pub fn stability_select(
    spec: &ModelSpec,
    data: &Dataset,
    range: TimeRange,
    opts: &StabilityOptions,
    seed: u64,
) -> Result<StabilityResult> {
    data.validate_for(spec)?;
    range.check_within(data.n_rows())?;
    if opts.n_resamples < 1 {
        return Err(Error::config("stability selection needs at least one resample"));
    }
    if !(0.0..=1.0).contains(&opts.threshold) {
        return Err(Error::config(format!(
            "stability threshold must lie in [0, 1], got {}",
            opts.threshold
        )));
    }
    if let ResamplePenalty::BicGrid { grid } = &opts.penalty {
        if grid.is_empty() {
            return Err(Error::config("the penalty grid must not be empty"));
        }
    }
    let p = data.p();
    let rows: Vec<usize> = range.rows().collect();
    let n = rows.len();

    let supports: Result<Vec<Vec<bool>>> = (0..opts.n_resamples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = child_rng(seed, r);
            let mut values = Vec::with_capacity(n * p);
            for _ in 0..n {
                let pick = rows[rng.random_range(0..n)];
                values.extend_from_slice(data.row(pick));
            }
            let resampled = Dataset::from_flat(p, values)?;
            let full = TimeRange::new(1, n)?;
            let theta = match &opts.penalty {
                ResamplePenalty::BicGrid { grid } => {
                    select_lambda_bic(spec, &resampled, full, n as f64, grid, &opts.fit)?
                        .1
                        .theta_hat
                }
                ResamplePenalty::Fixed { lambda } => {
                    fit_penalized(spec, &resampled, full, n as f64, *lambda, None, &opts.fit)?
                        .theta_hat
                }
            };
            Ok(edge_support(&theta))
        })
        .collect();
    let supports = supports?;

    let mut counts = vec![0u32; p * (p - 1) / 2];
    for support in &supports {
        for (c, &hit) in counts.iter_mut().zip(support) {
            if hit {
                *c += 1;
            }
        }
    }
    Ok(StabilityResult {
        schema_version: SCHEMA_VERSION,
        p,
        n_resamples: opts.n_resamples,
        threshold: opts.threshold,
        penalty: opts.penalty.clone(),
        counts,
    })
}

fn edge_support(theta: &SymmetricParams) -> Vec<bool> {
    let p = theta.p();
    let mut out = Vec::with_capacity(p * (p - 1) / 2);
    for j in 1..p {
        for k in 0..j {
            out.push(theta.get(j, k) != 0.0);
        }
    }
    out
}
