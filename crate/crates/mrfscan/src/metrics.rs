//! Evaluation metrics: edge recovery, parameter error, change-point error
//! summaries, descriptive network statistics, and the pseudo-divergence
//! separating the two segment distributions.
//!
//! Edge-level metrics compare the strictly-lower-triangle supports of two
//! parameter sets; a coefficient is an edge when its magnitude exceeds a
//! caller-chosen tolerance (pass `0.0` for the exact zeros the solver
//! produces). Node-level network statistics (degree, eigenvector centrality,
//! local clustering) are computed on the whole graph and then averaged over
//! the members of each node group.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GroupLabels, ModelSpec, SymmetricParams};
use crate::pseudo::{phi, KahanSum};
use crate::sim::{child_seed, gibbs_sample};

// ---------------------------------------------------------------------------
// Edge recovery
// ---------------------------------------------------------------------------

/// Confusion counts over the strictly-lower-triangle edge set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeConfusion {
    /// Edges present in both estimate and reference.
    pub true_positive: usize,
    /// Edges present in the estimate only.
    pub false_positive: usize,
    /// Non-edges in both.
    pub true_negative: usize,
    /// Edges present in the reference only.
    pub false_negative: usize,
}

impl EdgeConfusion {
    /// Fraction of reference edges recovered, `None` when the reference has
    /// no edges.
    pub fn sensitivity(&self) -> Option<f64> {
        let denom = self.true_positive + self.false_negative;
        (denom > 0).then(|| self.true_positive as f64 / denom as f64)
    }

    /// Fraction of reference non-edges kept empty, `None` when the reference
    /// graph is complete.
    pub fn specificity(&self) -> Option<f64> {
        let denom = self.true_negative + self.false_positive;
        (denom > 0).then(|| self.true_negative as f64 / denom as f64)
    }
}

/// Compares the off-diagonal supports of an estimate against a reference.
/// A coefficient is an edge when `|value| > zero_tol`.
pub fn edge_confusion(
    estimate: &SymmetricParams,
    reference: &SymmetricParams,
    zero_tol: f64,
) -> Result<EdgeConfusion> {
    if estimate.p() != reference.p() {
        return Err(Error::config(format!(
            "dimension mismatch: estimate has p = {}, reference has p = {}",
            estimate.p(),
            reference.p()
        )));
    }
    if !(zero_tol >= 0.0) {
        return Err(Error::config("zero tolerance must be non-negative"));
    }
    let mut c =
        EdgeConfusion { true_positive: 0, false_positive: 0, true_negative: 0, false_negative: 0 };
    for j in 0..estimate.p() {
        for k in 0..j {
            let est = estimate.get(j, k).abs() > zero_tol;
            let tru = reference.get(j, k).abs() > zero_tol;
            match (est, tru) {
                (true, true) => c.true_positive += 1,
                (true, false) => c.false_positive += 1,
                (false, false) => c.true_negative += 1,
                (false, true) => c.false_negative += 1,
            }
        }
    }
    Ok(c)
}

/// Relative parameter error `||estimate - reference||_F / ||reference||_F`
/// over the parameter triangle (diagonal included). Errors when the
/// reference is identically zero.
pub fn relative_error(estimate: &SymmetricParams, reference: &SymmetricParams) -> Result<f64> {
    if estimate.p() != reference.p() {
        return Err(Error::config(format!(
            "dimension mismatch: estimate has p = {}, reference has p = {}",
            estimate.p(),
            reference.p()
        )));
    }
    let denom = reference.frobenius_triangle();
    if denom == 0.0 {
        return Err(Error::config("relative error is undefined against a zero reference"));
    }
    let mut sq = 0.0f64;
    for (a, b) in estimate.as_slice().iter().zip(reference.as_slice()) {
        let d = a - b;
        sq += d * d;
    }
    Ok(sq.sqrt() / denom)
}

// ---------------------------------------------------------------------------
// Change-point error summaries
// ---------------------------------------------------------------------------

/// Location error summary over repeated estimates of the same change point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangepointStats {
    /// Mean estimate.
    pub mean: f64,
    /// Root mean squared error against the reference change point.
    pub rmse: f64,
    /// Coefficient of variation of the estimates (population standard
    /// deviation over mean; zero for a single estimate).
    pub cv: f64,
}

/// Summarises repeated change-point estimates against the true location.
pub fn changepoint_stats(estimates: &[usize], tau_star: usize) -> Result<ChangepointStats> {
    if estimates.is_empty() {
        return Err(Error::config("no change-point estimates to summarise"));
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().map(|&t| t as f64).sum::<f64>() / n;
    let mse = estimates
        .iter()
        .map(|&t| {
            let d = t as f64 - tau_star as f64;
            d * d
        })
        .sum::<f64>()
        / n;
    let var = estimates
        .iter()
        .map(|&t| {
            let d = t as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    let cv = if mean == 0.0 { 0.0 } else { var.sqrt() / mean };
    Ok(ChangepointStats { mean, rmse: mse.sqrt(), cv })
}

// ---------------------------------------------------------------------------
// Descriptive network statistics
// ---------------------------------------------------------------------------

/// Node-level averages over one group of nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    /// Group label.
    pub group: String,
    /// Number of member nodes.
    pub n_members: usize,
    /// Mean degree of the members.
    pub mean_degree: f64,
    /// Mean eigenvector centrality of the members (unit L2 norm overall).
    pub mean_centrality: f64,
    /// Mean local clustering coefficient of the members.
    pub mean_clustering: f64,
}

/// Descriptive statistics of an estimated network, aggregated by node group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    /// Number of edges in the binarized graph.
    pub n_edges: usize,
    /// Per-group averages, in the label order of [`GroupLabels::groups`].
    pub groups: Vec<GroupStats>,
}

fn adjacency(theta: &SymmetricParams, zero_tol: f64) -> Vec<Vec<usize>> {
    let p = theta.p();
    let mut adj = vec![Vec::new(); p];
    for j in 0..p {
        for k in 0..j {
            if theta.get(j, k).abs() > zero_tol {
                adj[j].push(k);
                adj[k].push(j);
            }
        }
    }
    adj
}

/// Eigenvector centrality by power iteration on the unit-shifted adjacency
/// (same dominant eigenvector, no sign oscillation). All zeros for an empty
/// graph; L2-normalized otherwise.
fn eigenvector_centrality(adj: &[Vec<usize>]) -> Result<Vec<f64>> {
    let p = adj.len();
    if adj.iter().all(|nbrs| nbrs.is_empty()) {
        return Ok(vec![0.0; p]);
    }
    let mut v = vec![1.0 / (p as f64).sqrt(); p];
    let mut next = vec![0.0f64; p];
    for _ in 0..10_000 {
        for j in 0..p {
            // (A + I) v
            next[j] = v[j] + adj[j].iter().map(|&k| v[k]).sum::<f64>();
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::numerical("power iteration collapsed to the zero vector"));
        }
        let mut delta = 0.0f64;
        for j in 0..p {
            next[j] /= norm;
            delta = delta.max((next[j] - v[j]).abs());
        }
        std::mem::swap(&mut v, &mut next);
        if delta <= 1e-10 {
            return Ok(v);
        }
    }
    Err(Error::numerical("eigenvector centrality did not converge in 10000 iterations"))
}

fn local_clustering(adj: &[Vec<usize>], j: usize) -> f64 {
    let nbrs = &adj[j];
    let deg = nbrs.len();
    if deg < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if adj[a].contains(&b) {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (deg as f64 * (deg as f64 - 1.0))
}

/// Computes degree, eigenvector centrality, and local clustering on the
/// binarized graph (`|value| > zero_tol`), averaged over each node group.
pub fn network_stats(
    theta: &SymmetricParams,
    labels: &GroupLabels,
    zero_tol: f64,
) -> Result<NetworkStats> {
    if labels.len() != theta.p() {
        return Err(Error::config(format!(
            "group labels cover {} nodes but the parameters have p = {}",
            labels.len(),
            theta.p()
        )));
    }
    let adj = adjacency(theta, zero_tol);
    let n_edges = adj.iter().map(|nbrs| nbrs.len()).sum::<usize>() / 2;
    let centrality = eigenvector_centrality(&adj)?;
    let mut groups = Vec::new();
    for group in labels.groups() {
        let members = labels.members(group);
        let n = members.len() as f64;
        let mean_degree = members.iter().map(|&j| adj[j].len() as f64).sum::<f64>() / n;
        let mean_centrality = members.iter().map(|&j| centrality[j]).sum::<f64>() / n;
        let mean_clustering =
            members.iter().map(|&j| local_clustering(&adj, j)).sum::<f64>() / n;
        groups.push(GroupStats {
            group: group.to_string(),
            n_members: members.len(),
            mean_degree,
            mean_centrality,
            mean_clustering,
        });
    }
    Ok(NetworkStats { n_edges, groups })
}

// ---------------------------------------------------------------------------
// Edge sign proportions
// ---------------------------------------------------------------------------

/// Proportions of edges by placement (within a group / between groups) and
/// coefficient sign, out of all edges in the graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignProportions {
    /// Total number of edges.
    pub total_edges: usize,
    /// Positive edges joining two nodes of the same group.
    pub within_positive: f64,
    /// Negative edges joining two nodes of the same group.
    pub within_negative: f64,
    /// Positive edges joining nodes of different groups.
    pub between_positive: f64,
    /// Negative edges joining nodes of different groups.
    pub between_negative: f64,
    /// True when the graph has no edges at all (all proportions are zero).
    pub no_edges: bool,
}

/// Classifies every edge by placement and sign and reports the proportions.
pub fn edge_sign_proportions(
    theta: &SymmetricParams,
    labels: &GroupLabels,
    zero_tol: f64,
) -> Result<SignProportions> {
    if labels.len() != theta.p() {
        return Err(Error::config(format!(
            "group labels cover {} nodes but the parameters have p = {}",
            labels.len(),
            theta.p()
        )));
    }
    let mut counts = [0usize; 4]; // wp, wn, bp, bn
    for j in 0..theta.p() {
        for k in 0..j {
            let v = theta.get(j, k);
            if v.abs() <= zero_tol {
                continue;
            }
            let within = labels.label(j) == labels.label(k);
            let idx = match (within, v > 0.0) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
            counts[idx] += 1;
        }
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Ok(SignProportions {
            total_edges: 0,
            within_positive: 0.0,
            within_negative: 0.0,
            between_positive: 0.0,
            between_negative: 0.0,
            no_edges: true,
        });
    }
    let frac = |c: usize| c as f64 / total as f64;
    Ok(SignProportions {
        total_edges: total,
        within_positive: frac(counts[0]),
        within_negative: frac(counts[1]),
        between_positive: frac(counts[2]),
        between_negative: frac(counts[3]),
        no_edges: false,
    })
}

// ---------------------------------------------------------------------------
// Separation between the segment distributions
// ---------------------------------------------------------------------------

/// The pseudo-divergence separating two parameter sets: the smaller of the
/// two directed expected self-information gaps
/// `E_theta1[phi(theta2, X) - phi(theta1, X)]` and vice versa. Non-negative,
/// and zero exactly when both parameter sets induce the same conditionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    /// Estimated separation (the smaller directed gap).
    pub kappa: f64,
    /// Monte Carlo standard error of the reported gap.
    pub std_error: f64,
    /// Directed gap sampled under the first parameter set.
    pub gap_under_first: f64,
    /// Directed gap sampled under the second parameter set.
    pub gap_under_second: f64,
}

/// Exact separation by state enumeration; feasible for small models only
/// (the state space is capped like exact sampling).
pub fn kappa_exact(
    spec: &ModelSpec,
    theta1: &SymmetricParams,
    theta2: &SymmetricParams,
) -> Result<f64> {
    if theta1.p() != theta2.p() {
        return Err(Error::config("both parameter sets must have the same dimension"));
    }
    let p = theta1.p();
    let dist1 = crate::sim::exact_distribution(spec, theta1)?;
    let dist2 = crate::sim::exact_distribution(spec, theta2)?;
    let mut gap1 = KahanSum::default();
    let mut gap2 = KahanSum::default();
    for (idx, (&w1, &w2)) in dist1.iter().zip(dist2.iter()).enumerate() {
        let x = crate::sim::index_to_state(idx, p, spec.alphabet_size());
        let h = phi(spec, theta2, &x)? - phi(spec, theta1, &x)?;
        gap1.add(w1 * h);
        gap2.add(-w2 * h);
    }
    Ok(gap1.value().min(gap2.value()))
}

/// Monte Carlo estimate of the separation from two Gibbs chains of
/// `n_samples` draws each (child streams 0 and 1 of `seed`).
pub fn estimate_kappa_mc(
    spec: &ModelSpec,
    theta1: &SymmetricParams,
    theta2: &SymmetricParams,
    n_samples: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<KappaEstimate> {
    if theta1.p() != theta2.p() {
        return Err(Error::config("both parameter sets must have the same dimension"));
    }
    if n_samples < 2 {
        return Err(Error::config("need at least two samples for a standard error"));
    }
    let mean_gap = |from: &SymmetricParams,
                    to: &SymmetricParams,
                    stream: u64|
     -> Result<(f64, f64)> {
        let draws = gibbs_sample(spec, from, n_samples, burn_in, thin, child_seed(seed, stream))?;
        let mut sum = KahanSum::default();
        let mut sumsq = KahanSum::default();
        for t in 0..draws.n_rows() {
            let x = draws.row(t);
            let h = phi(spec, to, x)? - phi(spec, from, x)?;
            sum.add(h);
            sumsq.add(h * h);
        }
        let n = n_samples as f64;
        let mean = sum.value() / n;
        let var = (sumsq.value() / n - mean * mean).max(0.0) * n / (n - 1.0);
        Ok((mean, (var / n).sqrt()))
    };
    let (gap1, se1) = mean_gap(theta1, theta2, 0)?;
    let (gap2, se2) = mean_gap(theta2, theta1, 1)?;
    let (kappa, std_error) = if gap1 <= gap2 { (gap1, se1) } else { (gap2, se2) };
    Ok(KappaEstimate { kappa, std_error, gap_under_first: gap1, gap_under_second: gap2 })
}

/// Convenience: the separation of a generated scenario pair, from data-sized
/// chains. Used by reporting code; thin wrapper over [`estimate_kappa_mc`].
pub fn scenario_kappa(
    spec: &ModelSpec,
    theta1: &SymmetricParams,
    theta2: &SymmetricParams,
    seed: u64,
) -> Result<KappaEstimate> {
    estimate_kappa_mc(spec, theta1, theta2, 20_000, 1000, 2, seed)
}
