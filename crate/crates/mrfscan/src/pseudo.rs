//! Negative log-pseudo-likelihood of the random field: node conditionals,
//! the per-observation loss `phi`, its exact gradient, and segment sums.
//!
//! The joint density's normalising constant is intractable, but each node's
//! conditional distribution given the rest is a finite softmax: node `j`
//! assigns symbol `u` the logit
//!
//! ```text
//! L_j(u) = theta[j][j] * b0(u) + sum_{k != j} theta[j][k] * b(u, x_k)
//! ```
//!
//! The per-observation loss is `phi(theta, x) = -sum_j log softmax_j(x_j)`,
//! a convex function of `theta` whose gradient involves only conditional
//! expectations over single symbols — everything here is exact summation
//! over the alphabet, no sampling and no partition function.
//!
//! Gradient shape (one observation): the derivative in a diagonal entry is
//! `-b0(x_j) + E[b0(X_j) | x_-j]`; in an off-diagonal entry `(j, k)` it is
//! `-2 b(x_j, x_k) + E[b(X_j, x_k) | x_-j] + E[b(x_j, X_k) | x_-k]` — the
//! factor 2 because one stored parameter feeds both node-`j`'s and
//! node-`k`'s conditional.
//!
//! Segment sums use compensated (Kahan) accumulation so that the value of a
//! segment does not depend on the order its rows are visited in beyond a
//! rounding error of a few ulps — the scan relies on this when comparing a
//! series against its time reversal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{triangle_index, Dataset, ModelSpec, SymmetricParams, TimeRange};

// ---------------------------------------------------------------------------
// Compensated summation
// ---------------------------------------------------------------------------

/// Kahan–Babuska compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

// ---------------------------------------------------------------------------
// Workspace
// ---------------------------------------------------------------------------

/// Reusable buffers for the hot loops; one per thread.
#[derive(Debug, Default, Clone)]
pub(crate) struct Workspace {
    /// Logits of one node, length `m`.
    logits: Vec<f64>,
    /// Conditional probabilities of every node, row-major `p x m`.
    cond: Vec<f64>,
    /// `epair[j * m + v] = E[b(X_j, v) | x_-j]`, row-major `p x m`.
    epair: Vec<f64>,
}

impl Workspace {
    pub(crate) fn for_problem(p: usize, m: usize) -> Self {
        Workspace {
            logits: vec![0.0; m],
            cond: vec![0.0; p * m],
            epair: vec![0.0; p * m],
        }
    }

    fn ensure(&mut self, p: usize, m: usize) {
        if self.logits.len() != m || self.cond.len() != p * m {
            *self = Workspace::for_problem(p, m);
        }
    }
}

// ---------------------------------------------------------------------------
// Single-observation computations
// ---------------------------------------------------------------------------

/// Fills `logits[u] = L_j(u)` for node `j` at observation `x`.
///
/// `tri` is the triangle storage of the parameter matrix. Zero interaction
/// weights are skipped, which makes iterates of the L1 solver (mostly
/// sparse) much cheaper.
#[inline]
pub(crate) fn fill_node_logits(
    spec: &ModelSpec,
    tri: &[f64],
    x: &[u8],
    j: usize,
    logits: &mut [f64],
) {
    let m = spec.alphabet_size();
    let p = x.len();
    let b0 = spec.b0_table();
    let b = spec.b_table();
    let row = triangle_index(j, 0);
    let tjj = tri[row + j];
    for (u, l) in logits.iter_mut().enumerate() {
        *l = tjj * b0[u];
    }
    for (k, &w) in tri[row..row + j].iter().enumerate() {
        if w != 0.0 {
            let col = x[k] as usize;
            for (u, l) in logits.iter_mut().enumerate() {
                *l += w * b[u * m + col];
            }
        }
    }
    for k in (j + 1)..p {
        let w = tri[triangle_index(k, j)];
        if w != 0.0 {
            let col = x[k] as usize;
            for (u, l) in logits.iter_mut().enumerate() {
                *l += w * b[u * m + col];
            }
        }
    }
}

/// Log-sum-exp with max subtraction; returns `(max, lse)`.
#[inline]
pub(crate) fn log_sum_exp(logits: &[f64]) -> (f64, f64) {
    let mut max = f64::NEG_INFINITY;
    for &l in logits {
        if l > max {
            max = l;
        }
    }
    let mut s = 0.0;
    for &l in logits {
        s += (l - max).exp();
    }
    (max, max + s.ln())
}

/// Conditional distribution of node `j`'s symbol given the rest of `x`.
///
/// Returns one probability per alphabet symbol. Errors on a bad node index,
/// mismatched dimensions, symbols outside the alphabet, or non-finite logits.
pub fn node_conditional(
    spec: &ModelSpec,
    theta: &SymmetricParams,
    x: &[u8],
    j: usize,
) -> Result<Vec<f64>> {
    validate_observation(spec, theta, x)?;
    if j >= x.len() {
        return Err(Error::config(format!(
            "node index {j} out of range for p = {}",
            x.len()
        )));
    }
    let m = spec.alphabet_size();
    let mut logits = vec![0.0; m];
    fill_node_logits(spec, theta.as_slice(), x, j, &mut logits);
    if logits.iter().any(|l| !l.is_finite()) {
        return Err(Error::numerical(format!("non-finite logit at node {j}")));
    }
    let (_, lse) = log_sum_exp(&logits);
    Ok(logits.iter().map(|&l| (l - lse).exp()).collect())
}

/// Negative log-pseudo-likelihood of one observation:
/// `-sum_j log P(x_j | x_-j)`.
pub fn phi(spec: &ModelSpec, theta: &SymmetricParams, x: &[u8]) -> Result<f64> {
    validate_observation(spec, theta, x)?;
    let mut ws = Workspace::for_problem(x.len(), spec.alphabet_size());
    let value = row_phi(spec, theta.as_slice(), x, &mut ws);
    if !value.is_finite() {
        return Err(Error::numerical("non-finite pseudo-likelihood value"));
    }
    Ok(value)
}

/// Gradient of [`phi`] in the stored triangle parameters of one observation.
pub fn phi_gradient(
    spec: &ModelSpec,
    theta: &SymmetricParams,
    x: &[u8],
) -> Result<SymmetricParams> {
    validate_observation(spec, theta, x)?;
    let p = x.len();
    let mut ws = Workspace::for_problem(p, spec.alphabet_size());
    let mut grad = SymmetricParams::zeros(p);
    let value = row_phi_grad(spec, theta.as_slice(), x, grad.as_mut_slice(), &mut ws);
    if !value.is_finite() || !grad.is_finite() {
        return Err(Error::numerical("non-finite pseudo-likelihood gradient"));
    }
    Ok(grad)
}

fn validate_observation(spec: &ModelSpec, theta: &SymmetricParams, x: &[u8]) -> Result<()> {
    if theta.p() != x.len() {
        return Err(Error::config(format!(
            "parameter matrix is {} x {} but the observation has {} nodes",
            theta.p(),
            theta.p(),
            x.len()
        )));
    }
    let m = spec.alphabet_size() as u8;
    if let Some(&bad) = x.iter().find(|&&v| v >= m) {
        return Err(Error::data(format!(
            "symbol index {bad} outside alphabet of size {m}"
        )));
    }
    Ok(())
}

/// `phi` of one row; no validation, buffers reused.
pub(crate) fn row_phi(spec: &ModelSpec, tri: &[f64], x: &[u8], ws: &mut Workspace) -> f64 {
    let p = x.len();
    let m = spec.alphabet_size();
    ws.ensure(p, m);
    let mut total = 0.0;
    for j in 0..p {
        fill_node_logits(spec, tri, x, j, &mut ws.logits);
        let (_, lse) = log_sum_exp(&ws.logits);
        total += lse - ws.logits[x[j] as usize];
    }
    total
}

/// `phi` of one row plus its gradient accumulated into `grad` (triangle
/// layout, `+=` semantics). Returns the row's `phi` value.
pub(crate) fn row_phi_grad(
    spec: &ModelSpec,
    tri: &[f64],
    x: &[u8],
    grad: &mut [f64],
    ws: &mut Workspace,
) -> f64 {
    let p = x.len();
    let m = spec.alphabet_size();
    ws.ensure(p, m);
    let b0 = spec.b0_table();
    let b = spec.b_table();

    // Pass 1: conditionals of every node, phi value, pairwise expectations.
    let mut total = 0.0;
    for j in 0..p {
        fill_node_logits(spec, tri, x, j, &mut ws.logits);
        let (max, lse) = log_sum_exp(&ws.logits);
        total += lse - ws.logits[x[j] as usize];
        let denom_log = lse - max;
        let cond = &mut ws.cond[j * m..(j + 1) * m];
        for (u, c) in cond.iter_mut().enumerate() {
            *c = (ws.logits[u] - max - denom_log).exp();
        }
        // epair[j][v] = sum_u cond[u] * b(u, v)
        let epair = &mut ws.epair[j * m..(j + 1) * m];
        for (v, e) in epair.iter_mut().enumerate() {
            let mut s = 0.0;
            for (u, c) in cond.iter().enumerate() {
                s += c * b[u * m + v];
            }
            *e = s;
        }
    }

    // Pass 2: fill the gradient triangle.
    for j in 0..p {
        let xj = x[j] as usize;
        let row = triangle_index(j, 0);
        let cond = &ws.cond[j * m..(j + 1) * m];
        let mut eb0 = 0.0;
        for (u, c) in cond.iter().enumerate() {
            eb0 += c * b0[u];
        }
        grad[row + j] += eb0 - b0[xj];
        for k in 0..j {
            let xk = x[k] as usize;
            grad[row + k] +=
                ws.epair[j * m + xk] + ws.epair[k * m + xj] - 2.0 * b[xj * m + xk];
        }
    }
    total
}

// ---------------------------------------------------------------------------
// Segment sums
// ---------------------------------------------------------------------------

/// Value of a scaled segment objective:
/// `(1 / scale_t) * sum over the window of phi(theta, x_t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentObjective {
    /// The scaled sum.
    pub value: f64,
    /// The window it was computed over.
    pub range: TimeRange,
    /// The divisor applied to the raw sum.
    pub scale_t: f64,
}

/// Computes the scaled segment objective over `range`.
///
/// Errors if the range exceeds the dataset, dimensions mismatch,
/// `scale_t <= 0`, or the sum is non-finite.
pub fn segment_objective(
    spec: &ModelSpec,
    theta: &SymmetricParams,
    data: &Dataset,
    range: TimeRange,
    scale_t: f64,
) -> Result<SegmentObjective> {
    range.check_within(data.n_rows())?;
    if theta.p() != data.p() {
        return Err(Error::config(format!(
            "parameter matrix is {} x {} but the dataset has {} nodes",
            theta.p(),
            theta.p(),
            data.p()
        )));
    }
    if !(scale_t > 0.0) {
        return Err(Error::config(format!("scale_t must be positive, got {scale_t}")));
    }
    data.validate_for(spec)?;
    let mut ws = Workspace::for_problem(data.p(), spec.alphabet_size());
    let raw = segment_phi_sum(spec, theta.as_slice(), data, range, &mut ws);
    let value = raw / scale_t;
    if !value.is_finite() {
        return Err(Error::numerical(format!(
            "segment objective over {range} is not finite"
        )));
    }
    Ok(SegmentObjective { value, range, scale_t })
}

/// Unscaled `sum of phi` over a window; compensated summation.
pub(crate) fn segment_phi_sum(
    spec: &ModelSpec,
    tri: &[f64],
    data: &Dataset,
    range: TimeRange,
    ws: &mut Workspace,
) -> f64 {
    let mut acc = KahanSum::default();
    for t0 in range.rows() {
        acc.add(row_phi(spec, tri, data.row(t0), ws));
    }
    acc.value()
}

/// Unscaled `sum of phi` plus its gradient over a window.
///
/// `grad` must be zeroed by the caller (accumulates with `+=`); it receives
/// the *unscaled* gradient sum. Returns the unscaled value sum.
pub(crate) fn segment_phi_grad_sum(
    spec: &ModelSpec,
    tri: &[f64],
    data: &Dataset,
    range: TimeRange,
    grad: &mut [f64],
    ws: &mut Workspace,
) -> f64 {
    let mut acc = KahanSum::default();
    for t0 in range.rows() {
        acc.add(row_phi_grad(spec, tri, data.row(t0), grad, ws));
    }
    acc.value()
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
