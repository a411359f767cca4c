//! Synthetic data: exact enumeration of small fields, single-site Gibbs
//! sampling, random interaction networks, and two-segment series generators.
//!
//! The exact joint distribution ([`exact_distribution`]) is only feasible for
//! tiny fields (`m^p` capped at 2^20 states) and exists chiefly as the oracle
//! other components are tested against: the sampler's empirical law must
//! match it in total variation, conditionals must agree with conditioning it,
//! and Monte Carlo divergence estimates must agree with exact expectations.
//!
//! Sampling is a systematic-sweep single-site Gibbs chain: one sweep updates
//! every node once, in index order, each draw taken from the node's exact
//! conditional given the current state. A sample of size `n` takes
//! `burn_in + n * thin` sweeps — the chain records every `thin`-th sweep
//! after discarding the first `burn_in`.
//!
//! Randomness is reproducible and parallel-safe: every operation takes a
//! `u64` seed, and operations that need several independent streams derive
//! child seeds with a counter-based mix ([`child_seed`]), so regenerating any
//! one part of a scenario never consumes another part's randomness.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{default_schema_version, Dataset, ModelSpec, SymmetricParams};
use crate::pseudo::{fill_node_logits, log_sum_exp};

/// Default number of warm-up sweeps discarded before recording.
pub const DEFAULT_BURN_IN: usize = 1000;
/// Default number of sweeps between recorded samples.
pub const DEFAULT_THIN: usize = 5;

/// Largest state-space size `m^p` that [`exact_distribution`] will enumerate.
pub const MAX_EXACT_STATES: usize = 1 << 20;

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

/// Derives the `index`-th child seed of `master` with a SplitMix64-style
/// integer mix. Children are decorrelated, and the derivation is pure: the
/// same `(master, index)` always yields the same child, independent of how
/// many other children exist or in which order they are drawn.
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        ^ index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x243F_6A88_85A3_08D3);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn child_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(master, index))
}

// ---------------------------------------------------------------------------
// Exact enumeration
// ---------------------------------------------------------------------------

/// Index of a state vector in the enumeration order used by
/// [`exact_distribution`]: mixed-radix with node 0 least significant.
pub fn state_index(row: &[u8], m: usize) -> usize {
    let mut idx = 0usize;
    for &v in row.iter().rev() {
        idx = idx * m + v as usize;
    }
    idx
}

/// State vector at enumeration `index` (inverse of [`state_index`]).
pub fn index_to_state(mut index: usize, p: usize, m: usize) -> Vec<u8> {
    let mut row = vec![0u8; p];
    for v in row.iter_mut() {
        *v = (index % m) as u8;
        index /= m;
    }
    row
}

/// The exact joint distribution of the field by full enumeration.
///
/// Returns `m^p` probabilities indexed by [`state_index`]. Log-weights are
/// max-shifted before exponentiation, so heavily weighted fields stay finite.
/// Errors when the state space exceeds [`MAX_EXACT_STATES`].
pub fn exact_distribution(spec: &ModelSpec, theta: &SymmetricParams) -> Result<Vec<f64>> {
    let p = theta.p();
    let m = spec.alphabet_size();
    if p == 0 {
        return Err(Error::config("exact enumeration needs at least one node"));
    }
    let mut n_states: usize = 1;
    for _ in 0..p {
        n_states = n_states
            .checked_mul(m)
            .filter(|&n| n <= MAX_EXACT_STATES)
            .ok_or_else(|| {
                Error::config(format!(
                    "state space {m}^{p} exceeds the enumeration cap of {MAX_EXACT_STATES}"
                ))
            })?;
    }
    if !theta.is_finite() {
        return Err(Error::numerical("parameter matrix contains non-finite entries"));
    }

    let mut log_w = vec![0.0f64; n_states];
    let mut state = vec![0u8; p];
    for (idx, lw) in log_w.iter_mut().enumerate() {
        let mut rem = idx;
        for s in state.iter_mut() {
            *s = (rem % m) as u8;
            rem /= m;
        }
        let mut e = 0.0;
        for j in 0..p {
            let xj = state[j] as usize;
            e += theta.get(j, j) * spec.b0(xj);
            for k in 0..j {
                e += theta.get(j, k) * spec.b(xj, state[k] as usize);
            }
        }
        *lw = e;
    }
    let max = log_w.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut total = 0.0;
    for lw in log_w.iter_mut() {
        *lw = (*lw - max).exp();
        total += *lw;
    }
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::numerical("exact distribution failed to normalise"));
    }
    for lw in log_w.iter_mut() {
        *lw /= total;
    }
    Ok(log_w)
}

// ---------------------------------------------------------------------------
// Gibbs sampling
// ---------------------------------------------------------------------------

/// Draws `n` observations from the field by systematic-sweep Gibbs sampling.
///
/// The chain starts from a uniformly random state, discards `burn_in`
/// sweeps, then records the state after every `thin`-th sweep until `n`
/// rows are collected. One sweep resamples every node once, in index order,
/// from its exact conditional. The same `(theta, n, burn_in, thin, seed)`
/// always produces the same dataset.
pub fn gibbs_sample(
    spec: &ModelSpec,
    theta: &SymmetricParams,
    n: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::config("sample size must be at least 1"));
    }
    if thin == 0 {
        return Err(Error::config("thinning interval must be at least 1"));
    }
    let p = theta.p();
    if p == 0 {
        return Err(Error::config("cannot sample a field with zero nodes"));
    }
    if !theta.is_finite() {
        return Err(Error::numerical("parameter matrix contains non-finite entries"));
    }
    let m = spec.alphabet_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut state: Vec<u8> = (0..p).map(|_| rng.random_range(0..m) as u8).collect();
    let mut logits = vec![0.0f64; m];
    let mut values = Vec::with_capacity(n * p);

    let mut sweep = |state: &mut Vec<u8>, rng: &mut ChaCha8Rng| {
        for j in 0..p {
            fill_node_logits(spec, theta.as_slice(), state, j, &mut logits);
            let (max, lse) = log_sum_exp(&logits);
            let denom_log = lse - max;
            let u: f64 = rng.random();
            let mut cum = 0.0;
            let mut drawn = m - 1;
            for (sym, &l) in logits.iter().enumerate() {
                cum += (l - max - denom_log).exp();
                if u < cum {
                    drawn = sym;
                    break;
                }
            }
            state[j] = drawn as u8;
        }
    };

    for _ in 0..burn_in {
        sweep(&mut state, &mut rng);
    }
    for _ in 0..n {
        for _ in 0..thin {
            sweep(&mut state, &mut rng);
        }
        values.extend_from_slice(&state);
    }
    Dataset::from_flat(p, values)
}

// ---------------------------------------------------------------------------
// Random networks
// ---------------------------------------------------------------------------

/// Draws a random sparse interaction matrix: `ceil(density * p (p-1) / 2)`
/// off-diagonal edges at uniformly random positions, each weight a fair-coin
/// sign times a magnitude uniform on `[0.5, 1]`. The diagonal is zero.
pub fn random_network(p: usize, density: f64, seed: u64) -> Result<SymmetricParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = draw_edge_set(p, density, &mut rng)?;
    let mut theta = SymmetricParams::zeros(p);
    for (j, k) in edges {
        theta.set(j, k, random_weight(&mut rng));
    }
    Ok(theta)
}

fn random_weight(rng: &mut impl Rng) -> f64 {
    let magnitude = rng.random_range(0.5..=1.0);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// Chooses `ceil(density * p (p-1) / 2)` distinct off-diagonal positions.
fn draw_edge_set(p: usize, density: f64, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    if p < 2 {
        return Err(Error::config("a network needs at least two nodes"));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::config(format!(
            "edge density must lie in (0, 1], got {density}"
        )));
    }
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(p * (p - 1) / 2);
    for j in 1..p {
        for k in 0..j {
            pairs.push((j, k));
        }
    }
    let n_edges = (density * pairs.len() as f64).ceil() as usize;
    if n_edges == 0 {
        return Err(Error::config("edge density yields zero edges"));
    }
    let n_edges = n_edges.min(pairs.len());
    // Partial Fisher-Yates: the first n_edges slots end up a uniform sample.
    for i in 0..n_edges {
        let j = rng.random_range(i..pairs.len());
        pairs.swap(i, j);
    }
    pairs.truncate(n_edges);
    Ok(pairs)
}

/// Draws a pre/post parameter pair with a controlled overlap.
///
/// The pre-change matrix is a [`random_network`] draw. The post-change matrix
/// keeps exactly `ceil(similarity * n_edges)` of its edges (same position,
/// same value) and redraws the rest: with `redraw_positions` the remaining
/// edges move to fresh positions (drawn outside the kept set, so the edge
/// count — and hence the density — is preserved); without it they stay in
/// place and only their values are redrawn. At `similarity = 1` the two
/// matrices are identical; at `similarity = 0` they share no equal entry.
pub fn similarity_pair(
    p: usize,
    density: f64,
    similarity: f64,
    redraw_positions: bool,
    seed: u64,
) -> Result<(SymmetricParams, SymmetricParams)> {
    if !(0.0..=1.0).contains(&similarity) {
        return Err(Error::config(format!(
            "similarity must lie in [0, 1], got {similarity}"
        )));
    }
    let mut rng_pre = child_rng(seed, 0);
    let mut edges = draw_edge_set(p, density, &mut rng_pre)?;
    let mut theta_pre = SymmetricParams::zeros(p);
    for &(j, k) in &edges {
        theta_pre.set(j, k, random_weight(&mut rng_pre));
    }

    let n_edges = edges.len();
    let n_shared = (similarity * n_edges as f64).ceil() as usize;
    let n_shared = n_shared.min(n_edges);

    let mut rng_post = child_rng(seed, 1);
    // Uniform choice of which edges are kept.
    for i in 0..n_shared {
        let j = rng_post.random_range(i..edges.len());
        edges.swap(i, j);
    }
    let mut theta_post = SymmetricParams::zeros(p);
    for &(j, k) in &edges[..n_shared] {
        theta_post.set(j, k, theta_pre.get(j, k));
    }

    if redraw_positions {
        let kept: std::collections::BTreeSet<(usize, usize)> =
            edges[..n_shared].iter().copied().collect();
        let mut pool: Vec<(usize, usize)> = Vec::new();
        for j in 1..p {
            for k in 0..j {
                if !kept.contains(&(j, k)) {
                    pool.push((j, k));
                }
            }
        }
        let n_new = n_edges - n_shared;
        for i in 0..n_new {
            let j = rng_post.random_range(i..pool.len());
            pool.swap(i, j);
        }
        for &(j, k) in &pool[..n_new] {
            theta_post.set(j, k, random_weight(&mut rng_post));
        }
    } else {
        for &(j, k) in &edges[n_shared..] {
            theta_post.set(j, k, random_weight(&mut rng_post));
        }
    }
    Ok((theta_pre, theta_post))
}

/// Edge counts of one community layout: edges inside each block and between
/// the blocks, with a fixed sign per block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityBlocks {
    /// Positive-weight edges inside the first block.
    pub within_first: usize,
    /// Positive-weight edges inside the second block.
    pub within_second: usize,
    /// Negative-weight edges between the blocks.
    pub between: usize,
}

impl CommunityBlocks {
    /// Default pre-change layout of the two-bloc polarisation scenario:
    /// cohesive blocks (50 and 63 internal edges) and weak antagonism
    /// (10 cross edges).
    pub const PRE_DEFAULT: CommunityBlocks =
        CommunityBlocks { within_first: 50, within_second: 63, between: 10 };

    /// Default post-change layout: the second block loses internal cohesion
    /// (21 edges) while antagonism between the blocks jumps to 50 edges.
    pub const POST_DEFAULT: CommunityBlocks =
        CommunityBlocks { within_first: 52, within_second: 21, between: 50 };
}

/// Draws a pre/post pair with two-community block structure.
///
/// Nodes `0..sizes.0` form the first community and the rest the second.
/// Within-community edges get positive weights, between-community edges
/// negative ones; positions are uniform within each block and weights have
/// magnitude uniform on `[0.5, 1]`. Errors if a requested count exceeds the
/// block's capacity.
pub fn community_pair(
    sizes: (usize, usize),
    pre: CommunityBlocks,
    post: CommunityBlocks,
    seed: u64,
) -> Result<(SymmetricParams, SymmetricParams)> {
    let theta_pre = community_network(sizes, pre, child_rng(seed, 0))?;
    let theta_post = community_network(sizes, post, child_rng(seed, 1))?;
    Ok((theta_pre, theta_post))
}

fn community_network(
    sizes: (usize, usize),
    blocks: CommunityBlocks,
    mut rng: ChaCha8Rng,
) -> Result<SymmetricParams> {
    let (n1, n2) = sizes;
    if n1 < 1 || n2 < 1 {
        return Err(Error::config("both communities need at least one node"));
    }
    let p = n1 + n2;
    let mut theta = SymmetricParams::zeros(p);

    let mut within_first: Vec<(usize, usize)> = Vec::new();
    for j in 1..n1 {
        for k in 0..j {
            within_first.push((j, k));
        }
    }
    let mut within_second: Vec<(usize, usize)> = Vec::new();
    for j in (n1 + 1)..p {
        for k in n1..j {
            within_second.push((j, k));
        }
    }
    let mut between: Vec<(usize, usize)> = Vec::new();
    for j in n1..p {
        for k in 0..n1 {
            between.push((j, k));
        }
    }

    let place = |pool: &mut Vec<(usize, usize)>,
                     count: usize,
                     positive: bool,
                     what: &str,
                     theta: &mut SymmetricParams,
                     rng: &mut ChaCha8Rng|
     -> Result<()> {
        if count > pool.len() {
            return Err(Error::config(format!(
                "{what} asks for {count} edges but the block only has {} slots",
                pool.len()
            )));
        }
        for i in 0..count {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        for &(j, k) in &pool[..count] {
            let magnitude = rng.random_range(0.5..=1.0);
            theta.set(j, k, if positive { magnitude } else { -magnitude });
        }
        Ok(())
    };

    place(&mut within_first, blocks.within_first, true, "within-first", &mut theta, &mut rng)?;
    place(&mut within_second, blocks.within_second, true, "within-second", &mut theta, &mut rng)?;
    place(&mut between, blocks.between, false, "between", &mut theta, &mut rng)?;
    Ok(theta)
}

// ---------------------------------------------------------------------------
// Scenario manifests and series generation
// ---------------------------------------------------------------------------

/// How the pre/post parameter pair of a scenario is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// Random network pre, partially shared network post.
    Similarity {
        /// Number of nodes.
        p: usize,
        /// Off-diagonal edge density of both matrices.
        density: f64,
        /// Fraction of pre-change edges kept identically in the post matrix.
        similarity: f64,
        /// Whether non-shared post edges move to fresh positions.
        redraw_positions: bool,
    },
    /// Two-community block layouts pre and post.
    Community {
        /// Community sizes (first, second).
        sizes: (usize, usize),
        /// Pre-change block edge counts.
        pre: CommunityBlocks,
        /// Post-change block edge counts.
        post: CommunityBlocks,
    },
}

impl Scenario {
    /// Number of nodes the scenario generates.
    pub fn p(&self) -> usize {
        match self {
            Scenario::Similarity { p, .. } => *p,
            Scenario::Community { sizes, .. } => sizes.0 + sizes.1,
        }
    }

    /// Draws the pre/post parameter pair of this scenario.
    pub fn draw_pair(&self, seed: u64) -> Result<(SymmetricParams, SymmetricParams)> {
        match *self {
            Scenario::Similarity { p, density, similarity, redraw_positions } => {
                similarity_pair(p, density, similarity, redraw_positions, seed)
            }
            Scenario::Community { sizes, pre, post } => community_pair(sizes, pre, post, seed),
        }
    }
}

/// A full synthetic-series recipe: scenario, split point, sampler settings.
/// This is the scenario manifest the CLI writes next to generated data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// File format version.
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Interaction model; the CLI always generates the binary product model.
    pub model: String,
    /// How the parameter pair is drawn.
    #[serde(flatten)]
    pub scenario: Scenario,
    /// Series length `T`.
    pub t_len: usize,
    /// True change point: rows `1..=tau_star` follow the pre-change matrix.
    pub tau_star: usize,
    /// Master seed; parameters and both chain segments derive children of it.
    pub seed: u64,
    /// Warm-up sweeps per chain.
    pub burn_in: usize,
    /// Sweeps between recorded rows.
    pub thin: usize,
}

/// A generated series together with its ground truth.
#[derive(Debug, Clone)]
pub struct GeneratedSeries {
    /// The sampled observations, `tau_star` pre-change rows then the rest.
    pub data: Dataset,
    /// True pre-change parameters.
    pub theta_pre: SymmetricParams,
    /// True post-change parameters.
    pub theta_post: SymmetricParams,
}

/// Draws the scenario's parameter pair and samples the two-segment series.
///
/// The two segments come from independent Gibbs chains (child seeds 2 and 3
/// of the manifest seed; the parameter draw uses children 0 and 1), each with
/// the manifest's burn-in and thinning.
pub fn generate_series(spec: &ModelSpec, scenario: &ScenarioSpec) -> Result<GeneratedSeries> {
    if scenario.tau_star < 1 || scenario.tau_star >= scenario.t_len {
        return Err(Error::config(format!(
            "change point {} must lie in [1, {})",
            scenario.tau_star, scenario.t_len
        )));
    }
    let (theta_pre, theta_post) = scenario.scenario.draw_pair(scenario.seed)?;
    let pre = gibbs_sample(
        spec,
        &theta_pre,
        scenario.tau_star,
        scenario.burn_in,
        scenario.thin,
        child_seed(scenario.seed, 2),
    )?;
    let post = gibbs_sample(
        spec,
        &theta_post,
        scenario.t_len - scenario.tau_star,
        scenario.burn_in,
        scenario.thin,
        child_seed(scenario.seed, 3),
    )?;
    let p = theta_pre.p();
    let mut values = Vec::with_capacity(scenario.t_len * p);
    for t0 in 0..pre.n_rows() {
        values.extend_from_slice(pre.row(t0));
    }
    for t0 in 0..post.n_rows() {
        values.extend_from_slice(post.row(t0));
    }
    Ok(GeneratedSeries { data: Dataset::from_flat(p, values)?, theta_pre, theta_post })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
