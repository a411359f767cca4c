//! Change-point search: the profile objective over candidate splits, the
//! exhaustive scan, kernel smoothing of profile curves, and the two-stage
//! coarse-to-fine scan.
//!
//! For a candidate split `tau`, both segments get an L1-penalized fit and
//! the *unpenalized* scaled objective
//!
//! ```text
//! l_T(tau) = (1/T) sum_{t <= tau} phi(theta1_hat, x_t)
//!          + (1/T) sum_{t > tau}  phi(theta2_hat, x_t)
//! ```
//!
//! is recorded; the estimated change point minimises this profile curve.
//! The exhaustive scan ([`basic_scan`]) evaluates every candidate in a
//! [`SearchDomain`]. The two-stage scan ([`fast_scan`]) evaluates a coarse
//! grid, smooths the curve with a Nadaraya–Watson Gaussian kernel
//! ([`nw_smooth`]), zooms into a window around the smoothed minimiser with a
//! fine grid, smooths again, and reports the fine-stage minimiser — a few
//! dozen fits instead of hundreds.
//!
//! Candidate evaluations are independent, so the domain is split into
//! fixed-size contiguous blocks processed in parallel; within each block the
//! per-segment fits are warm-started from the neighbouring candidate. Block
//! boundaries depend only on the domain (never on the worker count), so
//! results are identical no matter how many threads run the scan.
//!
//! Penalties come from either the square-root [`PenaltySchedule`] or, per
//! candidate and per segment, from BIC selection over a penalty grid
//! ([`Tuning`]). Ties in any argmin go to the smallest candidate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{default_schema_version, Dataset, ModelSpec, SymmetricParams, TimeRange, SCHEMA_VERSION};
use crate::pseudo::segment_objective;
use crate::solver::{
    fit_penalized, select_lambda_bic, FitOptions, FitResult, PenaltySchedule, Side,
    DEFAULT_SCHEDULE_MULTIPLIER,
};

// ---------------------------------------------------------------------------
// Search domain
// ---------------------------------------------------------------------------

/// Default guard margin: at least 30 observations on each side of any
/// candidate, or 8% of the series, whichever is larger.
pub fn default_margin(t_len: usize) -> usize {
    30usize.max((0.08 * t_len as f64).ceil() as usize)
}

/// The set of candidate splits examined by a scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchDomain {
    /// Series length the domain was built for.
    pub t_len: usize,
    /// Candidate splits, ascending.
    pub taus: Vec<usize>,
    /// Grid step the domain was built with (1 for explicit candidate sets).
    pub step: usize,
}

/// Builds the candidate set `{k_l, k_l + step, ...}` up to `t_len - k_u`.
///
/// Requires `k_l, k_u, step >= 1` and a non-empty result; every candidate
/// `tau` leaves at least `k_l` observations before and `k_u` after the split.
pub fn build_domain(t_len: usize, k_l: usize, k_u: usize, step: usize) -> Result<SearchDomain> {
    if t_len < 2 {
        return Err(Error::config("a change-point search needs at least two observations"));
    }
    if k_l < 1 || k_u < 1 {
        return Err(Error::config("guard margins must be at least 1"));
    }
    if step < 1 {
        return Err(Error::config("grid step must be at least 1"));
    }
    if k_u >= t_len || k_l > t_len - k_u {
        return Err(Error::config(format!(
            "empty candidate set: margins ({k_l}, {k_u}) leave no split in a series of length {t_len}"
        )));
    }
    let taus: Vec<usize> = (k_l..=t_len - k_u).step_by(step).collect();
    Ok(SearchDomain { t_len, taus, step })
}

impl SearchDomain {
    /// Wraps an explicit candidate list. Candidates must be strictly
    /// increasing and lie in `[1, t_len - 1]`.
    pub fn from_taus(t_len: usize, taus: Vec<usize>) -> Result<Self> {
        if taus.is_empty() {
            return Err(Error::config("candidate set must not be empty"));
        }
        for w in taus.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::config("candidates must be strictly increasing"));
            }
        }
        if taus[0] < 1 || *taus.last().unwrap() > t_len.saturating_sub(1) {
            return Err(Error::config(format!(
                "candidates must lie in [1, {}]",
                t_len.saturating_sub(1)
            )));
        }
        Ok(SearchDomain { t_len, taus, step: 1 })
    }

    /// Number of candidates.
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    /// True when there are no candidates (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Tuning and options
// ---------------------------------------------------------------------------

/// How per-candidate penalties are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Tuning {
    /// The square-root schedule with fixed multipliers.
    Schedule {
        /// Pre-segment multiplier.
        a1: f64,
        /// Post-segment multiplier.
        a2: f64,
    },
    /// Per-candidate, per-segment BIC selection over a fixed penalty grid.
    BicGrid {
        /// Candidate penalties (any order; positive and finite).
        grid: Vec<f64>,
    },
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning::Schedule { a1: DEFAULT_SCHEDULE_MULTIPLIER, a2: DEFAULT_SCHEDULE_MULTIPLIER }
    }
}

/// Scan-level options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Solver settings for every per-segment fit.
    pub fit: FitOptions,
    /// Number of consecutive candidates per warm-start block. Fixed block
    /// boundaries keep results independent of the worker count.
    pub warm_block: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { fit: FitOptions::default(), warm_block: 16 }
    }
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// One evaluated candidate of a profile curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    /// The candidate split.
    pub tau: usize,
    /// Unpenalized profile objective at the fitted pair.
    pub objective: f64,
}

/// Metadata of one stage of the two-stage scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageInfo {
    /// Grid candidates of this stage.
    pub taus: Vec<usize>,
    /// Raw profile values at the grid candidates.
    pub raw: Vec<f64>,
    /// Smoothed curve over every integer between the first and last grid
    /// candidate.
    pub smoothed: Vec<ProfilePoint>,
    /// Kernel bandwidth used.
    pub bandwidth: f64,
    /// Minimiser of the smoothed curve (ties to the smallest).
    pub tau_hat: usize,
}

/// Outcome of a change-point scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Estimated change point.
    pub tau_hat: usize,
    /// Estimated change fraction `tau_hat / T`.
    pub alpha_hat: f64,
    /// Raw profile evaluations, ascending in `tau`. For the exhaustive scan
    /// this is the selection curve; the two-stage scan selects on the
    /// smoothed stage curves instead and reports every raw evaluation here.
    pub curve: Vec<ProfilePoint>,
    /// Fit of `[1, tau_hat]` at the reported change point.
    pub fit_pre: FitResult,
    /// Fit of `[tau_hat + 1, T]` at the reported change point.
    pub fit_post: FitResult,
    /// Penalty applied to the pre segment at `tau_hat`.
    pub lambda_pre: f64,
    /// Penalty applied to the post segment at `tau_hat`.
    pub lambda_post: f64,
    /// Coarse-stage metadata (two-stage scan only).
    pub stage1: Option<StageInfo>,
    /// Fine-stage metadata (two-stage scan only).
    pub stage2: Option<StageInfo>,
    /// The tuning rule the scan ran with.
    pub tuning: Tuning,
    /// Series length.
    pub t_len: usize,
}

/// On-disk shape of a [`ScanResult`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResultFile {
    /// File format version.
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Estimated change point.
    pub tau_hat: usize,
    /// Estimated change fraction.
    pub alpha_hat: f64,
    /// Raw profile evaluations.
    pub curve: Vec<ProfilePoint>,
    /// Coarse-stage metadata, `null` for the exhaustive scan.
    pub stage1: Option<StageInfo>,
    /// Fine-stage metadata, `null` for the exhaustive scan.
    pub stage2: Option<StageInfo>,
    /// Fitted pre-segment parameters at `tau_hat`.
    pub theta1: SymmetricParams,
    /// Fitted post-segment parameters at `tau_hat`.
    pub theta2: SymmetricParams,
    /// Penalties applied at `tau_hat`.
    pub penalties: PenaltyInfo,
    /// The tuning rule.
    pub tuning: Tuning,
    /// Wall-clock duration of the scan, written by the command-line tool;
    /// the one field reruns are allowed to differ in.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

/// Penalties applied at the reported change point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyInfo {
    /// Pre-segment penalty.
    pub lambda1: f64,
    /// Post-segment penalty.
    pub lambda2: f64,
}

impl ScanResult {
    /// Converts to the on-disk shape (without a runtime stamp).
    pub fn to_file(&self) -> ScanResultFile {
        ScanResultFile {
            schema_version: SCHEMA_VERSION,
            tau_hat: self.tau_hat,
            alpha_hat: self.alpha_hat,
            curve: self.curve.clone(),
            stage1: self.stage1.clone(),
            stage2: self.stage2.clone(),
            theta1: self.fit_pre.theta_hat.clone(),
            theta2: self.fit_post.theta_hat.clone(),
            penalties: PenaltyInfo { lambda1: self.lambda_pre, lambda2: self.lambda_post },
            tuning: self.tuning.clone(),
            runtime_seconds: None,
        }
    }
}

/// Writes a profile curve as CSV with columns `tau,objective`.
pub fn write_curve_csv(path: impl AsRef<std::path::Path>, curve: &[ProfilePoint]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["tau", "objective"])?;
    for pt in curve {
        wtr.write_record([pt.tau.to_string(), format!("{:?}", pt.objective)])?;
    }
    wtr.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Profile evaluation
// ---------------------------------------------------------------------------

struct TauEval {
    tau: usize,
    lambda_pre: f64,
    lambda_post: f64,
    fit_pre: FitResult,
    fit_post: FitResult,
    objective: f64,
}

/// Evaluates the profile objective at one candidate split with explicit
/// penalties: fits both segments (optionally warm-started from a
/// neighbouring candidate's fits) and returns the unpenalized scaled
/// objective together with the two fits.
pub fn profile_objective(
    spec: &ModelSpec,
    data: &Dataset,
    tau: usize,
    lambda_pre: f64,
    lambda_post: f64,
    warm: Option<(&SymmetricParams, &SymmetricParams)>,
    opts: &FitOptions,
) -> Result<(f64, FitResult, FitResult)> {
    let t_len = data.n_rows();
    if tau < 1 || tau >= t_len {
        return Err(Error::config(format!(
            "split {tau} outside the admissible range [1, {}]",
            t_len - 1
        )));
    }
    let scale_t = t_len as f64;
    let pre_range = TimeRange::new(1, tau)?;
    let post_range = TimeRange::new(tau + 1, t_len)?;
    let fit_pre =
        fit_penalized(spec, data, pre_range, scale_t, lambda_pre, warm.map(|w| w.0), opts)?;
    let fit_post =
        fit_penalized(spec, data, post_range, scale_t, lambda_post, warm.map(|w| w.1), opts)?;
    let value = segment_objective(spec, &fit_pre.theta_hat, data, pre_range, scale_t)?.value
        + segment_objective(spec, &fit_post.theta_hat, data, post_range, scale_t)?.value;
    Ok((value, fit_pre, fit_post))
}

fn evaluate_at(
    spec: &ModelSpec,
    data: &Dataset,
    tau: usize,
    tuning: &Tuning,
    opts: &ScanOptions,
    warm: Option<(&SymmetricParams, &SymmetricParams)>,
) -> Result<TauEval> {
    let t_len = data.n_rows();
    let scale_t = t_len as f64;
    match tuning {
        Tuning::Schedule { a1, a2 } => {
            let schedule = PenaltySchedule::new(*a1, *a2, spec, t_len, data.p())?;
            let lambda_pre = schedule.penalty_at(tau, Side::Pre)?;
            let lambda_post = schedule.penalty_at(tau, Side::Post)?;
            let (objective, fit_pre, fit_post) =
                profile_objective(spec, data, tau, lambda_pre, lambda_post, warm, &opts.fit)?;
            Ok(TauEval { tau, lambda_pre, lambda_post, fit_pre, fit_post, objective })
        }
        Tuning::BicGrid { grid } => {
            let pre_range = TimeRange::new(1, tau)?;
            let post_range = TimeRange::new(tau + 1, t_len)?;
            let (lambda_pre, fit_pre) =
                select_lambda_bic(spec, data, pre_range, scale_t, grid, &opts.fit)?;
            let (lambda_post, fit_post) =
                select_lambda_bic(spec, data, post_range, scale_t, grid, &opts.fit)?;
            let objective = segment_objective(spec, &fit_pre.theta_hat, data, pre_range, scale_t)?
                .value
                + segment_objective(spec, &fit_post.theta_hat, data, post_range, scale_t)?.value;
            Ok(TauEval { tau, lambda_pre, lambda_post, fit_pre, fit_post, objective })
        }
    }
}

/// Evaluates every candidate. Parallel across fixed-size contiguous blocks;
/// sequential warm-start chains inside each block (schedule tuning only —
/// BIC tuning warm-starts along its own penalty path instead).
fn evaluate_domain(
    spec: &ModelSpec,
    data: &Dataset,
    taus: &[usize],
    tuning: &Tuning,
    opts: &ScanOptions,
) -> Result<Vec<TauEval>> {
    if opts.warm_block < 1 {
        return Err(Error::config("warm-start block size must be at least 1"));
    }
    let blocks: Vec<&[usize]> = taus.chunks(opts.warm_block).collect();
    let evaluated: Result<Vec<Vec<TauEval>>> = blocks
        .par_iter()
        .map(|block| {
            let mut out = Vec::with_capacity(block.len());
            let mut warm: Option<(SymmetricParams, SymmetricParams)> = None;
            for &tau in *block {
                let eval = evaluate_at(
                    spec,
                    data,
                    tau,
                    tuning,
                    opts,
                    warm.as_ref().map(|(a, b)| (a, b)),
                )?;
                if matches!(tuning, Tuning::Schedule { .. }) {
                    warm =
                        Some((eval.fit_pre.theta_hat.clone(), eval.fit_post.theta_hat.clone()));
                }
                out.push(eval);
            }
            Ok(out)
        })
        .collect();
    Ok(evaluated?.into_iter().flatten().collect())
}

/// Default penalty grid for BIC tuning: ten geometrically decaying values
/// anchored at the whole-series zero-solution threshold,
/// `lambda_max * 0.75^k` for `k = 0..10`.
pub fn default_bic_grid(spec: &ModelSpec, data: &Dataset) -> Result<Vec<f64>> {
    let full = TimeRange::new(1, data.n_rows())?;
    let anchor = crate::solver::lambda_max(spec, data, full, data.n_rows() as f64)?;
    if anchor <= 0.0 {
        // Degenerate data with a zero gradient at the origin: any positive
        // penalty keeps the fit empty, so a fixed token grid suffices.
        return Ok(vec![1.0]);
    }
    Ok((0..10).map(|k| anchor * 0.75f64.powi(k)).collect())
}

/// Index of the smallest value; ties go to the earliest entry.
fn argmin(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0usize;
    let mut best_v = f64::INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v < best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Exhaustive scan
// ---------------------------------------------------------------------------

/// Evaluates the profile objective at every candidate and returns the
/// minimiser (ties to the smallest candidate).
pub fn basic_scan(
    spec: &ModelSpec,
    data: &Dataset,
    domain: &SearchDomain,
    tuning: &Tuning,
    opts: &ScanOptions,
) -> Result<ScanResult> {
    check_scan_inputs(spec, data, domain)?;
    let evals = evaluate_domain(spec, data, &domain.taus, tuning, opts)?;
    let best = argmin(evals.iter().map(|e| e.objective));
    let curve: Vec<ProfilePoint> =
        evals.iter().map(|e| ProfilePoint { tau: e.tau, objective: e.objective }).collect();
    let chosen = &evals[best];
    Ok(ScanResult {
        tau_hat: chosen.tau,
        alpha_hat: chosen.tau as f64 / data.n_rows() as f64,
        curve,
        fit_pre: chosen.fit_pre.clone(),
        fit_post: chosen.fit_post.clone(),
        lambda_pre: chosen.lambda_pre,
        lambda_post: chosen.lambda_post,
        stage1: None,
        stage2: None,
        tuning: tuning.clone(),
        t_len: data.n_rows(),
    })
}

fn check_scan_inputs(spec: &ModelSpec, data: &Dataset, domain: &SearchDomain) -> Result<()> {
    if data.n_rows() < 2 {
        return Err(Error::data("a change-point scan needs at least two observations"));
    }
    if domain.t_len != data.n_rows() {
        return Err(Error::config(format!(
            "domain was built for T = {} but the data has T = {}",
            domain.t_len,
            data.n_rows()
        )));
    }
    data.validate_for(spec)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Kernel smoothing
// ---------------------------------------------------------------------------

/// Nadaraya–Watson smoothing of a profile curve with a Gaussian kernel:
/// `smoothed(t) = sum_i K_h(t, tau_i) y_i / sum_i K_h(t, tau_i)` with
/// `K_h(a, b) = exp(-(a - b)^2 / (2 h^2))`, evaluated at every integer of
/// `eval_range` (inclusive).
///
/// Errors on an empty curve, a non-positive bandwidth, an inverted range, or
/// when the kernel mass at some evaluation point underflows to zero.
pub fn nw_smooth(
    curve: &[ProfilePoint],
    bandwidth: f64,
    eval_range: (usize, usize),
) -> Result<Vec<ProfilePoint>> {
    if curve.is_empty() {
        return Err(Error::config("cannot smooth an empty curve"));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::config(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let (lo, hi) = eval_range;
    if lo > hi {
        return Err(Error::config(format!("inverted evaluation range [{lo}, {hi}]")));
    }
    let inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    let mut out = Vec::with_capacity(hi - lo + 1);
    for t in lo..=hi {
        let mut mass = 0.0f64;
        let mut weighted = 0.0f64;
        for pt in curve {
            let d = t as f64 - pt.tau as f64;
            let k = (-d * d * inv_two_h2).exp();
            mass += k;
            weighted += k * pt.objective;
        }
        if mass <= 0.0 {
            return Err(Error::numerical(format!(
                "kernel mass underflowed to zero at t = {t} (bandwidth {bandwidth})"
            )));
        }
        out.push(ProfilePoint { tau: t, objective: weighted / mass });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Two-stage scan
// ---------------------------------------------------------------------------

/// Configuration of the two-stage scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastScanConfig {
    /// Coarse-stage candidate grid.
    pub stage1: SearchDomain,
    /// Halfwidth `w` of the fine-stage window around the coarse minimiser.
    pub stage2_halfwidth: usize,
    /// Fine-stage grid step.
    pub stage2_step: usize,
    /// Coarse-stage kernel bandwidth; `None` means 1.5 x the coarse step.
    pub bandwidth1: Option<f64>,
    /// Fine-stage kernel bandwidth; `None` means 1.5 x the fine step.
    pub bandwidth2: Option<f64>,
}

impl FastScanConfig {
    /// Default fine stage (window halfwidth 30, step 3) around a coarse grid.
    pub fn new(stage1: SearchDomain) -> Self {
        FastScanConfig {
            stage1,
            stage2_halfwidth: 30,
            stage2_step: 3,
            bandwidth1: None,
            bandwidth2: None,
        }
    }
}

fn smooth_stage(taus: &[usize], evals: &[TauEval], bandwidth: f64) -> Result<StageInfo> {
    let curve: Vec<ProfilePoint> =
        evals.iter().map(|e| ProfilePoint { tau: e.tau, objective: e.objective }).collect();
    let lo = *taus.first().expect("stage grids are non-empty");
    let hi = *taus.last().expect("stage grids are non-empty");
    let smoothed = nw_smooth(&curve, bandwidth, (lo, hi))?;
    let best = argmin(smoothed.iter().map(|p| p.objective));
    Ok(StageInfo {
        taus: taus.to_vec(),
        raw: evals.iter().map(|e| e.objective).collect(),
        smoothed: smoothed.clone(),
        bandwidth,
        tau_hat: smoothed[best].tau,
    })
}

/// Two-stage scan: coarse grid, smooth, zoom, fine grid, smooth, select.
///
/// The reported `tau_hat` minimises the fine stage's smoothed curve over
/// every integer between the fine grid's ends; the reported segment fits are
/// computed at that point (warm-started from the nearest fine-grid
/// candidate when `tau_hat` itself is off-grid).
pub fn fast_scan(
    spec: &ModelSpec,
    data: &Dataset,
    config: &FastScanConfig,
    tuning: &Tuning,
    opts: &ScanOptions,
) -> Result<ScanResult> {
    check_scan_inputs(spec, data, &config.stage1)?;
    if config.stage2_step < 1 {
        return Err(Error::config("fine-stage step must be at least 1"));
    }
    let t_len = data.n_rows();

    // Stage 1: coarse grid.
    let taus1 = &config.stage1.taus;
    let evals1 = evaluate_domain(spec, data, taus1, tuning, opts)?;
    let bw1 = config.bandwidth1.unwrap_or(1.5 * config.stage1.step as f64);
    let stage1 = smooth_stage(taus1, &evals1, bw1)?;

    // Stage 2: fine grid on [tau1 - w, tau1 + w], clipped to [1, T - 1].
    let w = config.stage2_halfwidth as i64;
    let center = stage1.tau_hat as i64;
    let mut taus2: Vec<usize> = Vec::new();
    let mut t = center - w;
    while t <= center + w {
        if t >= 1 && t <= (t_len as i64 - 1) {
            taus2.push(t as usize);
        }
        t += config.stage2_step as i64;
    }
    if taus2.is_empty() {
        return Err(Error::config("fine-stage window contains no admissible candidate"));
    }
    let evals2 = evaluate_domain(spec, data, &taus2, tuning, opts)?;
    let bw2 = config.bandwidth2.unwrap_or(1.5 * config.stage2_step as f64);
    let stage2 = smooth_stage(&taus2, &evals2, bw2)?;
    let tau_hat = stage2.tau_hat;

    // Fits at the selected point. Reuse the evaluation when tau_hat lies on
    // the fine grid; otherwise fit it, warm-started from the nearest
    // fine-grid candidate.
    let chosen: TauEval = match evals2.iter().position(|e| e.tau == tau_hat) {
        Some(i) => {
            let e = &evals2[i];
            TauEval {
                tau: e.tau,
                lambda_pre: e.lambda_pre,
                lambda_post: e.lambda_post,
                fit_pre: e.fit_pre.clone(),
                fit_post: e.fit_post.clone(),
                objective: e.objective,
            }
        }
        None => {
            let nearest = &evals2[argmin(
                evals2.iter().map(|e| (e.tau as f64 - tau_hat as f64).abs()),
            )];
            evaluate_at(
                spec,
                data,
                tau_hat,
                tuning,
                opts,
                Some((&nearest.fit_pre.theta_hat, &nearest.fit_post.theta_hat)),
            )?
        }
    };

    // All raw evaluations, ascending; fine-stage values win on duplicates.
    let mut curve: Vec<ProfilePoint> = Vec::new();
    let mut push = |pt: ProfilePoint| match curve.iter_mut().find(|c| c.tau == pt.tau) {
        Some(c) => *c = pt,
        None => curve.push(pt),
    };
    for e in &evals1 {
        push(ProfilePoint { tau: e.tau, objective: e.objective });
    }
    for e in &evals2 {
        push(ProfilePoint { tau: e.tau, objective: e.objective });
    }
    push(ProfilePoint { tau: chosen.tau, objective: chosen.objective });
    curve.sort_by_key(|p| p.tau);

    Ok(ScanResult {
        tau_hat,
        alpha_hat: tau_hat as f64 / t_len as f64,
        curve,
        fit_pre: chosen.fit_pre,
        fit_post: chosen.fit_post,
        lambda_pre: chosen.lambda_pre,
        lambda_post: chosen.lambda_post,
        stage1: Some(stage1),
        stage2: Some(stage2),
        tuning: tuning.clone(),
        t_len,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
