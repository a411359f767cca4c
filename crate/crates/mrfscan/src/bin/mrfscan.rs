//! Command-line front end: simulate series with a planted change, locate
//! change points, run stability selection, evaluate estimates, and prepare
//! voting records for analysis. All randomised commands are pure functions
//! of their seed — reruns produce byte-identical outputs (the one exception
//! is the `runtime_seconds` stamp in scan outputs) regardless of `--threads`.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for data errors
//! (including unreadable or malformed files), 4 for numerical failures.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mrfscan::ingest::{conformity_filter, impute, FilterReport, ImputeRule, PartySpans, RawVotes};
use mrfscan::metrics::{
    edge_confusion, edge_sign_proportions, estimate_kappa_mc, network_stats, relative_error,
    EdgeConfusion, KappaEstimate, NetworkStats, SignProportions,
};
use mrfscan::model::{GroupLabels, ModelSpec, SymmetricParams, TimeRange, SCHEMA_VERSION};
use mrfscan::scan::{
    basic_scan, build_domain, default_bic_grid, default_margin, fast_scan, write_curve_csv,
    FastScanConfig, ScanOptions, ScanResult, Tuning,
};
use mrfscan::sim::{
    generate_series, CommunityBlocks, Scenario, ScenarioSpec, DEFAULT_BURN_IN, DEFAULT_THIN,
};
use mrfscan::solver::{FitOptions, DEFAULT_SCHEDULE_MULTIPLIER};
use mrfscan::stability::{stability_select, ResamplePenalty, StabilityOptions};
use mrfscan::{Dataset, Error};

#[derive(Parser)]
#[command(
    name = "mrfscan",
    version,
    about = "Change-point estimation in high-dimensional binary networks"
)]
struct Cli {
    /// Worker threads (default: one per core). Results never depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (default: $MRFSCAN_OUT_DIR, else the working directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a binary series with a planted change in its network.
    Simulate(SimulateArgs),
    /// Exhaustive profile scan for the change point.
    Scan(ScanArgs),
    /// Two-stage (coarse-to-fine) profile scan.
    FastScan(FastScanArgs),
    /// Bootstrap stability selection of a segment's edges.
    Stability(StabilityArgs),
    /// Evaluate an estimated parameter matrix.
    Metrics(MetricsArgs),
    /// Filter and impute a raw vote matrix into an analysable dataset.
    Impute(ImputeArgs),
    /// Time the samplers and solvers on a synthetic instance.
    Bench(BenchArgs),
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioKind {
    /// Random network pre; a controlled fraction of its edges survives.
    Similarity,
    /// Two-community polarisation layout.
    Community,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioKind,
    /// Series length T.
    #[arg(long)]
    t_len: usize,
    /// True change point (rows 1..=tau-star are pre-change).
    #[arg(long)]
    tau_star: usize,
    /// Master seed.
    #[arg(long)]
    seed: u64,
    /// Warm-up sweeps per chain.
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    /// Sweeps between recorded rows.
    #[arg(long, default_value_t = DEFAULT_THIN)]
    thin: usize,
    /// Nodes (similarity scenario).
    #[arg(long)]
    p: Option<usize>,
    /// Edge density of both networks (similarity scenario).
    #[arg(long)]
    density: Option<f64>,
    /// Fraction of pre-change edges kept identically (similarity scenario).
    #[arg(long, default_value_t = 0.0)]
    similarity: f64,
    /// Move non-shared post-change edges to fresh positions.
    #[arg(long)]
    redraw_positions: bool,
    /// Community sizes as "first,second" (community scenario).
    #[arg(long)]
    sizes: Option<String>,
    /// Pre-change block edge counts "within1,within2,between".
    #[arg(long)]
    pre_edges: Option<String>,
    /// Post-change block edge counts "within1,within2,between".
    #[arg(long)]
    post_edges: Option<String>,
}

fn parse_pair(text: &str, what: &str) -> Result<(usize, usize), Error> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::config(format!("{what} needs two comma-separated integers")));
    }
    let a = parts[0].trim().parse().map_err(|_| Error::config(format!("bad {what}: {text}")))?;
    let b = parts[1].trim().parse().map_err(|_| Error::config(format!("bad {what}: {text}")))?;
    Ok((a, b))
}

fn parse_blocks(text: &str, what: &str) -> Result<CommunityBlocks, Error> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::config(format!("{what} needs three comma-separated integers")));
    }
    let mut nums = [0usize; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot =
            part.trim().parse().map_err(|_| Error::config(format!("bad {what}: {text}")))?;
    }
    Ok(CommunityBlocks { within_first: nums[0], within_second: nums[1], between: nums[2] })
}

fn run_simulate(args: &SimulateArgs, out_dir: &Path) -> Result<(), Error> {
    let scenario = match args.scenario {
        ScenarioKind::Similarity => {
            let p = args.p.ok_or_else(|| Error::config("--p is required for similarity"))?;
            let density = args
                .density
                .ok_or_else(|| Error::config("--density is required for similarity"))?;
            Scenario::Similarity {
                p,
                density,
                similarity: args.similarity,
                redraw_positions: args.redraw_positions,
            }
        }
        ScenarioKind::Community => {
            let sizes = parse_pair(
                args.sizes
                    .as_deref()
                    .ok_or_else(|| Error::config("--sizes is required for community"))?,
                "--sizes",
            )?;
            let pre = match &args.pre_edges {
                Some(text) => parse_blocks(text, "--pre-edges")?,
                None => CommunityBlocks::PRE_DEFAULT,
            };
            let post = match &args.post_edges {
                Some(text) => parse_blocks(text, "--post-edges")?,
                None => CommunityBlocks::POST_DEFAULT,
            };
            Scenario::Community { sizes, pre, post }
        }
    };
    let spec_file = ScenarioSpec {
        schema_version: SCHEMA_VERSION,
        model: "ising".to_string(),
        scenario,
        t_len: args.t_len,
        tau_star: args.tau_star,
        seed: args.seed,
        burn_in: args.burn_in,
        thin: args.thin,
    };
    let model = ModelSpec::ising();
    let series = generate_series(&model, &spec_file)?;
    series.data.write_csv(out_dir.join("dataset.csv"))?;
    series.theta_pre.write_json(out_dir.join("truth1.json"))?;
    series.theta_post.write_json(out_dir.join("truth2.json"))?;
    write_json_pretty(out_dir.join("scenario.json"), &spec_file)?;
    println!(
        "wrote dataset.csv ({} rows x {} nodes), truth1.json, truth2.json, scenario.json",
        series.data.n_rows(),
        series.data.p()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// scan / fast-scan
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum TuningKind {
    /// Square-root penalty schedule with fixed multipliers.
    Schedule,
    /// Per-candidate BIC selection over a penalty grid.
    Bic,
}

#[derive(Args)]
struct CommonScanArgs {
    /// Input dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Left guard margin (default: max(30, 8% of T)).
    #[arg(long)]
    k_l: Option<usize>,
    /// Right guard margin (default: max(30, 8% of T)).
    #[arg(long)]
    k_u: Option<usize>,
    /// Penalty tuning rule.
    #[arg(long, value_enum, default_value_t = TuningKind::Bic)]
    tuning: TuningKind,
    /// Pre-segment schedule multiplier.
    #[arg(long, default_value_t = DEFAULT_SCHEDULE_MULTIPLIER)]
    a1: f64,
    /// Post-segment schedule multiplier.
    #[arg(long, default_value_t = DEFAULT_SCHEDULE_MULTIPLIER)]
    a2: f64,
    /// Comma-separated penalty grid for BIC tuning (default: ten values
    /// decaying geometrically from the whole-series zero threshold).
    #[arg(long)]
    grid: Option<String>,
    /// Solver convergence tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Solver iteration cap per fit.
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Candidates per warm-start block.
    #[arg(long, default_value_t = 16)]
    warm_block: usize,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonScanArgs,
    /// Candidate grid step.
    #[arg(long, default_value_t = 5)]
    step: usize,
}

#[derive(Args)]
struct FastScanArgs {
    #[command(flatten)]
    common: CommonScanArgs,
    /// Coarse-stage grid step.
    #[arg(long, default_value_t = 25)]
    step: usize,
    /// Fine-stage window halfwidth around the coarse minimiser.
    #[arg(long, default_value_t = 30)]
    stage2_halfwidth: usize,
    /// Fine-stage grid step.
    #[arg(long, default_value_t = 3)]
    stage2_step: usize,
    /// Coarse-stage kernel bandwidth (default: 1.5 x coarse step).
    #[arg(long)]
    bandwidth1: Option<f64>,
    /// Fine-stage kernel bandwidth (default: 1.5 x fine step).
    #[arg(long)]
    bandwidth2: Option<f64>,
}

/// The resolved settings a scan actually ran with.
#[derive(Serialize)]
struct ResolvedScanConfig<'a> {
    schema_version: u32,
    data: &'a Path,
    t_len: usize,
    k_l: usize,
    k_u: usize,
    step: usize,
    tuning: &'a Tuning,
    fit: &'a FitOptions,
    warm_block: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage2_halfwidth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage2_step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bandwidth1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bandwidth2: Option<f64>,
}

fn resolve_tuning(
    common: &CommonScanArgs,
    model: &ModelSpec,
    data: &Dataset,
) -> Result<Tuning, Error> {
    Ok(match common.tuning {
        TuningKind::Schedule => Tuning::Schedule { a1: common.a1, a2: common.a2 },
        TuningKind::Bic => {
            let grid = match &common.grid {
                Some(text) => {
                    let mut grid = Vec::new();
                    for part in text.split(',') {
                        grid.push(part.trim().parse::<f64>().map_err(|_| {
                            Error::config(format!("bad --grid entry: {part:?}"))
                        })?);
                    }
                    grid
                }
                None => default_bic_grid(model, data)?,
            };
            Tuning::BicGrid { grid }
        }
    })
}

fn write_scan_outputs(
    out_dir: &Path,
    result: &ScanResult,
    runtime_seconds: f64,
    file_stem: &str,
) -> Result<(), Error> {
    let mut file = result.to_file();
    file.runtime_seconds = Some(runtime_seconds);
    write_json_pretty(out_dir.join(format!("{file_stem}.json")), &file)?;
    write_curve_csv(out_dir.join("curve.csv"), &result.curve)?;
    result.fit_pre.theta_hat.write_json(out_dir.join("theta1.json"))?;
    result.fit_post.theta_hat.write_json(out_dir.join("theta2.json"))?;
    if let (Some(s1), Some(s2)) = (&result.stage1, &result.stage2) {
        write_curve_csv(out_dir.join("stage1_curve.csv"), &s1.smoothed)?;
        write_curve_csv(out_dir.join("stage2_curve.csv"), &s2.smoothed)?;
    }
    Ok(())
}

fn run_scan(args: &ScanArgs, out_dir: &Path) -> Result<(), Error> {
    let model = ModelSpec::ising();
    let data = Dataset::read_csv(&args.common.data)?;
    let t_len = data.n_rows();
    let k_l = args.common.k_l.unwrap_or_else(|| default_margin(t_len));
    let k_u = args.common.k_u.unwrap_or_else(|| default_margin(t_len));
    let domain = build_domain(t_len, k_l, k_u, args.step)?;
    let tuning = resolve_tuning(&args.common, &model, &data)?;
    let opts = ScanOptions {
        fit: FitOptions {
            tol: args.common.tol,
            max_iter: args.common.max_iter,
            ..FitOptions::default()
        },
        warm_block: args.common.warm_block,
    };
    write_json_pretty(
        out_dir.join("scan_config.json"),
        &ResolvedScanConfig {
            schema_version: SCHEMA_VERSION,
            data: &args.common.data,
            t_len,
            k_l,
            k_u,
            step: args.step,
            tuning: &tuning,
            fit: &opts.fit,
            warm_block: opts.warm_block,
            stage2_halfwidth: None,
            stage2_step: None,
            bandwidth1: None,
            bandwidth2: None,
        },
    )?;
    let start = Instant::now();
    let result = basic_scan(&model, &data, &domain, &tuning, &opts)?;
    let runtime = start.elapsed().as_secs_f64();
    write_scan_outputs(out_dir, &result, runtime, "scan")?;
    println!(
        "scan over {} candidates: tau_hat = {} (alpha_hat = {:.4}) in {runtime:.1}s",
        domain.len(),
        result.tau_hat,
        result.alpha_hat
    );
    Ok(())
}

fn run_fast_scan(args: &FastScanArgs, out_dir: &Path) -> Result<(), Error> {
    let model = ModelSpec::ising();
    let data = Dataset::read_csv(&args.common.data)?;
    let t_len = data.n_rows();
    let k_l = args.common.k_l.unwrap_or_else(|| default_margin(t_len));
    let k_u = args.common.k_u.unwrap_or_else(|| default_margin(t_len));
    let stage1 = build_domain(t_len, k_l, k_u, args.step)?;
    let tuning = resolve_tuning(&args.common, &model, &data)?;
    let opts = ScanOptions {
        fit: FitOptions {
            tol: args.common.tol,
            max_iter: args.common.max_iter,
            ..FitOptions::default()
        },
        warm_block: args.common.warm_block,
    };
    let config = FastScanConfig {
        stage1,
        stage2_halfwidth: args.stage2_halfwidth,
        stage2_step: args.stage2_step,
        bandwidth1: args.bandwidth1,
        bandwidth2: args.bandwidth2,
    };
    write_json_pretty(
        out_dir.join("fast_scan_config.json"),
        &ResolvedScanConfig {
            schema_version: SCHEMA_VERSION,
            data: &args.common.data,
            t_len,
            k_l,
            k_u,
            step: args.step,
            tuning: &tuning,
            fit: &opts.fit,
            warm_block: opts.warm_block,
            stage2_halfwidth: Some(args.stage2_halfwidth),
            stage2_step: Some(args.stage2_step),
            bandwidth1: args.bandwidth1,
            bandwidth2: args.bandwidth2,
        },
    )?;
    let start = Instant::now();
    let result = fast_scan(&model, &data, &config, &tuning, &opts)?;
    let runtime = start.elapsed().as_secs_f64();
    write_scan_outputs(out_dir, &result, runtime, "fast_scan")?;
    println!(
        "two-stage scan ({} + {} fits): tau_hat = {} (alpha_hat = {:.4}) in {runtime:.1}s",
        result.stage1.as_ref().map_or(0, |s| s.taus.len()),
        result.stage2.as_ref().map_or(0, |s| s.taus.len()),
        result.tau_hat,
        result.alpha_hat
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum PenaltyKind {
    /// BIC selection per resample.
    Bic,
    /// One fixed penalty.
    Fixed,
}

#[derive(Args)]
struct StabilityArgs {
    /// Input dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// First row of the segment (1-based, inclusive).
    #[arg(long)]
    start: usize,
    /// Last row of the segment (1-based, inclusive).
    #[arg(long)]
    end: usize,
    /// Number of bootstrap resamples.
    #[arg(long, default_value_t = 50)]
    n_resamples: usize,
    /// Frequency a stable edge must strictly exceed.
    #[arg(long, default_value_t = 0.6)]
    threshold: f64,
    /// Per-resample penalty rule.
    #[arg(long, value_enum, default_value_t = PenaltyKind::Bic)]
    penalty: PenaltyKind,
    /// Comma-separated grid for BIC (default as in scan).
    #[arg(long)]
    grid: Option<String>,
    /// Penalty for the fixed rule.
    #[arg(long)]
    lambda: Option<f64>,
    /// Master seed for the resamples.
    #[arg(long)]
    seed: u64,
    /// Solver convergence tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Solver iteration cap per fit.
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
}

#[derive(Serialize)]
struct ResolvedStabilityConfig<'a> {
    schema_version: u32,
    data: &'a Path,
    start: usize,
    end: usize,
    options: &'a StabilityOptions,
    seed: u64,
}

fn run_stability(args: &StabilityArgs, out_dir: &Path) -> Result<(), Error> {
    let model = ModelSpec::ising();
    let data = Dataset::read_csv(&args.data)?;
    let range = TimeRange::new(args.start, args.end)?;
    let penalty = match args.penalty {
        PenaltyKind::Fixed => ResamplePenalty::Fixed {
            lambda: args
                .lambda
                .ok_or_else(|| Error::config("--lambda is required with --penalty fixed"))?,
        },
        PenaltyKind::Bic => {
            let grid = match &args.grid {
                Some(text) => {
                    let mut grid = Vec::new();
                    for part in text.split(',') {
                        grid.push(part.trim().parse::<f64>().map_err(|_| {
                            Error::config(format!("bad --grid entry: {part:?}"))
                        })?);
                    }
                    grid
                }
                None => default_bic_grid(&model, &data)?,
            };
            ResamplePenalty::BicGrid { grid }
        }
    };
    let opts = StabilityOptions {
        n_resamples: args.n_resamples,
        threshold: args.threshold,
        penalty,
        fit: FitOptions { tol: args.tol, max_iter: args.max_iter, ..FitOptions::default() },
    };
    write_json_pretty(
        out_dir.join("stability_config.json"),
        &ResolvedStabilityConfig {
            schema_version: SCHEMA_VERSION,
            data: &args.data,
            start: args.start,
            end: args.end,
            options: &opts,
            seed: args.seed,
        },
    )?;
    let result = stability_select(&model, &data, range, &opts, args.seed)?;
    result.write_json(out_dir.join("stability.json"))?;
    result.write_stable_csv(out_dir.join("stable_edges.csv"), data.node_labels())?;
    println!(
        "stability over {} resamples: {} stable edges above {} -> stability.json, stable_edges.csv",
        result.n_resamples,
        result.stable_edges().len(),
        result.threshold
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

#[derive(Args)]
struct MetricsArgs {
    /// Estimated parameters (JSON).
    #[arg(long)]
    estimate: PathBuf,
    /// Reference parameters to score recovery against (JSON).
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Node groups CSV (node,group) for network statistics.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Second parameter set; reports the separation between the two.
    #[arg(long)]
    other: Option<PathBuf>,
    /// Magnitude below which a coefficient counts as zero.
    #[arg(long, default_value_t = 0.0)]
    zero_tol: f64,
    /// Monte Carlo draws per chain for the separation estimate.
    #[arg(long, default_value_t = 20_000)]
    kappa_samples: usize,
    /// Seed for the separation chains.
    #[arg(long, default_value_t = 1)]
    kappa_seed: u64,
}

#[derive(Serialize)]
struct RecoverySection {
    confusion: EdgeConfusion,
    #[serde(skip_serializing_if = "Option::is_none")]
    sensitivity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    specificity: Option<f64>,
    relative_error: f64,
}

#[derive(Serialize)]
struct MetricsFile {
    schema_version: u32,
    zero_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    recovery: Option<RecoverySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    network: Option<NetworkStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_signs: Option<SignProportions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    separation: Option<KappaEstimate>,
}

fn run_metrics(args: &MetricsArgs, out_dir: &Path) -> Result<(), Error> {
    let estimate = SymmetricParams::read_json(&args.estimate)?;
    let mut out = MetricsFile {
        schema_version: SCHEMA_VERSION,
        zero_tol: args.zero_tol,
        recovery: None,
        network: None,
        edge_signs: None,
        separation: None,
    };
    if let Some(path) = &args.reference {
        let reference = SymmetricParams::read_json(path)?;
        let confusion = edge_confusion(&estimate, &reference, args.zero_tol)?;
        out.recovery = Some(RecoverySection {
            confusion,
            sensitivity: confusion.sensitivity(),
            specificity: confusion.specificity(),
            relative_error: relative_error(&estimate, &reference)?,
        });
    }
    if let Some(path) = &args.groups {
        let groups = GroupLabels::read_csv(path)?;
        out.network = Some(network_stats(&estimate, &groups, args.zero_tol)?);
        out.edge_signs = Some(edge_sign_proportions(&estimate, &groups, args.zero_tol)?);
    }
    if let Some(path) = &args.other {
        let other = SymmetricParams::read_json(path)?;
        let model = ModelSpec::ising();
        out.separation = Some(estimate_kappa_mc(
            &model,
            &estimate,
            &other,
            args.kappa_samples,
            DEFAULT_BURN_IN,
            2,
            args.kappa_seed,
        )?);
    }
    write_json_pretty(out_dir.join("metrics.json"), &out)?;
    println!("wrote metrics.json");
    Ok(())
}

// ---------------------------------------------------------------------------
// impute
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum RuleKind {
    /// Majority of the seat's own party.
    OwnPartyMajority,
    /// Majority of the whole ballot.
    WinningMajority,
    /// Majority of all other parties.
    OppositePartyMajority,
}

impl From<RuleKind> for ImputeRule {
    fn from(kind: RuleKind) -> Self {
        match kind {
            RuleKind::OwnPartyMajority => ImputeRule::OwnPartyMajority,
            RuleKind::WinningMajority => ImputeRule::WinningMajority,
            RuleKind::OppositePartyMajority => ImputeRule::OppositePartyMajority,
        }
    }
}

#[derive(Args)]
struct ImputeArgs {
    /// Raw vote matrix CSV.
    #[arg(long)]
    votes: PathBuf,
    /// Party membership CSV (seat,start,end,party).
    #[arg(long)]
    parties: Option<PathBuf>,
    /// Cell value marking a missing vote.
    #[arg(long, default_value = "NA")]
    na_marker: String,
    /// The vote matrix has no leading date column.
    #[arg(long)]
    no_date_column: bool,
    /// Drop ballots whose majority share reaches this level (in (0.5, 1]).
    #[arg(long)]
    max_conformity: Option<f64>,
    /// Imputation rule for missing votes.
    #[arg(long, value_enum, default_value_t = RuleKind::OwnPartyMajority)]
    rule: RuleKind,
}

#[derive(Serialize)]
struct ImputeReport<'a> {
    schema_version: u32,
    votes: &'a Path,
    na_marker: &'a str,
    rule: ImputeRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_conformity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    filter: Option<FilterReport>,
    rows_out: usize,
    seats: usize,
}

fn run_impute(args: &ImputeArgs, out_dir: &Path) -> Result<(), Error> {
    let raw = RawVotes::read_csv(&args.votes, &args.na_marker, !args.no_date_column)?;
    let (kept, filter) = match args.max_conformity {
        Some(level) => {
            let (kept, report) = conformity_filter(&raw, level)?;
            (kept, Some(report))
        }
        None => (raw, None),
    };
    let parties = match &args.parties {
        Some(path) => Some(PartySpans::read_csv(path)?),
        None => None,
    };
    let data = impute(&kept, parties.as_ref(), args.rule.into())?;
    data.write_csv(out_dir.join("dataset.csv"))?;
    // The dataset format is a plain vote matrix, so ballot dates are written
    // to a sidecar file: one date per kept row, aligned with dataset.csv.
    if let Some(dates) = data.time_labels() {
        let mut wtr = csv::Writer::from_path(out_dir.join("ballot_dates.csv"))?;
        wtr.write_record(["date"])?;
        for d in dates {
            wtr.write_record([d])?;
        }
        wtr.flush()?;
    }
    write_json_pretty(
        out_dir.join("impute_report.json"),
        &ImputeReport {
            schema_version: SCHEMA_VERSION,
            votes: &args.votes,
            na_marker: &args.na_marker,
            rule: args.rule.into(),
            max_conformity: args.max_conformity,
            filter,
            rows_out: data.n_rows(),
            seats: data.p(),
        },
    )?;
    println!(
        "imputed {} rows x {} seats -> dataset.csv, impute_report.json",
        data.n_rows(),
        data.p()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[derive(Args)]
struct BenchArgs {
    /// Nodes.
    #[arg(long, default_value_t = 10)]
    p: usize,
    /// Series length.
    #[arg(long, default_value_t = 300)]
    t_len: usize,
    /// Seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of timed profile evaluations.
    #[arg(long, default_value_t = 10)]
    n_fits: usize,
}

#[derive(Serialize)]
struct BenchReport {
    schema_version: u32,
    p: usize,
    t_len: usize,
    sampling_seconds: f64,
    profile_evaluations: usize,
    profile_seconds_total: f64,
    profile_evaluations_per_second: f64,
}

fn run_bench(args: &BenchArgs, out_dir: &Path) -> Result<(), Error> {
    let model = ModelSpec::ising();
    let scenario = ScenarioSpec {
        schema_version: SCHEMA_VERSION,
        model: "ising".to_string(),
        scenario: Scenario::Similarity {
            p: args.p,
            density: 0.2,
            similarity: 0.0,
            redraw_positions: true,
        },
        t_len: args.t_len,
        tau_star: args.t_len / 2,
        seed: args.seed,
        burn_in: DEFAULT_BURN_IN,
        thin: DEFAULT_THIN,
    };
    let start = Instant::now();
    let series = generate_series(&model, &scenario)?;
    let sampling_seconds = start.elapsed().as_secs_f64();

    let grid = default_bic_grid(&model, &series.data)?;
    let tuning = Tuning::BicGrid { grid };
    let margin = default_margin(args.t_len).min((args.t_len / 3).max(1));
    let step = ((args.t_len - 2 * margin) / args.n_fits.max(1)).max(1);
    let domain = build_domain(args.t_len, margin, margin, step)?;
    let taus: Vec<usize> = domain.taus.iter().copied().take(args.n_fits).collect();
    let start = Instant::now();
    let sub = mrfscan::scan::SearchDomain::from_taus(args.t_len, taus.clone())
        .expect("subset of a valid domain");
    basic_scan(&model, &series.data, &sub, &tuning, &ScanOptions::default())?;
    let profile_seconds_total = start.elapsed().as_secs_f64();

    let report = BenchReport {
        schema_version: SCHEMA_VERSION,
        p: args.p,
        t_len: args.t_len,
        sampling_seconds,
        profile_evaluations: taus.len(),
        profile_seconds_total,
        profile_evaluations_per_second: taus.len() as f64 / profile_seconds_total,
    };
    write_json_pretty(out_dir.join("bench.json"), &report)?;
    println!(
        "sampling {:.2}s; {} profile evaluations in {:.2}s ({:.2}/s) -> bench.json",
        report.sampling_seconds,
        report.profile_evaluations,
        report.profile_seconds_total,
        report.profile_evaluations_per_second
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// plumbing
// ---------------------------------------------------------------------------

fn write_json_pretty(path: PathBuf, value: &impl Serialize) -> Result<(), Error> {
    let file = std::fs::File::create(path)?;
    let mut writer = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)?;
    use std::io::Write;
    writeln!(writer)?;
    Ok(())
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Data(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 3,
        Error::Numerical(_) => 4,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    if let Some(threads) = cli.threads {
        if threads < 1 {
            return Err(Error::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::config(format!("could not size the thread pool: {e}")))?;
    }
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os("MRFSCAN_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    match &cli.command {
        Command::Simulate(args) => run_simulate(args, &out_dir),
        Command::Scan(args) => run_scan(args, &out_dir),
        Command::FastScan(args) => run_fast_scan(args, &out_dir),
        Command::Stability(args) => run_stability(args, &out_dir),
        Command::Metrics(args) => run_metrics(args, &out_dir),
        Command::Impute(args) => run_impute(args, &out_dir),
        Command::Bench(args) => run_bench(args, &out_dir),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
