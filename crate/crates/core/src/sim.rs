//! Monte-Carlo BLER/BER harness, curve comparison, placement search and
//! result files.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::alist::to_alist;
use crate::channel::{derive_seed, snr_to_sigma, ChannelSpec, SnrConvention, RNG_NAME};
use crate::component::ComponentCode;
use crate::concat::{run_concatenated_trial, ConcatenatedSystem, TrialVerdict};
use crate::config::{ChannelKind, SimConfig};
use crate::cycles::scan_error_structures;
use crate::decoder::{count_operations, BpDecoder};
use crate::error::{Error, Result};
use crate::graph::{place_gc_nodes, GcPlacement, GldpcCode, TannerGraph};

pub const CSV_HEADER: &str = "# gldpc-sim results v1";
pub const CSV_COLUMNS: &str = "param,trials,block_errors,bit_errors,bler,ber,ci_lo,ci_hi,mean_iters,op_count";

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

// trials decoded per parallel batch before the stopping rule is applied
const BATCH: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stopping {
    pub min_block_errors: u64,
    pub max_trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    /// SNR in dB or erasure probability.
    pub param: f64,
    pub trials: u64,
    pub block_errors: u64,
    /// Information-bit errors, erasures included.
    pub bit_errors: u64,
    pub bler: f64,
    pub ber: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_iters: f64,
    /// Equivalent additions per decoded block from the closed-form metric.
    pub op_count: f64,
    /// Equivalent additions per decoded block actually executed.
    pub measured_ops: f64,
    pub wall_secs: f64,
}

/// Wilson score interval at 95% for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Channel for grid value `param`: SNR in dB (converted with the system's
/// overall rate and two bits per symbol) or erasure probability.
pub fn channel_for(param: f64, kind: ChannelKind, convention: SnrConvention, rate: f64) -> Result<ChannelSpec> {
    match kind {
        ChannelKind::Awgn => ChannelSpec::awgn(snr_to_sigma(param, convention, rate, 2)?),
        ChannelKind::Bec => ChannelSpec::bec(param),
    }
}

/// Simulates one grid point. Trials use seeds `(master, point, trial)` and
/// are scanned in order, so the stopping trial and every counter are
/// independent of the number of worker threads.
pub fn simulate_point(
    system: &ConcatenatedSystem<'_>,
    channel: ChannelSpec,
    param: f64,
    master_seed: u64,
    point: u64,
    stop: Stopping,
) -> PointResult {
    let start = Instant::now();
    let code = system.code;
    let (mut trials, mut block_errors, mut bit_errors, mut iters) = (0u64, 0u64, 0u64, 0u64);
    let measured_per_iter = BpDecoder::new(code).measured_ops_per_iteration();
    'outer: while trials < stop.max_trials {
        let end = (trials + BATCH).min(stop.max_trials);
        let verdicts: Vec<TrialVerdict> = (trials..end)
            .into_par_iter()
            .map_init(
                || BpDecoder::new(code),
                |dec, t| run_concatenated_trial(system, dec, channel, (master_seed, point, t)),
            )
            .collect();
        for v in verdicts {
            trials += 1;
            block_errors += !v.success as u64;
            bit_errors += v.info_bit_errors as u64;
            iters += v.iterations_used as u64;
            if block_errors >= stop.min_block_errors {
                break 'outer;
            }
        }
    }
    let (j, _) = code.graph.regular_degrees().unwrap_or((2, 0));
    let per_iter = count_operations(j, code.n(), code.placement.nu_actual(), 1).per_iteration;
    let mean_iters = iters as f64 / trials.max(1) as f64;
    let (ci_lo, ci_hi) = wilson_interval(block_errors, trials);
    PointResult {
        param,
        trials,
        block_errors,
        bit_errors,
        bler: block_errors as f64 / trials.max(1) as f64,
        ber: bit_errors as f64 / (trials.max(1) * code.k() as u64) as f64,
        ci_lo,
        ci_hi,
        mean_iters,
        op_count: per_iter * mean_iters,
        measured_ops: measured_per_iter as f64 * mean_iters,
        wall_secs: start.elapsed().as_secs_f64(),
    }
}

/// Runs every grid value in order; point `i` uses point index `i`.
pub fn run_grid(
    system: &ConcatenatedSystem<'_>,
    kind: ChannelKind,
    convention: SnrConvention,
    grid: &[f64],
    master_seed: u64,
    stop: Stopping,
) -> Result<Vec<PointResult>> {
    grid.iter()
        .enumerate()
        .map(|(i, &param)| {
            let ch = channel_for(param, kind, convention, system.rate())?;
            Ok(simulate_point(system, ch, param, master_seed, i as u64, stop))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub points: Vec<PointResult>,
    pub code_hash: String,
    pub n: usize,
    pub k: usize,
    pub inner_rate: f64,
    pub overall_rate: f64,
    pub nu_actual: f64,
    pub wall_secs: f64,
}

pub fn run_bler(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let start = Instant::now();
    let code = config.build_code()?;
    let system = ConcatenatedSystem::new(&code, config.outer, config.i_max);
    let stop = Stopping {
        min_block_errors: config.min_block_errors,
        max_trials: config.max_trials,
    };
    let points = run_grid(&system, config.channel, config.snr_convention, &config.grid, config.seed, stop)?;
    Ok(SimReport {
        points,
        code_hash: code_hash(&code),
        n: code.n(),
        k: code.k(),
        inner_rate: code.rate(),
        overall_rate: system.rate(),
        nu_actual: code.placement.nu_actual(),
        wall_secs: start.elapsed().as_secs_f64(),
    })
}

/// SHA-256 over the full parity-check matrix (alist), the placement and the
/// component generator.
pub fn code_hash(code: &GldpcCode) -> String {
    let mut h = Sha256::new();
    h.update(to_alist(&code.h_full).as_bytes());
    h.update(code.placement.to_text().as_bytes());
    h.update(code.component.to_generator_text().as_bytes());
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// CSV with a versioned header comment. Wall time is left out so that
/// identical runs give identical files.
pub fn to_csv(points: &[PointResult]) -> String {
    let mut out = format!("{CSV_HEADER}\n{CSV_COLUMNS}\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.4},{:.1}",
            p.param, p.trials, p.block_errors, p.bit_errors, p.bler, p.ber, p.ci_lo, p.ci_hi, p.mean_iters, p.op_count
        );
    }
    out
}

/// JSON sidecar: config echo, seed, generator name, code identity and timing.
pub fn to_json(config: &SimConfig, report: &SimReport) -> String {
    let value = serde_json::json!({
        "format": "gldpc-sim v1",
        "config": config.entries,
        "seed": config.seed,
        "rng": RNG_NAME,
        "code_hash": report.code_hash,
        "n": report.n,
        "k": report.k,
        "inner_rate": report.inner_rate,
        "overall_rate": report.overall_rate,
        "nu_actual": report.nu_actual,
        "wall_secs": report.wall_secs,
        "points": report.points,
    });
    serde_json::to_string_pretty(&value).expect("plain data serializes")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub level: f64,
    pub param_a: Option<f64>,
    pub param_b: Option<f64>,
    /// `param_a − param_b`; `None` when either curve misses the level.
    pub gap: Option<f64>,
}

/// Parameter at which a BLER curve first falls to `level`, by linear
/// interpolation of log10(BLER). Zero-error points end the usable range.
pub fn crossing(points: &[PointResult], level: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p.param, p.bler)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let target = level.log10();
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 == level {
            return Some(x0);
        }
        if y0 > level && y1 <= level {
            if y1 == 0.0 {
                return None;
            }
            let (l0, l1) = (y0.log10(), y1.log10());
            return Some(x0 + (target - l0) / (l1 - l0) * (x1 - x0));
        }
    }
    pts.last().filter(|p| p.1 == level).map(|p| p.0)
}

/// Horizontal gap between two curves at each BLER level.
pub fn compare_curves(a: &[PointResult], b: &[PointResult], levels: &[f64]) -> Result<Vec<GapReport>> {
    let range = |c: &[PointResult]| {
        c.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.param), hi.max(p.param)))
    };
    let ((alo, ahi), (blo, bhi)) = (range(a), range(b));
    if a.is_empty() || b.is_empty() || ahi < blo || bhi < alo {
        return Err(Error::DisjointCurves);
    }
    Ok(levels
        .iter()
        .map(|&level| {
            let (pa, pb) = (crossing(a, level), crossing(b, level));
            GapReport {
                level,
                param_a: pa,
                param_b: pb,
                gap: pa.zip(pb).map(|(x, y)| x - y),
            }
        })
        .collect())
}

/// Short fixed-budget AWGN evaluation used to rank placements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementEval {
    pub snr_db: f64,
    pub convention: SnrConvention,
    pub trials: u64,
    pub i_max: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct PlacementSearchOutcome {
    pub placement: GcPlacement,
    pub index: usize,
    /// Estimated BLER of every candidate, in sample order.
    pub blers: Vec<f64>,
    /// Structure-2 count of the candidates tied at the lowest BLER.
    pub tie_structure2: Vec<(usize, usize)>,
}

/// Block errors of a code over a fixed trial budget. Every candidate sees
/// the same trial seeds.
fn short_bler(code: &GldpcCode, eval: &PlacementEval) -> Result<f64> {
    let system = ConcatenatedSystem::new(code, None, eval.i_max);
    let ch = channel_for(eval.snr_db, ChannelKind::Awgn, eval.convention, system.rate())?;
    let stop = Stopping {
        min_block_errors: u64::MAX,
        max_trials: eval.trials,
    };
    Ok(simulate_point(&system, ch, eval.snr_db, eval.seed, 0, stop).bler)
}

/// Picks the candidate with the lowest short-simulation BLER; ties go to
/// the lower Structure-2 count, then to the earlier candidate.
pub fn select_placement(
    graph: &TannerGraph,
    candidates: Vec<GcPlacement>,
    comp: &ComponentCode,
    eval: &PlacementEval,
) -> Result<PlacementSearchOutcome> {
    if candidates.is_empty() {
        return Err(Error::OutOfRange("no placement candidates".into()));
    }
    let blers = candidates
        .iter()
        .map(|p| short_bler(&GldpcCode::new(graph.clone(), p.clone(), comp.clone())?, eval))
        .collect::<Result<Vec<f64>>>()?;
    let best = blers.iter().copied().fold(f64::INFINITY, f64::min);
    let tie_structure2: Vec<(usize, usize)> = blers
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == best)
        .map(|(i, _)| (i, scan_error_structures(graph, &candidates[i]).structure2))
        .collect();
    let &(index, _) = tie_structure2
        .iter()
        .min_by_key(|&&(i, s2)| (s2, i))
        .expect("at least one candidate attains the minimum");
    Ok(PlacementSearchOutcome {
        placement: candidates[index].clone(),
        index,
        blers,
        tie_structure2,
    })
}

/// Samples `n_samples` random placements (seeds derived from `seed`) and
/// keeps the best by [`select_placement`].
pub fn placement_search(
    graph: &TannerGraph,
    nu: f64,
    n_samples: usize,
    comp: &ComponentCode,
    eval: &PlacementEval,
    seed: u64,
) -> Result<PlacementSearchOutcome> {
    if n_samples == 0 {
        return Err(Error::OutOfRange("n_samples must be at least 1".into()));
    }
    let candidates = (0..n_samples as u64)
        .map(|i| place_gc_nodes(graph, nu, derive_seed(seed, u64::MAX, i)))
        .collect::<Result<Vec<_>>>()?;
    select_placement(graph, candidates, comp, eval)
}
