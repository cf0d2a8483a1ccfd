//! Monte Carlo sweeps: frame error rate, complexity tails and outage.
//!
//! Every trial draws its randomness from a ChaCha8 stream keyed by the master
//! seed and a stream id built from (SNR index, trial index), so records do
//! not depend on scheduling. Trials run in fixed-size batches; the optional
//! early stop is evaluated only at batch boundaries.

mod config;
mod output;
mod stats;

pub use config::{CodeSpec, ComplexitySpec, DecoderKind, LRule, MaxNodes, OutageRate, RateMode, SimConfig};
pub use output::{emit_outputs, read_summary, write_trials_csv, TRIALS_CSV_HEADER};
pub use stats::{mean_interval, wilson_interval, Interval};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{achievable_rate_rb, r_last, sample_rayleigh, BiasSchedule, MimoChannel};
use crate::complexity::{empirical_ccdf, log_grid, snr_exponent_fit, tail_threshold};
use crate::decoders::{babai_decode, fano_decode, sphere_decode, stack_decode, DecodeOutcome, DecoderParams};
use crate::error::{Error, Result};
use crate::frontend::{transmit, Equalizer};
use crate::lattice::{geometry, nesting_ratio_for_multiplexing, LatticeBasis, NestedLastCode};

/// Trials per scheduling batch.
pub const BATCH: u64 = 1000;

const CODE_STREAM: u64 = u64::MAX;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Independent generator for one (SNR index, trial) pair.
pub fn trial_rng(seed: u64, snr_index: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 40) | trial);
    rng
}

fn code_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(CODE_STREAM);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub snr_db: f64,
    pub trial: u64,
    pub decoder: DecoderKind,
    pub frontend: crate::frontend::FrontendKind,
    pub b: f64,
    pub error: bool,
    pub nodes: u64,
    pub metric_evals: u64,
    pub timed_out: bool,
    pub outage: bool,
    /// Time-out limit from the bounds, when computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub l: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub rho: f64,
    pub trials: u64,
    pub errors: u64,
    pub timeouts: u64,
    pub fer: f64,
    pub fer_interval: Interval,
    pub outages: u64,
    pub outage_prob: f64,
    pub mean_nodes: f64,
    pub nodes_interval: Interval,
    pub rate_bpcu: f64,
    /// `Pr(C >= L)` at the rule's `L` (complexity sweeps).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ccdf: Option<CcdfCurve>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Fer,
    Complexity,
    Outage,
}

/// Fitted SNR exponents; `None` when fewer than three usable points.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Slopes {
    pub fer: Option<f64>,
    pub outage: Option<f64>,
    pub tail: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub kind: SweepKind,
    pub config: SimConfig,
    pub code_fingerprint: Option<String>,
    pub points: Vec<SnrPoint>,
    pub slopes: Slopes,
}

/// Builds or loads the code named by the configuration.
pub fn build_code(cfg: &SimConfig) -> Result<NestedLastCode> {
    let code = match &cfg.code.path {
        Some(path) => NestedLastCode::load(path)?,
        None => {
            let mut rng = code_rng(cfg.seed);
            let bpcu = match cfg.rate {
                RateMode::FixedBpcu { bpcu } => bpcu,
                // Re-nested per SNR point; start from the smallest ratio.
                RateMode::Multiplexing { .. } => 0.0,
            };
            NestedLastCode::for_rate(cfg.m_tx, cfg.t, cfg.code.p, cfg.code.k_info, bpcu, &mut rng)?
        }
    };
    if code.m_tx != cfg.m_tx || code.t != cfg.t {
        return Err(Error::Config(format!(
            "code is for M = {}, T = {}; config has M = {}, T = {}",
            code.m_tx, code.t, cfg.m_tx, cfg.t
        )));
    }
    Ok(code)
}

fn code_for_snr(base: &NestedLastCode, cfg: &SimConfig, rho: f64) -> Result<NestedLastCode> {
    match cfg.rate {
        RateMode::FixedBpcu { .. } => Ok(base.clone()),
        RateMode::Multiplexing { r } => base.renested(nesting_ratio_for_multiplexing(r, rho, cfg.m_tx)?),
    }
}

/// `2 r_pack / r_eff` of the coding lattice (scale invariant).
pub fn code_radius_ratio(code: &NestedLastCode) -> Result<f64> {
    Ok(geometry(&LatticeBasis::new(code.coding_generator().clone())?)?.radius_ratio())
}

fn decode(kind: DecoderKind, prob: &crate::frontend::DecodingProblem, params: &DecoderParams) -> DecodeOutcome {
    match kind {
        DecoderKind::Stack => stack_decode(prob, params),
        DecoderKind::Fano => fano_decode(prob, params),
        DecoderKind::Sphere => sphere_decode(prob),
        DecoderKind::Babai => babai_decode(prob),
    }
}

fn outage_flag(cfg: &SimConfig, ch: &MimoChannel, rate: f64, b: f64, ratio: f64) -> bool {
    let supported = match cfg.outage_rate {
        OutageRate::RLast => r_last(ch),
        OutageRate::Scheme => achievable_rate_rb(ch, b, ratio),
    };
    supported < rate
}

struct PointContext<'a> {
    cfg: &'a SimConfig,
    code: NestedLastCode,
    snr_index: usize,
    snr_db: f64,
    rho: f64,
    ratio: f64,
    need_l0: bool,
}

impl PointContext<'_> {
    fn run_trial(&self, trial: u64) -> Result<TrialRecord> {
        let cfg = self.cfg;
        let mut rng = trial_rng(cfg.seed, self.snr_index, trial);
        let ch = sample_rayleigh(cfg.m_tx, cfg.n_rx, self.rho, &mut rng);
        let msg = self.code.random_message(&mut rng);
        let cw = self.code.encode(&msg)?;
        let y = transmit(&ch, cfg.t, &cw.x, &mut rng);
        let b = cfg.bias.bias_for(&ch, self.ratio)?;
        let prob = Equalizer::new(cfg.frontend, &ch, cfg.t)?.problem(&self.code, &y)?;
        let l0 = self.need_l0.then(|| tail_threshold(&prob, b, cfg.m_tx, cfg.t, self.rho).l0);
        let max_nodes = match cfg.max_nodes {
            MaxNodes::None => None,
            MaxNodes::Fixed { limit } => Some(limit),
            MaxNodes::L0Rule => l0.map(|v| v.ceil().min(u64::MAX as f64) as u64),
        };
        let params = DecoderParams {
            bias: b,
            delta: cfg.delta,
            max_nodes,
            child_order: cfg.child_order,
            ..DecoderParams::default()
        };
        let out = decode(cfg.decoder, &prob, &params);
        let error = out.timed_out || out.z_hat.as_deref() != Some(cw.lattice_coords.as_slice());
        Ok(TrialRecord {
            snr_db: self.snr_db,
            trial,
            decoder: cfg.decoder,
            frontend: cfg.frontend,
            b,
            error,
            nodes: out.nodes,
            metric_evals: out.metric_evals,
            timed_out: out.timed_out,
            outage: outage_flag(cfg, &ch, self.code.rate_bpcu(), b, self.ratio),
            l0,
        })
    }
}

/// Runs trials in batches until `trials` or the error target is reached.
fn run_point<F>(cfg: &SimConfig, mut trial: F) -> Result<Vec<TrialRecord>>
where
    F: FnMut(std::ops::Range<u64>) -> Result<Vec<TrialRecord>>,
{
    let mut records = Vec::new();
    let mut errors = 0;
    let mut start = 0;
    while start < cfg.trials {
        let end = (start + BATCH).min(cfg.trials);
        let batch = trial(start..end)?;
        errors += batch.iter().filter(|r| r.error).count() as u64;
        records.extend(batch);
        start = end;
        if cfg.target_errors.is_some_and(|t| errors >= t) {
            break;
        }
    }
    Ok(records)
}

fn summarize_point(snr_db: f64, rho: f64, rate_bpcu: f64, records: &[TrialRecord]) -> SnrPoint {
    let n = records.len() as u64;
    let errors = records.iter().filter(|r| r.error).count() as u64;
    let timeouts = records.iter().filter(|r| r.timed_out).count() as u64;
    let outages = records.iter().filter(|r| r.outage).count() as u64;
    let nodes: Vec<f64> = records.iter().map(|r| r.nodes as f64).collect();
    let nodes_interval = mean_interval(&nodes);
    SnrPoint {
        snr_db,
        rho,
        trials: n,
        errors,
        timeouts,
        fer: errors as f64 / n.max(1) as f64,
        fer_interval: wilson_interval(errors, n),
        outages,
        outage_prob: outages as f64 / n.max(1) as f64,
        mean_nodes: nodes_interval.estimate,
        nodes_interval,
        rate_bpcu,
        tail_prob: None,
        ccdf: None,
    }
}

fn fit(points: &[SnrPoint], f: impl Fn(&SnrPoint) -> Option<f64>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter_map(|p| f(p).map(|v| (p.rho, v))).collect();
    snr_exponent_fit(&pts).ok()
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn decoding_sweep(cfg: &SimConfig, threads: Option<usize>, kind: SweepKind) -> Result<(SweepSummary, Vec<TrialRecord>)> {
    cfg.validate()?;
    if kind == SweepKind::Complexity && !matches!(cfg.decoder, DecoderKind::Stack | DecoderKind::Fano) {
        return Err(Error::Config("complexity sweeps need the stack or fano decoder".into()));
    }
    let base = build_code(cfg)?;
    let ratio = code_radius_ratio(&base)?;
    let need_l0 = cfg.max_nodes == MaxNodes::L0Rule || (kind == SweepKind::Complexity && cfg.complexity.l_rule == LRule::L0Rule);
    with_pool(threads, || {
        let mut all = Vec::new();
        let mut points = Vec::new();
        for (snr_index, &snr_db) in cfg.snr_db.iter().enumerate() {
            let rho = db_to_linear(snr_db);
            let ctx = PointContext { cfg, code: code_for_snr(&base, cfg, rho)?, snr_index, snr_db, rho, ratio, need_l0 };
            let records = run_point(cfg, |range| range.into_par_iter().map(|t| ctx.run_trial(t)).collect())?;
            let mut point = summarize_point(snr_db, rho, ctx.code.rate_bpcu(), &records);
            if kind == SweepKind::Complexity {
                attach_tail(cfg, &mut point, &records)?;
            }
            if point.fer > 0.0 && points.last().is_some_and(|p: &SnrPoint| p.fer_interval.lo > point.fer_interval.hi) {
                log::warn!("FER rises from the previous SNR point at {snr_db} dB");
            }
            points.push(point);
            all.extend(records);
        }
        let slopes = Slopes {
            fer: fit(&points, |p| Some(p.fer)),
            outage: fit(&points, |p| Some(p.outage_prob)),
            tail: fit(&points, |p| p.tail_prob),
        };
        Ok((
            SweepSummary { kind, config: cfg.clone(), code_fingerprint: Some(base.fingerprint()), points, slopes },
            all,
        ))
    })?
}

fn attach_tail(cfg: &SimConfig, point: &mut SnrPoint, records: &[TrialRecord]) -> Result<()> {
    let samples: Vec<u64> = records.iter().map(|r| r.nodes).collect();
    let m = cfg.dim() as f64;
    let max = samples.iter().copied().max().unwrap_or(0) as f64;
    let grid = log_grid(m, max.max(m * 2.0), cfg.complexity.grid_points);
    let tail = empirical_ccdf(&samples, &grid)?;
    point.tail_prob = Some(match cfg.complexity.l_rule {
        LRule::RhoScaling => empirical_ccdf(&samples, &[point.rho])?.ccdf[0],
        LRule::Grid => tail.ccdf[tail.ccdf.len() / 2],
        LRule::L0Rule => {
            let hits = records.iter().filter(|r| r.l0.is_some_and(|l| r.nodes as f64 >= l)).count();
            hits as f64 / records.len() as f64
        }
    });
    point.ccdf = Some(CcdfCurve { l: tail.grid, p: tail.ccdf });
    Ok(())
}

/// FER sweep.
pub fn run_fer_sweep(cfg: &SimConfig, threads: Option<usize>) -> Result<(SweepSummary, Vec<TrialRecord>)> {
    decoding_sweep(cfg, threads, SweepKind::Fer)
}

/// Complexity sweep: FER plus the CCDF of the node count.
pub fn run_complexity_sweep(cfg: &SimConfig, threads: Option<usize>) -> Result<(SweepSummary, Vec<TrialRecord>)> {
    decoding_sweep(cfg, threads, SweepKind::Complexity)
}

/// Channel-only outage sweep at the configured rate.
pub fn run_outage_sweep(cfg: &SimConfig, threads: Option<usize>) -> Result<SweepSummary> {
    cfg.validate()?;
    let base = build_code(cfg)?;
    let ratio = code_radius_ratio(&base)?;
    with_pool(threads, || {
        let mut points = Vec::new();
        for (snr_index, &snr_db) in cfg.snr_db.iter().enumerate() {
            let rho = db_to_linear(snr_db);
            let code = code_for_snr(&base, cfg, rho)?;
            let rate = code.rate_bpcu();
            let flags: Result<Vec<(bool, f64)>> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(cfg.seed, snr_index, t);
                    let ch = sample_rayleigh(cfg.m_tx, cfg.n_rx, rho, &mut rng);
                    let b = match &cfg.bias {
                        BiasSchedule::Fixed { b } => *b,
                        other => other.bias_for(&ch, ratio).unwrap_or(f64::INFINITY),
                    };
                    Ok((outage_flag(cfg, &ch, rate, b, ratio), b))
                })
                .collect();
            let flags = flags?;
            let outages = flags.iter().filter(|f| f.0).count() as u64;
            let n = cfg.trials;
            points.push(SnrPoint {
                snr_db,
                rho,
                trials: n,
                errors: 0,
                timeouts: 0,
                fer: 0.0,
                fer_interval: wilson_interval(0, n),
                outages,
                outage_prob: outages as f64 / n as f64,
                mean_nodes: 0.0,
                nodes_interval: mean_interval(&[]),
                rate_bpcu: rate,
                tail_prob: None,
                ccdf: None,
            });
        }
        let slopes = Slopes { fer: None, outage: fit(&points, |p| Some(p.outage_prob)), tail: None };
        Ok(SweepSummary { kind: SweepKind::Outage, config: cfg.clone(), code_fingerprint: Some(base.fingerprint()), points, slopes })
    })?
}
