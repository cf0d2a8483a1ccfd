//! Complexity bounds of the biased Stack decoder and tail estimators.

use log::warn;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::frontend::DecodingProblem;

/// Logarithm used in the noise-radius term `MT(1 + log rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseLog {
    #[default]
    Natural,
    Base2,
}

impl NoiseLog {
    /// `MT(1 + log rho)`.
    pub fn radius_sq(self, m_tx: usize, t: usize, rho: f64) -> f64 {
        let l = match self {
            NoiseLog::Natural => rho.ln(),
            NoiseLog::Base2 => rho.log2(),
        };
        (m_tx * t) as f64 * (1.0 + l)
    }
}

/// `c^{k/2} / Gamma(k/2 + 1) * [b k + MT(1 + log rho)]^{k/2} / det^{1/2}`.
fn level_term(c: f64, k: usize, b: f64, radius_sq: f64, det_rkk: f64) -> f64 {
    let h = k as f64 / 2.0;
    (h * c.ln() - ln_gamma(h + 1.0) + h * (b * k as f64 + radius_sq).ln() - 0.5 * det_rkk.ln()).exp()
}

/// Per-level bound on the nodes visited at level `k` given
/// `|e'|^2 <= MT(1 + ln rho)`. `det_rkk` is `det(R_kk^T R_kk)`.
pub fn sk_bound(k: usize, b: f64, m_tx: usize, t: usize, rho: f64, det_rkk: f64) -> f64 {
    sk_bound_with(k, b, NoiseLog::Natural.radius_sq(m_tx, t, rho), det_rkk)
}

/// [`sk_bound`] with an explicit noise radius `MT(1 + log rho)`.
pub fn sk_bound_with(k: usize, b: f64, radius_sq: f64, det_rkk: f64) -> f64 {
    assert!(det_rkk > 0.0, "det(R_kk^T R_kk) must be positive");
    level_term(4.0 * std::f64::consts::PI, k, b, radius_sq, det_rkk)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityBounds {
    /// `s_k[k - 1]` bounds level `k`.
    pub s_k: Vec<f64>,
    pub l_threshold: f64,
    pub l0: f64,
}

/// `det(R_kk^T R_kk)` for every `k`, from the diagonal of `R`.
pub fn level_determinants(prob: &DecodingProblem) -> Vec<f64> {
    let m = prob.dim();
    let mut out = Vec::with_capacity(m);
    let mut acc = 1.0;
    for k in 1..=m {
        let d = prob.r_upper[(m - k, m - k)];
        acc *= d * d;
        out.push(acc);
    }
    out
}

/// Tail threshold (4 pi constants) and time-out limit (7 pi constants).
pub fn tail_threshold(prob: &DecodingProblem, b: f64, m_tx: usize, t: usize, rho: f64) -> ComplexityBounds {
    tail_threshold_with(prob, b, NoiseLog::Natural.radius_sq(m_tx, t, rho))
}

pub fn tail_threshold_with(prob: &DecodingProblem, b: f64, radius_sq: f64) -> ComplexityBounds {
    let m = prob.dim();
    let dets = level_determinants(prob);
    let s_k: Vec<f64> = (1..=m).map(|k| sk_bound_with(k, b, radius_sq, dets[k - 1])).collect();
    let l0_terms: f64 = (1..=m).map(|k| level_term(7.0 * std::f64::consts::PI, k, b, radius_sq, dets[k - 1])).sum();
    ComplexityBounds {
        l_threshold: m as f64 + s_k.iter().sum::<f64>(),
        l0: m as f64 + l0_terms,
        s_k,
    }
}

fn check_r(r: f64, m_tx: usize, n_rx: usize) -> Result<()> {
    let max = m_tx.min(n_rx) as f64;
    if !(r >= 0.0 && r <= max) {
        return Err(Error::Parameter(format!("multiplexing gain {r} outside [0, {max}]")));
    }
    Ok(())
}

/// `l(r) = T r (M - r)/M - (M - r)(N - r)`.
pub fn avg_complexity_exponent(r: f64, m_tx: usize, n_rx: usize, t: usize) -> Result<f64> {
    check_r(r, m_tx, n_rx)?;
    let (m, n) = (m_tx as f64, n_rx as f64);
    Ok(t as f64 * r * (m - r) / m - (m - r) * (n - r))
}

/// `2MT + (ln rho)^{MT} rho^{l(r)}`.
pub fn l_out(r: f64, m_tx: usize, n_rx: usize, t: usize, rho: f64) -> Result<f64> {
    let l = avg_complexity_exponent(r, m_tx, n_rx, t)?;
    let mt = (m_tx * t) as f64;
    Ok(2.0 * mt + (mt * rho.ln().ln() + l * rho.ln()).exp())
}

/// `floor(MN / (M + T))`, capped at the channel's `min(M, N)`.
pub fn cutoff_multiplexing_gain(m_tx: usize, n_rx: usize, t: usize) -> usize {
    (m_tx * n_rx / (m_tx + t)).min(m_tx.min(n_rx))
}

/// Ratio of the sphere decoder's asymptotic average complexity to the
/// sequential decoder's, with base-2 logarithms of `rho`.
pub fn sphere_complexity_ratio(m_tx: usize, n_rx: usize, t: usize, rho: f64) -> f64 {
    let mt = (m_tx * t) as f64;
    let ln_ln = rho.log2().ln();
    let tail = -((m_tx * n_rx) as f64) * rho.ln();
    let num = 2.0 * mt + (2.0 * mt * ln_ln + tail).exp();
    let den = 2.0 * mt + (mt * ln_ln + tail).exp();
    num / den
}

/// Empirical `Pr(C >= L)` over a grid of `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub grid: Vec<f64>,
    pub ccdf: Vec<f64>,
    pub trials: usize,
}

pub fn empirical_ccdf(samples: &[u64], l_grid: &[f64]) -> Result<TailEstimate> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let ccdf = l_grid
        .iter()
        .map(|&l| {
            let below = sorted.partition_point(|&c| (c as f64) < l);
            (sorted.len() - below) as f64 / n
        })
        .collect();
    Ok(TailEstimate { grid: l_grid.to_vec(), ccdf, trials: samples.len() })
}

/// Log-spaced grid from `lo` to `hi` with `points` entries.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && points >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

/// Least-squares slope of `-log2 P` against `log2 rho`. Non-positive
/// probabilities are dropped.
pub fn snr_exponent_fit(points: &[(f64, f64)]) -> Result<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(rho, p)| {
            let ok = p > 0.0 && rho > 0.0;
            if !ok {
                warn!("dropping point (rho = {rho}, P = {p}) from exponent fit");
            }
            ok
        })
        .map(|&(rho, p)| (rho.log2(), -p.log2()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::Fit(usable.len()));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit(1));
    }
    Ok(sxy / sxx)
}
