//! Quasi-static Rayleigh MIMO channel, achievable rates, bias schedules,
//! outage and closed-form diversity-multiplexing tradeoff curves.
//!
//! Rates are in bits (base-2 logarithms) throughout.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix};

/// `Y = sqrt(rho) H X + W` with `H` of size `N x M`.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoChannel {
    pub h: ComplexMatrix,
    /// SNR per receive antenna normalized by `M`.
    pub rho: f64,
}

impl MimoChannel {
    pub fn new(h: ComplexMatrix, rho: f64) -> Self {
        Self { h, rho }
    }

    pub fn n_tx(&self) -> usize {
        self.h.ncols()
    }

    pub fn n_rx(&self) -> usize {
        self.h.nrows()
    }

    pub fn gram(&self) -> ComplexMatrix {
        self.h.adjoint() * &self.h
    }

    pub fn spectrum(&self) -> ChannelSpectrum {
        ChannelSpectrum::new(eig_hermitian(&self.gram()), self.rho)
    }

    /// `ln det(I + rho H^H H)`.
    pub fn ln_det(&self) -> f64 {
        self.spectrum().ln_det(self.rho)
    }
}

/// i.i.d. CN(0, 1) entries: real and imaginary parts N(0, 1/2).
pub fn sample_rayleigh<R: Rng + ?Sized>(m_tx: usize, n_rx: usize, rho: f64, rng: &mut R) -> MimoChannel {
    MimoChannel::new(sample_cn_matrix(n_rx, m_tx, rng), rho)
}

pub fn sample_cn_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Ascending eigenvalues of `H^H H` with their SNR exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpectrum {
    pub lambda: Vec<f64>,
    /// `nu_i = -log lambda_i / log rho`; infinite when `lambda_i = 0`.
    pub nu: Vec<f64>,
}

impl ChannelSpectrum {
    pub fn new(mut lambda: Vec<f64>, rho: f64) -> Self {
        for l in &mut lambda {
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        lambda.sort_by(f64::total_cmp);
        let nu = lambda.iter().map(|&l| -l.ln() / rho.ln()).collect();
        Self { lambda, nu }
    }

    fn ln_det(&self, rho: f64) -> f64 {
        self.lambda.iter().map(|&l| (rho * l).ln_1p()).sum()
    }
}

/// `log2 det(I_M + rho H^H H)`, achievable under lattice coding with MMSE-DFE.
pub fn r_last(ch: &MimoChannel) -> f64 {
    ch.ln_det() / std::f64::consts::LN_2
}

/// Rate lost to the bias: `2M log2((1 + sqrt(1 + 8 alpha)) / 2)` with
/// `alpha = b / radius_ratio^2`.
pub fn bias_rate_offset(m_tx: usize, b: f64, radius_ratio: f64) -> f64 {
    let alpha = b / (radius_ratio * radius_ratio);
    2.0 * m_tx as f64 * ((1.0 + (1.0 + 8.0 * alpha).sqrt()) / 2.0).log2()
}

/// Achievable rate of MMSE-DFE lattice sequential decoding with bias `b`.
pub fn achievable_rate_rb(ch: &MimoChannel, b: f64, radius_ratio: f64) -> f64 {
    rb_from_r_last(r_last(ch), ch.n_tx(), b, radius_ratio)
}

pub fn rb_from_r_last(r_last: f64, m_tx: usize, b: f64, radius_ratio: f64) -> f64 {
    debug_assert!(b >= 0.0 && radius_ratio > 0.0 && radius_ratio <= 2.0);
    if b == 0.0 {
        return r_last;
    }
    (r_last - bias_rate_offset(m_tx, b, radius_ratio)).max(0.0)
}

/// Rate under Schnorr-Euchner child ordering, floored by an externally
/// supplied MMSE-DFE decoder rate.
pub fn achievable_rate_rb_se(ch: &MimoChannel, b: f64, radius_ratio: f64, mmse_dfe_rate: Option<f64>) -> f64 {
    let rb = achievable_rate_rb(ch, b, radius_ratio);
    match mmse_dfe_rate {
        None => rb,
        Some(floor) => {
            assert!(floor <= r_last(ch) + 1e-9, "MMSE-DFE rate {floor} exceeds R_LAST");
            rb.max(floor)
        }
    }
}

/// Bias minimizing the average decoding effort on an AWGN channel with
/// noise variance `sigma2`, clamped at zero.
pub fn awgn_optimal_bias(sigma2: f64) -> f64 {
    assert!(sigma2 > 0.0, "noise variance must be positive");
    (sigma2 * (4.0 / (std::f64::consts::PI * sigma2)).log2()).max(0.0)
}

/// Channel- and SNR-dependent bias whose achievable rate is `log2 eta`, with
/// `eta = phi * prod (1 + rho lambda_i)^zeta_i`.
///
/// `zeta` pairs with the ascending eigenvalues: `zeta[0]` weights the
/// weakest eigenmode.
pub fn variable_bias(spec: &ChannelSpectrum, rho: f64, zeta: &[f64], phi: f64, radius_ratio: f64) -> Result<f64> {
    validate_zeta(zeta)?;
    if zeta.len() != spec.lambda.len() {
        return Err(Error::Dimension(format!("zeta has {} entries for {} eigenvalues", zeta.len(), spec.lambda.len())));
    }
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(Error::Parameter(format!("phi = {phi} outside (0, 1]")));
    }
    let m = zeta.len() as f64;
    let ln_terms: Vec<f64> = spec.lambda.iter().map(|&l| (rho * l).ln_1p()).collect();
    let ln_p: f64 = ln_terms.iter().sum();
    let ln_eta = phi.ln() + zeta.iter().zip(&ln_terms).map(|(z, t)| z * t).sum::<f64>();
    if ln_eta > ln_p + 1e-12 * ln_p.abs().max(1.0) {
        return Err(Error::InfeasibleSchedule { eta: ln_eta.exp(), det: ln_p.exp() });
    }
    let gap = (ln_p - ln_eta).max(0.0);
    let b = 0.5 * (gap / m).exp() * (-(-gap / (2.0 * m)).exp_m1()) * radius_ratio * radius_ratio;
    Ok(b)
}

pub fn validate_zeta(zeta: &[f64]) -> Result<()> {
    let m = zeta.len() as f64;
    if zeta.is_empty() || zeta.iter().any(|&z| !(z >= 0.0)) {
        return Err(Error::Parameter(format!("zeta must be non-empty and non-negative: {zeta:?}")));
    }
    if zeta.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Parameter(format!("zeta must be non-increasing: {zeta:?}")));
    }
    if zeta.iter().sum::<f64>() > m + 1e-12 {
        return Err(Error::Parameter(format!("sum of zeta exceeds M: {zeta:?}")));
    }
    Ok(())
}

/// How the decoder bias is chosen per channel realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BiasSchedule {
    Fixed { b: f64 },
    AwgnOptimal { sigma2: f64 },
    Variable { zeta: Vec<f64>, phi: f64 },
}

impl Default for BiasSchedule {
    fn default() -> Self {
        BiasSchedule::Fixed { b: 0.6 }
    }
}

impl BiasSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            BiasSchedule::Fixed { b } if !(*b >= 0.0) => Err(Error::Parameter(format!("bias {b} must be >= 0"))),
            BiasSchedule::AwgnOptimal { sigma2 } if !(*sigma2 > 0.0) => Err(Error::Parameter(format!("sigma2 {sigma2} must be > 0"))),
            BiasSchedule::Variable { zeta, phi } => {
                validate_zeta(zeta)?;
                if !(*phi > 0.0 && *phi <= 1.0) {
                    return Err(Error::Parameter(format!("phi = {phi} outside (0, 1]")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn bias_for(&self, ch: &MimoChannel, radius_ratio: f64) -> Result<f64> {
        match self {
            BiasSchedule::Fixed { b } => Ok(*b),
            BiasSchedule::AwgnOptimal { sigma2 } => Ok(awgn_optimal_bias(*sigma2)),
            BiasSchedule::Variable { zeta, phi } => variable_bias(&ch.spectrum(), ch.rho, zeta, *phi, radius_ratio),
        }
    }

    /// Achievable rate of the schedule on `ch`.
    pub fn rate(&self, ch: &MimoChannel, radius_ratio: f64) -> Result<f64> {
        let b = self.bias_for(ch, radius_ratio)?;
        Ok(achievable_rate_rb(ch, b, radius_ratio))
    }
}

/// True when the channel cannot support `r_target` under `rate_fn`.
pub fn outage_indicator<F: Fn(&MimoChannel) -> f64>(ch: &MimoChannel, r_target: f64, rate_fn: F) -> bool {
    rate_fn(ch) < r_target
}

/// Piecewise-linear DMT curve.
#[derive(Debug, Clone, PartialEq)]
pub struct DmtCurve {
    pub breakpoints: Vec<(f64, f64)>,
}

impl DmtCurve {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Self {
        debug_assert!(breakpoints.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 >= w[1].1));
        Self { breakpoints }
    }

    /// Linear interpolation; zero beyond the last breakpoint.
    pub fn eval(&self, r: f64) -> f64 {
        let pts = &self.breakpoints;
        if r <= pts[0].0 {
            return pts[0].1;
        }
        for w in pts.windows(2) {
            let ((r0, d0), (r1, d1)) = (w[0], w[1]);
            if r <= r1 {
                if r1 == r0 {
                    return d1;
                }
                return d0 + (d1 - d0) * (r - r0) / (r1 - r0);
            }
        }
        0.0
    }
}

fn check_r(r: f64, max: f64) -> Result<()> {
    if !(r >= -1e-12 && r <= max + 1e-12) {
        return Err(Error::Parameter(format!("multiplexing gain {r} outside [0, {max}]")));
    }
    Ok(())
}

pub fn dmt_optimal_curve(m_tx: usize, n_rx: usize) -> DmtCurve {
    let kmax = m_tx.min(n_rx);
    DmtCurve::new((0..=kmax).map(|k| (k as f64, ((m_tx - k) * (n_rx - k)) as f64)).collect())
}

/// Optimal tradeoff, `(M - r)(N - r)` at integer `r`.
pub fn dmt_optimal(r: f64, m_tx: usize, n_rx: usize) -> Result<f64> {
    check_r(r, m_tx.min(n_rx) as f64)?;
    Ok(dmt_optimal_curve(m_tx, n_rx).eval(r))
}

/// Weight of `nu_i` (1-based `i`) in the outage exponent.
fn exponent_weight(i: usize, m_tx: usize, n_rx: usize) -> f64 {
    (2 * i) as f64 - 1.0 + n_rx as f64 - m_tx as f64
}

fn is_case_one(zeta: &[f64]) -> bool {
    let m = zeta.len() as f64;
    zeta.iter().all(|&z| z > 0.0) && (zeta.iter().sum::<f64>() - m).abs() <= 1e-12 * m
}

/// Breakpoints of the variable-bias DMT when every `zeta_i > 0` and the
/// coefficients sum to `M`.
pub fn dmt_variable_curve(zeta: &[f64], n_rx: usize) -> Result<DmtCurve> {
    validate_zeta(zeta)?;
    if !is_case_one(zeta) {
        return Err(Error::Parameter(format!("closed form needs positive zeta summing to M: {zeta:?}")));
    }
    let m = zeta.len();
    let mut pts = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let r: f64 = zeta[m - k..].iter().sum();
        let d = (m - k) as f64 * (n_rx as f64 - k as f64);
        pts.push((r, d));
    }
    Ok(DmtCurve::new(pts))
}

/// DMT under the variable bias schedule with coefficients `zeta`.
pub fn dmt_variable(r: f64, zeta: &[f64], m_tx: usize, n_rx: usize) -> Result<f64> {
    validate_zeta(zeta)?;
    if zeta.len() != m_tx {
        return Err(Error::Dimension(format!("zeta has {} entries, M = {m_tx}", zeta.len())));
    }
    if n_rx < m_tx {
        return Err(Error::Unsupported("variable-bias DMT assumes N >= M".into()));
    }
    check_r(r, m_tx as f64)?;
    if is_case_one(zeta) {
        Ok(dmt_variable_curve(zeta, n_rx)?.eval(r))
    } else {
        Ok(dmt_lp_exact(r, zeta, m_tx, n_rx))
    }
}

/// Exact minimizer of `sum w_i nu_i` over `nu in [0,1]^M` with
/// `sum zeta_i nu_i >= sum zeta_i - r`: fill coordinates in ascending
/// `w_i / zeta_i` order.
pub fn dmt_lp_exact(r: f64, zeta: &[f64], m_tx: usize, n_rx: usize) -> f64 {
    let mut need = zeta.iter().sum::<f64>() - r;
    if need <= 0.0 {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..m_tx).filter(|&i| zeta[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let ra = exponent_weight(a + 1, m_tx, n_rx) / zeta[a];
        let rb = exponent_weight(b + 1, m_tx, n_rx) / zeta[b];
        ra.total_cmp(&rb)
    });
    let mut cost = 0.0;
    for i in order {
        let nu = (need / zeta[i]).min(1.0);
        cost += exponent_weight(i + 1, m_tx, n_rx) * nu;
        need -= zeta[i] * nu;
        if need <= 1e-15 {
            break;
        }
    }
    cost
}

/// Grid search of the same linear program; a reference for tests.
pub fn dmt_lp_oracle(r: f64, zeta: &[f64], m_tx: usize, n_rx: usize, grid_step: f64) -> f64 {
    assert!(grid_step > 0.0 && grid_step <= 0.01, "grid step must be in (0, 0.01]");
    let steps = (1.0 / grid_step).round() as usize;
    let rhs = zeta.iter().sum::<f64>() - r;
    let mut idx = vec![0usize; m_tx];
    let mut best = f64::INFINITY;
    loop {
        let nu: Vec<f64> = idx.iter().map(|&i| i as f64 / steps as f64).collect();
        let lhs: f64 = zeta.iter().zip(&nu).map(|(z, n)| z * n).sum();
        if lhs >= rhs - 1e-12 {
            let cost: f64 = nu.iter().enumerate().map(|(i, n)| exponent_weight(i + 1, m_tx, n_rx) * n).sum();
            best = best.min(cost);
        }
        let mut pos = 0;
        loop {
            if pos == m_tx {
                return best;
            }
            if idx[pos] < steps {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Tradeoff of the plain MMSE-DFE decoder, `(N - M + 1)(1 - r/M)^+`.
pub fn dmt_mmse_dfe(r: f64, m_tx: usize, n_rx: usize) -> Result<f64> {
    check_r(r, m_tx as f64)?;
    Ok((n_rx as f64 - m_tx as f64 + 1.0) * (1.0 - r / m_tx as f64).max(0.0))
}

/// Exponent of `1 - Pr(b >= rho^(kappa/M))` when every `zeta_i = eps`:
/// `(N - kappa/(1-eps))^+ (M - kappa/(1-eps))^+`.
pub fn large_n_bias_exceedance(m_tx: usize, n_rx: usize, kappa: f64, eps: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < m_tx as f64) {
        return Err(Error::Parameter(format!("kappa = {kappa} outside (0, {m_tx})")));
    }
    if !(eps >= 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("eps = {eps} outside [0, 1)")));
    }
    let x = kappa / (1.0 - eps);
    Ok((n_rx as f64 - x).max(0.0) * (m_tx as f64 - x).max(0.0))
}
