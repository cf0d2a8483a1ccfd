//! Receiver front-ends reducing detection to upper-triangular integer least
//! squares.
//!
//! A problem holds `R` (upper triangular, positive diagonal) and `y'`. The
//! metric of a partial hypothesis fixes the *last* `k` coordinates:
//! `mu(z_1^k) = b k - |y'_1^k - R_kk z_1^k|^2`, with `R_kk` the lower-right
//! `k x k` block of `R`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::MimoChannel;
use crate::error::{Error, Result};
use crate::lattice::NestedLastCode;
use crate::linalg::{cholesky_upper, complex_to_real, invert_upper, kron_identity, qr_positive, ComplexMatrix, RealMatrix, RealVector};

#[derive(Debug, Clone, PartialEq)]
pub struct DecodingProblem {
    pub r_upper: RealMatrix,
    pub y_prime: RealVector,
}

impl DecodingProblem {
    pub fn new(r_upper: RealMatrix, y_prime: RealVector) -> Result<Self> {
        let m = r_upper.nrows();
        if r_upper.ncols() != m || y_prime.len() != m || m == 0 {
            return Err(Error::Dimension(format!(
                "R is {}x{}, y' has {} entries",
                r_upper.nrows(),
                r_upper.ncols(),
                y_prime.len()
            )));
        }
        for i in 0..m {
            if !(r_upper[(i, i)] > 0.0) {
                return Err(Error::Parameter(format!("R diagonal entry {i} is {}", r_upper[(i, i)])));
            }
            for j in 0..i {
                if r_upper[(i, j)] != 0.0 {
                    return Err(Error::Parameter(format!("R has a nonzero below the diagonal at ({i}, {j})")));
                }
            }
        }
        Ok(Self { r_upper, y_prime })
    }

    pub fn dim(&self) -> usize {
        self.y_prime.len()
    }

    /// Lower-right `k x k` block of `R`.
    pub fn r_kk(&self, k: usize) -> RealMatrix {
        crate::linalg::lower_right(&self.r_upper, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontendKind {
    #[default]
    MmseDfe,
    Naive,
}

impl FrontendKind {
    pub fn name(self) -> &'static str {
        match self {
            FrontendKind::MmseDfe => "mmse_dfe",
            FrontendKind::Naive => "naive",
        }
    }
}

/// Real `2NT x 2MT` matrix of `T` uses of `sqrt(rho) H`.
pub fn channel_matrix_real(ch: &MimoChannel, t: usize) -> RealMatrix {
    let scaled = ch.h.map(|v| v * ch.rho.sqrt());
    complex_to_real(&kron_identity(t, &scaled))
}

/// `y = sqrt(rho) H x + e` over `T` slots, `e ~ N(0, I/2)`.
pub fn transmit<R: Rng + ?Sized>(ch: &MimoChannel, t: usize, x: &RealVector, rng: &mut R) -> RealVector {
    let mut y = channel_matrix_real(ch, t) * x;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for v in y.iter_mut() {
        let n: f64 = rng.sample(StandardNormal);
        *v += n * s;
    }
    y
}

/// Linear processing `F y = B x + e'` preceding the tree search.
#[derive(Debug, Clone)]
pub struct Equalizer {
    pub kind: FrontendKind,
    /// Applied to the received vector.
    pub forward: RealMatrix,
    /// Effective channel seen by the codeword.
    pub feedback: RealMatrix,
}

impl Equalizer {
    pub fn new(kind: FrontendKind, ch: &MimoChannel, t: usize) -> Result<Self> {
        match kind {
            FrontendKind::MmseDfe => mmse_dfe_equalizer(ch, t),
            FrontendKind::Naive => naive_equalizer(ch, t),
        }
    }

    /// Effective noise `F y - B x` for a known transmitted `x`.
    pub fn effective_noise(&self, y: &RealVector, x: &RealVector) -> RealVector {
        &self.forward * y - &self.feedback * x
    }

    /// QR-reduces `B G_c` and removes the dither so the search runs over
    /// plain integer coordinates.
    pub fn problem(&self, code: &NestedLastCode, y: &RealVector) -> Result<DecodingProblem> {
        let m = code.dim();
        if y.len() != self.forward.ncols() || self.feedback.ncols() != m {
            return Err(Error::Dimension(format!(
                "received vector has {} entries, equalizer expects {}; code dimension {m}",
                y.len(),
                self.forward.ncols()
            )));
        }
        let bg = &self.feedback * code.coding_generator();
        let (q, r) = qr_positive(&bg)?;
        let shifted = &self.forward * y - &self.feedback * &code.u0;
        DecodingProblem::new(r, q.transpose() * shifted)
    }
}

/// Per-slot MMSE-DFE filters: `Delta = chol(I + rho H^H H)` (upper) and
/// `F = sqrt(rho) Delta^{-H} H^H`.
pub fn mmse_dfe_filters(ch: &MimoChannel) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let m = ch.n_tx();
    let gram = ComplexMatrix::identity(m, m) + ch.gram().map(|v| v * ch.rho);
    let delta = cholesky_upper(&gram)?;
    let delta_inv_h = invert_upper(&delta)?.adjoint();
    let forward = delta_inv_h * ch.h.adjoint().map(|v| v * Complex64::from(ch.rho.sqrt()));
    Ok((delta, forward))
}

fn mmse_dfe_equalizer(ch: &MimoChannel, t: usize) -> Result<Equalizer> {
    let (delta, forward) = mmse_dfe_filters(ch)?;
    Ok(Equalizer {
        kind: FrontendKind::MmseDfe,
        forward: complex_to_real(&kron_identity(t, &forward)),
        feedback: complex_to_real(&kron_identity(t, &delta)),
    })
}

fn naive_equalizer(ch: &MimoChannel, t: usize) -> Result<Equalizer> {
    if ch.n_rx() < ch.n_tx() {
        return Err(Error::Unsupported(format!(
            "naive front-end needs N >= M, got N = {}, M = {}",
            ch.n_rx(),
            ch.n_tx()
        )));
    }
    let n = 2 * ch.n_rx() * t;
    Ok(Equalizer {
        kind: FrontendKind::Naive,
        forward: RealMatrix::identity(n, n),
        feedback: channel_matrix_real(ch, t),
    })
}

pub fn mmse_dfe_preprocess(code: &NestedLastCode, ch: &MimoChannel, y: &RealVector) -> Result<DecodingProblem> {
    mmse_dfe_equalizer(ch, code.t)?.problem(code, y)
}

pub fn naive_preprocess(code: &NestedLastCode, ch: &MimoChannel, y: &RealVector) -> Result<DecodingProblem> {
    naive_equalizer(ch, code.t)?.problem(code, y)
}

pub fn preprocess(kind: FrontendKind, code: &NestedLastCode, ch: &MimoChannel, y: &RealVector) -> Result<DecodingProblem> {
    Equalizer::new(kind, ch, code.t)?.problem(code, y)
}
