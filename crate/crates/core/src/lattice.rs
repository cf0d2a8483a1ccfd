//! Lattices, Construction-A mod-p lattices and nested (Voronoi) LAST codes.
//!
//! A code of `M` transmit antennas and block length `T` lives in
//! `m = 2MT` real dimensions. The shaping lattice is a scaled mod-p lattice
//! `phi * Lambda_p`; the coding lattice is the shaping lattice refined by an
//! integer nesting ratio `q`, so the codebook has `q^m` points.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::function::gamma::ln_gamma;

use crate::decoders::{shortest_nonzero, sphere_decode};
use crate::error::{Error, Result};
use crate::frontend::DecodingProblem;
use crate::linalg::{qr_positive, RealMatrix, RealVector};

/// Node budget for the shortest-vector search in [`geometry`].
pub const GEOMETRY_BUDGET: u64 = 20_000_000;

/// Monte Carlo draws used to calibrate the shaping scale.
pub const SHAPING_CALIBRATION_DRAWS: usize = 4000;

/// Full-rank lattice `{G z : z in Z^m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    g: RealMatrix,
}

impl LatticeBasis {
    pub fn new(g: RealMatrix) -> Result<Self> {
        if !g.is_square() || g.nrows() == 0 {
            return Err(Error::Dimension(format!("generator must be square, got {:?}", g.shape())));
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parameter("generator has non-finite entries".into()));
        }
        let det = (g.transpose() * &g).determinant();
        if !(det > 0.0) {
            return Err(Error::Singular { pivot: det, tol: 0.0 });
        }
        Ok(Self { g })
    }

    pub fn generator(&self) -> &RealMatrix {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { g: &self.g * c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGeometry {
    pub volume: f64,
    pub r_eff: f64,
    pub r_pack: f64,
    pub shortest_vector_norm: f64,
}

impl LatticeGeometry {
    /// `2 r_pack / r_eff`, the ratio entering the sequential-decoding rate.
    pub fn radius_ratio(&self) -> f64 {
        2.0 * self.r_pack / self.r_eff
    }
}

/// `ln V(S_m(1)) = (m/2) ln pi - ln Gamma(m/2 + 1)`.
pub fn ln_unit_ball_volume(m: usize) -> f64 {
    0.5 * m as f64 * PI.ln() - ln_gamma(m as f64 / 2.0 + 1.0)
}

/// Volume, effective radius and packing radius of a lattice.
pub fn geometry(basis: &LatticeBasis) -> Result<LatticeGeometry> {
    let m = basis.dim();
    let (_, r) = qr_positive(basis.generator())?;
    let ln_vol: f64 = (0..m).map(|i| r[(i, i)].ln()).sum();
    let r_eff = ((ln_vol - ln_unit_ball_volume(m)) / m as f64).exp();
    let (_, norm_sq) = shortest_nonzero(&r, GEOMETRY_BUDGET)?;
    let shortest = norm_sq.sqrt();
    Ok(LatticeGeometry {
        volume: ln_vol.exp(),
        r_eff,
        r_pack: shortest / 2.0,
        shortest_vector_norm: shortest,
    })
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Construction-A lattice `kappa (C + pZ^m)` for a systematic code over `Z_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModPLattice {
    pub m: usize,
    pub p: u64,
    pub k_info: usize,
    /// Lower-left `(m - k_info) x k_info` block of the generator, row-major,
    /// entries in `0..p`.
    pub parity: Vec<Vec<i64>>,
    pub kappa: f64,
}

impl ModPLattice {
    pub fn from_parity(m: usize, p: u64, k_info: usize, parity: Vec<Vec<i64>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Parameter(format!("p = {p} is not prime")));
        }
        if k_info < 1 || k_info >= m {
            return Err(Error::Parameter(format!("k_info = {k_info} outside 1..{m}")));
        }
        if parity.len() != m - k_info || parity.iter().any(|row| row.len() != k_info) {
            return Err(Error::Dimension(format!("parity block must be {}x{k_info}", m - k_info)));
        }
        if parity.iter().flatten().any(|&v| v < 0 || v as u64 >= p) {
            return Err(Error::Parameter("parity entries must lie in 0..p".into()));
        }
        // Unit fundamental volume: kappa^m p^(m - k) = 1.
        let kappa = (p as f64).powf(-((m - k_info) as f64) / m as f64);
        Ok(Self { m, p, k_info, parity, kappa })
    }

    /// Generator `kappa [[I, 0], [P, pI]]`.
    pub fn generator(&self) -> RealMatrix {
        let (m, k) = (self.m, self.k_info);
        let mut g = RealMatrix::zeros(m, m);
        for i in 0..k {
            g[(i, i)] = 1.0;
        }
        for i in k..m {
            for j in 0..k {
                g[(i, j)] = self.parity[i - k][j] as f64;
            }
            g[(i, i)] = self.p as f64;
        }
        g * self.kappa
    }

    pub fn basis(&self) -> LatticeBasis {
        LatticeBasis { g: self.generator() }
    }
}

/// Samples a mod-p lattice with a uniformly random parity block.
pub fn construct_mod_p_lattice<R: Rng + ?Sized>(m: usize, p: u64, k_info: usize, rng: &mut R) -> Result<ModPLattice> {
    if !is_prime(p) {
        return Err(Error::Parameter(format!("p = {p} is not prime")));
    }
    if k_info < 1 || k_info >= m {
        return Err(Error::Parameter(format!("k_info = {k_info} outside 1..{m}")));
    }
    let parity = (0..m - k_info)
        .map(|_| (0..k_info).map(|_| rng.random_range(0..p) as i64).collect())
        .collect();
    ModPLattice::from_parity(m, p, k_info, parity)
}

/// Nearest-point quantizer for a fixed lattice.
#[derive(Debug, Clone)]
struct Quantizer {
    q: RealMatrix,
    r: RealMatrix,
}

impl Quantizer {
    fn new(g: &RealMatrix) -> Result<Self> {
        let (q, r) = qr_positive(g)?;
        Ok(Self { q, r })
    }

    /// Integer coordinates of the lattice point closest to `v`.
    fn nearest(&self, v: &RealVector) -> Vec<i64> {
        let y = self.q.transpose() * v;
        let prob = DecodingProblem::new(self.r.clone(), y).expect("QR factor has a positive diagonal");
        sphere_decode(&prob).z_hat.expect("unbounded search always returns a point")
    }
}

/// A transmitted codeword together with its coordinates in the coding lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    /// `x = G_c z_lattice + u0`, inside the Voronoi cell of the shaping lattice.
    pub x: RealVector,
    pub lattice_coords: Vec<i64>,
}

/// Nested LAST code: shaping lattice `phi * Lambda_p`, coding lattice
/// `Lambda_s / q`, translation `u0`.
#[derive(Debug, Clone)]
pub struct NestedLastCode {
    pub m_tx: usize,
    pub t: usize,
    pub base: ModPLattice,
    pub shaping_scale: f64,
    pub nesting_ratio: u64,
    pub u0: RealVector,
    g_c: RealMatrix,
    shaping: Quantizer,
}

impl NestedLastCode {
    fn assemble(m_tx: usize, t: usize, base: ModPLattice, shaping_scale: f64, nesting_ratio: u64, u0: RealVector) -> Result<Self> {
        if nesting_ratio < 1 {
            return Err(Error::Parameter("codebook size below 1".into()));
        }
        let g_s = base.generator() * shaping_scale;
        let g_c = &g_s / nesting_ratio as f64;
        let shaping = Quantizer::new(&g_s)?;
        Ok(Self { m_tx, t, base, shaping_scale, nesting_ratio, u0, g_c, shaping })
    }

    pub fn dim(&self) -> usize {
        2 * self.m_tx * self.t
    }

    /// `rho^(-r/2M)` realized as `1/q`.
    pub fn coding_scale(&self) -> f64 {
        1.0 / self.nesting_ratio as f64
    }

    /// Rate in bits per channel use, `(m/T) log2 q`.
    pub fn rate_bpcu(&self) -> f64 {
        self.dim() as f64 * (self.nesting_ratio as f64).log2() / self.t as f64
    }

    /// `log2 |C|`.
    pub fn codebook_bits(&self) -> f64 {
        self.dim() as f64 * (self.nesting_ratio as f64).log2()
    }

    pub fn coding_generator(&self) -> &RealMatrix {
        &self.g_c
    }

    pub fn shaping_generator(&self) -> RealMatrix {
        &self.g_c * self.nesting_ratio as f64
    }

    /// Fixed-rate construction with an explicit nesting ratio.
    pub fn with_nesting<R: Rng + ?Sized>(m_tx: usize, t: usize, p: u64, k_info: usize, nesting_ratio: u64, rng: &mut R) -> Result<Self> {
        let m = 2 * m_tx * t;
        if m_tx == 0 || t == 0 {
            return Err(Error::Parameter("M and T must be positive".into()));
        }
        let base = construct_mod_p_lattice(m, p, k_info, rng)?;
        let shaping_scale = calibrate_shaping_scale(&base, (m_tx * t) as f64, rng)?;
        let g_s = base.generator() * shaping_scale;
        let u = RealVector::from_fn(m, |_, _| rng.random::<f64>());
        let u0 = g_s * u;
        Self::assemble(m_tx, t, base, shaping_scale, nesting_ratio, u0)
    }

    /// Code for a target rate in bits per channel use. The nesting ratio is
    /// `2^(R / 2M)` rounded to the nearest integer.
    pub fn for_rate<R: Rng + ?Sized>(m_tx: usize, t: usize, p: u64, k_info: usize, rate_bpcu: f64, rng: &mut R) -> Result<Self> {
        let q = nesting_ratio_for_bits(rate_bpcu * t as f64, 2 * m_tx * t)?;
        Self::with_nesting(m_tx, t, p, k_info, q, rng)
    }

    /// Same shaping lattice and translation with another nesting ratio.
    pub fn renested(&self, nesting_ratio: u64) -> Result<Self> {
        Self::assemble(self.m_tx, self.t, self.base.clone(), self.shaping_scale, nesting_ratio, self.u0.clone())
    }

    /// Voronoi-shaped codeword for message `z` (entries taken modulo `q`).
    pub fn encode(&self, z: &[i64]) -> Result<Codeword> {
        let m = self.dim();
        if z.len() != m {
            return Err(Error::Dimension(format!("message has {} entries, expected {m}", z.len())));
        }
        let q = self.nesting_ratio as i64;
        let zv = RealVector::from_iterator(m, z.iter().map(|&v| v as f64));
        let v = &self.g_c * zv + &self.u0;
        let w = self.shaping.nearest(&v);
        let lattice_coords: Vec<i64> = z.iter().zip(&w).map(|(a, b)| a - q * b).collect();
        let lv = RealVector::from_iterator(m, lattice_coords.iter().map(|&v| v as f64));
        let x = &self.g_c * lv + &self.u0;
        Ok(Codeword { x, lattice_coords })
    }

    /// Uniformly random message in `{0, .., q-1}^m`.
    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i64> {
        (0..self.dim()).map(|_| rng.random_range(0..self.nesting_ratio) as i64).collect()
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            format: CODE_FORMAT.to_string(),
            m_tx: self.m_tx,
            t: self.t,
            p: self.base.p,
            k_info: self.base.k_info,
            nesting_ratio: self.nesting_ratio,
            kappa: self.base.kappa,
            shaping_scale: self.shaping_scale,
            parity: self.base.parity.clone(),
            u0: self.u0.iter().copied().collect(),
        }
    }

    pub fn from_file(f: &CodeFile) -> Result<Self> {
        if f.format != CODE_FORMAT {
            return Err(Error::Parse { what: "code file".into(), msg: format!("unknown format tag {:?}", f.format) });
        }
        let m = 2 * f.m_tx * f.t;
        let mut base = ModPLattice::from_parity(m, f.p, f.k_info, f.parity.clone())?;
        base.kappa = f.kappa;
        if f.u0.len() != m {
            return Err(Error::Dimension(format!("u0 has {} entries, expected {m}", f.u0.len())));
        }
        Self::assemble(f.m_tx, f.t, base, f.shaping_scale, f.nesting_ratio, RealVector::from_vec(f.u0.clone()))
    }

    pub fn to_text(&self) -> String {
        toml::to_string(&self.to_file()).expect("code file serializes")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let f: CodeFile = toml::from_str(text).map_err(|e| Error::Parse { what: "code file".into(), msg: e.to_string() })?;
        Self::from_file(&f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// SHA-256 of the serialized code, hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

pub const CODE_FORMAT: &str = "lastseq-code/1";

/// On-disk form of a [`NestedLastCode`] (TOML).
///
/// ```toml
/// format = "lastseq-code/1"
/// m_tx = 2            # transmit antennas M
/// t = 3               # block length T
/// p = 31              # prime of the Construction-A code
/// k_info = 6          # information rows
/// nesting_ratio = 2   # q, so |C| = q^(2MT)
/// kappa = 0.18        # volume normalization of the mod-p lattice
/// shaping_scale = 2.9 # phi
/// parity = [[...], ...]  # (m - k_info) rows of k_info integers
/// u0 = [...]          # m reals
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    pub format: String,
    pub m_tx: usize,
    pub t: usize,
    pub p: u64,
    pub k_info: usize,
    pub nesting_ratio: u64,
    pub kappa: f64,
    pub shaping_scale: f64,
    pub parity: Vec<Vec<i64>>,
    pub u0: Vec<f64>,
}

/// Integer nesting ratio giving `2^bits` codewords in `m` dimensions.
pub fn nesting_ratio_for_bits(bits: f64, m: usize) -> Result<u64> {
    if !(bits >= 0.0) {
        return Err(Error::Parameter(format!("rate must be non-negative, got {bits} bits")));
    }
    let q = (bits / m as f64).exp2().round();
    if q < 1.0 {
        return Err(Error::Parameter("codebook size below 1".into()));
    }
    Ok(q as u64)
}

/// Nested code at multiplexing gain `r` and SNR `rho`: the nesting ratio is
/// `rho^(r/2M)` rounded to the nearest integer.
pub fn build_nested_last_code<R: Rng + ?Sized>(
    m_tx: usize,
    t: usize,
    p: u64,
    k_info: usize,
    r: f64,
    rho: f64,
    rng: &mut R,
) -> Result<NestedLastCode> {
    let q = nesting_ratio_for_multiplexing(r, rho, m_tx)?;
    NestedLastCode::with_nesting(m_tx, t, p, k_info, q, rng)
}

pub fn nesting_ratio_for_multiplexing(r: f64, rho: f64, m_tx: usize) -> Result<u64> {
    if !(r >= 0.0) || !(rho > 0.0) {
        return Err(Error::Parameter(format!("need r >= 0 and rho > 0, got r = {r}, rho = {rho}")));
    }
    let q = rho.powf(r / (2.0 * m_tx as f64)).round();
    if q < 1.0 {
        return Err(Error::Parameter("codebook size below 1".into()));
    }
    Ok(q as u64)
}

/// Scale `phi` such that a point uniform over the Voronoi cell of
/// `phi * Lambda_p` has mean energy `target`.
fn calibrate_shaping_scale<R: Rng + ?Sized>(base: &ModPLattice, target: f64, rng: &mut R) -> Result<f64> {
    let g = base.generator();
    let m = base.m;
    let quant = Quantizer::new(&g)?;
    let mut acc = 0.0;
    for _ in 0..SHAPING_CALIBRATION_DRAWS {
        let u = RealVector::from_fn(m, |_, _| rng.random::<f64>());
        let v = &g * u;
        let w = quant.nearest(&v);
        let wv = RealVector::from_iterator(m, w.iter().map(|&x| x as f64));
        acc += (v - &g * wv).norm_squared();
    }
    let second_moment = acc / SHAPING_CALIBRATION_DRAWS as f64;
    Ok((target / second_moment).sqrt())
}
