//! Dense real/complex linear algebra shared by the rest of the crate.
//!
//! Complex vectors are embedded into real ones by interleaving: entry `a + jb`
//! becomes `[a, b]`. Matrices use the matching 2x2 block `[[a, -b], [b, a]]`,
//! so `embed(A) * embed_vec(v) == embed_vec(A * v)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type RealVector = DVector<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Relative pivot tolerance used by [`qr_positive`].
pub const QR_RANK_TOL: f64 = 1e-10;

/// Embed a complex matrix into a real one of twice the size.
pub fn complex_to_real(a: &ComplexMatrix) -> RealMatrix {
    let (rows, cols) = a.shape();
    let mut out = RealMatrix::zeros(2 * rows, 2 * cols);
    for i in 0..rows {
        for j in 0..cols {
            let z = a[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Embed a complex vector as `[re0, im0, re1, im1, ...]`.
pub fn complex_to_real_vec(v: &ComplexVector) -> RealVector {
    RealVector::from_iterator(v.len() * 2, v.iter().flat_map(|z| [z.re, z.im]))
}

/// Inverse of [`complex_to_real_vec`].
pub fn real_to_complex_vec(v: &RealVector) -> ComplexVector {
    assert!(v.len() % 2 == 0, "odd-length real vector cannot be a complex embedding");
    ComplexVector::from_iterator(
        v.len() / 2,
        v.as_slice().chunks(2).map(|c| Complex64::new(c[0], c[1])),
    )
}

/// Block-diagonal `I_t (x) A`.
pub fn kron_identity<T: nalgebra::Scalar + Default>(t: usize, a: &DMatrix<T>) -> DMatrix<T> {
    let (r, c) = a.shape();
    let mut out = DMatrix::from_element(t * r, t * c, T::default());
    for k in 0..t {
        out.view_mut((k * r, k * c), (r, c)).copy_from(a);
    }
    out
}

/// Householder QR with the diagonal of `R` forced positive.
///
/// Accepts square or tall (`rows >= cols`) input and returns the thin factors
/// `Q` (`rows x cols`, orthonormal columns) and `R` (`cols x cols`).
pub fn qr_positive(a: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    let (rows, cols) = a.shape();
    if rows < cols || cols == 0 {
        return Err(Error::Dimension(format!(
            "qr_positive needs rows >= cols > 0, got {rows}x{cols}"
        )));
    }
    let max_col = a
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0_f64, f64::max);
    let tol = QR_RANK_TOL * max_col.max(f64::MIN_POSITIVE);

    let qr = a.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..cols {
        let d = r[(i, i)];
        if d.abs() <= tol {
            return Err(Error::Singular { pivot: d.abs(), tol });
        }
        if d < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    Ok((q, r))
}

/// Upper Cholesky factor `D` with `D^H D = S` and a positive real diagonal.
pub fn cholesky_upper(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::Dimension(format!("cholesky needs a square matrix, got {n}x{}", s.ncols())));
    }
    // Row-oriented upper factorization so the failing pivot can be reported.
    let mut d = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let mut acc = s[(i, i)].re;
        for k in 0..i {
            acc -= d[(k, i)].norm_sqr();
        }
        if !(acc > 0.0) {
            return Err(Error::NotPositiveDefinite(acc, i));
        }
        let pivot = acc.sqrt();
        d[(i, i)] = Complex64::new(pivot, 0.0);
        for j in (i + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..i {
                v -= d[(k, i)].conj() * d[(k, j)];
            }
            d[(i, j)] = v / pivot;
        }
    }
    Ok(d)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eig_hermitian(s: &ComplexMatrix) -> Vec<f64> {
    let eig = s.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Conjugate transpose.
pub fn hermitian(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Maximum absolute entry; the norm used for tolerance checks.
pub fn max_abs(a: &RealMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Inverse of an upper-triangular complex matrix with nonzero diagonal.
pub fn invert_upper(d: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = d.nrows();
    let mut inv = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        if d[(i, i)].norm() == 0.0 {
            return Err(Error::Singular { pivot: 0.0, tol: 0.0 });
        }
    }
    for j in 0..n {
        inv[(j, j)] = Complex64::new(1.0, 0.0) / d[(j, j)];
        for i in (0..j).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in (i + 1)..=j {
                acc += d[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -acc / d[(i, i)];
        }
    }
    Ok(inv)
}

/// Lower-right `k x k` block.
pub fn lower_right(a: &RealMatrix, k: usize) -> RealMatrix {
    let (r, c) = a.shape();
    a.view((r - k, c - k), (k, k)).into_owned()
}
