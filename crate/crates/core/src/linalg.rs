//! Small dense complex linear algebra helpers shared across the crate.
//!
//! Everything here operates on [`DVector`]/[`DMatrix`] over `Complex64`. The
//! spaces involved are tiny (dimension at most 16 for full product spaces, at
//! most 8 for a single party), so all routines favor clarity and numerical
//! robustness over scale.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

/// ⟨u|v⟩ with the conjugation on the left argument.
pub fn inner(u: &DVector<C64>, v: &DVector<C64>) -> C64 {
    u.dotc(v)
}

/// Tensor product of two kets, row-major: entry `i*dim(v) + k` is `u[i]*v[k]`.
pub fn kron_vec(u: &DVector<C64>, v: &DVector<C64>) -> DVector<C64> {
    let dv = v.len();
    DVector::from_fn(u.len() * dv, |i, _| u[i / dv] * v[i % dv])
}

/// Rank-one operator |u⟩⟨v|.
pub fn outer(u: &DVector<C64>, v: &DVector<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

/// Computational basis ket |k⟩ in dimension `dim`.
pub fn basis_ket(dim: usize, k: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[k] = C64::new(1.0, 0.0);
    v
}

pub fn identity(dim: usize) -> DMatrix<C64> {
    DMatrix::identity(dim, dim)
}

/// Largest entry magnitude of a matrix.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &DMatrix<C64>, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) < tol
}

pub fn is_unitary(m: &DMatrix<C64>, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let d = m.nrows();
    max_abs(&(m.adjoint() * m - identity(d))) < tol
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Singular values, unordered.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    m.clone()
        .svd_unordered(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Numerical rank: singular values below `rel_tol` times the largest count as
/// zero.
pub fn rank(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Orthonormal basis of the right nullspace of a real matrix, by SVD with a
/// relative singular-value threshold.
///
/// Rows are zero-padded to square first so that the full set of right singular
/// vectors is available even for underdetermined systems.
pub fn nullspace_real(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let (r, c) = m.shape();
    if c == 0 {
        return Vec::new();
    }
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd_unordered(false, true);
    let v_t = svd.v_t.expect("SVD with v_t requested");
    let sv = svd.singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let mut basis = Vec::new();
    for i in 0..v_t.nrows() {
        if max == 0.0 || sv[i] <= rel_tol * max {
            basis.push(v_t.row(i).transpose());
        }
    }
    basis
}

/// Orthonormal basis of the span of `vectors` via modified Gram-Schmidt with a
/// re-orthogonalization pass. Residuals with norm below `tol` are dropped.
pub fn orthonormal_span(vectors: &[DVector<C64>], tol: f64) -> Vec<DVector<C64>> {
    let mut basis: Vec<DVector<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                w -= b * c;
            }
        }
        let n = w.norm();
        if n > tol {
            basis.push(w / C64::new(n, 0.0));
        }
    }
    basis
}

/// Orthogonal projector onto the span of `vectors`.
pub fn projector_onto_span(vectors: &[DVector<C64>], tol: f64) -> DMatrix<C64> {
    let dim = vectors.first().map_or(0, |v| v.len());
    let mut p = DMatrix::zeros(dim, dim);
    for b in orthonormal_span(vectors, tol) {
        p += outer(&b, &b);
    }
    p
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-ish random unit vector (normalized complex Gaussian).
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| gaussian_c64(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v / C64::new(n, 0.0);
        }
    }
}

/// Haar-distributed random unitary: complex Gaussian matrix orthonormalized
/// column by column.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    loop {
        let cols: Vec<DVector<C64>> = (0..dim).map(|_| random_unit_vector(dim, rng)).collect();
        let basis = orthonormal_span(&cols, 1e-6);
        if basis.len() == dim {
            return DMatrix::from_columns(&basis);
        }
    }
}

/// Nested `[re, im]` rows for a complex matrix, the wire form used in all JSON
/// interfaces.
pub fn cmat_to_rows(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn cmat_from_rows(rows: &[Vec<[f64; 2]>]) -> Option<DMatrix<C64>> {
    let r = rows.len();
    let c = rows.first()?.len();
    if rows.iter().any(|row| row.len() != c) {
        return None;
    }
    Some(DMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn cvec_to_pairs(v: &DVector<C64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn cvec_from_pairs(pairs: &[[f64; 2]]) -> DVector<C64> {
    DVector::from_fn(pairs.len(), |i, _| C64::new(pairs[i][0], pairs[i][1]))
}
