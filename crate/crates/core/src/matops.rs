//! Dense-matrix helpers: column-major vectorization, Kronecker products,
//! stacking, a thin SVD in the `U·D·V` convention and SPD factorization.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::LinalgError;

/// Frobenius norm below which [`thin_svd`] short-circuits to the zero decomposition.
pub const SVD_ZERO_THRESHOLD: f64 = 1e-14;

/// Column-major vectorization: `out[i + rows * j] = a[(i, j)]`.
pub fn vec(a: &DMatrix<f64>) -> DVector<f64> {
    // nalgebra storage is already column-major.
    DVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec`].
pub fn unvec(v: &DVector<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>, LinalgError> {
    unvec_slice(v.as_slice(), rows, cols)
}

pub fn unvec_slice(v: &[f64], rows: usize, cols: usize) -> Result<DMatrix<f64>, LinalgError> {
    if v.len() != rows * cols {
        return Err(LinalgError::Shape {
            op: "unvec",
            detail: format!("vector of length {} cannot be reshaped to {rows}x{cols}", v.len()),
        });
    }
    Ok(DMatrix::from_column_slice(rows, cols, v))
}

/// Kronecker product; block `(i, j)` of the result is `a[(i, j)] * b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (k, l) = a.shape();
    let (p, q) = b.shape();
    let mut out = DMatrix::zeros(k * p, l * q);
    for j in 0..l {
        for i in 0..k {
            let aij = a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            for bj in 0..q {
                for bi in 0..p {
                    out[(i * p + bi, j * q + bj)] = aij * b[(bi, bj)];
                }
            }
        }
    }
    out
}

/// `Id_n ⊗ m`, the block-diagonal matrix with `n` copies of `m`.
pub fn block_diag_repeat(n: usize, m: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(n * r, n * c);
    for b in 0..n {
        out.view_mut((b * r, b * c), (r, c)).copy_from(m);
    }
    out
}

pub fn hstack(blocks: &[&DMatrix<f64>]) -> Result<DMatrix<f64>, LinalgError> {
    let Some(first) = blocks.first() else {
        return Ok(DMatrix::zeros(0, 0));
    };
    let rows = first.nrows();
    if let Some((idx, bad)) = blocks.iter().enumerate().find(|(_, b)| b.nrows() != rows) {
        return Err(LinalgError::Shape {
            op: "hstack",
            detail: format!("block {idx} has {} rows, expected {rows}", bad.nrows()),
        });
    }
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), b.shape()).copy_from(*b);
        at += b.ncols();
    }
    Ok(out)
}

pub fn vstack(blocks: &[&DMatrix<f64>]) -> Result<DMatrix<f64>, LinalgError> {
    let Some(first) = blocks.first() else {
        return Ok(DMatrix::zeros(0, 0));
    };
    let cols = first.ncols();
    if let Some((idx, bad)) = blocks.iter().enumerate().find(|(_, b)| b.ncols() != cols) {
        return Err(LinalgError::Shape {
            op: "vstack",
            detail: format!("block {idx} has {} columns, expected {cols}", bad.ncols()),
        });
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, 0), b.shape()).copy_from(*b);
        at += b.nrows();
    }
    Ok(out)
}

/// Thin SVD written as `M = U · diag(d) · V` with `V` orthogonal (not transposed).
#[derive(Debug, Clone)]
pub struct ThinSvd {
    /// d×N, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Singular values, descending.
    pub d: DVector<f64>,
    /// N×N orthogonal.
    pub v: DMatrix<f64>,
}

impl ThinSvd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.d) * &self.v
    }
}

/// Thin SVD of a d×N matrix with d ≥ N.
pub fn thin_svd(m: &DMatrix<f64>) -> Result<ThinSvd, LinalgError> {
    let (d, n) = m.shape();
    if d < n {
        return Err(LinalgError::Shape {
            op: "thin_svd",
            detail: format!("expected rows >= cols, got {d}x{n}"),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite { op: "thin_svd" });
    }
    let norm = m.norm();
    if n == 0 || norm < SVD_ZERO_THRESHOLD {
        return Ok(ThinSvd {
            u: DMatrix::identity(d, n),
            d: DVector::zeros(n),
            v: DMatrix::identity(n, n),
        });
    }
    // nalgebra's bidiagonal SVD can return a wrong factorization of a
    // rank-deficient matrix, which is the common case for O⁻¹η when d < 2N.
    let svd = faer::Mat::<f64>::from_fn(d, n, |i, j| m[(i, j)])
        .thin_svd()
        .map_err(|_| LinalgError::NoConvergence { op: "thin_svd", norm })?;
    let (u, sv, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let u = DMatrix::from_fn(d, n, |i, j| u[(i, order[j])]);
    let sv = DVector::from_fn(n, |j, _| sv[order[j]]);
    let v = DMatrix::from_fn(n, n, |i, j| v[(j, order[i])]);
    Ok(ThinSvd { u, d: sv, v })
}

/// Factor `O` with `OᵀSO = Id`, built from the Cholesky factor `S = LLᵀ` as `O = L⁻ᵀ`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    pub o: DMatrix<f64>,
    pub o_inv: DMatrix<f64>,
    /// Lower Cholesky factor of S.
    pub l: DMatrix<f64>,
}

impl SpdFactor {
    /// Solves `S x = b` through the triangular factors.
    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let y = self
            .l
            .solve_lower_triangular(b)
            .expect("cholesky factor has a nonzero diagonal");
        self.l
            .transpose()
            .solve_upper_triangular(&y)
            .expect("cholesky factor has a nonzero diagonal")
    }
}

pub fn spd_factor(s: &DMatrix<f64>) -> Result<SpdFactor, LinalgError> {
    let (r, c) = s.shape();
    if r != c {
        return Err(LinalgError::Shape {
            op: "spd_factor",
            detail: format!("matrix is {r}x{c}"),
        });
    }
    let asym = (s - s.transpose()).norm();
    if asym > 1e-12 * (1.0 + s.norm()) {
        return Err(LinalgError::NotSymmetric { asymmetry: asym });
    }
    let chol = s.clone().cholesky().ok_or_else(|| {
        let eig = SymmetricEigen::new(s.clone());
        let (idx, val) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, f64::NAN));
        LinalgError::NotPositiveDefinite {
            index: idx,
            eigenvalue: val,
        }
    })?;
    let l = chol.l();
    let o_inv = l.transpose();
    let o = o_inv.clone().try_inverse().ok_or(LinalgError::NotPositiveDefinite {
        index: 0,
        eigenvalue: 0.0,
    })?;
    Ok(SpdFactor { o, o_inv, l })
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vecs = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Solves `F c = λ S c` given the factor of `S`; returns ascending eigenvalues and
/// S-orthonormal eigenvectors as columns.
pub fn generalized_symmetric_eigen(
    f: &DMatrix<f64>,
    factor: &SpdFactor,
) -> Result<(DVector<f64>, DMatrix<f64>), LinalgError> {
    if f.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite {
            op: "generalized_symmetric_eigen",
        });
    }
    let reduced = factor.o.transpose() * f * &factor.o;
    let (vals, y) = sorted_symmetric_eigen(&reduced);
    Ok((vals, &factor.o * y))
}

/// Minimum-norm least-squares solution of `a x = b` via SVD.
///
/// Singular values below `rcond * σ_max` are treated as zero. Returns the
/// solution together with the condition estimate `σ_max / σ_min` over the
/// full spectrum.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> Result<(DVector<f64>, f64), LinalgError> {
    if a.nrows() != b.len() {
        return Err(LinalgError::Shape {
            op: "lstsq",
            detail: format!("matrix has {} rows, rhs has {}", a.nrows(), b.len()),
        });
    }
    if a.ncols() == 0 {
        return Ok((DVector::zeros(0), 1.0));
    }
    if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite { op: "lstsq" });
    }
    let svd = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
        .thin_svd()
        .map_err(|_| LinalgError::NoConvergence {
            op: "lstsq",
            norm: a.norm(),
        })?;
    let (u, sv, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = sv.nrows();
    let smax = (0..k).map(|i| sv[i]).fold(0.0, f64::max);
    let smin = (0..k).map(|i| sv[i]).fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let mut x = DVector::zeros(a.ncols());
    for i in (0..k).filter(|&i| sv[i] > rcond * smax) {
        let coef = (0..a.nrows()).map(|r| u[(r, i)] * b[r]).sum::<f64>() / sv[i];
        for c in 0..a.ncols() {
            x[c] += coef * v[(c, i)];
        }
    }
    Ok((x, cond))
}
