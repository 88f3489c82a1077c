use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("{op}: shape mismatch: {detail}")]
    Shape { op: &'static str, detail: String },
    #[error("{op}: non-finite input")]
    NonFinite { op: &'static str },
    #[error("{op}: factorization did not converge (input norm {norm:e})")]
    NoConvergence { op: &'static str, norm: f64 },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite (eigenvalue {eigenvalue:e} at index {index})")]
    NotPositiveDefinite { index: usize, eigenvalue: f64 },
    #[error("linear system is singular (condition estimate {cond:e})")]
    Singular { cond: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifoldError {
    #[error("point is off the manifold: |CᵀSC - I| = {residual:e}")]
    Infeasible { residual: f64 },
    #[error("tangent is not horizontal: |CᵀSη| = {residual:e}")]
    NotHorizontal { residual: f64 },
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("representative is rank deficient (smallest Gram eigenvalue {min_eigenvalue:e})")]
    RankDeficient { min_eigenvalue: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegralError {
    #[error("{what} has shape {got:?}, expected {expected:?}")]
    Shape {
        what: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("{what} is not symmetric: entry ({}, {}) differs from its transpose by {magnitude:e}", i + 1, j + 1)]
    NotSymmetric {
        what: &'static str,
        i: usize,
        j: usize,
        magnitude: f64,
    },
    #[error(
        "two-electron tensor breaks 8-fold symmetry: g[{},{},{},{}] and g[{},{},{},{}] differ by {magnitude:e}",
        first[0] + 1, first[1] + 1, first[2] + 1, first[3] + 1,
        second[0] + 1, second[1] + 1, second[2] + 1, second[3] + 1
    )]
    TensorSymmetry {
        first: [usize; 4],
        second: [usize; 4],
        magnitude: f64,
    },
    #[error("electron counts na = {n_alpha}, nb = {n_beta} are invalid for basis size {d}")]
    ElectronCount { d: usize, n_alpha: usize, n_beta: usize },
    #[error("overlap matrix: {0}")]
    Overlap(LinalgError),
}
