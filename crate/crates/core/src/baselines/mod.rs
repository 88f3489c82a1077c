//! Euclidean comparison methods: Newton–Raphson on the Lagrangian of the
//! orthonormality constraints, and self-consistent field iteration with DIIS.

mod nrlm;
mod scf;

pub use nrlm::{
    constraint_jacobian, constraint_residual, lagrangian_gradient, lagrangian_hessian, nrlm, MultiplierState, Nrlm,
    NrlmResult, KKT_RCOND,
};
pub(crate) use scf::occupied_orbitals;
pub use scf::{scf_diis, DiisHistory, Scf, DEGENERACY_TOL};
