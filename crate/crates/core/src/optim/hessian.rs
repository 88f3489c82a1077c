//! Matrix form of the Riemannian Hessian on the product of two
//! Grassmannians and the augmented Newton system.

use nalgebra::{DMatrix, DVector};

use crate::error::LinalgError;
use crate::manifold::{GrassmannPoint, ProductPoint, ProductTangent};
use crate::matops;

/// Relative singular-value cutoff for the Newton least-squares solve. A
/// system whose condition estimate exceeds `1 / NEWTON_RCOND` is singular.
pub const NEWTON_RCOND: f64 = 1e-13;

/// `Id_N ⊗ (Id - CCᵀS) S⁻¹`
fn projected_inverse(pt: &GrassmannPoint) -> DMatrix<f64> {
    let m = pt.metric();
    let d = pt.d();
    let proj = DMatrix::identity(d, d) - pt.c() * (pt.c().transpose() * m.s());
    matops::block_diag_repeat(pt.n(), &(proj * m.s_inv()))
}

/// Riemannian Hessian of the product cost as a (d₁N₁+d₂N₂)² matrix acting
/// on vectorized horizontal lifts.
///
/// The Euclidean Hessian is multiplied on the left by the block-diagonal
/// projected inverse metric, then `(grad_i)ᵀ C_i ⊗ Id_{d_i}` is subtracted
/// on each diagonal block.
pub fn assemble_riemannian_hessian(
    x: &ProductPoint,
    euc_grads: &(DMatrix<f64>, DMatrix<f64>),
    euc_hess: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n1 = x.first.c().len();
    let n2 = x.second.c().len();
    assert_eq!(
        euc_hess.shape(),
        (n1 + n2, n1 + n2),
        "euclidean Hessian has the wrong size"
    );

    let mut out = DMatrix::zeros(n1 + n2, n1 + n2);
    let p1 = projected_inverse(&x.first);
    let p2 = projected_inverse(&x.second);
    out.rows_mut(0, n1).copy_from(&(p1 * euc_hess.rows(0, n1)));
    out.rows_mut(n1, n2).copy_from(&(p2 * euc_hess.rows(n1, n2)));

    let d1 = x.first.d();
    let d2 = x.second.d();
    let k1 = matops::kron(&(euc_grads.0.transpose() * x.first.c()), &DMatrix::identity(d1, d1));
    let k2 = matops::kron(&(euc_grads.1.transpose() * x.second.c()), &DMatrix::identity(d2, d2));
    {
        let mut b = out.view_mut((0, 0), (n1, n1));
        b -= k1;
    }
    {
        let mut b = out.view_mut((n1, n1), (n2, n2));
        b -= k2;
    }
    out
}

/// Stacks the horizontality constraints `Id_{N_i} ⊗ C_iᵀS_i` under the
/// Riemannian Hessian and builds the right-hand side `(-grad, 0)`.
pub fn augment_system(
    x: &ProductPoint,
    riem_hess: &DMatrix<f64>,
    riem_grads: &ProductTangent,
) -> (DMatrix<f64>, DVector<f64>) {
    let n1 = x.first.c().len();
    let n2 = x.second.c().len();
    let m1 = x.first.n() * x.first.n();
    let m2 = x.second.n() * x.second.n();
    let hor1 = matops::block_diag_repeat(x.first.n(), &(x.first.c().transpose() * x.first.metric().s()));
    let hor2 = matops::block_diag_repeat(x.second.n(), &(x.second.c().transpose() * x.second.metric().s()));

    let mut a = DMatrix::zeros(n1 + n2 + m1 + m2, n1 + n2);
    a.view_mut((0, 0), (n1 + n2, n1 + n2)).copy_from(riem_hess);
    a.view_mut((n1 + n2, 0), (m1, n1)).copy_from(&hor1);
    a.view_mut((n1 + n2 + m1, n1), (m2, n2)).copy_from(&hor2);

    let mut b = DVector::zeros(n1 + n2 + m1 + m2);
    b.rows_mut(0, n1).copy_from(&(-matops::vec(&riem_grads.0)));
    b.rows_mut(n1, n2).copy_from(&(-matops::vec(&riem_grads.1)));
    (a, b)
}

/// Solves the augmented Newton system in the least-squares sense and
/// returns the (unprojected) step.
pub fn solve_newton_step(
    x: &ProductPoint,
    riem_hess: &DMatrix<f64>,
    riem_grads: &ProductTangent,
) -> Result<ProductTangent, LinalgError> {
    let (a, b) = augment_system(x, riem_hess, riem_grads);
    let (sol, cond) = matops::lstsq(&a, &b, NEWTON_RCOND)?;
    if cond.is_nan() || cond * NEWTON_RCOND >= 1.0 {
        return Err(LinalgError::Singular { cond });
    }
    let n1 = x.first.c().len();
    let eta1 = matops::unvec_slice(&sol.as_slice()[..n1], x.first.d(), x.first.n())?;
    let eta2 = matops::unvec_slice(&sol.as_slice()[n1..], x.second.d(), x.second.n())?;
    Ok((eta1, eta2))
}
