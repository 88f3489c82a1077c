use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::manifold::{GrassmannPoint, MetricBasis, ProductPoint};
use crate::matops;
use crate::optim::{CostModel, OptTrace, Phase, Status, StopCriteria};

/// Relative singular-value cutoff for the KKT solve. The KKT matrix is
/// exactly singular along antisymmetric multiplier directions, so the step
/// is the minimum-norm least-squares solution.
pub const KKT_RCOND: f64 = 1e-12;

/// Relative residual `|Hδ + ∇L| / |∇L|` above which the KKT system is
/// declared inconsistent.
const KKT_RESIDUAL_TOL: f64 = 1e-6;

/// Absolute residual allowance in units of `ε·|H|_F`. The symmetric
/// constraint makes the KKT matrix rank-deficient, so rounding noise in a
/// gradient near zero is never exactly in its range.
const KKT_NOISE_FLOOR: f64 = 1e3;

/// Lagrange multipliers for `C_αᵀSC_α = Id` and `C_βᵀSC_β = Id`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierState {
    pub eps_alpha: DMatrix<f64>,
    pub eps_beta: DMatrix<f64>,
}

impl MultiplierState {
    pub fn zeros(n_alpha: usize, n_beta: usize) -> Self {
        Self {
            eps_alpha: DMatrix::zeros(n_alpha, n_alpha),
            eps_beta: DMatrix::zeros(n_beta, n_beta),
        }
    }

    /// `ε = ½ CᵀG` per factor, exact at any stationary point.
    pub fn from_gradient(c: (&DMatrix<f64>, &DMatrix<f64>), euc_grads: &(DMatrix<f64>, DMatrix<f64>)) -> Self {
        Self {
            eps_alpha: c.0.transpose() * &euc_grads.0 * 0.5,
            eps_beta: c.1.transpose() * &euc_grads.1 * 0.5,
        }
    }

    fn len(&self) -> usize {
        self.eps_alpha.len() + self.eps_beta.len()
    }
}

/// `CᵀSC - Id`
pub fn constraint_residual(c: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    c.transpose() * s * c - DMatrix::identity(c.ncols(), c.ncols())
}

/// N²×dN matrix with `Jc vec(V) = vec(CᵀSV + VᵀSC)`.
pub fn constraint_jacobian(c: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.ncols();
    let cts = c.transpose() * s;
    let left = matops::block_diag_repeat(n, &cts);
    let blocks: Vec<DMatrix<f64>> = (0..n)
        .map(|j| {
            let mut e = DMatrix::zeros(n, 1);
            e[j] = 1.0;
            matops::kron(&cts, &e)
        })
        .collect();
    let refs: Vec<&DMatrix<f64>> = blocks.iter().collect();
    let right = if n == 0 {
        DMatrix::zeros(0, c.len())
    } else {
        matops::hstack(&refs).expect("blocks share a row count")
    };
    left + right
}

/// Gradient of `L = f - tr(ε_αᵀ c_α) - tr(ε_βᵀ c_β)` with respect to
/// `(vec C_α, vec C_β, vec ε_α, vec ε_β)`.
///
/// The orbital blocks are `G - Jcᵀ vec ε = G - SC(ε + εᵀ)`; the multiplier
/// blocks are the negated constraint residuals.
pub fn lagrangian_gradient(
    c: (&DMatrix<f64>, &DMatrix<f64>),
    mult: &MultiplierState,
    euc_grads: &(DMatrix<f64>, DMatrix<f64>),
    metrics: (&DMatrix<f64>, &DMatrix<f64>),
) -> DVector<f64> {
    let ga = &euc_grads.0 - metrics.0 * c.0 * (&mult.eps_alpha + mult.eps_alpha.transpose());
    let gb = &euc_grads.1 - metrics.1 * c.1 * (&mult.eps_beta + mult.eps_beta.transpose());
    let ra = -constraint_residual(c.0, metrics.0);
    let rb = -constraint_residual(c.1, metrics.1);
    let parts = [ga.as_slice(), gb.as_slice(), ra.as_slice(), rb.as_slice()];
    DVector::from_iterator(
        parts.iter().map(|p| p.len()).sum(),
        parts.into_iter().flatten().copied(),
    )
}

/// KKT matrix `[[∇²f - blockdiag((ε+εᵀ)⊗S), -Jcᵀ], [-Jc, 0]]`.
pub fn lagrangian_hessian(
    c: (&DMatrix<f64>, &DMatrix<f64>),
    mult: &MultiplierState,
    euc_hess: &DMatrix<f64>,
    metrics: (&DMatrix<f64>, &DMatrix<f64>),
) -> DMatrix<f64> {
    let (na, nb) = (c.0.len(), c.1.len());
    let (ma, mb) = (mult.eps_alpha.len(), mult.eps_beta.len());
    let n = na + nb + ma + mb;
    let mut h = DMatrix::zeros(n, n);
    h.view_mut((0, 0), (na + nb, na + nb)).copy_from(euc_hess);
    {
        let mut b = h.view_mut((0, 0), (na, na));
        b -= matops::kron(&(&mult.eps_alpha + mult.eps_alpha.transpose()), metrics.0);
    }
    {
        let mut b = h.view_mut((na, na), (nb, nb));
        b -= matops::kron(&(&mult.eps_beta + mult.eps_beta.transpose()), metrics.1);
    }
    let ja = constraint_jacobian(c.0, metrics.0);
    let jb = constraint_jacobian(c.1, metrics.1);
    h.view_mut((na + nb, 0), (ma, na)).copy_from(&(-&ja));
    h.view_mut((0, na + nb), (na, ma)).copy_from(&(-ja.transpose()));
    h.view_mut((na + nb + ma, na), (mb, nb)).copy_from(&(-&jb));
    h.view_mut((na, na + nb + ma), (nb, mb)).copy_from(&(-jb.transpose()));
    h
}

#[derive(Debug, Clone)]
pub struct NrlmResult {
    /// Final iterate. Not projected back onto the constraint set; call
    /// `reorthonormalize` before treating it as a Grassmann point.
    pub point: ProductPoint,
    pub mult: MultiplierState,
    pub trace: OptTrace,
}

/// Newton–Raphson on the stationarity system of the Lagrangian, updating
/// orbitals and multipliers together in the ambient space.
#[derive(Debug, Clone, Copy)]
pub struct Nrlm {
    pub crit: StopCriteria,
}

impl Nrlm {
    pub fn new(crit: StopCriteria) -> Self {
        Self { crit }
    }

    /// Runs from `x0`. Without `mult0` the multipliers start at `½CᵀG`.
    pub fn run<C: CostModel + ?Sized>(&self, cost: &C, x0: ProductPoint, mult0: Option<MultiplierState>) -> NrlmResult {
        let metric_a: Arc<MetricBasis> = x0.first.metric().clone();
        let metric_b: Arc<MetricBasis> = x0.second.metric().clone();
        let sa = metric_a.s();
        let sb = metric_b.s();
        let mut ca = x0.first.into_matrix();
        let mut cb = x0.second.into_matrix();
        let mut mult = mult0.unwrap_or_else(|| {
            let g = cost.euclidean_gradient(&ca, &cb);
            MultiplierState::from_gradient((&ca, &cb), &g)
        });
        assert_eq!(mult.eps_alpha.shape(), (ca.ncols(), ca.ncols()), "multiplier shape");
        assert_eq!(mult.eps_beta.shape(), (cb.ncols(), cb.ncols()), "multiplier shape");

        let mut trace = OptTrace::new();
        let mut l_prev = f64::INFINITY;
        let mut step_norm = 0.0;
        let mut k = 0;
        loop {
            let energy = cost.value(&ca, &cb);
            let euc_grads = cost.euclidean_gradient(&ca, &cb);
            let lagrangian = energy
                - mult.eps_alpha.dot(&constraint_residual(&ca, sa))
                - mult.eps_beta.dot(&constraint_residual(&cb, sb));
            let grad = lagrangian_gradient((&ca, &cb), &mult, &euc_grads, (sa, sb));
            let grad_norm = grad.norm();
            if !(lagrangian.is_finite() && grad_norm.is_finite()) {
                trace.fail(format!("non-finite Lagrangian or gradient at iteration {k}"));
                break;
            }
            trace.push(k, energy, grad_norm, step_norm, Phase::Lm);
            let status = if k > 0 && grad_norm <= self.crit.tol_grad {
                Some(Status::ConvergedGrad)
            } else if (l_prev - lagrangian).abs() <= self.crit.tol_val {
                Some(Status::ConvergedVal)
            } else if k >= self.crit.max_iter {
                Some(Status::MaxIter)
            } else {
                None
            };
            if let Some(status) = status {
                trace.finish(status);
                break;
            }

            let hess = lagrangian_hessian((&ca, &cb), &mult, &cost.euclidean_hessian(&ca, &cb), (sa, sb));
            let rhs = -&grad;
            let delta = match matops::lstsq(&hess, &rhs, KKT_RCOND) {
                Ok((delta, _))
                    if (&hess * &delta - &rhs).norm()
                        <= KKT_RESIDUAL_TOL * grad_norm + KKT_NOISE_FLOOR * f64::EPSILON * hess.norm() =>
                {
                    delta
                }
                Ok(_) => {
                    trace.fail(format!("singular KKT system at iteration {k}"));
                    break;
                }
                Err(e) => {
                    trace.fail(format!("KKT system at iteration {k}: {e}"));
                    break;
                }
            };
            let mut offset = 0;
            for m in [&mut ca, &mut cb, &mut mult.eps_alpha, &mut mult.eps_beta] {
                let len = m.len();
                for (dst, src) in m.as_mut_slice().iter_mut().zip(&delta.as_slice()[offset..offset + len]) {
                    *dst += src;
                }
                offset += len;
            }
            debug_assert_eq!(offset, ca.len() + cb.len() + mult.len());
            step_norm = delta.norm();
            l_prev = lagrangian;
            k += 1;
        }
        let point = ProductPoint::new(
            GrassmannPoint::new_unchecked(metric_a, ca),
            GrassmannPoint::new_unchecked(metric_b, cb),
        );
        NrlmResult { point, mult, trace }
    }
}

pub fn nrlm<C: CostModel + ?Sized>(
    cost: &C,
    x0: ProductPoint,
    mult0: Option<MultiplierState>,
    crit: StopCriteria,
) -> NrlmResult {
    Nrlm::new(crit).run(cost, x0, mult0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_jacobian_is_twice_the_coefficient() {
        let c = DMatrix::from_element(1, 1, 0.7);
        let j = constraint_jacobian(&c, &DMatrix::identity(1, 1));
        assert!((j[(0, 0)] - 1.4).abs() < 1e-15);
    }

    #[test]
    fn jacobian_of_zero_direction_is_zero() {
        let c = DMatrix::from_fn(3, 2, |i, j| (i + 2 * j) as f64 * 0.3);
        let j = constraint_jacobian(&c, &DMatrix::identity(3, 3));
        assert_eq!(j.shape(), (4, 6));
        assert_eq!(j * DVector::zeros(6), DVector::zeros(4));
    }

    #[test]
    fn zero_multipliers_leave_plain_gradient() {
        let c = DMatrix::from_fn(3, 1, |i, _| i as f64);
        let g = (DMatrix::from_fn(3, 1, |i, _| 1.0 + i as f64), DMatrix::zeros(3, 0));
        let s = DMatrix::identity(3, 3);
        let grad = lagrangian_gradient((&c, &g.1), &MultiplierState::zeros(1, 0), &g, (&s, &s));
        assert_eq!(&grad.as_slice()[..3], g.0.as_slice());
        // residual block: -(cᵀc - 1) = -(5 - 1)
        assert_eq!(grad[3], -4.0);
    }

    #[test]
    fn scalar_kkt_matrix() {
        // L(c, ε) = f(c) - ε(c² - 1) with f'' = 3: [[3 - 2ε, -2c], [-2c, 0]]
        let c = DMatrix::from_element(1, 1, 0.8);
        let e = DMatrix::zeros(1, 0);
        let s = DMatrix::identity(1, 1);
        let mult = MultiplierState {
            eps_alpha: DMatrix::from_element(1, 1, 0.25),
            eps_beta: DMatrix::zeros(0, 0),
        };
        let h = lagrangian_hessian((&c, &e), &mult, &DMatrix::from_element(1, 1, 3.0), (&s, &s));
        let expected = DMatrix::from_row_slice(2, 2, &[2.5, -1.6, -1.6, 0.0]);
        assert!((h - expected).norm() < 1e-15);
    }

    #[test]
    fn pure_constraint_kkt_when_multipliers_and_hessian_vanish() {
        let c = DMatrix::from_fn(2, 1, |i, _| 0.6 + 0.2 * i as f64);
        let e = DMatrix::zeros(2, 0);
        let s = DMatrix::identity(2, 2);
        let h = lagrangian_hessian((&c, &e), &MultiplierState::zeros(1, 0), &DMatrix::zeros(2, 2), (&s, &s));
        let j = constraint_jacobian(&c, &s);
        assert_eq!(h.view((0, 0), (2, 2)).clone_owned(), DMatrix::zeros(2, 2));
        assert_eq!(h.view((2, 0), (1, 2)).clone_owned(), -&j);
        assert_eq!(h.view((0, 2), (2, 1)).clone_owned(), -j.transpose());
        assert_eq!(h[(2, 2)], 0.0);
    }
}
