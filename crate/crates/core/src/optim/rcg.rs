use nalgebra::DVector;

use crate::manifold::{ProductPoint, ProductTangent};

use super::{
    check_stop, maybe_reorthonormalize, CostModel, Evaluation, OptTrace, Phase, StopCriteria, DEFAULT_REORTHO_EVERY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgVariant {
    FletcherReeves,
    PolakRibiere,
}

/// Riemannian nonlinear conjugate gradient with a constant step.
///
/// The direction is reset to steepest descent whenever the iteration count
/// is a multiple of the manifold dimension `N₁(d₁-N₁) + N₂(d₂-N₂)`,
/// including the first iteration. The previous direction (and, for
/// Polak–Ribière, the previous gradient) is parallel transported along the
/// step geodesic using the same SVD as the step itself.
#[derive(Debug, Clone, Copy)]
pub struct Rcg {
    pub step_size: f64,
    pub variant: CgVariant,
    pub crit: StopCriteria,
    pub reortho_every: usize,
}

impl Rcg {
    pub fn new(step_size: f64, variant: CgVariant, crit: StopCriteria) -> Self {
        Self {
            step_size,
            variant,
            crit,
            reortho_every: DEFAULT_REORTHO_EVERY,
        }
    }

    pub fn run<C: CostModel + ?Sized>(&self, cost: &C, x0: ProductPoint) -> (ProductPoint, OptTrace) {
        assert!(self.step_size > 0.0, "step size must be positive");
        let t = self.step_size;
        let dim = x0.manifold_dim().max(1);
        let mut trace = OptTrace::new();
        let mut x = x0;
        let mut eval = Evaluation::at(cost, &x);
        let mut dir: ProductTangent = (-&eval.riem_grad.0, -&eval.riem_grad.1);
        let mut e_prev = f64::INFINITY;
        let mut step_norm = 0.0;
        let mut k = 0;
        loop {
            if !eval.is_finite() {
                trace.fail(format!("non-finite energy or gradient at iteration {k}"));
                break;
            }
            trace.push(k, eval.energy, eval.grad_norm, step_norm, Phase::Cg);
            if let Some(status) = check_stop(&eval, e_prev, k, &self.crit) {
                trace.finish(status);
                break;
            }
            if k % dim == 0 {
                dir = (-&eval.riem_grad.0, -&eval.riem_grad.1);
            }

            let plans = match (x.first.geodesic_plan(&dir.0), x.second.geodesic_plan(&dir.1)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    trace.fail(e.to_string());
                    break;
                }
            };
            let next = ProductPoint::new(plans.0.point(t), plans.1.point(t));
            let moved_dir = (plans.0.transport(&dir.0, t), plans.1.transport(&dir.1, t));
            let next_eval = Evaluation::at(cost, &next);

            let g_sq = eval.grad_norm * eval.grad_norm;
            let alpha = match self.variant {
                CgVariant::FletcherReeves => next_eval.grad_norm * next_eval.grad_norm / g_sq,
                CgVariant::PolakRibiere => {
                    let moved_grad = (
                        plans.0.transport(&eval.riem_grad.0, t),
                        plans.1.transport(&eval.riem_grad.1, t),
                    );
                    let diff = (
                        &next_eval.riem_grad.0 - &moved_grad.0,
                        &next_eval.riem_grad.1 - &moved_grad.1,
                    );
                    next.inner(&diff, &next_eval.riem_grad) / g_sq
                }
            };

            step_norm = t * x.norm(&dir);
            e_prev = eval.energy;
            k += 1;
            x = match maybe_reorthonormalize(next, k, self.reortho_every) {
                Ok(x) => x,
                Err(e) => {
                    trace.fail(e);
                    break;
                }
            };
            let raw = (
                &moved_dir.0 * alpha - &next_eval.riem_grad.0,
                &moved_dir.1 * alpha - &next_eval.riem_grad.1,
            );
            dir = x.project_horizontal(&raw);
            eval = next_eval;
        }
        (x, trace)
    }
}

pub fn rcg<C: CostModel + ?Sized>(
    cost: &C,
    x0: ProductPoint,
    step_size: f64,
    variant: CgVariant,
    crit: StopCriteria,
) -> (ProductPoint, OptTrace) {
    Rcg::new(step_size, variant, crit).run(cost, x0)
}

#[derive(Debug, Clone)]
pub struct LinearCgResult {
    pub x: DVector<f64>,
    pub steps: usize,
    pub residual_norm: f64,
}

/// Linear conjugate gradient for `H x = -g` with a self-adjoint `H` under
/// `inner`, using Fletcher–Reeves conjugation and the expansion coefficient
/// `α_k = ⟨v_k, b⟩ / ⟨v_k, H v_k⟩` with `b = -g`.
///
/// The numerator is evaluated as `⟨v_k, r_k⟩`, equal to `⟨v_k, b⟩` by
/// conjugacy. With `b` itself rounding errors accumulate to around 1e-5 on
/// 12×12 systems of condition 10.
pub fn linear_conjugate_gradient(
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
    inner: impl Fn(&DVector<f64>, &DVector<f64>) -> f64,
    g: &DVector<f64>,
    tol: f64,
    max_steps: usize,
) -> LinearCgResult {
    let mut x = DVector::zeros(g.len());
    let mut r = -g;
    let mut v = r.clone();
    let mut rr = inner(&r, &r);
    let mut steps = 0;
    while steps < max_steps && rr.sqrt() > tol {
        let hv = apply(&v);
        let alpha = inner(&v, &r) / inner(&v, &hv);
        x.axpy(alpha, &v, 1.0);
        r.axpy(-alpha, &hv, 1.0);
        let rr_next = inner(&r, &r);
        let beta = rr_next / rr;
        v = &r + &v * beta;
        rr = rr_next;
        steps += 1;
    }
    LinearCgResult {
        x,
        steps,
        residual_norm: rr.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::super::testing::{diag3, start_gr13};
    use super::super::Status;
    use super::*;

    #[test]
    fn rayleigh_converges_for_both_variants() {
        let cost = diag3();
        for variant in [CgVariant::FletcherReeves, CgVariant::PolakRibiere] {
            let crit = StopCriteria {
                max_iter: 2000,
                tol_grad: 1e-8,
                tol_val: 0.0,
            };
            let (x, trace) = rcg(&cost, start_gr13(21), 0.1, variant, crit);
            assert!(trace.status().is_converged(), "{variant:?}");
            assert!(trace.last().unwrap().grad_norm < 1e-7);
            assert!((trace.last().unwrap().energy - 2.0).abs() < 1e-8);
            assert!(x.max_feasibility_residual() < 1e-8);
        }
    }

    #[test]
    fn constant_cost_terminates_before_alpha() {
        let x0 = start_gr13(1);
        let (_, trace) = rcg(
            &super::super::testing::Constant,
            x0,
            0.01,
            CgVariant::FletcherReeves,
            StopCriteria::default(),
        );
        assert_eq!(trace.status(), Status::ConvergedGrad);
        assert_eq!(trace.iterations(), 1);
    }

    #[test]
    fn linear_cg_solves_spd_system() {
        let n = 8;
        let a = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let h = &a * a.transpose() + DMatrix::identity(n, n);
        let g = DVector::from_fn(n, |i, _| (i as f64).sin());
        let res = linear_conjugate_gradient(|v| &h * v, |a, b| a.dot(b), &g, 1e-12, n);
        assert!(res.steps <= n);
        assert!((&h * &res.x + &g).norm() < 1e-9);
    }

    #[test]
    fn linear_cg_with_metric_inner_product() {
        // S⁻¹A is self-adjoint under ⟨u, v⟩ = uᵀSv
        let n = 6;
        let s = DMatrix::from_fn(n, n, |i, j| if i == j { 1.5 } else { 0.1 / (1 + i + j) as f64 });
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 + i as f64 } else { 0.2 });
        let h = s.clone().try_inverse().unwrap() * &a;
        let g = DVector::from_fn(n, |i, _| (i as f64).cos());
        let res = linear_conjugate_gradient(|v| &h * v, |u, v| u.dot(&(&s * v)), &g, 1e-13, n);
        assert!(res.steps <= n);
        assert!((&h * &res.x + &g).norm() < 1e-9);
    }
}
