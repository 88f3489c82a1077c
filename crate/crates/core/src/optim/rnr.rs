use crate::manifold::ProductPoint;

use super::hessian::{assemble_riemannian_hessian, solve_newton_step};
use super::{
    check_stop, maybe_reorthonormalize, CostModel, Evaluation, OptTrace, Phase, StopCriteria, DEFAULT_REORTHO_EVERY,
};

/// Riemannian Newton–Raphson: solve `Hess f(x)[η] = -grad f(x)` on the
/// horizontal space and move along the geodesic to `exp_x(η)`.
#[derive(Debug, Clone, Copy)]
pub struct Rnr {
    pub crit: StopCriteria,
    pub reortho_every: usize,
}

impl Rnr {
    pub fn new(crit: StopCriteria) -> Self {
        Self {
            crit,
            reortho_every: DEFAULT_REORTHO_EVERY,
        }
    }

    pub fn run<C: CostModel + ?Sized>(&self, cost: &C, x0: ProductPoint) -> (ProductPoint, OptTrace) {
        let mut trace = OptTrace::new();
        let mut x = x0;
        let mut e_prev = f64::INFINITY;
        let mut step_norm = 0.0;
        let mut k = 0;
        loop {
            let eval = Evaluation::at(cost, &x);
            if !eval.is_finite() {
                trace.fail(format!("non-finite energy or gradient at iteration {k}"));
                break;
            }
            trace.push(k, eval.energy, eval.grad_norm, step_norm, Phase::Nr);
            if let Some(status) = check_stop(&eval, e_prev, k, &self.crit) {
                trace.finish(status);
                break;
            }
            let euc_hess = cost.euclidean_hessian(x.first.c(), x.second.c());
            let riem_hess = assemble_riemannian_hessian(&x, &eval.euc_grad, &euc_hess);
            let eta = match solve_newton_step(&x, &riem_hess, &eval.riem_grad) {
                Ok(eta) => x.project_horizontal(&eta),
                Err(e) => {
                    trace.fail(format!("newton system at iteration {k}: {e}"));
                    break;
                }
            };
            let next = match x.exp(&eta, 1.0) {
                Ok(next) => next,
                Err(e) => {
                    trace.fail(e.to_string());
                    break;
                }
            };
            step_norm = x.norm(&eta);
            e_prev = eval.energy;
            k += 1;
            x = match maybe_reorthonormalize(next, k, self.reortho_every) {
                Ok(x) => x,
                Err(e) => {
                    trace.fail(e);
                    break;
                }
            };
        }
        (x, trace)
    }
}

pub fn rnr<C: CostModel + ?Sized>(cost: &C, x0: ProductPoint, crit: StopCriteria) -> (ProductPoint, OptTrace) {
    Rnr::new(crit).run(cost, x0)
}
