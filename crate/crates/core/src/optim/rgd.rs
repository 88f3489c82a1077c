use crate::manifold::ProductPoint;

use super::{
    check_stop, maybe_reorthonormalize, CostModel, Evaluation, OptTrace, Phase, StopCriteria, DEFAULT_REORTHO_EVERY,
};

/// Riemannian gradient descent with a constant step: `x ← exp_x(-t grad f(x))`.
#[derive(Debug, Clone, Copy)]
pub struct Rgd {
    pub step_size: f64,
    pub crit: StopCriteria,
    pub reortho_every: usize,
}

impl Rgd {
    pub fn new(step_size: f64, crit: StopCriteria) -> Self {
        Self {
            step_size,
            crit,
            reortho_every: DEFAULT_REORTHO_EVERY,
        }
    }

    pub fn run<C: CostModel + ?Sized>(&self, cost: &C, x0: ProductPoint) -> (ProductPoint, OptTrace) {
        assert!(self.step_size > 0.0, "step size must be positive");
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
            trace.push(k, eval.energy, eval.grad_norm, step_norm, Phase::Gd);
            if let Some(status) = check_stop(&eval, e_prev, k, &self.crit) {
                trace.finish(status);
                break;
            }
            let dir = (-&eval.riem_grad.0, -&eval.riem_grad.1);
            let next = match x.exp(&dir, self.step_size) {
                Ok(next) => next,
                Err(e) => {
                    trace.fail(e.to_string());
                    break;
                }
            };
            step_norm = self.step_size * eval.grad_norm;
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

pub fn rgd<C: CostModel + ?Sized>(
    cost: &C,
    x0: ProductPoint,
    step_size: f64,
    crit: StopCriteria,
) -> (ProductPoint, OptTrace) {
    Rgd::new(step_size, crit).run(cost, x0)
}
