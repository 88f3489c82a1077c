use crate::manifold::ProductPoint;

use super::rcg::{CgVariant, Rcg};
use super::rnr::Rnr;
use super::{CostModel, Evaluation, OptTrace, Status, StopCriteria, DEFAULT_REORTHO_EVERY};

/// Conjugate gradient until the gradient norm drops below `switch_grad_tol`,
/// then Newton–Raphson from that point.
///
/// If the Newton phase fails or runs out of iterations, its records are
/// discarded and conjugate gradient resumes from the switch point with the
/// remaining budget.
#[derive(Debug, Clone, Copy)]
pub struct Hybrid {
    pub cg_step: f64,
    pub variant: CgVariant,
    pub switch_grad_tol: f64,
    /// `max_iter` bounds the conjugate-gradient phase; the tolerances apply
    /// to the final answer.
    pub crit: StopCriteria,
    pub nr_max_iter: usize,
    pub reortho_every: usize,
}

impl Hybrid {
    pub fn new(cg_step: f64, variant: CgVariant, switch_grad_tol: f64, crit: StopCriteria) -> Self {
        Self {
            cg_step,
            variant,
            switch_grad_tol,
            crit,
            nr_max_iter: 50,
            reortho_every: DEFAULT_REORTHO_EVERY,
        }
    }

    fn cg(&self, crit: StopCriteria) -> Rcg {
        Rcg {
            step_size: self.cg_step,
            variant: self.variant,
            crit,
            reortho_every: self.reortho_every,
        }
    }

    pub fn run<C: CostModel + ?Sized>(&self, cost: &C, x0: ProductPoint) -> (ProductPoint, OptTrace) {
        let switch_crit = StopCriteria {
            max_iter: self.crit.max_iter,
            tol_grad: self.switch_grad_tol.max(self.crit.tol_grad),
            tol_val: 0.0,
        };
        // a start already inside the Newton region skips the CG phase
        let (x_switch, cg_trace) = if Evaluation::at(cost, &x0).grad_norm <= switch_crit.tol_grad {
            let mut t = OptTrace::new();
            t.finish(Status::ConvergedGrad);
            (x0, t)
        } else {
            self.cg(switch_crit).run(cost, x0)
        };
        if cg_trace.status() != Status::ConvergedGrad {
            return (x_switch, cg_trace);
        }
        let switch_at = cg_trace.iterations();
        if cg_trace.last().is_some_and(|r| r.grad_norm <= self.crit.tol_grad) {
            let mut trace = cg_trace;
            trace.switch_iteration = Some(switch_at);
            return (x_switch, trace);
        }

        let nr_crit = StopCriteria {
            max_iter: self.nr_max_iter,
            ..self.crit
        };
        let nr = Rnr {
            crit: nr_crit,
            reortho_every: self.reortho_every,
        };
        let (x_nr, nr_trace) = nr.run(cost, x_switch.clone());
        if nr_trace.status().is_converged() {
            let status = nr_trace.status();
            let mut trace = if switch_at == 0 {
                OptTrace::new()
            } else {
                strip_status(cg_trace)
            };
            trace.append(nr_trace);
            trace.switch_iteration = Some(switch_at);
            trace.finish(status);
            return (x_nr, trace);
        }

        log::warn!(
            "newton phase ended with {} after switching at iteration {switch_at}; resuming conjugate gradient",
            nr_trace.status()
        );
        let rest = StopCriteria {
            max_iter: self.crit.max_iter.saturating_sub(switch_at),
            ..self.crit
        };
        let (x_cg, cg_rest) = self.cg(rest).run(cost, x_switch);
        let status = cg_rest.status();
        let mut trace = strip_status(cg_trace);
        trace.append(cg_rest);
        trace.switch_iteration = Some(switch_at);
        if trace.message.is_none() {
            trace.message = Some(format!("newton phase ended with {}", nr_trace.status()));
        }
        trace.finish(status);
        (x_cg, trace)
    }
}

fn strip_status(trace: OptTrace) -> OptTrace {
    let mut out = OptTrace {
        records: trace.records,
        ..OptTrace::new()
    };
    out.started = trace.started;
    out
}

pub fn hybrid<C: CostModel + ?Sized>(
    cost: &C,
    x0: ProductPoint,
    cg_step: f64,
    variant: CgVariant,
    switch_grad_tol: f64,
    crit: StopCriteria,
) -> (ProductPoint, OptTrace) {
    Hybrid::new(cg_step, variant, switch_grad_tol, crit).run(cost, x0)
}
