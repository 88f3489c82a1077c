//! Riemannian optimizers on `Gr(N₁, d₁) × Gr(N₂, d₂)`: gradient descent,
//! Newton–Raphson, nonlinear conjugate gradient and the CG→Newton hybrid.

mod hessian;
mod hybrid;
mod rcg;
mod rgd;
mod rnr;

use std::fmt;
use std::time::Instant;

use nalgebra::DMatrix;

use crate::manifold::{ProductPoint, ProductTangent};

pub use hessian::{assemble_riemannian_hessian, augment_system, solve_newton_step, NEWTON_RCOND};
pub use hybrid::{hybrid, Hybrid};
pub use rcg::{linear_conjugate_gradient, rcg, CgVariant, LinearCgResult, Rcg};
pub use rgd::{rgd, Rgd};
pub use rnr::{rnr, Rnr};

/// Steps between Löwdin re-orthonormalizations of the iterate.
pub const DEFAULT_REORTHO_EVERY: usize = 50;

/// A cost on the product of two Grassmannians, given through an extension
/// to the ambient matrix spaces.
///
/// `value` must be invariant under `C_i ↦ C_i M` for orthogonal `M`. The
/// Hessian is the dense matrix of second partials in column-major
/// vectorization, laid out as `[[H₁₁, H₂₁ᵀ], [H₂₁, H₂₂]]`.
pub trait CostModel: Sync {
    fn value(&self, c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> f64;
    fn euclidean_gradient(&self, c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>);
    fn euclidean_hessian(&self, c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> DMatrix<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCriteria {
    pub max_iter: usize,
    pub tol_grad: f64,
    pub tol_val: f64,
}

impl StopCriteria {
    pub fn new(max_iter: usize) -> Self {
        Self {
            max_iter,
            ..Self::default()
        }
    }
}

impl Default for StopCriteria {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol_grad: 1e-8,
            tol_val: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    ConvergedGrad,
    ConvergedVal,
    MaxIter,
    NumericalFailure,
}

impl Status {
    pub fn is_converged(self) -> bool {
        matches!(self, Status::ConvergedGrad | Status::ConvergedVal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::ConvergedGrad => "converged_grad",
            Status::ConvergedVal => "converged_val",
            Status::MaxIter => "max_iter",
            Status::NumericalFailure => "numerical_failure",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which algorithm produced a trace record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Gd,
    Cg,
    Nr,
    Lm,
    Scf,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Gd => "gd",
            Phase::Cg => "cg",
            Phase::Nr => "nr",
            Phase::Lm => "nrlm",
            Phase::Scf => "scf",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
    /// Norm of the step that produced this iterate (0 for the start).
    pub step_norm: f64,
    /// Seconds since the run started.
    pub wall_time: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone)]
pub struct OptTrace {
    pub records: Vec<IterRecord>,
    status: Option<Status>,
    pub switch_iteration: Option<usize>,
    pub message: Option<String>,
    started: Instant,
}

impl Default for OptTrace {
    fn default() -> Self {
        Self::new()
    }
}

impl OptTrace {
    pub fn new() -> Self {
        Self {
            records: Vec::new(),
            status: None,
            switch_iteration: None,
            message: None,
            started: Instant::now(),
        }
    }

    pub fn push(&mut self, iter: usize, energy: f64, grad_norm: f64, step_norm: f64, phase: Phase) {
        debug_assert!(self.records.last().is_none_or(|r| r.iter < iter));
        self.records.push(IterRecord {
            iter,
            energy,
            grad_norm,
            step_norm,
            wall_time: self.started.elapsed().as_secs_f64(),
            phase,
        });
    }

    pub fn finish(&mut self, status: Status) {
        assert!(self.status.is_none(), "trace status set twice");
        self.status = Some(status);
    }

    pub(crate) fn fail(&mut self, msg: impl Into<String>) {
        self.message = Some(msg.into());
        self.finish(Status::NumericalFailure);
    }

    pub fn status(&self) -> Status {
        self.status.expect("trace has no final status")
    }

    pub fn last(&self) -> Option<&IterRecord> {
        self.records.last()
    }

    /// Number of steps taken, i.e. the index of the last record.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    /// Appends another trace, renumbering its records to continue after
    /// this one's last iteration.
    pub(crate) fn append(&mut self, other: OptTrace) {
        let offset = self.records.last().map_or(0, |r| r.iter);
        let skip = usize::from(!self.records.is_empty());
        let dt = other.started.saturating_duration_since(self.started).as_secs_f64();
        for mut rec in other.records.into_iter().skip(skip) {
            rec.iter += offset;
            rec.wall_time += dt;
            self.records.push(rec);
        }
        if other.message.is_some() {
            self.message = other.message;
        }
    }
}

/// Energy and gradients at one iterate.
pub(crate) struct Evaluation {
    pub energy: f64,
    pub euc_grad: (DMatrix<f64>, DMatrix<f64>),
    pub riem_grad: ProductTangent,
    pub grad_norm: f64,
}

impl Evaluation {
    pub fn at<C: CostModel + ?Sized>(cost: &C, x: &ProductPoint) -> Self {
        let energy = cost.value(x.first.c(), x.second.c());
        let euc_grad = cost.euclidean_gradient(x.first.c(), x.second.c());
        let riem_grad = (
            x.first.riemannian_gradient(&euc_grad.0),
            x.second.riemannian_gradient(&euc_grad.1),
        );
        let grad_norm = x.norm(&riem_grad);
        Self {
            energy,
            euc_grad,
            riem_grad,
            grad_norm,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.energy.is_finite() && self.grad_norm.is_finite()
    }
}

/// Shared stopping logic: checked after recording each iterate. The first
/// pass always runs (only `max_iter` can stop at `k = 0`), so a stationary
/// start is reported as one zero-length step.
pub(crate) fn check_stop(eval: &Evaluation, e_prev: f64, k: usize, crit: &StopCriteria) -> Option<Status> {
    if k > 0 && eval.grad_norm <= crit.tol_grad {
        Some(Status::ConvergedGrad)
    } else if (e_prev - eval.energy).abs() <= crit.tol_val {
        Some(Status::ConvergedVal)
    } else if k >= crit.max_iter {
        Some(Status::MaxIter)
    } else {
        None
    }
}

pub(crate) fn maybe_reorthonormalize(x: ProductPoint, steps: usize, every: usize) -> Result<ProductPoint, String> {
    if every > 0 && steps.is_multiple_of(every) {
        x.reorthonormalize().map_err(|e| e.to_string())
    } else {
        Ok(x)
    }
}
