//! Named algorithms behind a common interface, selected at run time.

use std::collections::BTreeMap;

use crate::baselines::{Nrlm, Scf};
use crate::hf::{IntegralSet, SpinPair};
use crate::manifold::{GrassmannPoint, ProductPoint};
use crate::optim::{CgVariant, Hybrid, OptTrace, Rcg, Rgd, Rnr, StopCriteria};

/// Settings shared by all algorithms. Each solver reads the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub step_size: f64,
    pub crit: StopCriteria,
    pub switch_grad_tol: f64,
    pub diis_window: usize,
}

pub struct SolveOutput {
    pub point: ProductPoint,
    pub trace: OptTrace,
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Default constant step, for algorithms that take one.
    fn default_step_size(&self) -> Option<f64> {
        None
    }

    fn default_max_iter(&self) -> usize;

    fn solve(&self, ints: &IntegralSet, x0: ProductPoint, params: &SolverParams) -> SolveOutput;
}

struct RgdSolver;

impl Solver for RgdSolver {
    fn name(&self) -> &'static str {
        "rgd"
    }

    fn default_step_size(&self) -> Option<f64> {
        Some(0.02)
    }

    fn default_max_iter(&self) -> usize {
        1000
    }

    fn solve(&self, ints: &IntegralSet, x0: ProductPoint, p: &SolverParams) -> SolveOutput {
        let (point, trace) = Rgd::new(p.step_size, p.crit).run(ints, x0);
        SolveOutput { point, trace }
    }
}

struct RcgSolver {
    name: &'static str,
    variant: CgVariant,
    step: f64,
}

impl Solver for RcgSolver {
    fn name(&self) -> &'static str {
        self.name
    }

    fn default_step_size(&self) -> Option<f64> {
        Some(self.step)
    }

    fn default_max_iter(&self) -> usize {
        300
    }

    fn solve(&self, ints: &IntegralSet, x0: ProductPoint, p: &SolverParams) -> SolveOutput {
        let (point, trace) = Rcg::new(p.step_size, self.variant, p.crit).run(ints, x0);
        SolveOutput { point, trace }
    }
}

struct RnrSolver;

impl Solver for RnrSolver {
    fn name(&self) -> &'static str {
        "rnr"
    }

    fn default_max_iter(&self) -> usize {
        50
    }

    fn solve(&self, ints: &IntegralSet, x0: ProductPoint, p: &SolverParams) -> SolveOutput {
        let (point, trace) = Rnr::new(p.crit).run(ints, x0);
        SolveOutput { point, trace }
    }
}

/// Conjugate gradient (Fletcher–Reeves) followed by Newton.
struct HybridSolver;

impl Solver for HybridSolver {
    fn name(&self) -> &'static str {
        "hybrid"
    }

    fn default_step_size(&self) -> Option<f64> {
        Some(0.01)
    }

    fn default_max_iter(&self) -> usize {
        300
    }

    fn solve(&self, ints: &IntegralSet, x0: ProductPoint, p: &SolverParams) -> SolveOutput {
        let h = Hybrid::new(p.step_size, CgVariant::FletcherReeves, p.switch_grad_tol, p.crit);
        let (point, trace) = h.run(ints, x0);
        SolveOutput { point, trace }
    }
}

struct NrlmSolver;

impl Solver for NrlmSolver {
    fn name(&self) -> &'static str {
        "nrlm"
    }

    fn default_max_iter(&self) -> usize {
        50
    }

    /// The final iterate is Löwdin orthonormalized once; if that fails the
    /// raw iterate is returned.
    fn solve(&self, ints: &IntegralSet, x0: ProductPoint, p: &SolverParams) -> SolveOutput {
        let res = Nrlm::new(p.crit).run(ints, x0, None);
        let point = res.point.reorthonormalize().unwrap_or(res.point);
        SolveOutput {
            point,
            trace: res.trace,
        }
    }
}

struct ScfSolver;

impl Solver for ScfSolver {
    fn name(&self) -> &'static str {
        "scf"
    }

    fn default_max_iter(&self) -> usize {
        50
    }

    fn solve(&self, ints: &IntegralSet, x0: ProductPoint, p: &SolverParams) -> SolveOutput {
        let (pair, trace) = Scf::new(p.diis_window, p.crit).run(ints, SpinPair::from_product(x0));
        let point = ProductPoint::new(
            GrassmannPoint::new_unchecked(ints.metric().clone(), pair.c_alpha),
            GrassmannPoint::new_unchecked(ints.metric().clone(), pair.c_beta),
        );
        SolveOutput { point, trace }
    }
}

/// Solvers keyed by name.
#[derive(Default)]
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Box<dyn Solver>>,
}

impl SolverRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `rgd`, `rcg-fr`, `rcg-pr`, `rnr`, `hybrid`, `nrlm` and `scf`.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Box::new(RgdSolver));
        r.register(Box::new(RcgSolver {
            name: "rcg-fr",
            variant: CgVariant::FletcherReeves,
            step: 0.01,
        }));
        r.register(Box::new(RcgSolver {
            name: "rcg-pr",
            variant: CgVariant::PolakRibiere,
            step: 0.07,
        }));
        r.register(Box::new(RnrSolver));
        r.register(Box::new(HybridSolver));
        r.register(Box::new(NrlmSolver));
        r.register(Box::new(ScfSolver));
        r
    }

    /// Adds a solver, replacing any with the same name.
    pub fn register(&mut self, solver: Box<dyn Solver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Solver> {
        self.solvers.get(name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.solvers.keys().copied()
    }
}
