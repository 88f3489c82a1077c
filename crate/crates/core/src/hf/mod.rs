//! Unrestricted Hartree–Fock energy as a cost on `Gr(N_α, d) × Gr(N_β, d)`.
//!
//! All functions taking orbital matrices evaluate the polynomial extension
//! of the energy to arbitrary d×N matrices, so they are valid off the
//! manifold too. Energies are in hartree.

mod hessian;
mod tensor;

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{IntegralError, ManifoldError};
use crate::manifold::{GrassmannPoint, MetricBasis, ProductPoint};
use crate::optim::CostModel;

pub use hessian::euclidean_hessian;
pub use tensor::{symmetry_orbit, TwoElectron};

/// Entrywise tolerance for the symmetry of `h`, `S` and `g`.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Alpha,
    Beta,
}

/// Overlap, one- and two-electron integrals, nuclear repulsion and electron
/// counts of one problem. Immutable once built.
#[derive(Debug, Clone)]
pub struct IntegralSet {
    h: DMatrix<f64>,
    g: TwoElectron,
    e_nuc: f64,
    n_alpha: usize,
    n_beta: usize,
    metric: Arc<MetricBasis>,
}

fn worst_asymmetry(m: &DMatrix<f64>) -> (usize, usize, f64) {
    let mut worst = (0, 0, 0.0);
    for j in 0..m.ncols() {
        for i in 0..j {
            let diff = (m[(i, j)] - m[(j, i)]).abs();
            if diff > worst.2 {
                worst = (i, j, diff);
            }
        }
    }
    worst
}

impl IntegralSet {
    pub fn new(
        s: DMatrix<f64>,
        h: DMatrix<f64>,
        g: TwoElectron,
        e_nuc: f64,
        n_alpha: usize,
        n_beta: usize,
    ) -> Result<Self, IntegralError> {
        let d = s.nrows();
        for (what, m) in [("overlap", &s), ("one-electron matrix", &h)] {
            if m.shape() != (d, d) {
                return Err(IntegralError::Shape {
                    what,
                    expected: (d, d),
                    got: m.shape(),
                });
            }
            let (i, j, magnitude) = worst_asymmetry(m);
            if magnitude > SYMMETRY_TOL {
                return Err(IntegralError::NotSymmetric { what, i, j, magnitude });
            }
        }
        if g.d() != d {
            return Err(IntegralError::Shape {
                what: "two-electron tensor",
                expected: (d, d),
                got: (g.d(), g.d()),
            });
        }
        if let Some((first, second, magnitude)) = g.worst_symmetry_violation() {
            if magnitude > SYMMETRY_TOL {
                return Err(IntegralError::TensorSymmetry {
                    first,
                    second,
                    magnitude,
                });
            }
        }
        if n_alpha == 0 || n_alpha > d || n_beta > d {
            return Err(IntegralError::ElectronCount { d, n_alpha, n_beta });
        }
        let metric = MetricBasis::new(s).map_err(IntegralError::Overlap)?;
        Ok(Self {
            h,
            g,
            e_nuc,
            n_alpha,
            n_beta,
            metric: Arc::new(metric),
        })
    }

    pub fn d(&self) -> usize {
        self.h.nrows()
    }

    pub fn s(&self) -> &DMatrix<f64> {
        self.metric.s()
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn g(&self) -> &TwoElectron {
        &self.g
    }

    pub fn e_nuc(&self) -> f64 {
        self.e_nuc
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn n_electrons(&self, spin: Spin) -> usize {
        match spin {
            Spin::Alpha => self.n_alpha,
            Spin::Beta => self.n_beta,
        }
    }

    /// The overlap as a metric, shared by both spin factors.
    pub fn metric(&self) -> &Arc<MetricBasis> {
        &self.metric
    }
}

/// Feasible α and β orbital coefficients.
#[derive(Debug, Clone)]
pub struct SpinPair {
    pub c_alpha: DMatrix<f64>,
    pub c_beta: DMatrix<f64>,
}

impl SpinPair {
    pub fn new(ints: &IntegralSet, c_alpha: DMatrix<f64>, c_beta: DMatrix<f64>) -> Result<Self, ManifoldError> {
        let x = Self { c_alpha, c_beta }.into_product(ints)?;
        Ok(Self::from_product(x))
    }

    pub fn into_product(self, ints: &IntegralSet) -> Result<ProductPoint, ManifoldError> {
        for (c, n) in [(&self.c_alpha, ints.n_alpha), (&self.c_beta, ints.n_beta)] {
            if c.shape() != (ints.d(), n) {
                return Err(ManifoldError::ShapeMismatch {
                    expected: (ints.d(), n),
                    got: c.shape(),
                });
            }
        }
        let first = GrassmannPoint::new(ints.metric.clone(), self.c_alpha)?;
        let second = GrassmannPoint::new(ints.metric.clone(), self.c_beta)?;
        Ok(ProductPoint::new(first, second))
    }

    pub fn from_product(x: ProductPoint) -> Self {
        Self {
            c_alpha: x.first.into_matrix(),
            c_beta: x.second.into_matrix(),
        }
    }

    pub fn energy(&self, ints: &IntegralSet) -> f64 {
        energy(ints, &self.c_alpha, &self.c_beta)
    }
}

/// `P = CCᵀ`
pub fn density(c: &DMatrix<f64>) -> DMatrix<f64> {
    c * c.transpose()
}

/// `F^γ = h + J(P^α + P^β) - K(P^γ)`
pub fn fock(p_alpha: &DMatrix<f64>, p_beta: &DMatrix<f64>, spin: Spin, ints: &IntegralSet) -> DMatrix<f64> {
    let own = match spin {
        Spin::Alpha => p_alpha,
        Spin::Beta => p_beta,
    };
    &ints.h + ints.g.coulomb(&(p_alpha + p_beta)) - ints.g.exchange(own)
}

/// Both Fock matrices, sharing the Coulomb contraction.
pub fn fock_pair(ints: &IntegralSet, c_alpha: &DMatrix<f64>, c_beta: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let pa = density(c_alpha);
    let pb = density(c_beta);
    let core = &ints.h + ints.g.coulomb(&(&pa + &pb));
    let fa = &core - ints.g.exchange(&pa);
    let fb = core - ints.g.exchange(&pb);
    (fa, fb)
}

/// Energy without the nuclear repulsion constant.
pub fn electronic_energy(ints: &IntegralSet, c_alpha: &DMatrix<f64>, c_beta: &DMatrix<f64>) -> f64 {
    let pa = density(c_alpha);
    let pb = density(c_beta);
    let (fa, fb) = fock_pair(ints, c_alpha, c_beta);
    0.5 * ((&pa + &pb).dot(&ints.h) + pa.dot(&fa) + pb.dot(&fb))
}

pub fn energy(ints: &IntegralSet, c_alpha: &DMatrix<f64>, c_beta: &DMatrix<f64>) -> f64 {
    electronic_energy(ints, c_alpha, c_beta) + ints.e_nuc
}

/// `(2F^α C^α, 2F^β C^β)`
pub fn euclidean_gradient(
    ints: &IntegralSet,
    c_alpha: &DMatrix<f64>,
    c_beta: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let (fa, fb) = fock_pair(ints, c_alpha, c_beta);
    (fa * c_alpha * 2.0, fb * c_beta * 2.0)
}

impl CostModel for IntegralSet {
    fn value(&self, c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> f64 {
        energy(self, c1, c2)
    }

    fn euclidean_gradient(&self, c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        euclidean_gradient(self, c1, c2)
    }

    fn euclidean_hessian(&self, c1: &DMatrix<f64>, c2: &DMatrix<f64>) -> DMatrix<f64> {
        euclidean_hessian(self, c1, c2)
    }
}
