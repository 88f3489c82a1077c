use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::hf::{density, energy, fock_pair, IntegralSet, SpinPair};
use crate::matops;
use crate::optim::{OptTrace, Phase, Status, StopCriteria};

/// Eigenvalue gap below which the aufbau occupation is ambiguous.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Condition estimate above which the Pulay system counts as singular.
const PULAY_MAX_COND: f64 = 1e12;

/// Recent Fock matrices and their commutator errors, oldest first.
#[derive(Debug, Clone)]
pub struct DiisHistory {
    capacity: usize,
    entries: VecDeque<(DMatrix<f64>, DMatrix<f64>, DVector<f64>)>,
}

impl DiisHistory {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity + 1),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, f_alpha: DMatrix<f64>, f_beta: DMatrix<f64>, error: DVector<f64>) {
        if self.capacity == 0 {
            return;
        }
        self.entries.push_back((f_alpha, f_beta, error));
        while self.entries.len() > self.capacity {
            self.entries.pop_front();
        }
    }

    /// Pulay coefficients summing to one that minimize the combined error.
    /// Drops the oldest entries while the system is singular.
    pub fn coefficients(&mut self) -> Option<DVector<f64>> {
        while !self.entries.is_empty() {
            let m = self.entries.len();
            let mut b = DMatrix::zeros(m + 1, m + 1);
            for i in 0..m {
                for j in 0..m {
                    b[(i, j)] = self.entries[i].2.dot(&self.entries[j].2);
                }
                b[(i, m)] = -1.0;
                b[(m, i)] = -1.0;
            }
            let mut rhs = DVector::zeros(m + 1);
            rhs[m] = -1.0;
            // scale the error block so the bordering entries do not dominate
            let scale = (0..m).map(|i| b[(i, i)]).fold(0.0, f64::max);
            if scale > 0.0 {
                b.view_mut((0, 0), (m, m)).scale_mut(1.0 / scale);
            }
            match matops::lstsq(&b, &rhs, 0.0) {
                Ok((x, cond)) if cond < PULAY_MAX_COND && x.iter().all(|v| v.is_finite()) => {
                    return Some(x.rows(0, m).into_owned());
                }
                _ => {
                    log::debug!("singular DIIS system with {m} entries; dropping the oldest");
                    self.entries.pop_front();
                }
            }
        }
        None
    }

    /// Extrapolated Fock matrices, or `None` when the history is empty.
    pub fn extrapolate(&mut self) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
        let coef = self.coefficients()?;
        let (d, _) = self.entries[0].0.shape();
        let mut fa = DMatrix::zeros(d, d);
        let mut fb = DMatrix::zeros(d, d);
        for (c, (a, b, _)) in coef.iter().zip(&self.entries) {
            fa += a * *c;
            fb += b * *c;
        }
        Some((fa, fb))
    }
}

/// `FPS - SPF`
fn commutator_error(f: &DMatrix<f64>, p: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    let fps = f * p * s;
    &fps - fps.transpose()
}

/// Self-consistent field iteration with DIIS extrapolation of the Fock
/// matrices. A window of 0 disables DIIS.
#[derive(Debug, Clone, Copy)]
pub struct Scf {
    pub diis_window: usize,
    pub crit: StopCriteria,
}

impl Scf {
    pub fn new(diis_window: usize, crit: StopCriteria) -> Self {
        Self { diis_window, crit }
    }

    /// The recorded gradient norm is the Frobenius norm of the stacked
    /// commutator errors of both spins.
    pub fn run(&self, ints: &IntegralSet, guess: SpinPair) -> (SpinPair, OptTrace) {
        let s = ints.s();
        let mut x = guess;
        let mut history = DiisHistory::new(self.diis_window);
        let mut trace = OptTrace::new();
        let mut e_prev = f64::INFINITY;
        let mut step_norm = 0.0;
        let mut k = 0;
        loop {
            let (fa, fb) = fock_pair(ints, &x.c_alpha, &x.c_beta);
            let e = energy(ints, &x.c_alpha, &x.c_beta);
            let pa = density(&x.c_alpha);
            let pb = density(&x.c_beta);
            let ea = commutator_error(&fa, &pa, s);
            let eb = commutator_error(&fb, &pb, s);
            let err_norm = (ea.norm_squared() + eb.norm_squared()).sqrt();
            if !(e.is_finite() && err_norm.is_finite()) {
                trace.fail(format!("non-finite energy or Fock matrix at iteration {k}"));
                break;
            }
            trace.push(k, e, err_norm, step_norm, Phase::Scf);
            let status = if k > 0 && err_norm <= self.crit.tol_grad {
                Some(Status::ConvergedGrad)
            } else if (e_prev - e).abs() <= self.crit.tol_val {
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

            let (fa, fb) = if self.diis_window > 0 {
                let err = DVector::from_iterator(ea.len() + eb.len(), ea.iter().chain(eb.iter()).copied());
                history.push(fa.clone(), fb.clone(), err);
                history.extrapolate().unwrap_or((fa, fb))
            } else {
                (fa, fb)
            };

            let next = match (
                occupied_orbitals(ints, &fa, ints.n_alpha()),
                occupied_orbitals(ints, &fb, ints.n_beta()),
            ) {
                (Ok(a), Ok(b)) => SpinPair { c_alpha: a, c_beta: b },
                (Err(err), _) | (_, Err(err)) => {
                    trace.fail(format!("Fock eigenproblem at iteration {k}: {err}"));
                    break;
                }
            };
            step_norm =
                ((density(&next.c_alpha) - pa).norm_squared() + (density(&next.c_beta) - pb).norm_squared()).sqrt();
            x = next;
            e_prev = e;
            k += 1;
        }
        (x, trace)
    }
}

/// The `n` lowest S-orthonormal eigenvectors of `F c = λ S c`.
pub(crate) fn occupied_orbitals(
    ints: &IntegralSet,
    f: &DMatrix<f64>,
    n: usize,
) -> Result<DMatrix<f64>, crate::error::LinalgError> {
    let (vals, vecs) = matops::generalized_symmetric_eigen(f, ints.metric().factor())?;
    if n > 0 && n < vals.len() && (vals[n] - vals[n - 1]).abs() <= DEGENERACY_TOL {
        log::warn!(
            "degenerate aufbau occupation: levels {} and {} are {:e} apart; occupying by eigensolver order",
            n,
            n + 1,
            vals[n] - vals[n - 1]
        );
    }
    Ok(vecs.columns(0, n).into_owned())
}

pub fn scf_diis(ints: &IntegralSet, guess: SpinPair, diis_window: usize, crit: StopCriteria) -> (SpinPair, OptTrace) {
    Scf::new(diis_window, crit).run(ints, guess)
}
