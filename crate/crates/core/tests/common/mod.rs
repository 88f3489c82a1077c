//! Independent oracles shared by the integration tests: naive index loops
//! and finite differences, with no intermediate matrices from the library.
#![allow(dead_code)]

use grassmann_hf::hf::{IntegralSet, Spin};
use nalgebra::DMatrix;

/// Energy as the explicit quartic polynomial in the coefficients.
pub fn brute_energy(ints: &IntegralSet, ca: &DMatrix<f64>, cb: &DMatrix<f64>) -> f64 {
    let d = ints.d();
    let h = ints.h();
    let g = ints.g();
    let mut e = ints.e_nuc();
    for c in [ca, cb] {
        for q in 0..c.ncols() {
            for i in 0..d {
                for j in 0..d {
                    e += c[(i, q)] * c[(j, q)] * h[(i, j)];
                }
            }
        }
        for q in 0..c.ncols() {
            for s in 0..c.ncols() {
                for i in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            for l in 0..d {
                                e += 0.5
                                    * c[(i, q)]
                                    * c[(j, s)]
                                    * c[(k, q)]
                                    * c[(l, s)]
                                    * (g.get(i, j, k, l) - g.get(i, j, l, k));
                            }
                        }
                    }
                }
            }
        }
    }
    for q in 0..ca.ncols() {
        for s in 0..cb.ncols() {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            e += ca[(i, q)] * cb[(j, s)] * ca[(k, q)] * cb[(l, s)] * g.get(i, j, k, l);
                        }
                    }
                }
            }
        }
    }
    e
}

/// `F^γ_ij = h_ij + Σ_kl ((P^α + P^β)_kl g_ikjl - P^γ_kl g_ijkl)` by loops.
pub fn naive_fock(ints: &IntegralSet, pa: &DMatrix<f64>, pb: &DMatrix<f64>, spin: Spin) -> DMatrix<f64> {
    let d = ints.d();
    let own = if spin == Spin::Alpha { pa } else { pb };
    let mut f = ints.h().clone();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    f[(i, j)] +=
                        (pa[(k, l)] + pb[(k, l)]) * ints.g().get(i, k, j, l) - own[(k, l)] * ints.g().get(i, j, k, l);
                }
            }
        }
    }
    f
}

/// Central difference gradient of a function of two matrices, stacked in
/// column-major order (first block then second).
pub fn fd_gradient(
    f: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> f64,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    h: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut ga = DMatrix::zeros(a.nrows(), a.ncols());
    for idx in 0..a.len() {
        let mut p = a.clone();
        let mut m = a.clone();
        p[idx] += h;
        m[idx] -= h;
        ga[idx] = (f(&p, b) - f(&m, b)) / (2.0 * h);
    }
    let mut gb = DMatrix::zeros(b.nrows(), b.ncols());
    for idx in 0..b.len() {
        let mut p = b.clone();
        let mut m = b.clone();
        p[idx] += h;
        m[idx] -= h;
        gb[idx] = (f(a, &p) - f(a, &m)) / (2.0 * h);
    }
    (ga, gb)
}

/// Central difference Jacobian of a matrix-pair-valued map, giving the
/// stacked Hessian when applied to a gradient.
pub fn fd_jacobian(
    grad: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>),
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    h: f64,
) -> DMatrix<f64> {
    let na = a.len();
    let n = na + b.len();
    let stack = |(x, y): (DMatrix<f64>, DMatrix<f64>)| {
        let mut v = nalgebra::DVector::zeros(n);
        v.rows_mut(0, na).copy_from_slice(x.as_slice());
        v.rows_mut(na, n - na).copy_from_slice(y.as_slice());
        v
    };
    let mut out = DMatrix::zeros(n, n);
    for col in 0..n {
        let (mut pa, mut pb) = (a.clone(), b.clone());
        let (mut ma, mut mb) = (a.clone(), b.clone());
        if col < na {
            pa[col] += h;
            ma[col] -= h;
        } else {
            pb[col - na] += h;
            mb[col - na] -= h;
        }
        let diff = (stack(grad(&pa, &pb)) - stack(grad(&ma, &mb))) / (2.0 * h);
        out.set_column(col, &diff);
    }
    out
}

/// `max |a - b| / max |b|`
pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(f64::MIN_POSITIVE)
}
