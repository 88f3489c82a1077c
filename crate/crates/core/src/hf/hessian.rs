use nalgebra::DMatrix;

use super::{fock_pair, IntegralSet, TwoElectron};

/// Euclidean Hessian of the energy extension, laid out as
/// `[[H_αα, H_βαᵀ], [H_βα, H_ββ]]` with entry `(r + d·s, p + d·q)` of a
/// block holding `∂²E / ∂c_rs ∂c_pq`.
pub fn euclidean_hessian(ints: &IntegralSet, c_alpha: &DMatrix<f64>, c_beta: &DMatrix<f64>) -> DMatrix<f64> {
    let (fa, fb) = fock_pair(ints, c_alpha, c_beta);
    let na = c_alpha.len();
    let nb = c_beta.len();
    let mut out = DMatrix::zeros(na + nb, na + nb);
    out.view_mut((0, 0), (na, na))
        .copy_from(&same_spin(ints.g(), c_alpha, &fa));
    out.view_mut((na, na), (nb, nb))
        .copy_from(&same_spin(ints.g(), c_beta, &fb));
    let hba = mixed_spin(ints.g(), c_alpha, c_beta);
    out.view_mut((na, 0), (nb, na)).copy_from(&hba);
    out.view_mut((0, na), (na, nb)).copy_from(&hba.transpose());
    out
}

fn same_spin(g: &TwoElectron, c: &DMatrix<f64>, f: &DMatrix<f64>) -> DMatrix<f64> {
    let d = c.nrows();
    let n = c.ncols();
    let mut h = DMatrix::zeros(d * n, d * n);
    for q in 0..n {
        for s in 0..n {
            for p in 0..d {
                for r in 0..d {
                    let mut acc = 0.0;
                    if s == q {
                        for i in 0..d {
                            for j in 0..d {
                                acc -= 2.0 * c[(i, q)] * c[(j, q)] * (g.get(p, i, r, j) - g.get(p, r, j, i));
                            }
                        }
                        acc += 2.0 * f[(p, r)];
                    } else {
                        for i in 0..d {
                            for j in 0..d {
                                acc += 2.0
                                    * c[(i, q)]
                                    * c[(j, s)]
                                    * (2.0 * g.get(p, j, i, r) - g.get(p, i, j, r) - g.get(p, i, r, j));
                            }
                        }
                    }
                    h[(r + d * s, p + d * q)] = acc;
                }
            }
        }
    }
    h
}

/// `H_βα[r + d·s, p + d·q] = Σ_ij 4 c^α_iq c^β_js g_pjir`
fn mixed_spin(g: &TwoElectron, ca: &DMatrix<f64>, cb: &DMatrix<f64>) -> DMatrix<f64> {
    let d = ca.nrows();
    let mut h = DMatrix::zeros(d * cb.ncols(), d * ca.ncols());
    for q in 0..ca.ncols() {
        for s in 0..cb.ncols() {
            for p in 0..d {
                for r in 0..d {
                    let mut acc = 0.0;
                    for i in 0..d {
                        for j in 0..d {
                            acc += ca[(i, q)] * cb[(j, s)] * g.get(p, j, i, r);
                        }
                    }
                    h[(r + d * s, p + d * q)] = 4.0 * acc;
                }
            }
        }
    }
    h
}
