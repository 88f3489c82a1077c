//! Synthetic integral sets and random points for tests, examples and
//! benchmarks. All generators are deterministic in their seed.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hf::{IntegralSet, SpinPair, TwoElectron};
use crate::manifold::GrassmannPoint;

fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| scale * rng.random_range(-1.0..1.0))
}

fn symmetric(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<f64> {
    let a = uniform(rng, d, d, scale);
    (&a + a.transpose()) * 0.5
}

/// Random integrals with `S = I + 0.2·AAᵀ/d`, symmetric `h` and
/// `g[i,j,k,l] = Σ_m B_m[i,k] B_m[j,l]` over three symmetric `B_m`.
pub fn random_integrals(d: usize, n_alpha: usize, n_beta: usize, seed: u64) -> IntegralSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = uniform(&mut rng, d, d, 1.0);
    let s = DMatrix::identity(d, d) + &a * a.transpose() * (0.2 / d.max(1) as f64);
    let h = symmetric(&mut rng, d, 1.0);
    let factors: Vec<_> = (0..3).map(|_| symmetric(&mut rng, d, 0.5)).collect();
    let g = if d == 0 {
        TwoElectron::zeros(0)
    } else {
        TwoElectron::from_factors(&factors)
    };
    let e_nuc = rng.random_range(0.0..1.0);
    IntegralSet::new(s, h, g, e_nuc, n_alpha, n_beta).expect("random fixture is valid")
}

/// A fixed d = 4, two α and two β electron problem with a clear gap between
/// occupied and virtual levels and a single UHF minimum.
pub fn desk_integrals() -> IntegralSet {
    let d = 4;
    let s = DMatrix::from_row_slice(
        d,
        d,
        &[
            1.00, 0.10, 0.02, 0.00, //
            0.10, 1.00, 0.08, 0.01, //
            0.02, 0.08, 1.00, 0.05, //
            0.00, 0.01, 0.05, 1.00,
        ],
    );
    let h = DMatrix::from_row_slice(
        d,
        d,
        &[
            -2.00, 0.10, 0.05, 0.00, //
            0.10, -1.50, 0.08, 0.03, //
            0.05, 0.08, -0.50, 0.06, //
            0.00, 0.03, 0.06, 0.30,
        ],
    );
    let b1 = DMatrix::from_diagonal(&DVector::from_vec(vec![0.70, 0.60, 0.50, 0.45]));
    let b2 = DMatrix::from_row_slice(
        d,
        d,
        &[
            0.20, 0.05, 0.00, 0.02, //
            0.05, 0.15, 0.04, 0.00, //
            0.00, 0.04, 0.10, 0.03, //
            0.02, 0.00, 0.03, 0.12,
        ],
    );
    let b3 = DMatrix::from_row_slice(
        d,
        d,
        &[
            0.00, 0.10, 0.03, 0.00, //
            0.10, 0.00, 0.00, 0.05, //
            0.03, 0.00, 0.00, 0.08, //
            0.00, 0.05, 0.08, 0.00,
        ],
    );
    let g = TwoElectron::from_factors(&[b1, b2, b3]);
    IntegralSet::new(s, h, g, 0.75, 2, 2).expect("desk fixture is valid")
}

/// A uniformly random feasible spin pair for `ints`.
pub fn random_pair(ints: &IntegralSet, seed: u64) -> SpinPair {
    let a = GrassmannPoint::random_point(ints.metric().clone(), ints.n_alpha(), seed);
    let b = GrassmannPoint::random_point(ints.metric().clone(), ints.n_beta(), seed.wrapping_add(0x9e37));
    SpinPair {
        c_alpha: a.into_matrix(),
        c_beta: b.into_matrix(),
    }
}

/// A random n×n orthogonal matrix (Q factor of a random matrix).
pub fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = uniform(&mut rng, n, n, 1.0);
    a.qr().q()
}

/// A random d×n matrix with entries in `[-scale, scale]`.
pub fn random_matrix(rows: usize, cols: usize, scale: f64, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    uniform(&mut rng, rows, cols, scale)
}
