use nalgebra::DMatrix;

/// Images of an index tuple under the 8-fold symmetry of real two-electron
/// integrals: `i ↔ k`, `j ↔ l` and the electron swap `(i, k) ↔ (j, l)`.
pub fn symmetry_orbit([i, j, k, l]: [usize; 4]) -> [[usize; 4]; 8] {
    [
        [i, j, k, l],
        [k, j, i, l],
        [i, l, k, j],
        [k, l, i, j],
        [j, i, l, k],
        [l, i, j, k],
        [j, k, l, i],
        [l, k, j, i],
    ]
}

/// Dense d⁴ two-electron tensor `g[i, j, k, l]` with indices 1 and 3 on
/// electron 1 and indices 2 and 4 on electron 2.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoElectron {
    d: usize,
    data: Vec<f64>,
}

impl TwoElectron {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            data: vec![0.0; d * d * d * d],
        }
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(d * d * d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        Self { d, data }
    }

    /// `g[i,j,k,l] = Σ_m B_m[i,k] B_m[j,l]`. Symmetric `B_m` give a tensor
    /// with exact 8-fold symmetry.
    pub fn from_factors(factors: &[DMatrix<f64>]) -> Self {
        let d = factors.first().map_or(0, |b| b.nrows());
        Self::from_fn(d, |i, j, k, l| factors.iter().map(|b| b[(i, k)] * b[(j, l)]).sum())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.d + j) * self.d + k) * self.d + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.index(i, j, k, l)]
    }

    pub fn set(&mut self, [i, j, k, l]: [usize; 4], value: f64) {
        let idx = self.index(i, j, k, l);
        self.data[idx] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// The pair of symmetry-related entries that differ the most, with the
    /// size of the difference. `None` for an empty tensor.
    pub fn worst_symmetry_violation(&self) -> Option<([usize; 4], [usize; 4], f64)> {
        let d = self.d;
        let mut worst: Option<([usize; 4], [usize; 4], f64)> = None;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = self.get(i, j, k, l);
                        for img in symmetry_orbit([i, j, k, l]).into_iter().skip(1) {
                            let diff = (v - self.get(img[0], img[1], img[2], img[3])).abs();
                            if worst.is_none_or(|w| diff > w.2) {
                                worst = Some(([i, j, k, l], img, diff));
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// `J_ij = Σ_kl P_kl g[i,k,j,l]`
    pub fn coulomb(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.d;
        DMatrix::from_fn(d, d, |i, j| {
            let mut acc = 0.0;
            for k in 0..d {
                for l in 0..d {
                    acc += p[(k, l)] * self.get(i, k, j, l);
                }
            }
            acc
        })
    }

    /// `K_ij = Σ_kl P_kl g[i,j,k,l]`
    pub fn exchange(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.d;
        DMatrix::from_fn(d, d, |i, j| {
            let base = self.index(i, j, 0, 0);
            let block = &self.data[base..base + d * d];
            let mut acc = 0.0;
            for k in 0..d {
                for l in 0..d {
                    acc += p[(k, l)] * block[k * d + l];
                }
            }
            acc
        })
    }
}
