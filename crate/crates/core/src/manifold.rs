//! Geometry of the generalized Stiefel manifold `{C : CᵀSC = Id}` and its
//! Grassmann quotient under right multiplication by `O(N)`.
//!
//! Grassmann points are stored as Stiefel representatives and tangent
//! vectors at `[C]` are horizontal lifts, i.e. d×N matrices `η` with
//! `CᵀSη = 0`. The Riemannian metric is `⟨η, μ⟩ = tr(ηᵀSμ)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LinalgError, ManifoldError};
use crate::matops::{self, SpdFactor, ThinSvd};

/// Feasibility tolerance `|CᵀSC - Id|_F` accepted on construction.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// A horizontal tangent vector, stored as its d×N lift.
pub type HorizontalTangent = DMatrix<f64>;

/// SPD metric matrix `S` with a factor `O` (`OᵀSO = Id`) and its inverse.
#[derive(Debug, Clone)]
pub struct MetricBasis {
    s: DMatrix<f64>,
    factor: SpdFactor,
    s_inv: DMatrix<f64>,
}

impl MetricBasis {
    pub fn new(s: DMatrix<f64>) -> Result<Self, LinalgError> {
        let factor = matops::spd_factor(&s)?;
        let s_inv = factor.solve(&DMatrix::identity(s.nrows(), s.nrows()));
        Ok(Self { s, factor, s_inv })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(DMatrix::identity(d, d)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn o(&self) -> &DMatrix<f64> {
        &self.factor.o
    }

    pub fn o_inv(&self) -> &DMatrix<f64> {
        &self.factor.o_inv
    }

    pub fn factor(&self) -> &SpdFactor {
        &self.factor
    }

    /// Dense `S⁻¹`, cached at construction. Used where a matrix is needed
    /// (Hessian assembly); prefer [`MetricBasis::apply_s_inv`] otherwise.
    pub fn s_inv(&self) -> &DMatrix<f64> {
        &self.s_inv
    }

    /// `S⁻¹ x` by triangular solves with the Cholesky factor.
    pub fn apply_s_inv(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.factor.solve(x)
    }
}

/// A point `[C]` of the Grassmannian, represented by a Stiefel matrix `C`.
#[derive(Debug, Clone)]
pub struct GrassmannPoint {
    metric: Arc<MetricBasis>,
    c: DMatrix<f64>,
}

impl GrassmannPoint {
    pub fn new(metric: Arc<MetricBasis>, c: DMatrix<f64>) -> Result<Self, ManifoldError> {
        let d = metric.dim();
        if c.nrows() != d || c.ncols() > d {
            return Err(ManifoldError::ShapeMismatch {
                expected: (d, c.ncols().min(d)),
                got: c.shape(),
            });
        }
        let pt = Self { metric, c };
        let residual = pt.feasibility_residual();
        if residual.is_nan() || residual > FEASIBILITY_TOL {
            return Err(ManifoldError::Infeasible { residual });
        }
        Ok(pt)
    }

    /// Skips the feasibility check; the caller guarantees `CᵀSC ≈ Id`.
    pub fn new_unchecked(metric: Arc<MetricBasis>, c: DMatrix<f64>) -> Self {
        debug_assert_eq!(c.nrows(), metric.dim());
        Self { metric, c }
    }

    /// Builds a point from any full-rank representative by Löwdin orthonormalization.
    pub fn from_representative(metric: Arc<MetricBasis>, c: DMatrix<f64>) -> Result<Self, ManifoldError> {
        let d = metric.dim();
        if c.nrows() != d || c.ncols() > d {
            return Err(ManifoldError::ShapeMismatch {
                expected: (d, c.ncols().min(d)),
                got: c.shape(),
            });
        }
        Self::new_unchecked(metric, c).reorthonormalize()
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.c
    }

    pub fn metric(&self) -> &Arc<MetricBasis> {
        &self.metric
    }

    pub fn d(&self) -> usize {
        self.c.nrows()
    }

    pub fn n(&self) -> usize {
        self.c.ncols()
    }

    /// Dimension of the Grassmannian, `N(d - N)`.
    pub fn manifold_dim(&self) -> usize {
        self.n() * (self.d() - self.n())
    }

    pub fn feasibility_residual(&self) -> f64 {
        let n = self.n();
        (self.c.transpose() * self.metric.s() * &self.c - DMatrix::identity(n, n)).norm()
    }

    pub fn horizontal_residual(&self, eta: &DMatrix<f64>) -> f64 {
        (self.c.transpose() * self.metric.s() * eta).norm()
    }

    /// `C Cᵀ S`, the invariant of the class `[C]`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.c * self.c.transpose() * self.metric.s()
    }

    /// Orthogonal projection of `μ` onto the Stiefel tangent space at `C`.
    pub fn project_stiefel_tangent(&self, mu: &DMatrix<f64>) -> DMatrix<f64> {
        let ctsmu = self.c.transpose() * self.metric.s() * mu;
        let sym = (&ctsmu + ctsmu.transpose()) * 0.5;
        mu - &self.c * sym
    }

    /// `(Id - CCᵀS) μ`.
    pub fn project_horizontal(&self, mu: &DMatrix<f64>) -> HorizontalTangent {
        mu - &self.c * (self.c.transpose() * self.metric.s() * mu)
    }

    /// Riemannian gradient from the matrix of partial derivatives of an extension.
    pub fn riemannian_gradient(&self, euc_grad: &DMatrix<f64>) -> HorizontalTangent {
        self.project_horizontal(&self.metric.apply_s_inv(euc_grad))
    }

    /// `tr(ηᵀ S μ)`.
    ///
    /// Panics if the tangents do not have the shape of this point.
    pub fn inner(&self, eta: &DMatrix<f64>, mu: &DMatrix<f64>) -> f64 {
        assert!(
            eta.shape() == self.c.shape() && mu.shape() == self.c.shape(),
            "tangent shapes {:?}/{:?} do not match base point {:?}",
            eta.shape(),
            mu.shape(),
            self.c.shape()
        );
        (self.metric.s() * mu).dot(eta)
    }

    pub fn norm(&self, eta: &DMatrix<f64>) -> f64 {
        self.inner(eta, eta).max(0.0).sqrt()
    }

    /// Precomputes the thin SVD of `O⁻¹η` so that the geodesic and the
    /// parallel transport along it can be evaluated repeatedly.
    pub fn geodesic_plan(&self, eta: &DMatrix<f64>) -> Result<Geodesic, LinalgError> {
        let svd = matops::thin_svd(&(self.metric.o_inv() * eta))?;
        Ok(Geodesic::new(self.clone(), svd))
    }

    /// `exp_[C](tη) = (C Vᵀ cos(tD) + O U sin(tD)) V`.
    pub fn geodesic(&self, eta: &DMatrix<f64>, t: f64) -> Result<GrassmannPoint, LinalgError> {
        Ok(self.geodesic_plan(eta)?.point(t))
    }

    /// Parallel transport of `mu` along the geodesic with initial velocity `dir`.
    pub fn parallel_transport(
        &self,
        dir: &DMatrix<f64>,
        mu: &DMatrix<f64>,
        t: f64,
    ) -> Result<HorizontalTangent, LinalgError> {
        Ok(self.geodesic_plan(dir)?.transport(mu, t))
    }

    /// Restores exact feasibility with the Löwdin factor `(CᵀSC)^{-1/2}`,
    /// which keeps the column span.
    pub fn reorthonormalize(&self) -> Result<GrassmannPoint, ManifoldError> {
        let n = self.n();
        if n == 0 {
            return Ok(self.clone());
        }
        let gram = self.c.transpose() * self.metric.s() * &self.c;
        let (vals, vecs) = matops::sorted_symmetric_eigen(&gram);
        let min = vals[0];
        let max = vals[n - 1];
        if min.is_nan() || min <= 1e-12 * max.max(1.0) {
            return Err(ManifoldError::RankDeficient { min_eigenvalue: min });
        }
        let inv_sqrt = DVector::from_iterator(n, vals.iter().map(|v| 1.0 / v.sqrt()));
        let w = &vecs * DMatrix::from_diagonal(&inv_sqrt) * vecs.transpose();
        Ok(Self::new_unchecked(self.metric.clone(), &self.c * w))
    }

    /// Uniformly random entries in [-1, 1], orthonormalized. Deterministic in `seed`.
    pub fn random_point(metric: Arc<MetricBasis>, n: usize, seed: u64) -> GrassmannPoint {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = metric.dim();
        loop {
            let c = DMatrix::from_fn(d, n, |_, _| rng.random_range(-1.0..1.0));
            if let Ok(pt) = Self::from_representative(metric.clone(), c) {
                return pt;
            }
        }
    }

    pub fn random_horizontal(&self, seed: u64) -> HorizontalTangent {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = DMatrix::from_fn(self.d(), self.n(), |_, _| rng.random_range(-1.0..1.0));
        self.project_horizontal(&mu)
    }
}

/// A geodesic through `C` with the thin SVD `O⁻¹η = U D V` precomputed.
#[derive(Debug, Clone)]
pub struct Geodesic {
    start: GrassmannPoint,
    svd: ThinSvd,
    /// `C Vᵀ`
    cvt: DMatrix<f64>,
    /// `O U`
    ou: DMatrix<f64>,
    /// `Uᵀ O⁻¹`
    ut_oinv: DMatrix<f64>,
}

impl Geodesic {
    fn new(start: GrassmannPoint, svd: ThinSvd) -> Self {
        let cvt = start.c() * svd.v.transpose();
        let ou = start.metric().o() * &svd.u;
        let ut_oinv = svd.u.transpose() * start.metric().o_inv();
        Self {
            start,
            svd,
            cvt,
            ou,
            ut_oinv,
        }
    }

    pub fn start(&self) -> &GrassmannPoint {
        &self.start
    }

    pub fn svd(&self) -> &ThinSvd {
        &self.svd
    }

    fn diag_fn(&self, t: f64, f: fn(f64) -> f64) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.svd.d.map(|x| f(t * x)))
    }

    pub fn point(&self, t: f64) -> GrassmannPoint {
        let c = (&self.cvt * self.diag_fn(t, f64::cos) + &self.ou * self.diag_fn(t, f64::sin)) * &self.svd.v;
        GrassmannPoint::new_unchecked(self.start.metric().clone(), c)
    }

    /// Transport of an arbitrary horizontal `mu` from `t = 0` to `t`.
    pub fn transport(&self, mu: &DMatrix<f64>, t: f64) -> HorizontalTangent {
        let n = self.svd.d.len();
        let w = &self.ut_oinv * mu;
        let cos_minus_id = self.diag_fn(t, f64::cos) - DMatrix::identity(n, n);
        mu - &self.cvt * self.diag_fn(t, f64::sin) * &w + &self.ou * cos_minus_id * &w
    }

    /// Closed form for transporting the initial velocity itself.
    pub fn transport_direction(&self, t: f64) -> HorizontalTangent {
        let d = DMatrix::from_diagonal(&self.svd.d);
        (-&self.cvt * self.diag_fn(t, f64::sin) + &self.ou * self.diag_fn(t, f64::cos)) * d * &self.svd.v
    }
}

/// A point of the product `Gr(N₁, d₁) × Gr(N₂, d₂)`.
#[derive(Debug, Clone)]
pub struct ProductPoint {
    pub first: GrassmannPoint,
    pub second: GrassmannPoint,
}

/// A tangent vector to the product, one horizontal lift per factor.
pub type ProductTangent = (HorizontalTangent, HorizontalTangent);

impl ProductPoint {
    pub fn new(first: GrassmannPoint, second: GrassmannPoint) -> Self {
        Self { first, second }
    }

    pub fn inner(&self, eta: &ProductTangent, mu: &ProductTangent) -> f64 {
        self.first.inner(&eta.0, &mu.0) + self.second.inner(&eta.1, &mu.1)
    }

    pub fn norm(&self, eta: &ProductTangent) -> f64 {
        self.inner(eta, eta).max(0.0).sqrt()
    }

    pub fn exp(&self, eta: &ProductTangent, t: f64) -> Result<ProductPoint, LinalgError> {
        Ok(ProductPoint {
            first: self.first.geodesic(&eta.0, t)?,
            second: self.second.geodesic(&eta.1, t)?,
        })
    }

    pub fn manifold_dim(&self) -> usize {
        self.first.manifold_dim() + self.second.manifold_dim()
    }

    pub fn max_feasibility_residual(&self) -> f64 {
        self.first
            .feasibility_residual()
            .max(self.second.feasibility_residual())
    }

    pub fn reorthonormalize(&self) -> Result<ProductPoint, ManifoldError> {
        Ok(ProductPoint {
            first: self.first.reorthonormalize()?,
            second: self.second.reorthonormalize()?,
        })
    }

    pub fn project_horizontal(&self, mu: &ProductTangent) -> ProductTangent {
        (
            self.first.project_horizontal(&mu.0),
            self.second.project_horizontal(&mu.1),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_spd(d: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        &a * a.transpose() * 0.3 + DMatrix::identity(d, d)
    }

    fn metric(d: usize, seed: u64) -> Arc<MetricBasis> {
        Arc::new(MetricBasis::new(random_spd(d, seed)).unwrap())
    }

    #[test]
    fn metric_inverse_solve() {
        let m = metric(5, 1);
        let x = DMatrix::from_fn(5, 2, |i, j| (i + 2 * j) as f64 - 3.0);
        let back = m.apply_s_inv(&(m.s() * &x));
        assert!((back - &x).norm() < 1e-10 * x.norm());
        let o = m.o();
        assert!((o.transpose() * m.s() * o - DMatrix::identity(5, 5)).norm() < 1e-10);
    }

    #[test]
    fn stiefel_projection() {
        let pt = GrassmannPoint::random_point(metric(5, 2), 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mu = DMatrix::from_fn(5, 2, |_, _| rng.random_range(-1.0..1.0));
        let nu = pt.project_stiefel_tangent(&mu);
        let a = pt.c().transpose() * pt.metric().s() * &nu;
        assert!((&a + a.transpose()).norm() < 1e-10);
        // idempotent
        assert!((pt.project_stiefel_tangent(&nu) - &nu).norm() < 1e-12);

        let circle = GrassmannPoint::new(Arc::new(MetricBasis::identity(1)), DMatrix::from_element(1, 1, 1.0)).unwrap();
        let p = circle.project_stiefel_tangent(&DMatrix::from_element(1, 1, 1.0));
        assert!(p.norm() < 1e-15);
    }

    #[test]
    fn horizontal_projection() {
        let pt = GrassmannPoint::random_point(metric(6, 5), 2, 6);
        assert!(pt.project_horizontal(pt.c()).norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mu = DMatrix::from_fn(6, 2, |_, _| rng.random_range(-1.0..1.0));
        let eta = pt.project_horizontal(&mu);
        assert!(pt.horizontal_residual(&eta) < 1e-10);
        assert!((pt.project_horizontal(&eta) - &eta).norm() < 1e-12);
    }

    #[test]
    fn gradient_with_identity_metric() {
        let m = Arc::new(MetricBasis::identity(3));
        let pt = GrassmannPoint::random_point(m, 1, 9);
        let g = DMatrix::from_column_slice(3, 1, &[1.0, -2.0, 0.5]);
        let expected = (DMatrix::identity(3, 3) - pt.c() * pt.c().transpose()) * &g;
        assert!((pt.riemannian_gradient(&g) - expected).norm() < 1e-14);
        assert_eq!(pt.riemannian_gradient(&DMatrix::zeros(3, 1)).norm(), 0.0);
    }

    #[test]
    fn inner_matches_kronecker_form() {
        let pt = GrassmannPoint::random_point(metric(4, 10), 2, 11);
        let a = pt.random_horizontal(12);
        let b = pt.random_horizontal(13);
        let lhs = pt.inner(&a, &b);
        let k = matops::kron(&DMatrix::identity(2, 2), pt.metric().s());
        let rhs = matops::vec(&a).dot(&(k * matops::vec(&b)));
        assert!((lhs - rhs).abs() < 1e-12);
        assert_eq!(pt.inner(&DMatrix::zeros(4, 2), &b), 0.0);
    }

    #[test]
    #[should_panic(expected = "do not match")]
    fn inner_rejects_foreign_tangent() {
        let pt = GrassmannPoint::random_point(metric(4, 10), 2, 11);
        pt.inner(&DMatrix::zeros(4, 1), &DMatrix::zeros(4, 1));
    }

    #[test]
    fn circle_geodesic_and_transport() {
        let theta = 0.7_f64;
        let m = Arc::new(MetricBasis::identity(2));
        let pt = GrassmannPoint::new(m, DMatrix::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        let eta = DMatrix::from_column_slice(2, 1, &[0.0, theta]);
        let q = pt.geodesic(&eta, 1.0).unwrap();
        let (c, s) = (theta.cos(), theta.sin());
        assert!((q.c()[(0, 0)] - c).abs() < 1e-15 && (q.c()[(1, 0)] - s).abs() < 1e-15);
        let pt_eta = pt.parallel_transport(&eta, &eta, 1.0).unwrap();
        let expected = DMatrix::from_column_slice(2, 1, &[-theta * s, theta * c]);
        assert!((pt_eta - expected).norm() < 1e-15);
        assert_eq!(pt.geodesic(&eta, 0.0).unwrap().c(), pt.c());
    }

    #[test]
    fn zero_direction_keeps_point() {
        let pt = GrassmannPoint::random_point(metric(4, 20), 2, 21);
        let q = pt.geodesic(&DMatrix::zeros(4, 2), 3.0).unwrap();
        assert!((q.c() - pt.c()).norm() < 1e-15);
    }

    #[test]
    fn transport_of_direction_agrees_with_closed_form() {
        let pt = GrassmannPoint::random_point(metric(6, 30), 2, 31);
        let eta = pt.random_horizontal(32);
        let plan = pt.geodesic_plan(&eta).unwrap();
        for t in [0.0, 0.3, 1.0, 1.7] {
            let general = plan.transport(&eta, t);
            let special = plan.transport_direction(t);
            assert!((general - special).norm() < 1e-11);
        }
        assert!((plan.transport(&eta, 0.0) - &eta).norm() < 1e-14);
    }

    #[test]
    fn reorthonormalize_keeps_span() {
        let pt = GrassmannPoint::random_point(metric(5, 40), 2, 41);
        let scaled = GrassmannPoint::new_unchecked(pt.metric().clone(), pt.c() * 1.001);
        let fixed = scaled.reorthonormalize().unwrap();
        assert!(fixed.feasibility_residual() < 1e-12);
        assert!((fixed.projector() - pt.projector()).norm() < 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let noise = DMatrix::from_fn(5, 2, |_, _| rng.random_range(-1e-5..1e-5));
        let drifted = GrassmannPoint::new_unchecked(pt.metric().clone(), pt.c() + noise);
        let fixed = drifted.reorthonormalize().unwrap();
        assert!(fixed.feasibility_residual() < 1e-12);
        assert!((fixed.projector() - pt.projector()).norm() < 1e-4);

        let same = pt.reorthonormalize().unwrap();
        assert!((same.projector() - pt.projector()).norm() < 1e-12);
    }

    #[test]
    fn reorthonormalize_rejects_rank_deficiency() {
        let m = Arc::new(MetricBasis::identity(3));
        let c = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let bad = GrassmannPoint::new_unchecked(m, c);
        assert!(matches!(
            bad.reorthonormalize(),
            Err(ManifoldError::RankDeficient { .. })
        ));
    }

    #[test]
    fn random_generation_is_deterministic() {
        let m = metric(5, 50);
        let a = GrassmannPoint::random_point(m.clone(), 3, 7);
        let b = GrassmannPoint::random_point(m, 3, 7);
        assert_eq!(a.c(), b.c());
        assert!(a.feasibility_residual() < 1e-10);
        let h1 = a.random_horizontal(8);
        assert_eq!(h1, a.random_horizontal(8));
        assert!(a.horizontal_residual(&h1) < 1e-10);
    }

    #[test]
    fn construction_checks() {
        let m = Arc::new(MetricBasis::identity(3));
        let c = DMatrix::from_column_slice(3, 1, &[2.0, 0.0, 0.0]);
        assert!(matches!(
            GrassmannPoint::new(m.clone(), c),
            Err(ManifoldError::Infeasible { .. })
        ));
        let c = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        assert!(matches!(
            GrassmannPoint::new(m, c),
            Err(ManifoldError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn product_operations() {
        let p = ProductPoint::new(
            GrassmannPoint::random_point(metric(4, 60), 2, 61),
            GrassmannPoint::random_point(metric(3, 62), 1, 63),
        );
        let eta = (p.first.random_horizontal(64), p.second.random_horizontal(65));
        let n2 = p.inner(&eta, &eta);
        let parts = p.first.inner(&eta.0, &eta.0) + p.second.inner(&eta.1, &eta.1);
        assert!((n2 - parts).abs() < 1e-12);

        let zero = (DMatrix::zeros(4, 2), DMatrix::zeros(3, 1));
        let q = p.exp(&zero, 1.0).unwrap();
        assert_eq!(q.first.c(), p.first.c());
        assert_eq!(q.second.c(), p.second.c());

        let half = (eta.0.clone(), DMatrix::zeros(3, 1));
        let q = p.exp(&half, 1.0).unwrap();
        assert!((q.first.c() - p.first.c()).norm() > 1e-3);
        assert_eq!(q.second.c(), p.second.c());
        assert_eq!(p.manifold_dim(), 4 + 2);
    }

    #[test]
    fn empty_factor_is_supported() {
        let m = Arc::new(MetricBasis::identity(3));
        let pt = GrassmannPoint::new(m, DMatrix::zeros(3, 0)).unwrap();
        let eta = DMatrix::zeros(3, 0);
        let q = pt.geodesic(&eta, 1.0).unwrap();
        assert_eq!(q.n(), 0);
        assert_eq!(pt.inner(&eta, &eta), 0.0);
        assert_eq!(pt.manifold_dim(), 0);
        assert_eq!(pt.parallel_transport(&eta, &eta, 1.0).unwrap().ncols(), 0);
    }

    #[test]
    fn curves_do_not_depend_on_svd_gauge() {
        let m = metric(6, 9);
        let x = GrassmannPoint::random_point(m, 3, 4);
        // η = O Û diag(0.8, 0.8, 0.3) V with Û orthonormal and orthogonal to
        // O⁻¹C, so the first two singular values are equal
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut basis = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
        basis.columns_mut(0, 3).copy_from(&(x.metric().o_inv() * x.c()));
        let q = basis.qr().q();
        let u_hat = q.columns(3, 3).into_owned();
        let (_, v) = matops::sorted_symmetric_eigen(&random_spd(3, 7));
        let eta = x.metric().o() * u_hat * DMatrix::from_diagonal(&DVector::from_vec(vec![0.8, 0.8, 0.3])) * v;
        assert!(x.horizontal_residual(&eta) < 1e-12);
        let mu = x.random_horizontal(6);
        let base = x.geodesic_plan(&eta).unwrap();
        let svd = base.svd().clone();

        let mut flipped = svd.clone();
        for j in 0..3 {
            if j != 1 {
                flipped.u.column_mut(j).neg_mut();
                flipped.v.row_mut(j).neg_mut();
            }
        }
        let mut permuted = svd.clone();
        let close = (0..2).find(|&j| (svd.d[j] - svd.d[j + 1]).abs() < 1e-12 * svd.d[0]);
        let j = close.expect("fixture has a repeated singular value");
        permuted.u.swap_columns(j, j + 1);
        permuted.v.swap_rows(j, j + 1);
        permuted.d.swap_rows(j, j + 1);

        for alt in [flipped, permuted] {
            assert!((alt.reconstruct() - svd.reconstruct()).amax() < 1e-12);
            let other = Geodesic::new(x.clone(), alt);
            for t in [0.3, 1.0, 2.5] {
                assert!((other.point(t).c() - base.point(t).c()).amax() < 1e-10);
                assert!((other.transport(&mu, t) - base.transport(&mu, t)).amax() < 1e-10);
            }
        }
    }
}
