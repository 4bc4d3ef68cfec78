//! Points, overlap kernel, Cayley distance, geodesics, Moebius transport
//! and Kaehler form of the complex Grassmannian G_n(C^{m+n}) in the chart
//! of the big cell: a point is an n x m complex matrix Z, the plane
//! spanned by the rows of [1_n | Z].
//!
//! The overlap kernel is K(p, q) = det(1 + Z_q Z_p⁺), conjugate-linear in
//! the first argument. Geodesics through the origin are Z(t) = U tan(Σt) V⁺
//! for a velocity with SVD B = U Σ V⁺; generic segments are realized by
//! Moebius transport of the start point to the origin.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat::{c64, herm_fun, one_plus, svd, ComplexMatrix};

/// Margin below pi/2 at which geodesic parameters are rejected as
/// cut-locus data.
pub const UNIQUENESS_MARGIN: f64 = 1e-9;

/// Chart point of G_n(C^{m+n}): an n x m matrix in the big cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPoint {
    z: ComplexMatrix,
}

impl GrassmannPoint {
    pub fn new(z: ComplexMatrix) -> Result<Self> {
        if z.rows() == 0 || z.cols() == 0 {
            return Err(Error::Dimension(
                "chart matrix must have positive dimensions".into(),
            ));
        }
        z.check_finite()?;
        Ok(GrassmannPoint { z })
    }

    pub fn origin(n: usize, m: usize) -> Self {
        GrassmannPoint { z: ComplexMatrix::zeros(n, m) }
    }

    pub fn chart(&self) -> &ComplexMatrix {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.z.rows()
    }

    pub fn m(&self) -> usize {
        self.z.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.z.shape()
    }

    pub fn is_origin(&self) -> bool {
        self.z.max_abs() == 0.0
    }
}

fn check_same_shape(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<()> {
    if p.shape() != q.shape() {
        return Err(Error::Dimension(format!(
            "points live on different Grassmannians: {:?} vs {:?}",
            p.shape(),
            q.shape()
        )));
    }
    Ok(())
}

/// Coherent-state overlap kernel K(p, q) = det(1 + Z_q Z_p⁺).
///
/// Hermitian in its arguments, K(p, q) = conj(K(q, p)), and K(p, p) >= 1.
pub fn overlap_kernel(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<Complex64> {
    check_same_shape(p, q)?;
    one_plus(&(q.chart() * &p.chart().adjoint())).det()
}

/// Cayley distance d_C(p, q) = arccos(|K(p,q)| / sqrt(K(p,p) K(q,q))),
/// valued in [0, pi/2].
pub fn cayley_distance(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<f64> {
    let kpq = overlap_kernel(p, q)?;
    let kpp = overlap_kernel(p, p)?.re;
    let kqq = overlap_kernel(q, q)?.re;
    let cosine = (kpq.norm() / (kpp * kqq).sqrt()).clamp(0.0, 1.0);
    Ok(cosine.acos())
}

/// Linear fractional transformation Z -> (aZ + b)(cZ + d)^{-1} on chart
/// matrices, with blocks a: n x n, b: n x m, c: m x n, d: m x m.
#[derive(Debug, Clone)]
pub struct MoebiusMap {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
}

impl MoebiusMap {
    pub fn identity(n: usize, m: usize) -> Self {
        MoebiusMap {
            a: ComplexMatrix::identity(n),
            b: ComplexMatrix::zeros(n, m),
            c: ComplexMatrix::zeros(m, n),
            d: ComplexMatrix::identity(m),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.a.rows(), self.d.rows())
    }

    /// Chart image (aZ + b)(cZ + d)^{-1}; fails with a chart-exit error
    /// when cZ + d is singular (the image leaves the big cell).
    pub fn apply(&self, p: &GrassmannPoint) -> Result<GrassmannPoint> {
        if self.shape() != p.shape() {
            return Err(Error::Dimension(format!(
                "moebius map on {:?} applied to point on {:?}",
                self.shape(),
                p.shape()
            )));
        }
        let z = p.chart();
        let numer = &(&self.a * z) + &self.b;
        let denom = &(&self.c * z) + &self.d;
        let denom_inv = denom.inverse().map_err(|e| match e {
            Error::Singular { pivot } => Error::ChartExit(format!(
                "cZ + d singular (pivot {pivot:.3e}); image leaves the chart"
            )),
            other => other,
        })?;
        GrassmannPoint::new(&numer * &denom_inv)
    }

    /// Inverse map, computed by inverting the assembled (n+m) x (n+m)
    /// block matrix.
    pub fn inverse(&self) -> Result<MoebiusMap> {
        let n = self.a.rows();
        let m = self.d.rows();
        let big = ComplexMatrix::from_blocks(&self.a, &self.b, &self.c, &self.d);
        let inv = big.inverse()?;
        Ok(MoebiusMap {
            a: inv.block(0, 0, n, n),
            b: inv.block(0, n, n, m),
            c: inv.block(n, 0, m, n),
            d: inv.block(n, n, m, m),
        })
    }

    /// Projective equality: blocks agree up to one common nonzero scalar.
    pub fn projectively_equal(&self, other: &MoebiusMap, tol: f64) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        let mine = ComplexMatrix::from_blocks(&self.a, &self.b, &self.c, &self.d);
        let theirs = ComplexMatrix::from_blocks(&other.a, &other.b, &other.c, &other.d);
        // pick the largest entry of `theirs` as the reference ratio
        let k = mine.rows();
        let mut best = (0usize, 0usize);
        let mut best_mag = 0.0;
        for i in 0..k {
            for j in 0..k {
                let mag = theirs[(i, j)].norm();
                if mag > best_mag {
                    best_mag = mag;
                    best = (i, j);
                }
            }
        }
        if best_mag == 0.0 {
            return mine.max_abs() <= tol;
        }
        let ratio = mine[best] / theirs[best];
        mine.max_abs_diff(&theirs.scale(ratio)) <= tol * mine.max_abs().max(1.0)
    }
}

/// The transformation sending the chart point Z1 to the origin:
/// a = (1 + Z1 Z1⁺)^{-1/2},  b = -a Z1,
/// c = (1 + Z1⁺ Z1)^{-1/2} Z1⁺,  d = (1 + Z1⁺ Z1)^{-1/2}.
/// The assembled block matrix is unitary, so the map is an isometry of
/// the kernel ratio and of the Cayley distance.
pub fn moebius_to_origin(p: &GrassmannPoint) -> Result<MoebiusMap> {
    let z = p.chart();
    let inv_sqrt = |x: f64| 1.0 / x.sqrt();
    let a = herm_fun(&one_plus(&(z * &z.adjoint())), inv_sqrt)?;
    let d = herm_fun(&one_plus(&(&z.adjoint() * z)), inv_sqrt)?;
    let b = -&(&a * z);
    let c = &d * &z.adjoint();
    Ok(MoebiusMap { a, b, c, d })
}

/// Point at parameter `t` on the geodesic through the origin with initial
/// velocity `b`: Z(t) = U tan(Σ t) V⁺ where b = U Σ V⁺.
pub fn geodesic_from_origin(b: &ComplexMatrix, t: f64) -> Result<GrassmannPoint> {
    let dec = svd(b)?;
    origin_point_from_svd(&dec.u, &dec.sigma, &dec.v, t)
}

fn origin_point_from_svd(
    u: &ComplexMatrix,
    sigma: &[f64],
    v: &ComplexMatrix,
    t: f64,
) -> Result<GrassmannPoint> {
    let bound = std::f64::consts::FRAC_PI_2 - UNIQUENESS_MARGIN;
    let mut tans = Vec::with_capacity(sigma.len());
    for &s in sigma {
        let angle = s * t;
        if angle.abs() >= bound {
            return Err(Error::CutLocus { angle });
        }
        tans.push(angle.tan());
    }
    let rect = ComplexMatrix::rect_diag(u.rows(), v.rows(), &tans);
    GrassmannPoint::new(&(u * &rect) * &v.adjoint())
}

/// Origin-chart logarithm: the velocity b with geodesic_from_origin(b, 1) = p,
/// namely b = U arctan(Σ) V⁺ for Z = U Σ V⁺. Total on the big cell.
pub fn log_origin(p: &GrassmannPoint) -> Result<ComplexMatrix> {
    let dec = svd(p.chart())?;
    let angles: Vec<f64> = dec.sigma.iter().map(|&s| s.atan()).collect();
    let rect = ComplexMatrix::rect_diag(dec.u.rows(), dec.v.rows(), &angles);
    Ok(&(&dec.u * &rect) * &dec.v.adjoint())
}

/// Geodesic segment between two points, with exact position and velocity
/// at any parameter. Construction: transport the start to the origin,
/// take the straight origin geodesic to the transported end, transport
/// back.
#[derive(Debug, Clone)]
pub struct GeodesicSegment {
    start: GrassmannPoint,
    end: GrassmannPoint,
    transport: MoebiusMap,
    inverse_transport: MoebiusMap,
    velocity_u: ComplexMatrix,
    velocity_sigma: Vec<f64>,
    velocity_v: ComplexMatrix,
    length_param: f64,
}

/// Unique geodesic arc from `p` to `q`, parametrized on [0, 1].
pub fn geodesic_between(p: &GrassmannPoint, q: &GrassmannPoint) -> Result<GeodesicSegment> {
    check_same_shape(p, q)?;
    let transport = moebius_to_origin(p)?;
    let transported_end = transport.apply(q)?;
    let velocity = log_origin(&transported_end)?;
    let dec = svd(&velocity)?;
    let bound = std::f64::consts::FRAC_PI_2 - UNIQUENESS_MARGIN;
    for &angle in &dec.sigma {
        if angle >= bound {
            return Err(Error::CutLocus { angle });
        }
    }
    let inverse_transport = transport.inverse()?;
    Ok(GeodesicSegment {
        start: p.clone(),
        end: q.clone(),
        transport,
        inverse_transport,
        velocity_u: dec.u,
        velocity_sigma: dec.sigma,
        velocity_v: dec.v,
        length_param: 1.0,
    })
}

impl GeodesicSegment {
    pub fn start(&self) -> &GrassmannPoint {
        &self.start
    }

    pub fn end(&self) -> &GrassmannPoint {
        &self.end
    }

    pub fn transport(&self) -> &MoebiusMap {
        &self.transport
    }

    pub fn length_param(&self) -> f64 {
        self.length_param
    }

    /// Principal angles of the arc (the arctan parameters of the
    /// transported endpoint).
    pub fn principal_angles(&self) -> &[f64] {
        &self.velocity_sigma
    }

    /// Velocity of the transported (origin-chart) geodesic at t.
    fn origin_velocity(&self, t: f64) -> ComplexMatrix {
        let rates: Vec<f64> = self
            .velocity_sigma
            .iter()
            .map(|&s| {
                let sec = 1.0 / (s * t).cos();
                s * sec * sec
            })
            .collect();
        let rect =
            ComplexMatrix::rect_diag(self.velocity_u.rows(), self.velocity_v.rows(), &rates);
        &(&self.velocity_u * &rect) * &self.velocity_v.adjoint()
    }

    fn origin_point(&self, t: f64) -> Result<GrassmannPoint> {
        origin_point_from_svd(&self.velocity_u, &self.velocity_sigma, &self.velocity_v, t)
    }

    /// Position at parameter t (t = 0 gives the start, t = 1 the end).
    pub fn point_at(&self, t: f64) -> Result<GrassmannPoint> {
        let y = self.origin_point(t)?;
        self.inverse_transport.apply(&y)
    }

    /// Analytic chart velocity dZ/dt at parameter t.
    ///
    /// For the inverse transport W = (a Y + b)(c Y + d)^{-1} the chain rule
    /// gives dW = (a - W c) dY (c Y + d)^{-1}.
    pub fn velocity_at(&self, t: f64) -> Result<ComplexMatrix> {
        let y = self.origin_point(t)?;
        let dy = self.origin_velocity(t);
        let m = &self.inverse_transport;
        let w = m.apply(&y)?;
        let denom = &(&m.c * y.chart()) + &m.d;
        let denom_inv = denom.inverse().map_err(|e| match e {
            Error::Singular { pivot } => Error::ChartExit(format!(
                "cY + d singular (pivot {pivot:.3e}) while differentiating"
            )),
            other => other,
        })?;
        let left = &m.a - &(w.chart() * &m.c);
        Ok(&(&left * &dy) * &denom_inv)
    }
}

/// Collinearity test: after transporting `p` to the origin, the images
/// Z (of q) and Z0 (of r) must satisfy both Hermiticity conditions
/// Z0 Z⁺ = Z Z0⁺ and Z0⁺ Z = Z⁺ Z0 within `tol` (max-abs entry).
pub fn collinear(
    p: &GrassmannPoint,
    q: &GrassmannPoint,
    r: &GrassmannPoint,
    tol: f64,
) -> Result<bool> {
    check_same_shape(p, q)?;
    check_same_shape(p, r)?;
    let transport = moebius_to_origin(p)?;
    let z = transport.apply(q)?;
    let z0 = transport.apply(r)?;
    let z = z.chart();
    let z0 = z0.chart();
    let first = (&(z0 * &z.adjoint()) - &(z * &z0.adjoint())).max_abs();
    let second = (&(&z0.adjoint() * z) - &(&z.adjoint() * z0)).max_abs();
    Ok(first <= tol && second <= tol)
}

/// Default absolute tolerance for the collinearity test on O(1) data.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// Kaehler two-form evaluated on a pair of chart tangents at a point:
/// omega(x, y) = (i/2) Tr[x (1+Z⁺Z)^{-1} y⁺ (1+ZZ⁺)^{-1}
///                      - y (1+Z⁺Z)^{-1} x⁺ (1+ZZ⁺)^{-1}].
pub fn kahler_form_eval(
    at: &GrassmannPoint,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
) -> Result<f64> {
    if x.shape() != at.shape() || y.shape() != at.shape() {
        return Err(Error::Dimension(format!(
            "tangents {:?}/{:?} do not match base point {:?}",
            x.shape(),
            y.shape(),
            at.shape()
        )));
    }
    let z = at.chart();
    let right = one_plus(&(&z.adjoint() * z)).inverse()?;
    let left = one_plus(&(z * &z.adjoint())).inverse()?;
    let t1 = (&(&(x * &right) * &y.adjoint()) * &left).trace();
    let t2 = (&(&(y * &right) * &x.adjoint()) * &left).trace();
    let val = c64(0.0, 0.5) * (t1 - t2);
    Ok(val.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::ComplexMatrix;
    use crate::rng::{random_point, Xoshiro256PlusPlus, DEFAULT_RADIUS_CAP};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn scalar_point(re: f64, im: f64) -> GrassmannPoint {
        GrassmannPoint::new(ComplexMatrix::new(1, 1, vec![c64(re, im)]).unwrap()).unwrap()
    }

    #[test]
    fn kernel_trivial_values() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2001);
        let origin = GrassmannPoint::origin(2, 2);
        let p = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
        let k = overlap_kernel(&origin, &p).unwrap();
        assert!((k - c64(1.0, 0.0)).norm() < 1e-15);

        let one = scalar_point(1.0, 0.0);
        let i = scalar_point(0.0, 1.0);
        let k = overlap_kernel(&one, &i).unwrap();
        assert!((k - c64(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn kernel_is_hermitian_and_diagonal_real() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2002);
        for _ in 0..50 {
            let p = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let q = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let kpq = overlap_kernel(&p, &q).unwrap();
            let kqp = overlap_kernel(&q, &p).unwrap();
            assert!((kpq - kqp.conj()).norm() < 1e-12 * kpq.norm());
            let kpp = overlap_kernel(&p, &p).unwrap();
            assert!(kpp.im.abs() < 1e-12 * kpp.re);
            assert!(kpp.re >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn kernel_sylvester_identity() {
        // det(1_n + Z_q Z_p⁺) = det(1_m + Z_p⁺ Z_q)
        let mut rng = Xoshiro256PlusPlus::from_seed(2018);
        for _ in 0..50 {
            let p = random_point(&mut rng, 2, 3, DEFAULT_RADIUS_CAP);
            let q = random_point(&mut rng, 2, 3, DEFAULT_RADIUS_CAP);
            let kernel = overlap_kernel(&p, &q).unwrap();
            let other = one_plus(&(&p.chart().adjoint() * q.chart())).det().unwrap();
            assert!((kernel - other).norm() <= 1e-10 * kernel.norm());
        }
    }

    /// Cauchy-Binet oracle: sum over column subsets of products of
    /// conjugated minors of [1 | Z].
    fn kernel_minor_sum(p: &GrassmannPoint, q: &GrassmannPoint) -> Complex64 {
        let n = p.n();
        let m = p.m();
        let frame = |pt: &GrassmannPoint| {
            ComplexMatrix::from_fn(n, n + m, |i, j| {
                if j < n {
                    if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) }
                } else {
                    pt.chart()[(i, j - n)]
                }
            })
        };
        let fp = frame(p);
        let fq = frame(q);
        let mut subset: Vec<usize> = (0..n).collect();
        let mut acc = c64(0.0, 0.0);
        loop {
            let minor = |f: &ComplexMatrix| {
                ComplexMatrix::from_fn(n, n, |i, j| f[(i, subset[j])]).det().unwrap()
            };
            acc += minor(&fp).conj() * minor(&fq);
            // next lexicographic subset of size n from {0, .., n+m-1}
            let mut i = n;
            loop {
                if i == 0 {
                    return acc;
                }
                i -= 1;
                if subset[i] != i + m {
                    break;
                }
            }
            subset[i] += 1;
            for j in i + 1..n {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }

    #[test]
    fn kernel_matches_cauchy_binet_minor_sum() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2003);
        for _ in 0..25 {
            let p = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let q = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let k = overlap_kernel(&p, &q).unwrap();
            let oracle = kernel_minor_sum(&p, &q);
            assert!((k - oracle).norm() <= 1e-12 * oracle.norm());
        }
    }

    #[test]
    fn cayley_distance_basics() {
        let p = scalar_point(0.0, 0.0);
        let q = scalar_point(1.0, 0.0);
        assert!(cayley_distance(&p, &p).unwrap() < 1e-12);
        assert!((cayley_distance(&p, &q).unwrap() - FRAC_PI_4).abs() < 1e-14);

        let mut rng = Xoshiro256PlusPlus::from_seed(2004);
        for _ in 0..50 {
            let a = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
            let b = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
            let dab = cayley_distance(&a, &b).unwrap();
            let dba = cayley_distance(&b, &a).unwrap();
            assert!((dab - dba).abs() < 1e-13);
            assert!((0.0..=PI / 2.0).contains(&dab));
        }
    }

    #[test]
    fn cayley_triangle_inequality() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2005);
        for _ in 0..100 {
            let p = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let q = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let r = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let pr = cayley_distance(&p, &r).unwrap();
            let pq = cayley_distance(&p, &q).unwrap();
            let qr = cayley_distance(&q, &r).unwrap();
            assert!(pr <= pq + qr + 1e-12);
        }
    }

    #[test]
    fn geodesic_from_origin_scalar_case() {
        let b = ComplexMatrix::new(1, 1, vec![c64(0.7, 0.0)]).unwrap();
        let z0 = geodesic_from_origin(&b, 0.0).unwrap();
        assert!(z0.chart().max_abs() < 1e-15);
        let z1 = geodesic_from_origin(&b, 1.0).unwrap();
        assert!((z1.chart()[(0, 0)] - c64(0.7f64.tan(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn geodesic_from_origin_rejects_cut_locus() {
        let b = ComplexMatrix::new(1, 1, vec![c64(1.0, 0.0)]).unwrap();
        assert!(matches!(
            geodesic_from_origin(&b, PI / 2.0),
            Err(Error::CutLocus { .. })
        ));
    }

    #[test]
    fn log_origin_examples_and_roundtrip() {
        let o = GrassmannPoint::origin(2, 3);
        assert!(log_origin(&o).unwrap().max_abs() < 1e-15);

        let p = scalar_point(1.0, 0.0);
        let b = log_origin(&p).unwrap();
        assert!((b[(0, 0)] - c64(FRAC_PI_4, 0.0)).norm() < 1e-14);

        let mut rng = Xoshiro256PlusPlus::from_seed(2006);
        for trial in 0..100 {
            let (n, m) = if trial % 2 == 0 { (2, 2) } else { (1, 3) };
            let p = random_point(&mut rng, n, m, 1.5);
            let b = log_origin(&p).unwrap();
            let back = geodesic_from_origin(&b, 1.0).unwrap();
            assert!(back.chart().max_abs_diff(p.chart()) < 1e-10);
        }
    }

    #[test]
    fn moebius_to_origin_fixes_its_base_point() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2007);
        for _ in 0..30 {
            let p = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let map = moebius_to_origin(&p).unwrap();
            let image = map.apply(&p).unwrap();
            assert!(image.chart().max_abs() < 1e-12);
        }
        let o = GrassmannPoint::origin(2, 3);
        let map = moebius_to_origin(&o).unwrap();
        assert!(map.a.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        assert!(map.b.max_abs() < 1e-14);
        assert!(map.c.max_abs() < 1e-14);
        assert!(map.d.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn moebius_apply_agrees_with_closed_form() {
        // (1 + Z1 Z1⁺)^{-1/2} (Z - Z1) (1 + Z1⁺ Z)^{-1} (1 + Z1⁺ Z1)^{1/2}
        let mut rng = Xoshiro256PlusPlus::from_seed(2008);
        for _ in 0..100 {
            let p1 = random_point(&mut rng, 2, 3, DEFAULT_RADIUS_CAP);
            let p = random_point(&mut rng, 2, 3, DEFAULT_RADIUS_CAP);
            let map = moebius_to_origin(&p1).unwrap();
            let via_blocks = map.apply(&p).unwrap();
            let z1 = p1.chart();
            let z = p.chart();
            let head = herm_fun(&one_plus(&(z1 * &z1.adjoint())), |x| 1.0 / x.sqrt()).unwrap();
            let tail = herm_fun(&one_plus(&(&z1.adjoint() * z1)), f64::sqrt).unwrap();
            let middle = one_plus(&(&z1.adjoint() * z)).inverse().unwrap();
            let closed = &(&(&head * &(z - z1)) * &middle) * &tail;
            assert!(via_blocks.chart().max_abs_diff(&closed) < 1e-11);
        }
    }

    #[test]
    fn moebius_inverse_properties() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2009);
        let id = MoebiusMap::identity(2, 2);
        let id_inv = id.inverse().unwrap();
        assert!(id_inv.projectively_equal(&id, 1e-14));
        let fixed = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
        assert!(id.apply(&fixed).unwrap().chart().max_abs_diff(fixed.chart()) < 1e-15);

        for _ in 0..20 {
            let p = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let map = moebius_to_origin(&p).unwrap();
            let inv = map.inverse().unwrap();
            let back = inv.apply(&GrassmannPoint::origin(2, 2)).unwrap();
            assert!(back.chart().max_abs_diff(p.chart()) < 1e-10);

            let double = inv.inverse().unwrap();
            assert!(double.projectively_equal(&map, 1e-10));

            let q = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let roundtrip = inv.apply(&map.apply(&q).unwrap()).unwrap();
            assert!(roundtrip.chart().max_abs_diff(q.chart()) < 1e-10);
        }
    }

    #[test]
    fn moebius_transport_is_a_kernel_isometry() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2010);
        for _ in 0..30 {
            let g = moebius_to_origin(&random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP)).unwrap();
            let p = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let q = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let before = cayley_distance(&p, &q).unwrap();
            let after = cayley_distance(&g.apply(&p).unwrap(), &g.apply(&q).unwrap()).unwrap();
            assert!((before - after).abs() < 1e-10);
        }
    }

    #[test]
    fn geodesic_between_endpoint_and_midpoint() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2011);
        for trial in 0..50 {
            let (n, m) = if trial % 2 == 0 { (2, 2) } else { (1, 2) };
            let p = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let q = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let seg = geodesic_between(&p, &q).unwrap();
            assert!(seg.point_at(0.0).unwrap().chart().max_abs_diff(p.chart()) < 1e-12);
            assert!(seg.point_at(1.0).unwrap().chart().max_abs_diff(q.chart()) < 1e-10);
            let mid = seg.point_at(0.5).unwrap();
            let d1 = cayley_distance(&p, &mid).unwrap();
            let d2 = cayley_distance(&mid, &q).unwrap();
            assert!((d1 - d2).abs() < 1e-9);
        }
    }

    #[test]
    fn geodesic_between_coincident_points() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2012);
        let p = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
        let seg = geodesic_between(&p, &p).unwrap();
        assert!(seg.principal_angles().iter().all(|&a| a < 1e-12));
        let mid = seg.point_at(0.37).unwrap();
        assert!(mid.chart().max_abs_diff(p.chart()) < 1e-11);
    }

    #[test]
    fn geodesic_between_from_origin_reduces_to_exponential() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2013);
        let o = GrassmannPoint::origin(2, 2);
        let q = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
        let seg = geodesic_between(&o, &q).unwrap();
        let b = log_origin(&q).unwrap();
        for &t in &[0.2, 0.5, 0.8] {
            let via_segment = seg.point_at(t).unwrap();
            let via_exp = geodesic_from_origin(&b, t).unwrap();
            assert!(via_segment.chart().max_abs_diff(via_exp.chart()) < 1e-11);
        }
    }

    #[test]
    fn velocity_matches_scalar_calculus_and_initial_speed() {
        let o = GrassmannPoint::origin(1, 1);
        let b = 0.6;
        let q = geodesic_from_origin(
            &ComplexMatrix::new(1, 1, vec![c64(b, 0.0)]).unwrap(),
            1.0,
        )
        .unwrap();
        let seg = geodesic_between(&o, &q).unwrap();
        let v0 = seg.velocity_at(0.0).unwrap();
        assert!((v0[(0, 0)] - c64(b, 0.0)).norm() < 1e-12);
        for &t in &[0.15, 0.5, 0.85] {
            let v = seg.velocity_at(t).unwrap();
            let sec = 1.0 / (b * t).cos();
            assert!((v[(0, 0)] - c64(b * sec * sec, 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn velocity_matches_finite_differences() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2014);
        let h = 1e-5;
        for trial in 0..20 {
            let (n, m) = if trial % 2 == 0 { (2, 2) } else { (1, 3) };
            let p = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let q = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let seg = geodesic_between(&p, &q).unwrap();
            for &t in &[0.25, 0.6] {
                let analytic = seg.velocity_at(t).unwrap();
                let f = |s: f64| seg.point_at(s).unwrap().chart().clone();
                let num = ComplexMatrix::from_fn(n, m, |i, j| {
                    (-f(t + 2.0 * h)[(i, j)] + f(t + h)[(i, j)] * 8.0
                        - f(t - h)[(i, j)] * 8.0
                        + f(t - 2.0 * h)[(i, j)])
                        / (12.0 * h)
                });
                assert!(analytic.max_abs_diff(&num) < 1e-8);
            }
        }
    }

    #[test]
    fn collinear_on_constructed_geodesic_points() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2015);
        for _ in 0..20 {
            let b = rng.gaussian_matrix(2, 2);
            let b = b.scale(c64(0.5 / svd(&b).unwrap().sigma[0], 0.0));
            let o = GrassmannPoint::origin(2, 2);
            let q = geodesic_from_origin(&b, 0.4).unwrap();
            let r = geodesic_from_origin(&b, 0.9).unwrap();
            assert!(collinear(&o, &q, &r, COLLINEAR_TOL).unwrap());
            assert!(collinear(&o, &q, &q, COLLINEAR_TOL).unwrap());
        }
    }

    #[test]
    fn collinear_rejects_generic_triples() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2016);
        let o = GrassmannPoint::origin(2, 2);
        for _ in 0..100 {
            let q = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let r = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            assert!(!collinear(&o, &q, &r, 1e-8).unwrap());
        }
    }

    #[test]
    fn kahler_form_is_antisymmetric_and_origin_formula() {
        let mut rng = Xoshiro256PlusPlus::from_seed(2017);
        for _ in 0..30 {
            let at = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let x = rng.gaussian_matrix(2, 2);
            let y = rng.gaussian_matrix(2, 2);
            let wxy = kahler_form_eval(&at, &x, &y).unwrap();
            let wyx = kahler_form_eval(&at, &y, &x).unwrap();
            assert!((wxy + wyx).abs() < 1e-12 * wxy.abs().max(1.0));
            assert!(kahler_form_eval(&at, &x, &x).unwrap().abs() < 1e-12);
        }
        // at the origin: omega(x, y) = -Im Tr(x y⁺)
        let origin = GrassmannPoint::origin(2, 3);
        for _ in 0..20 {
            let x = rng.gaussian_matrix(2, 3);
            let y = rng.gaussian_matrix(2, 3);
            let w = kahler_form_eval(&origin, &x, &y).unwrap();
            let expected = -(&x * &y.adjoint()).trace().im;
            assert!((w - expected).abs() < 1e-12 * expected.abs().max(1.0));
        }
    }
}
