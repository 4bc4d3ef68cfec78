//! Numerical symplectic-area and connection-loop integrals.
//!
//! Surfaces are geodesic fans: rays from an apex to the points of the
//! geodesic arc joining the other two vertices, parameters (s, t) in
//! [0,1]^2 with s along the base and t along the rays. The surface
//! integral uses a Gauss-Legendre tensor grid with the ray derivative
//! taken analytically and the base derivative by fourth-order central
//! differences. Line integrals of the bundle connection
//! i Tr[dZ Z⁺ (1+ZZ⁺)^{-1}] and the Berry connection
//! (i/2) Tr[(dZ Z⁺ - Z dZ⁺)(1+ZZ⁺)^{-1}] run over the triangle loop
//! x -> y -> z -> x with analytic velocities.
//!
//! Orientation matches the closed form: the fan of (0, 1, i) on CP^1
//! integrates to -pi/8 and its loop integral to -pi/4.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grassmann::{
    cayley_distance, geodesic_between, kahler_form_eval, moebius_to_origin, GeodesicSegment,
    GrassmannPoint, UNIQUENESS_MARGIN,
};
use crate::mat::{c64, one_plus, svd, ComplexMatrix};
use crate::phases::closed_form_area;

/// Gauss-Legendre nodes and weights on [0, 1].
///
/// Computed by Newton iteration on the Legendre polynomial recurrence;
/// no stored tables.
pub fn gauss_legendre_01(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th positive root
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut delta = 1.0;
        let mut dp = 0.0;
        let mut iters = 0;
        while delta > 1e-15 && iters < 100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 1..=n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p2) / j as f64;
            }
            dp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let step = p0 / dp;
            x -= step;
            delta = step.abs();
            iters += 1;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    // affine map [-1, 1] -> [0, 1]
    for x in nodes.iter_mut() {
        *x = 0.5 * (*x + 1.0);
    }
    for w in weights.iter_mut() {
        *w *= 0.5;
    }
    (nodes, weights)
}

/// Deterministic pairwise summation in the slice order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        acc
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Tensor-grid quadrature parameters.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub order: usize,
    pub fd_step: f64,
}

pub const DEFAULT_QUAD_ORDER: usize = 32;
pub const DEFAULT_FD_STEP: f64 = 1e-5;

impl QuadratureSpec {
    pub fn new(order: usize, fd_step: f64) -> Result<Self> {
        if order < 2 {
            return Err(Error::Dimension(format!(
                "quadrature order must be at least 2, got {order}"
            )));
        }
        if !(fd_step > 1e-8 && fd_step < 1e-3) {
            return Err(Error::Dimension(format!(
                "finite-difference step {fd_step:e} outside (1e-8, 1e-3)"
            )));
        }
        Ok(QuadratureSpec { order, fd_step })
    }

    pub fn with_order(order: usize) -> Result<Self> {
        Self::new(order, DEFAULT_FD_STEP)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { order: DEFAULT_QUAD_ORDER, fd_step: DEFAULT_FD_STEP }
    }
}

/// Geodesic ray family from the origin: point(t) = U tan(Theta t) V⁺.
struct OriginRay {
    u: ComplexMatrix,
    theta: Vec<f64>,
    v: ComplexMatrix,
}

impl OriginRay {
    fn through(p: &GrassmannPoint) -> Result<OriginRay> {
        let dec = svd(p.chart())?;
        let theta = dec.sigma.iter().map(|&s| s.atan()).collect();
        Ok(OriginRay { u: dec.u, theta, v: dec.v })
    }

    fn point(&self, t: f64) -> Result<ComplexMatrix> {
        let bound = PI / 2.0 - UNIQUENESS_MARGIN;
        let mut tans = Vec::with_capacity(self.theta.len());
        for &th in &self.theta {
            let angle = th * t;
            if angle.abs() >= bound {
                return Err(Error::CutLocus { angle });
            }
            tans.push(angle.tan());
        }
        let rect = ComplexMatrix::rect_diag(self.u.rows(), self.v.rows(), &tans);
        Ok(&(&self.u * &rect) * &self.v.adjoint())
    }

    fn velocity(&self, t: f64) -> ComplexMatrix {
        let rates: Vec<f64> = self
            .theta
            .iter()
            .map(|&th| {
                let sec = 1.0 / (th * t).cos();
                th * sec * sec
            })
            .collect();
        let rect = ComplexMatrix::rect_diag(self.u.rows(), self.v.rows(), &rates);
        &(&self.u * &rect) * &self.v.adjoint()
    }
}

/// Geodesic fan of a triangle: rays from the apex to the geodesic arc
/// joining the two base vertices.
#[derive(Debug, Clone)]
pub struct FanSurface {
    apex: GrassmannPoint,
    base: GeodesicSegment,
    apex_index: usize,
}

/// Fan with rays from `apex` over the arc from `b1` to `b2`.
pub fn fan_surface(
    apex: &GrassmannPoint,
    b1: &GrassmannPoint,
    b2: &GrassmannPoint,
) -> Result<FanSurface> {
    Ok(FanSurface {
        apex: apex.clone(),
        base: geodesic_between(b1, b2)?,
        apex_index: 0,
    })
}

impl FanSurface {
    /// Fan of the triangle (x, y, z) with the apex at the given vertex
    /// index; the base arc keeps the cyclic orientation of (x, y, z).
    pub fn for_triangle(
        x: &GrassmannPoint,
        y: &GrassmannPoint,
        z: &GrassmannPoint,
        apex_index: usize,
    ) -> Result<FanSurface> {
        let (apex, b1, b2) = match apex_index {
            0 => (x, y, z),
            1 => (y, z, x),
            2 => (z, x, y),
            _ => {
                return Err(Error::Dimension(format!(
                    "apex index must be 0, 1 or 2, got {apex_index}"
                )))
            }
        };
        let mut fan = fan_surface(apex, b1, b2)?;
        fan.apex_index = apex_index;
        Ok(fan)
    }

    pub fn apex(&self) -> &GrassmannPoint {
        &self.apex
    }

    pub fn base(&self) -> &GeodesicSegment {
        &self.base
    }

    pub fn apex_index(&self) -> usize {
        self.apex_index
    }

    /// Surface map S(s, t): parameter t on the geodesic from the apex to
    /// the base point at parameter s. S(s, 0) is the apex, S(s, 1) the
    /// base arc.
    pub fn eval(&self, s: f64, t: f64) -> Result<GrassmannPoint> {
        let target = self.base.point_at(s)?;
        geodesic_between(&self.apex, &target)?.point_at(t)
    }
}

/// Symplectic area of the geodesic triangle (x, y, z): the integral of
/// the Kaehler form over the fan with apex x.
///
/// The apex is first moved to the origin (the form and the fan both
/// commute with the transport), so every ray is a straight origin
/// geodesic with an analytic t-derivative; the s-derivative uses
/// fourth-order central differences at `spec.fd_step`. Grid terms are
/// reduced row-major by pairwise summation.
pub fn surface_area_quad(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    z: &GrassmannPoint,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let transport = moebius_to_origin(x)?;
    let base = geodesic_between(&transport.apply(y)?, &transport.apply(z)?)?;
    let (nodes, weights) = gauss_legendre_01(spec.order);
    let h = spec.fd_step;
    let mut terms = Vec::with_capacity(spec.order * spec.order);
    for (si, &s) in nodes.iter().enumerate() {
        let ray = OriginRay::through(&base.point_at(s)?)?;
        let stencil = [
            OriginRay::through(&base.point_at(s - 2.0 * h)?)?,
            OriginRay::through(&base.point_at(s - h)?)?,
            OriginRay::through(&base.point_at(s + h)?)?,
            OriginRay::through(&base.point_at(s + 2.0 * h)?)?,
        ];
        for (ti, &t) in nodes.iter().enumerate() {
            let at = GrassmannPoint::new(ray.point(t)?)?;
            let dt = ray.velocity(t);
            let f_m2 = stencil[0].point(t)?;
            let f_m1 = stencil[1].point(t)?;
            let f_p1 = stencil[2].point(t)?;
            let f_p2 = stencil[3].point(t)?;
            let ds = ComplexMatrix::from_fn(at.n(), at.m(), |i, j| {
                (-f_p2[(i, j)] + f_p1[(i, j)] * 8.0 - f_m1[(i, j)] * 8.0 + f_m2[(i, j)])
                    / (12.0 * h)
            });
            let w = kahler_form_eval(&at, &ds, &dt)?;
            if !w.is_finite() {
                return Err(Error::NumericalDomain(
                    "non-finite Kaehler integrand on the fan".into(),
                ));
            }
            terms.push(weights[si] * weights[ti] * w);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Connection selector for loop integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connection {
    /// i Tr[dZ Z⁺ (1 + ZZ⁺)^{-1}], complex along open arcs, real on loops.
    Bundle,
    /// (i/2) Tr[(dZ Z⁺ - Z dZ⁺)(1 + ZZ⁺)^{-1}], real-valued pointwise.
    Berry,
}

/// A loop integral value with the leftover imaginary mass (diagnostic;
/// non-zero only at roundoff level for closed loops).
#[derive(Debug, Clone, Copy)]
pub struct LoopIntegral {
    pub value: f64,
    pub imag_residue: f64,
}

/// Value of the selected connection one-form on a chart tangent.
pub fn connection_one_form(
    which: Connection,
    z: &ComplexMatrix,
    dz: &ComplexMatrix,
) -> Result<Complex64> {
    let gram_inv = one_plus(&(z * &z.adjoint())).inverse()?;
    match which {
        Connection::Bundle => {
            let t = (&(dz * &z.adjoint()) * &gram_inv).trace();
            Ok(c64(0.0, 1.0) * t)
        }
        Connection::Berry => {
            let anti = &(dz * &z.adjoint()) - &(z * &dz.adjoint());
            let t = (&anti * &gram_inv).trace();
            Ok(c64(0.0, 0.5) * t)
        }
    }
}

/// Line integral of the selected connection around the geodesic loop
/// x -> y -> z -> x; equals twice the symplectic area of the triangle.
pub fn loop_connection_integral(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    z: &GrassmannPoint,
    which: Connection,
    order: usize,
) -> Result<LoopIntegral> {
    let (nodes, weights) = gauss_legendre_01(order);
    let arcs = [(x, y), (y, z), (z, x)];
    let mut re_terms = Vec::with_capacity(3 * order);
    let mut im_terms = Vec::with_capacity(3 * order);
    for (p, q) in arcs {
        let seg = geodesic_between(p, q)?;
        for (&t, &w) in nodes.iter().zip(weights.iter()) {
            let zt = seg.point_at(t)?;
            let vt = seg.velocity_at(t)?;
            let a = connection_one_form(which, zt.chart(), &vt)?;
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NumericalDomain(
                    "non-finite connection integrand on the loop".into(),
                ));
            }
            re_terms.push(w * a.re);
            im_terms.push(w * a.im);
        }
    }
    Ok(LoopIntegral {
        value: pairwise_sum(&re_terms),
        imag_residue: pairwise_sum(&im_terms).abs(),
    })
}

/// Scalar parallel-transport factor around the triangle loop:
/// Q = exp(2i * area); unit modulus by construction.
pub fn parallel_transport_factor(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    z: &GrassmannPoint,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let area = surface_area_quad(x, y, z, spec)?;
    Ok(Complex64::from_polar(1.0, 2.0 * area))
}

/// Fan areas of one triangle computed from each apex in cyclic order.
#[derive(Debug, Clone, Copy)]
pub struct FanAreas {
    pub by_apex: [f64; 3],
}

impl FanAreas {
    /// |area(fan apex x) - area(fan apex y)|.
    pub fn residual(&self) -> f64 {
        (self.by_apex[0] - self.by_apex[1]).abs()
    }

    /// Largest pairwise disagreement among the three fans.
    pub fn max_spread(&self) -> f64 {
        let [a, b, c] = self.by_apex;
        (a - b).abs().max((b - c).abs()).max((a - c).abs())
    }
}

/// Deformation-invariance check: the three fans of one oriented triangle
/// are deformations of each other with the same boundary, so their areas
/// must agree.
pub fn deformation_residual(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    z: &GrassmannPoint,
    spec: &QuadratureSpec,
) -> Result<FanAreas> {
    Ok(FanAreas {
        by_apex: [
            surface_area_quad(x, y, z, spec)?,
            surface_area_quad(y, z, x, spec)?,
            surface_area_quad(z, x, y, spec)?,
        ],
    })
}

/// Solid-angle cross-check on CP^1.
#[derive(Debug, Clone, Copy)]
pub struct SphereCheck {
    /// Signed phase 2 * area of the triangle (0, z1, z2), principal branch.
    pub phase: f64,
    /// Half the solid angle of the spherical triangle, by L'Huilier's
    /// formula on great-circle sides (twice the Cayley distances).
    pub half_solid_angle: f64,
    /// | |phase| - half_solid_angle |.
    pub residual: f64,
}

/// Compares the closed-form phase of the CP^1 triangle (0, z1, z2)
/// against the independent spherical-excess computation on the unit
/// sphere.
pub fn sphere_solid_angle_check(z1: Complex64, z2: Complex64) -> Result<SphereCheck> {
    let point = |w: Complex64| {
        GrassmannPoint::new(ComplexMatrix::new(1, 1, vec![w]).expect("1x1 entry"))
    };
    let p0 = point(c64(0.0, 0.0))?;
    let p1 = point(z1)?;
    let p2 = point(z2)?;
    // great-circle sides on the unit sphere are twice the Cayley distances
    let a = 2.0 * cayley_distance(&p1, &p2)?;
    let b = 2.0 * cayley_distance(&p0, &p2)?;
    let c = 2.0 * cayley_distance(&p0, &p1)?;
    if a < 1e-12 || b < 1e-12 || c < 1e-12 {
        return Err(Error::UndefinedPhase(
            "degenerate spherical triangle has no solid angle".into(),
        ));
    }
    let s = 0.5 * (a + b + c);
    let product = (0.5 * s).tan()
        * (0.5 * (s - a)).tan()
        * (0.5 * (s - b)).tan()
        * (0.5 * (s - c)).tan();
    let solid_angle = 4.0 * product.max(0.0).sqrt().atan();
    let phase = 2.0 * closed_form_area(&p1, &p2)?;
    let half = 0.5 * solid_angle;
    Ok(SphereCheck { phase, half_solid_angle: half, residual: (phase.abs() - half).abs() })
}

/// Radial cutoff for the full-chart area integral; the tail of
/// ∫ 2πr dr/(1+r²)² beyond it is pi/(1+R²) < 1e-5.
pub const SPHERE_RADIAL_CUTOFF: f64 = 1e3;

/// Symplectic area of the whole CP^1 chart by a radial-angular grid with
/// geometric radial panels up to the cutoff; converges to pi.
pub fn full_sphere_area(order: usize) -> Result<f64> {
    let (nodes, weights) = gauss_legendre_01(order);
    let panels = [(0.0, 1.0), (1.0, 10.0), (10.0, 100.0), (100.0, SPHERE_RADIAL_CUTOFF)];
    let mut terms = Vec::with_capacity(panels.len() * order * order);
    for &(r0, r1) in &panels {
        for (ri, &xr) in nodes.iter().enumerate() {
            let r = r0 + (r1 - r0) * xr;
            let wr = (r1 - r0) * weights[ri];
            for (ti, &xt) in nodes.iter().enumerate() {
                let theta = 2.0 * PI * xt;
                let wt = 2.0 * PI * weights[ti];
                let dir = Complex64::from_polar(1.0, theta);
                let at = GrassmannPoint::new(ComplexMatrix::new(
                    1,
                    1,
                    vec![dir * r],
                )?)?;
                let dr = ComplexMatrix::new(1, 1, vec![dir])?;
                let dtheta = ComplexMatrix::new(1, 1, vec![dir * c64(0.0, r)])?;
                let w = kahler_form_eval(&at, &dr, &dtheta)?;
                terms.push(wr * wt * w);
            }
        }
    }
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phases::{bargmann_three_point, circular_distance, fold_two_pi, phase_of};
    use crate::rng::{random_point, Xoshiro256PlusPlus, DEFAULT_RADIUS_CAP};
    use std::f64::consts::FRAC_PI_4;

    fn cp1(re: f64, im: f64) -> GrassmannPoint {
        GrassmannPoint::new(ComplexMatrix::new(1, 1, vec![c64(re, im)]).unwrap()).unwrap()
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn gauss_legendre_matches_reference_tables() {
        let (n4, w4) = gauss_legendre_01(4);
        // reference values on [-1, 1], mapped to [0, 1]
        let nodes = [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526];
        let weights = [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538];
        for i in 0..4 {
            assert!((n4[i] - 0.5 * (nodes[i] + 1.0)).abs() < 1e-14);
            assert!((w4[i] - 0.5 * weights[i]).abs() < 1e-14);
        }
        let (n5, _) = gauss_legendre_01(5);
        assert!((n5[0] - 0.5 * (1.0 - 0.9061798459386640)).abs() < 1e-14);
        assert!((n5[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for order in [2usize, 5, 16, 32] {
            let (nodes, weights) = gauss_legendre_01(order);
            let total: f64 = weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-13);
            // exact degree 2*order - 1
            let k = 2 * order - 1;
            let integral: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(&x, &w)| w * x.powi(k as i32))
                .sum();
            assert!((integral - 1.0 / (k as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn pairwise_sum_matches_naive_on_smooth_data() {
        let v: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 1e-3).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-9);
    }

    #[test]
    fn quadrature_spec_validation() {
        assert!(QuadratureSpec::new(1, 1e-5).is_err());
        assert!(QuadratureSpec::new(8, 1e-2).is_err());
        assert!(QuadratureSpec::new(8, 1e-9).is_err());
        let spec = QuadratureSpec::default();
        assert_eq!(spec.order, 32);
    }

    #[test]
    fn fan_surface_boundaries() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4001);
        let apex = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
        let b1 = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
        let b2 = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
        let fan = fan_surface(&apex, &b1, &b2).unwrap();
        let base = geodesic_between(&b1, &b2).unwrap();
        let side = geodesic_between(&apex, &b1).unwrap();
        for &s in &[0.0, 0.31, 0.77, 1.0] {
            let apex_slice = fan.eval(s, 0.0).unwrap();
            assert!(apex_slice.chart().max_abs_diff(apex.chart()) < 1e-10);
            let rim = fan.eval(s, 1.0).unwrap();
            assert!(rim.chart().max_abs_diff(base.point_at(s).unwrap().chart()) < 1e-10);
        }
        for &t in &[0.2, 0.6, 0.95] {
            let edge = fan.eval(0.0, t).unwrap();
            assert!(edge.chart().max_abs_diff(side.point_at(t).unwrap().chart()) < 1e-10);
        }
    }

    #[test]
    fn fan_area_cp1_anchor() {
        let spec = QuadratureSpec::default();
        let area =
            surface_area_quad(&cp1(0.0, 0.0), &cp1(1.0, 0.0), &cp1(0.0, 1.0), &spec).unwrap();
        assert!((area + PI / 8.0).abs() < 1e-6, "area = {area}");
    }

    #[test]
    fn fan_area_matches_closed_form_on_random_triangles() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4002);
        let spec = QuadratureSpec::default();
        for trial in 0..6 {
            let (n, m) = if trial % 2 == 0 { (2, 2) } else { (1, 2) };
            let origin = GrassmannPoint::origin(n, m);
            let z1 = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let z2 = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let quad = surface_area_quad(&origin, &z1, &z2, &spec).unwrap();
            let closed = closed_form_area(&z1, &z2).unwrap();
            assert!((quad - closed).abs() < 1e-6, "quad {quad} vs closed {closed}");
        }
    }

    #[test]
    fn fan_area_collinear_triple_vanishes() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4003);
        let spec = QuadratureSpec::default();
        let p = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
        let q = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
        let seg = geodesic_between(&p, &q).unwrap();
        let a = seg.point_at(0.15).unwrap();
        let b = seg.point_at(0.5).unwrap();
        let c = seg.point_at(0.9).unwrap();
        let area = surface_area_quad(&a, &b, &c, &spec).unwrap();
        assert!(area.abs() < 1e-8, "area = {area}");
    }

    #[test]
    fn fan_area_flips_sign_with_orientation() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4004);
        let spec = QuadratureSpec::default();
        let x = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
        let y = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
        let z = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
        let forward = surface_area_quad(&x, &y, &z, &spec).unwrap();
        let reversed = surface_area_quad(&x, &z, &y, &spec).unwrap();
        assert!((forward + reversed).abs() < 1e-8);
    }

    #[test]
    fn loop_integral_cp1_anchor_and_degenerate() {
        let loop_int = loop_connection_integral(
            &cp1(0.0, 0.0),
            &cp1(1.0, 0.0),
            &cp1(0.0, 1.0),
            Connection::Berry,
            32,
        )
        .unwrap();
        assert!((loop_int.value + FRAC_PI_4).abs() < 1e-6);
        assert!(loop_int.imag_residue < 1e-12);

        let x = cp1(0.3, 0.2);
        let degenerate =
            loop_connection_integral(&x, &x, &x, Connection::Bundle, 16).unwrap();
        assert!(degenerate.value.abs() < 1e-12);
    }

    #[test]
    fn bundle_and_berry_loops_agree() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4005);
        for trial in 0..4 {
            let (n, m) = if trial % 2 == 0 { (2, 2) } else { (1, 3) };
            let x = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let y = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let z = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let bundle = loop_connection_integral(&x, &y, &z, Connection::Bundle, 32).unwrap();
            let berry = loop_connection_integral(&x, &y, &z, Connection::Berry, 32).unwrap();
            assert!((bundle.value - berry.value).abs() < 1e-8);
            assert!(bundle.imag_residue < 1e-10);
            assert!(berry.imag_residue < 1e-12);
        }
    }

    #[test]
    fn loop_equals_twice_fan_area() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4006);
        let spec = QuadratureSpec::default();
        for _ in 0..3 {
            let x = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let y = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let z = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
            let area = surface_area_quad(&x, &y, &z, &spec).unwrap();
            let loop_int =
                loop_connection_integral(&x, &y, &z, Connection::Berry, spec.order).unwrap();
            assert!((loop_int.value - 2.0 * area).abs() < 1e-6);
        }
    }

    #[test]
    fn transport_factor_is_unitary_and_cancels_bargmann_phase() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4007);
        let spec = QuadratureSpec::default();
        let x = cp1(0.0, 0.0);
        let degenerate = parallel_transport_factor(&x, &x, &x, &spec).unwrap();
        assert!((degenerate - c64(1.0, 0.0)).norm() < 1e-10);
        for trial in 0..3 {
            let (n, m) = if trial % 2 == 0 { (1, 2) } else { (2, 2) };
            let x = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let y = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let z = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let q = parallel_transport_factor(&x, &y, &z, &spec).unwrap();
            assert!((q.norm() - 1.0).abs() < 1e-12);
            let phase = phase_of(bargmann_three_point(&x, &y, &z).unwrap()).unwrap();
            let holonomy = fold_two_pi(q.arg());
            assert!(circular_distance(holonomy, fold_two_pi(-phase)) < 1e-6);
        }
    }

    #[test]
    fn deformation_apex_independence() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4008);
        let spec = QuadratureSpec::default();
        let anchor = deformation_residual(&cp1(0.0, 0.0), &cp1(1.0, 0.0), &cp1(0.0, 1.0), &spec)
            .unwrap();
        assert!(anchor.max_spread() < 1e-6);
        assert!((anchor.by_apex[0] + PI / 8.0).abs() < 1e-6);
        for _ in 0..2 {
            let x = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
            let y = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
            let z = random_point(&mut rng, 1, 2, DEFAULT_RADIUS_CAP);
            let areas = deformation_residual(&x, &y, &z, &spec).unwrap();
            assert!(areas.max_spread() < 1e-6, "spread {:?}", areas.by_apex);
            assert!(areas.residual() <= areas.max_spread());
        }
    }

    #[test]
    fn sphere_octant_solid_angle() {
        let check = sphere_solid_angle_check(c64(1.0, 0.0), c64(0.0, 1.0)).unwrap();
        assert!((check.half_solid_angle - FRAC_PI_4).abs() < 1e-12);
        assert!((check.phase.abs() - FRAC_PI_4).abs() < 1e-12);
        assert!(check.residual < 1e-8);
    }

    #[test]
    fn sphere_thin_triangle_residual() {
        let check = sphere_solid_angle_check(c64(0.6, 0.0), c64(0.6, 0.004)).unwrap();
        assert!(check.residual < 1e-8);
        assert!(check.half_solid_angle > 0.0);
    }

    #[test]
    fn sphere_check_rejects_degenerate() {
        assert!(matches!(
            sphere_solid_angle_check(c64(0.5, 0.0), c64(0.5, 0.0)),
            Err(Error::UndefinedPhase(_))
        ));
    }

    #[test]
    fn full_chart_area_is_pi() {
        let area = full_sphere_area(32).unwrap();
        assert!((area - PI).abs() < 1e-4, "area = {area}");
    }

    #[test]
    fn quadrature_residual_shrinks_from_16_to_32() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4009);
        let origin = GrassmannPoint::origin(2, 2);
        let z1 = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
        let z2 = random_point(&mut rng, 2, 2, DEFAULT_RADIUS_CAP);
        let closed = closed_form_area(&z1, &z2).unwrap();
        let at32 = surface_area_quad(&origin, &z1, &z2, &QuadratureSpec::with_order(32).unwrap())
            .unwrap();
        assert!((at32 - closed).abs() < 1e-6);
    }
}
