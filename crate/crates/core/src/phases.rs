//! Bargmann three-point invariant, phase extraction, the shape-invariant
//! factorization |Psi| = cos a cos b cos c, and the closed-form symplectic
//! area of geodesic triangles with a vertex at the origin.
//!
//! Orientation anchor: on CP^1 the triangle (0, 1, i) has
//! Psi = (1 + i)/4, phase pi/4 and closed-form area -pi/8. Every sign and
//! argument-order choice in this module is pinned by that example together
//! with the identity phase = -2 * area.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grassmann::{
    cayley_distance, moebius_to_origin, overlap_kernel, GrassmannPoint, UNIQUENESS_MARGIN,
};
use crate::holonomy::{loop_connection_integral, surface_area_quad, Connection, QuadratureSpec};

/// Fold an angle into [0, 2*pi).
pub fn fold_two_pi(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = x % two_pi;
    if r < 0.0 {
        r += two_pi;
    }
    if r >= two_pi {
        r -= two_pi;
    }
    r.max(0.0)
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_pm_pi(x: f64) -> f64 {
    let r = fold_two_pi(x);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Shortest-arc distance between two angles.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_pm_pi(a - b).abs()
}

/// Per-triangle record: sides, Bargmann invariant, phase, and the three
/// independently computed symplectic areas with their residuals.
#[derive(Debug, Clone)]
pub struct TriangleReport {
    pub side_a: f64,
    pub side_b: f64,
    pub side_c: f64,
    pub psi: Complex64,
    pub psi_abs: f64,
    pub phase: f64,
    pub area_closed: f64,
    pub area_quad: f64,
    pub area_loop: f64,
    pub residual_shape: f64,
    pub residual_phase_area: f64,
}

/// Bargmann three-point function
/// Psi(x, y, z) = K(x,y) K(y,z) K(z,x) / (K(x,x) K(y,y) K(z,z)).
///
/// Invariant under common Moebius transport of the arguments and cyclic
/// permutations; odd permutations conjugate it; |Psi| <= 1.
pub fn bargmann_three_point(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    z: &GrassmannPoint,
) -> Result<Complex64> {
    let kxy = overlap_kernel(x, y)?;
    let kyz = overlap_kernel(y, z)?;
    let kzx = overlap_kernel(z, x)?;
    let kxx = overlap_kernel(x, x)?.re;
    let kyy = overlap_kernel(y, y)?.re;
    let kzz = overlap_kernel(z, z)?.re;
    Ok(kxy * kyz * kzx / (kxx * kyy * kzz))
}

/// Phase of a nonzero complex value, folded into [0, 2*pi).
pub fn phase_of(v: Complex64) -> Result<f64> {
    if v.norm() == 0.0 {
        return Err(Error::UndefinedPhase("phase of zero requested".into()));
    }
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::NonFinite("phase of non-finite value".into()));
    }
    Ok(fold_two_pi(v.arg()))
}

/// Result of the shape-invariant factorization check.
#[derive(Debug, Clone)]
pub struct ShapeCheck {
    pub side_a: f64,
    pub side_b: f64,
    pub side_c: f64,
    pub psi: Complex64,
    pub psi_abs: f64,
    pub residual_shape: f64,
}

/// Compares |Psi(x,y,z)| against cos a cos b cos c with the Cayley sides
/// a = d(y,z), b = d(z,x), c = d(x,y).
pub fn shape_invariant_check(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    z: &GrassmannPoint,
) -> Result<ShapeCheck> {
    let side_a = cayley_distance(y, z)?;
    let side_b = cayley_distance(z, x)?;
    let side_c = cayley_distance(x, y)?;
    let psi = bargmann_three_point(x, y, z)?;
    let psi_abs = psi.norm();
    let residual_shape = (psi_abs - side_a.cos() * side_b.cos() * side_c.cos()).abs();
    Ok(ShapeCheck { side_a, side_b, side_c, psi, psi_abs, residual_shape })
}

/// Closed-form symplectic area of the geodesic triangle (0, z1, z2):
/// (1/2) arg det(1 + Z1 Z2⁺), principal branch.
pub fn closed_form_area(z1: &GrassmannPoint, z2: &GrassmannPoint) -> Result<f64> {
    // det(1 + Z1 Z2⁺) = K(z2, z1)
    let kernel = overlap_kernel(z2, z1)?;
    if kernel.norm() == 0.0 {
        return Err(Error::UndefinedPhase(
            "triangle with orthogonal states has no symplectic area branch".into(),
        ));
    }
    Ok(0.5 * kernel.arg())
}

/// Overlap of the normalized coherent vectors at z1 and z2:
/// K(z2, z1) / sqrt(K(z1,z1) K(z2,z2)). Its modulus is cos d_C(z1, z2)
/// and its phase is twice the area of the triangle (0, z1, z2).
pub fn normalized_overlap(z1: &GrassmannPoint, z2: &GrassmannPoint) -> Result<Complex64> {
    let kernel = overlap_kernel(z2, z1)?;
    let k11 = overlap_kernel(z1, z1)?.re;
    let k22 = overlap_kernel(z2, z2)?.re;
    Ok(kernel / (k11 * k22).sqrt())
}

/// Phase 2 * closed_form_area(z1, z2) folded into [0, 2*pi); equals
/// phase_of(normalized_overlap(z1, z2)).
pub fn closed_form_phase(z1: &GrassmannPoint, z2: &GrassmannPoint) -> Result<f64> {
    Ok(fold_two_pi(2.0 * closed_form_area(z1, z2)?))
}

/// Full triangle record: sides, Bargmann invariant and phase, closed-form
/// area (after transporting the first vertex to the origin), quadrature
/// area, Berry-loop area, and the shape / phase-area residuals.
pub fn triangle_report(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    z: &GrassmannPoint,
    quad_order: usize,
) -> Result<TriangleReport> {
    let shape = shape_invariant_check(x, y, z)?;
    let bound = PI / 2.0 - UNIQUENESS_MARGIN;
    for &side in &[shape.side_a, shape.side_b, shape.side_c] {
        if side >= bound {
            return Err(Error::CutLocus { angle: side });
        }
    }
    let phase = phase_of(shape.psi)?;

    let transport = moebius_to_origin(x)?;
    let z1 = transport.apply(y)?;
    let z2 = transport.apply(z)?;
    let area_closed = closed_form_area(&z1, &z2)?;

    let spec = QuadratureSpec::with_order(quad_order)?;
    let area_quad = surface_area_quad(x, y, z, &spec)?;
    let area_loop = loop_connection_integral(x, y, z, Connection::Berry, quad_order)?.value / 2.0;

    let residual_phase_area = circular_distance(phase, fold_two_pi(-2.0 * area_quad));
    Ok(TriangleReport {
        side_a: shape.side_a,
        side_b: shape.side_b,
        side_c: shape.side_c,
        psi: shape.psi,
        psi_abs: shape.psi_abs,
        phase,
        area_closed,
        area_quad,
        area_loop,
        residual_shape: shape.residual_shape,
        residual_phase_area,
    })
}
