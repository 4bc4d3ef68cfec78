//! Pluecker embedding of the Grassmannian into projective space and the
//! Fubini-Study two- and three-point functions.
//!
//! A chart point Z maps to the vector of n x n minors of [1_n | Z] over
//! the size-n column subsets in lexicographic order; the identity-block
//! minor comes first and equals 1. The Hermitian inner product here is
//! linear in the second entry, matching the overlap kernel, so the
//! Cauchy-Binet identity reads <i(p), i(q)> = K(p, q).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grassmann::GrassmannPoint;
use crate::mat::ComplexMatrix;
use crate::phases::bargmann_three_point;

/// Homogeneous coordinates of a point of CP^N; not all entries zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    homo: Vec<Complex64>,
}

impl ProjectivePoint {
    pub fn new(homo: Vec<Complex64>) -> Result<Self> {
        if homo.is_empty() {
            return Err(Error::Dimension("empty homogeneous vector".into()));
        }
        for z in &homo {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite("homogeneous coordinate not finite".into()));
            }
        }
        if !homo.iter().any(|z| z.norm() > 1e-300) {
            return Err(Error::Dimension(
                "homogeneous vector is numerically zero".into(),
            ));
        }
        Ok(ProjectivePoint { homo })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.homo
    }

    pub fn len(&self) -> usize {
        self.homo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.homo.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.homo.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Projective equality: the 2 x (N+1) stack has rank one, i.e. all
    /// 2 x 2 minors vanish relative to the entry scales.
    pub fn projectively_equal(&self, other: &ProjectivePoint, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let scale = self
            .homo
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            * other.homo.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let bound = tol * scale.max(1e-300);
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let minor = self.homo[i] * other.homo[j] - self.homo[j] * other.homo[i];
                if minor.norm() > bound {
                    return false;
                }
            }
        }
        true
    }
}

/// Hermitian inner product, linear in the second entry.
pub fn herm_inner(a: &ProjectivePoint, b: &ProjectivePoint) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "inner product of vectors with lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

const MAX_AMBIENT: usize = 10;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Visits the size-k subsets of {0, .., total-1} in lexicographic order.
fn for_each_subset(total: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        visit(&subset);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if subset[i] != i + total - k {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Pluecker embedding: the n x n minors of [1_n | Z] over lexicographic
/// column subsets. The first coordinate is the identity-block minor, 1.
///
/// Capped at m + n <= 10 so the ambient dimension stays at most
/// binomial(10, 5) - 1 = 251.
pub fn plucker_embed(p: &GrassmannPoint) -> Result<ProjectivePoint> {
    let n = p.n();
    let m = p.m();
    if n + m > MAX_AMBIENT {
        return Err(Error::Dimension(format!(
            "pluecker embedding capped at m + n <= {MAX_AMBIENT}, got {}",
            n + m
        )));
    }
    let frame = ComplexMatrix::from_fn(n, n + m, |i, j| {
        if j < n {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            p.chart()[(i, j - n)]
        }
    });
    let mut homo = Vec::with_capacity(binomial(n + m, n));
    let mut failure = None;
    for_each_subset(n + m, n, |subset| {
        let minor = ComplexMatrix::from_fn(n, n, |i, j| frame[(i, subset[j])]);
        match minor.det() {
            Ok(v) => homo.push(v),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    ProjectivePoint::new(homo)
}

/// Fubini-Study two-point function |<a, b>| / (||a|| ||b||) in [0, 1];
/// the cosine of the Cayley distance between the projective points.
pub fn fs_two_point(a: &ProjectivePoint, b: &ProjectivePoint) -> Result<f64> {
    let na = a.norm();
    let nb = b.norm();
    if na <= 1e-300 || nb <= 1e-300 {
        return Err(Error::Dimension("two-point function of a zero vector".into()));
    }
    Ok((herm_inner(a, b)?.norm() / (na * nb)).clamp(0.0, 1.0))
}

/// Bargmann three-point function on projective space:
/// <a,b><b,c><c,a> / (||a||^2 ||b||^2 ||c||^2). Independent of the
/// homogeneous representatives.
pub fn cpn_three_point(
    a: &ProjectivePoint,
    b: &ProjectivePoint,
    c: &ProjectivePoint,
) -> Result<Complex64> {
    let na = a.norm();
    let nb = b.norm();
    let nc = c.norm();
    if na <= 1e-300 || nb <= 1e-300 || nc <= 1e-300 {
        return Err(Error::Dimension("three-point function of a zero vector".into()));
    }
    let ab = herm_inner(a, b)?;
    let bc = herm_inner(b, c)?;
    let ca = herm_inner(c, a)?;
    Ok(ab * bc * ca / (na * na * nb * nb * nc * nc))
}

/// |Psi_M(x, y, z) - Psi_CPN(i(x), i(y), i(z))|: the two routes to the
/// Bargmann invariant must agree.
pub fn cauchy_residual(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
    z: &GrassmannPoint,
) -> Result<f64> {
    let direct = bargmann_three_point(x, y, z)?;
    let embedded = cpn_three_point(&plucker_embed(x)?, &plucker_embed(y)?, &plucker_embed(z)?)?;
    Ok((direct - embedded).norm())
}
