//! Dense complex linear algebra on small matrices (dimension <= 16):
//! LU with partial pivoting for determinants and inverses, cyclic
//! complex Jacobi rotations for Hermitian eigendecompositions, an SVD
//! assembled from the eigendecomposition of `a⁺a`, and spectral
//! functions of Hermitian matrices (`tan`, `arctan`, inverse square
//! roots) applied on the eigenvalues.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense rectangular complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4e}{:+.4e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Validated constructor: checks the entry count and rejects NaN/Inf.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        let m = ComplexMatrix { rows, cols, entries };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, entries: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged row lengths".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Rectangular diagonal matrix with the given real values on the diagonal.
    pub fn rect_diag(rows: usize, cols: usize, values: &[f64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &v) in values.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = c64(v, 0.0);
        }
        m
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn check_finite(&self) -> Result<()> {
        for z in &self.entries {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(format!(
                    "matrix entry {z:?} is not finite"
                )));
            }
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |entry| of `self - other`; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Block extraction: `rows x cols` submatrix with top-left corner (r0, c0).
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Assemble [[a, b], [c, d]] from conforming blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        Self::from_fn(rows, cols, |i, j| {
            if i < a.rows {
                if j < a.cols { a[(i, j)] } else { b[(i, j - a.cols)] }
            } else if j < a.cols {
                c[(i - a.rows, j)]
            } else {
                d[(i - a.rows, j - a.cols)]
            }
        })
    }

    /// Determinant via LU with partial pivoting; the 0x0 determinant is 1.
    pub fn det(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut det = ONE;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].norm();
            for i in k + 1..n {
                let mag = a[i * n + k].norm();
                if mag > best {
                    best = mag;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Ok(ZERO);
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let factor = a[i * n + k] / pivot;
                for j in k + 1..n {
                    let sub = factor * a[k * n + j];
                    a[i * n + j] -= sub;
                }
            }
        }
        Ok(det)
    }

    /// Inverse via Gauss-Jordan with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "inverse of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, 0));
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].norm();
            for i in k + 1..n {
                let mag = a[i * n + k].norm();
                if mag > best {
                    best = mag;
                    piv = i;
                }
            }
            if best <= 1e-13 * scale {
                return Err(Error::Singular { pivot: best });
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                    inv.swap(k * n + j, piv * n + j);
                }
            }
            let pivot = a[k * n + k];
            for j in 0..n {
                a[k * n + j] /= pivot;
                inv[k * n + j] /= pivot;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let factor = a[i * n + k];
                if factor == ZERO {
                    continue;
                }
                for j in 0..n {
                    let s1 = factor * a[k * n + j];
                    a[i * n + j] -= s1;
                    let s2 = factor * inv[k * n + j];
                    inv[i * n + j] -= s2;
                }
            }
        }
        Ok(ComplexMatrix { rows: n, cols: n, entries: inv })
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = aik * rhs[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl std::ops::Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(c64(-1.0, 0.0))
    }
}

/// Identity plus a product, `1 + a*b`, sized by the product.
pub fn one_plus(prod: &ComplexMatrix) -> ComplexMatrix {
    assert!(prod.is_square());
    &ComplexMatrix::identity(prod.rows()) + prod
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `eigenvalues` ascending; `vectors` unitary with the i-th column the
/// eigenvector of `eigenvalues[i]`.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 64;

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is symmetrized as `(h + h⁺)/2` before iterating; inputs whose
/// Hermitian deviation exceeds `1e-12 * scale` are rejected.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEig> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "herm_eig of non-square {}x{} matrix",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows();
    let scale = h.max_abs().max(1.0);
    let deviation = h.hermitian_deviation();
    if deviation > 1e-12 * scale {
        return Err(Error::NotHermitian { deviation });
    }
    // symmetrize; the Jacobi loop then preserves Hermiticity exactly enough
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        (h[(i, j)] + h[(j, i)].conj()) * 0.5
    });
    let mut v = ComplexMatrix::identity(n);
    let fro = a.frobenius_norm();
    if n <= 1 || fro == 0.0 {
        let eigenvalues = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok(HermEig { eigenvalues, vectors: v });
    }
    let target = 1e-14 * fro;
    let mut converged = off_diagonal_norm(&a) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let beta = apq.norm();
                if beta < 1e-300 {
                    continue;
                }
                let phase = apq / beta;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let se_pos = phase * s; // s * e^{i phi}
                let se_neg = phase.conj() * s; // s * e^{-i phi}
                // column update: A <- A U, V <- V U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * se_neg;
                    a[(k, q)] = akp * se_pos + akq * c;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * se_neg;
                    v[(k, q)] = vkp * se_pos + vkq * c;
                }
                // row update: A <- U⁺ A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * se_pos;
                    a[(q, k)] = apk * se_neg + aqk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = c64(a[(p, p)].re, 0.0);
                a[(q, q)] = c64(a[(q, q)].re, 0.0);
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermEig { eigenvalues, vectors })
}

/// Singular value decomposition `a = u * diag(sigma) * v⁺`.
///
/// `u` is rows x rows unitary, `v` cols x cols unitary, `sigma` descending of
/// length min(rows, cols).
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let rows = self.u.rows();
        let cols = self.v.rows();
        let s = ComplexMatrix::rect_diag(rows, cols, &self.sigma);
        &(&self.u * &s) * &self.v.adjoint()
    }
}

fn mgs_append(columns: &mut Vec<Vec<Complex64>>, candidate: &[Complex64], accept: f64) -> bool {
    let mut w = candidate.to_vec();
    for _ in 0..2 {
        for col in columns.iter() {
            let proj: Complex64 = col.iter().zip(&w).map(|(c, x)| c.conj() * x).sum();
            for (wi, ci) in w.iter_mut().zip(col) {
                *wi -= proj * ci;
            }
        }
    }
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= accept {
        return false;
    }
    for wi in w.iter_mut() {
        *wi /= norm;
    }
    columns.push(w);
    true
}

/// SVD built from the Hermitian eigendecomposition of `a⁺a`; left factors
/// for singular values below the rank threshold are completed by modified
/// Gram-Schmidt against the canonical basis.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let (rows, cols) = a.shape();
    let h = &a.adjoint() * a;
    let eig = herm_eig(&h)?;
    let k = rows.min(cols);
    // descending singular values and matching right vectors
    let mut sigma = Vec::with_capacity(k);
    let mut v = ComplexMatrix::zeros(cols, cols);
    for j in 0..cols {
        let src = cols - 1 - j;
        for i in 0..cols {
            v[(i, j)] = eig.vectors[(i, src)];
        }
    }
    let sing: Vec<f64> = (0..cols)
        .map(|j| eig.eigenvalues[cols - 1 - j].max(0.0).sqrt())
        .collect();
    sigma.extend(sing.iter().take(k));
    let sigma_max = sing.first().copied().unwrap_or(0.0);
    let thresh = 1e-12 * sigma_max.max(1.0);
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(rows);
    for (j, &s) in sing.iter().enumerate().take(k) {
        if s <= thresh {
            break;
        }
        let mut col = vec![ZERO; rows];
        for (i, ci) in col.iter_mut().enumerate() {
            let mut acc = ZERO;
            for l in 0..cols {
                acc += a[(i, l)] * v[(l, j)];
            }
            *ci = acc / s;
        }
        if !mgs_append(&mut u_cols, &col, 0.1) {
            return Err(Error::NumericalDomain(
                "svd left factor collapsed during orthogonalization".into(),
            ));
        }
    }
    let mut basis = 0;
    while u_cols.len() < rows {
        let mut e = vec![ZERO; rows];
        e[basis] = ONE;
        mgs_append(&mut u_cols, &e, 0.1);
        basis += 1;
        if basis > rows {
            return Err(Error::NumericalDomain("svd completion exhausted basis".into()));
        }
    }
    let u = ComplexMatrix::from_fn(rows, rows, |i, j| u_cols[j][i]);
    Ok(Svd { u, sigma, v })
}

/// Spectral application of a real scalar function to a Hermitian matrix:
/// `V diag(f(lambda)) V⁺`.
///
/// Values of `f` that are non-finite or astronomically large (>= 1e14) are
/// treated as poles and reported with the offending eigenvalue.
pub fn herm_fun(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    let n = h.rows();
    let mut fv = Vec::with_capacity(n);
    for &lambda in &eig.eigenvalues {
        let y = f(lambda);
        if !y.is_finite() || y.abs() >= 1e14 {
            return Err(Error::EigenPole { eigenvalue: lambda });
        }
        fv.push(y);
    }
    let d = ComplexMatrix::rect_diag(n, n, &fv);
    Ok(&(&eig.vectors * &d) * &eig.vectors.adjoint())
}
