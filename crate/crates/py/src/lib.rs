//! Python bindings: the chart points and the overlap / phase / area
//! operations, with complex scalars crossing as Python complex numbers
//! and matrices as lists of lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use gphase_core::grassmann::{self, GrassmannPoint as CorePoint};
use gphase_core::holonomy::{self, Connection, QuadratureSpec};
use gphase_core::mat::ComplexMatrix;
use gphase_core::phases;
use gphase_core::rng::{random_point as core_random_point, Xoshiro256PlusPlus};
use gphase_core::{embedding, Complex64};

fn err(e: gphase_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(err)
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Chart point of the complex Grassmannian G_n(C^{m+n}).
#[pyclass(frozen, name = "GrassmannPoint")]
struct PyGrassmannPoint {
    inner: CorePoint,
}

#[pymethods]
impl PyGrassmannPoint {
    /// Build from an n x m matrix given as a list of rows of complex numbers.
    #[new]
    fn new(chart: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = matrix_from_rows(chart)?;
        Ok(PyGrassmannPoint { inner: CorePoint::new(m).map_err(err)? })
    }

    /// The origin of the big cell.
    #[staticmethod]
    fn origin(n: usize, m: usize) -> PyResult<Self> {
        if n == 0 || m == 0 {
            return Err(PyValueError::new_err("n and m must be positive"));
        }
        Ok(PyGrassmannPoint { inner: CorePoint::origin(n, m) })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    /// Chart matrix as a list of rows of complex numbers.
    fn chart(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.chart())
    }

    fn __repr__(&self) -> String {
        format!("GrassmannPoint(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

/// Per-triangle record of sides, Bargmann invariant, phase and the three
/// symplectic-area routes.
#[pyclass(frozen, name = "TriangleReport")]
struct PyTriangleReport {
    #[pyo3(get)]
    side_a: f64,
    #[pyo3(get)]
    side_b: f64,
    #[pyo3(get)]
    side_c: f64,
    #[pyo3(get)]
    psi: Complex64,
    #[pyo3(get)]
    psi_abs: f64,
    #[pyo3(get)]
    phase: f64,
    #[pyo3(get)]
    area_closed: f64,
    #[pyo3(get)]
    area_quad: f64,
    #[pyo3(get)]
    area_loop: f64,
    #[pyo3(get)]
    residual_shape: f64,
    #[pyo3(get)]
    residual_phase_area: f64,
}

#[pyfunction]
fn overlap_kernel(p: &PyGrassmannPoint, q: &PyGrassmannPoint) -> PyResult<Complex64> {
    grassmann::overlap_kernel(&p.inner, &q.inner).map_err(err)
}

#[pyfunction]
fn cayley_distance(p: &PyGrassmannPoint, q: &PyGrassmannPoint) -> PyResult<f64> {
    grassmann::cayley_distance(&p.inner, &q.inner).map_err(err)
}

#[pyfunction]
fn bargmann_three_point(
    x: &PyGrassmannPoint,
    y: &PyGrassmannPoint,
    z: &PyGrassmannPoint,
) -> PyResult<Complex64> {
    phases::bargmann_three_point(&x.inner, &y.inner, &z.inner).map_err(err)
}

#[pyfunction]
fn phase_of(v: Complex64) -> PyResult<f64> {
    phases::phase_of(v).map_err(err)
}

#[pyfunction]
fn normalized_overlap(z1: &PyGrassmannPoint, z2: &PyGrassmannPoint) -> PyResult<Complex64> {
    phases::normalized_overlap(&z1.inner, &z2.inner).map_err(err)
}

#[pyfunction]
fn closed_form_area(z1: &PyGrassmannPoint, z2: &PyGrassmannPoint) -> PyResult<f64> {
    phases::closed_form_area(&z1.inner, &z2.inner).map_err(err)
}

#[pyfunction]
fn closed_form_phase(z1: &PyGrassmannPoint, z2: &PyGrassmannPoint) -> PyResult<f64> {
    phases::closed_form_phase(&z1.inner, &z2.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, z, order = 32))]
fn surface_area_quad(
    x: &PyGrassmannPoint,
    y: &PyGrassmannPoint,
    z: &PyGrassmannPoint,
    order: usize,
) -> PyResult<f64> {
    let spec = QuadratureSpec::with_order(order).map_err(err)?;
    holonomy::surface_area_quad(&x.inner, &y.inner, &z.inner, &spec).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, z, connection = "berry", order = 32))]
fn loop_integral(
    x: &PyGrassmannPoint,
    y: &PyGrassmannPoint,
    z: &PyGrassmannPoint,
    connection: &str,
    order: usize,
) -> PyResult<(f64, f64)> {
    let which = match connection {
        "berry" => Connection::Berry,
        "bundle" => Connection::Bundle,
        other => {
            return Err(PyValueError::new_err(format!(
                "connection must be \"berry\" or \"bundle\", got {other:?}"
            )))
        }
    };
    let li = holonomy::loop_connection_integral(&x.inner, &y.inner, &z.inner, which, order)
        .map_err(err)?;
    Ok((li.value, li.imag_residue))
}

#[pyfunction]
#[pyo3(signature = (x, y, z, order = 32))]
fn parallel_transport_factor(
    x: &PyGrassmannPoint,
    y: &PyGrassmannPoint,
    z: &PyGrassmannPoint,
    order: usize,
) -> PyResult<Complex64> {
    let spec = QuadratureSpec::with_order(order).map_err(err)?;
    holonomy::parallel_transport_factor(&x.inner, &y.inner, &z.inner, &spec).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, z, order = 32))]
fn fan_areas(
    x: &PyGrassmannPoint,
    y: &PyGrassmannPoint,
    z: &PyGrassmannPoint,
    order: usize,
) -> PyResult<[f64; 3]> {
    let spec = QuadratureSpec::with_order(order).map_err(err)?;
    Ok(holonomy::deformation_residual(&x.inner, &y.inner, &z.inner, &spec)
        .map_err(err)?
        .by_apex)
}

#[pyfunction]
#[pyo3(signature = (x, y, z, order = 32))]
fn triangle_report(
    x: &PyGrassmannPoint,
    y: &PyGrassmannPoint,
    z: &PyGrassmannPoint,
    order: usize,
) -> PyResult<PyTriangleReport> {
    let r = phases::triangle_report(&x.inner, &y.inner, &z.inner, order).map_err(err)?;
    Ok(PyTriangleReport {
        side_a: r.side_a,
        side_b: r.side_b,
        side_c: r.side_c,
        psi: r.psi,
        psi_abs: r.psi_abs,
        phase: r.phase,
        area_closed: r.area_closed,
        area_quad: r.area_quad,
        area_loop: r.area_loop,
        residual_shape: r.residual_shape,
        residual_phase_area: r.residual_phase_area,
    })
}

#[pyfunction]
fn shape_residual(
    x: &PyGrassmannPoint,
    y: &PyGrassmannPoint,
    z: &PyGrassmannPoint,
) -> PyResult<f64> {
    Ok(phases::shape_invariant_check(&x.inner, &y.inner, &z.inner)
        .map_err(err)?
        .residual_shape)
}

#[pyfunction]
fn plucker_embed(p: &PyGrassmannPoint) -> PyResult<Vec<Complex64>> {
    Ok(embedding::plucker_embed(&p.inner).map_err(err)?.coords().to_vec())
}

#[pyfunction]
fn cauchy_residual(
    x: &PyGrassmannPoint,
    y: &PyGrassmannPoint,
    z: &PyGrassmannPoint,
) -> PyResult<f64> {
    embedding::cauchy_residual(&x.inner, &y.inner, &z.inner).map_err(err)
}

#[pyfunction]
fn geodesic_point(
    p: &PyGrassmannPoint,
    q: &PyGrassmannPoint,
    t: f64,
) -> PyResult<PyGrassmannPoint> {
    let seg = grassmann::geodesic_between(&p.inner, &q.inner).map_err(err)?;
    Ok(PyGrassmannPoint { inner: seg.point_at(t).map_err(err)? })
}

#[pyfunction]
fn geodesic_velocity(
    p: &PyGrassmannPoint,
    q: &PyGrassmannPoint,
    t: f64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let seg = grassmann::geodesic_between(&p.inner, &q.inner).map_err(err)?;
    Ok(matrix_to_rows(&seg.velocity_at(t).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (p, q, r, tol = grassmann::COLLINEAR_TOL))]
fn collinear(
    p: &PyGrassmannPoint,
    q: &PyGrassmannPoint,
    r: &PyGrassmannPoint,
    tol: f64,
) -> PyResult<bool> {
    grassmann::collinear(&p.inner, &q.inner, &r.inner, tol).map_err(err)
}

#[pyfunction]
fn kahler_form(
    at: &PyGrassmannPoint,
    x: Vec<Vec<Complex64>>,
    y: Vec<Vec<Complex64>>,
) -> PyResult<f64> {
    let xt = matrix_from_rows(x)?;
    let yt = matrix_from_rows(y)?;
    grassmann::kahler_form_eval(&at.inner, &xt, &yt).map_err(err)
}

#[pyfunction]
fn sphere_solid_angle_check(z1: Complex64, z2: Complex64) -> PyResult<(f64, f64, f64)> {
    let c = holonomy::sphere_solid_angle_check(z1, z2).map_err(err)?;
    Ok((c.phase, c.half_solid_angle, c.residual))
}

#[pyfunction]
#[pyo3(signature = (order = 32))]
fn full_sphere_area(order: usize) -> PyResult<f64> {
    holonomy::full_sphere_area(order).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, m, seed, radius_cap = 0.8))]
fn random_point(n: usize, m: usize, seed: u64, radius_cap: f64) -> PyResult<PyGrassmannPoint> {
    if n == 0 || m == 0 {
        return Err(PyValueError::new_err("n and m must be positive"));
    }
    let mut rng = Xoshiro256PlusPlus::from_seed(seed);
    Ok(PyGrassmannPoint { inner: core_random_point(&mut rng, n, m, radius_cap) })
}

#[pymodule]
fn gphase(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrassmannPoint>()?;
    m.add_class::<PyTriangleReport>()?;
    m.add_function(wrap_pyfunction!(overlap_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(cayley_distance, m)?)?;
    m.add_function(wrap_pyfunction!(bargmann_three_point, m)?)?;
    m.add_function(wrap_pyfunction!(phase_of, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_area, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_phase, m)?)?;
    m.add_function(wrap_pyfunction!(surface_area_quad, m)?)?;
    m.add_function(wrap_pyfunction!(loop_integral, m)?)?;
    m.add_function(wrap_pyfunction!(parallel_transport_factor, m)?)?;
    m.add_function(wrap_pyfunction!(fan_areas, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_report, m)?)?;
    m.add_function(wrap_pyfunction!(shape_residual, m)?)?;
    m.add_function(wrap_pyfunction!(plucker_embed, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_residual, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic_point, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(collinear, m)?)?;
    m.add_function(wrap_pyfunction!(kahler_form, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_solid_angle_check, m)?)?;
    m.add_function(wrap_pyfunction!(full_sphere_area, m)?)?;
    m.add_function(wrap_pyfunction!(random_point, m)?)?;
    Ok(())
}
