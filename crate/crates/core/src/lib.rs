//! Coherent-state overlaps, Bargmann three-point phases, geodesics and
//! symplectic areas of geodesic triangles on complex projective spaces
//! and complex Grassmannians.
//!
//! The crate verifies one identity by three independent routes: the phase
//! of the normalized coherent-state overlap equals twice the symplectic
//! area of the geodesic triangle through the origin. The closed form is
//! `(1/2) arg det(1 + Z1 Z2⁺)`, the quadrature route integrates the
//! Kaehler form over a geodesic fan, and the holonomy route integrates
//! bundle and Berry connections around the triangle loop.

pub mod embedding;
pub mod error;
pub mod grassmann;
pub mod holonomy;
pub mod mat;
pub mod phases;
pub mod rng;

pub use error::{Error, Result};
pub use mat::{c64, ComplexMatrix};
pub use num_complex::Complex64;
