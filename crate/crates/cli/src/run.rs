//! Single-shot command dispatch: every command consumes a JobSpec and
//! emits one JSON document on standard output.

use gphase_core::grassmann::{
    cayley_distance, geodesic_between, moebius_to_origin, overlap_kernel,
};
use gphase_core::holonomy::{
    loop_connection_integral, sphere_solid_angle_check, surface_area_quad, Connection,
    QuadratureSpec,
};
use gphase_core::phases::{
    closed_form_area, closed_form_phase, normalized_overlap, triangle_report,
};
use gphase_core::embedding::plucker_embed;

use crate::job::{job_point, require_matrices, CliError, Command, JobSpec};
use crate::jsonw::{
    complex_json, f64_json, matrix_json, real_array_json, str_json, u64_json, usize_json, Obj,
};
use crate::verify::{run_verify, VerifyConfig};

pub struct RunOutput {
    pub json: String,
    pub exit_code: i32,
}

fn header(job: &JobSpec, command: Command) -> Obj {
    let mut o = Obj::new();
    o.push("command", str_json(command.name()));
    o.push("n", usize_json(job.n));
    o.push("m", usize_json(job.m));
    o
}

/// Execute one job; the returned document has every numeric field at 17
/// significant digits and is byte-identical across runs of the same job.
pub fn run(job: &JobSpec) -> Result<RunOutput, CliError> {
    let name = job
        .command
        .as_deref()
        .ok_or_else(|| CliError::Input("no command: pass a subcommand or a \"command\" field".into()))?;
    let command = Command::parse(name)?;
    match command {
        Command::Overlap => {
            require_matrices(job, &[2])?;
            let p = job_point(job, 0)?;
            let q = job_point(job, 1)?;
            let kernel = overlap_kernel(&p, &q)?;
            let normalized = normalized_overlap(&p, &q)?;
            let mut o = header(job, command);
            o.push("kernel", complex_json(kernel));
            o.push("normalized_overlap", complex_json(normalized));
            o.push("modulus", f64_json(normalized.norm()));
            o.push("cayley_distance", f64_json(cayley_distance(&p, &q)?));
            Ok(RunOutput { json: o.multiline(), exit_code: 0 })
        }
        Command::Distance => {
            require_matrices(job, &[2])?;
            let p = job_point(job, 0)?;
            let q = job_point(job, 1)?;
            let mut o = header(job, command);
            o.push("cayley_distance", f64_json(cayley_distance(&p, &q)?));
            Ok(RunOutput { json: o.multiline(), exit_code: 0 })
        }
        Command::Geodesic => {
            require_matrices(job, &[2])?;
            let p = job_point(job, 0)?;
            let q = job_point(job, 1)?;
            let seg = geodesic_between(&p, &q)?;
            let ts = [0.0, 0.25, 0.5, 0.75, 1.0];
            let mut samples = Vec::new();
            for &t in &ts {
                let mut s = Obj::new();
                s.push("t", f64_json(t));
                s.push("z", matrix_json(seg.point_at(t)?.chart()));
                samples.push(s.compact());
            }
            let mut o = header(job, command);
            o.push("principal_angles", real_array_json(seg.principal_angles()));
            o.push("cayley_length", f64_json(cayley_distance(&p, &q)?));
            o.push("points", format!("[{}]", samples.join(",")));
            o.push("velocity_at_start", matrix_json(&seg.velocity_at(0.0)?));
            Ok(RunOutput { json: o.multiline(), exit_code: 0 })
        }
        Command::Triangle => {
            let count = require_matrices(job, &[2, 3])?;
            let (x, y, z) = if count == 2 {
                (
                    gphase_core::grassmann::GrassmannPoint::origin(job.n, job.m),
                    job_point(job, 0)?,
                    job_point(job, 1)?,
                )
            } else {
                (job_point(job, 0)?, job_point(job, 1)?, job_point(job, 2)?)
            };
            let report = triangle_report(&x, &y, &z, job.quad_order)?;
            let mut o = header(job, command);
            o.push("quad_order", usize_json(job.quad_order));
            o.push("side_a", f64_json(report.side_a));
            o.push("side_b", f64_json(report.side_b));
            o.push("side_c", f64_json(report.side_c));
            o.push("psi", complex_json(report.psi));
            o.push("psi_abs", f64_json(report.psi_abs));
            o.push("phase", f64_json(report.phase));
            o.push("area_closed", f64_json(report.area_closed));
            o.push("area_quad", f64_json(report.area_quad));
            o.push("area_loop", f64_json(report.area_loop));
            o.push("residual_shape", f64_json(report.residual_shape));
            o.push("residual_phase_area", f64_json(report.residual_phase_area));
            let ok = report.residual_phase_area <= job.tol && report.residual_shape <= job.tol;
            Ok(RunOutput { json: o.multiline(), exit_code: if ok { 0 } else { 1 } })
        }
        Command::AreaClosed => {
            let count = require_matrices(job, &[2, 3])?;
            let (z1, z2) = if count == 2 {
                (job_point(job, 0)?, job_point(job, 1)?)
            } else {
                let transport = moebius_to_origin(&job_point(job, 0)?)?;
                (
                    transport.apply(&job_point(job, 1)?)?,
                    transport.apply(&job_point(job, 2)?)?,
                )
            };
            let mut o = header(job, command);
            o.push("area_closed", f64_json(closed_form_area(&z1, &z2)?));
            o.push("phase", f64_json(closed_form_phase(&z1, &z2)?));
            Ok(RunOutput { json: o.multiline(), exit_code: 0 })
        }
        Command::AreaQuad => {
            let count = require_matrices(job, &[2, 3])?;
            let (x, y, z) = if count == 2 {
                (
                    gphase_core::grassmann::GrassmannPoint::origin(job.n, job.m),
                    job_point(job, 0)?,
                    job_point(job, 1)?,
                )
            } else {
                (job_point(job, 0)?, job_point(job, 1)?, job_point(job, 2)?)
            };
            let spec = QuadratureSpec::with_order(job.quad_order)?;
            let mut o = header(job, command);
            o.push("quad_order", usize_json(job.quad_order));
            o.push("area_quad", f64_json(surface_area_quad(&x, &y, &z, &spec)?));
            Ok(RunOutput { json: o.multiline(), exit_code: 0 })
        }
        Command::Loop => {
            let count = require_matrices(job, &[2, 3])?;
            let (x, y, z) = if count == 2 {
                (
                    gphase_core::grassmann::GrassmannPoint::origin(job.n, job.m),
                    job_point(job, 0)?,
                    job_point(job, 1)?,
                )
            } else {
                (job_point(job, 0)?, job_point(job, 1)?, job_point(job, 2)?)
            };
            let bundle = loop_connection_integral(&x, &y, &z, Connection::Bundle, job.quad_order)?;
            let berry = loop_connection_integral(&x, &y, &z, Connection::Berry, job.quad_order)?;
            let gauge_gap = (bundle.value - berry.value).abs();
            let mut o = header(job, command);
            o.push("quad_order", usize_json(job.quad_order));
            o.push("bundle_loop", f64_json(bundle.value));
            o.push("bundle_imag_residue", f64_json(bundle.imag_residue));
            o.push("berry_loop", f64_json(berry.value));
            o.push("berry_imag_residue", f64_json(berry.imag_residue));
            o.push("connection_gap", f64_json(gauge_gap));
            let ok = gauge_gap <= job.tol
                && bundle.imag_residue <= job.tol
                && berry.imag_residue <= job.tol;
            Ok(RunOutput { json: o.multiline(), exit_code: if ok { 0 } else { 1 } })
        }
        Command::Embed => {
            require_matrices(job, &[1])?;
            if job.n + job.m > 10 {
                return Err(CliError::Input(format!(
                    "embedding capped at n + m <= 10, got {}",
                    job.n + job.m
                )));
            }
            let p = job_point(job, 0)?;
            let embedded = plucker_embed(&p)?;
            let coords: Vec<String> =
                embedded.coords().iter().map(|&z| complex_json(z)).collect();
            let mut o = header(job, command);
            o.push("dimension", usize_json(embedded.len() - 1));
            o.push("homogeneous", format!("[{}]", coords.join(",")));
            Ok(RunOutput { json: o.multiline(), exit_code: 0 })
        }
        Command::SphereCheck => {
            require_matrices(job, &[2])?;
            if job.n != 1 || job.m != 1 {
                return Err(CliError::Input(
                    "sphere-check runs on CP^1 only (n = 1, m = 1)".into(),
                ));
            }
            let z1 = job_point(job, 0)?.chart()[(0, 0)];
            let z2 = job_point(job, 1)?.chart()[(0, 0)];
            let check = sphere_solid_angle_check(z1, z2)?;
            let mut o = header(job, command);
            o.push("phase", f64_json(check.phase));
            o.push("half_solid_angle", f64_json(check.half_solid_angle));
            o.push("residual", f64_json(check.residual));
            let ok = check.residual <= job.tol;
            Ok(RunOutput { json: o.multiline(), exit_code: if ok { 0 } else { 1 } })
        }
        Command::Verify => {
            let cfg = VerifyConfig {
                seed: job.seed,
                trials: job.trials,
                quad_order: job.quad_order,
            };
            let report = run_verify(&job.suite, &cfg)?;
            let json = report.to_json();
            if let Some(path) = &job.report {
                std::fs::write(path, &json)
                    .map_err(|e| CliError::Input(format!("cannot write report {path}: {e}")))?;
            }
            let exit_code = if report.passed() { 0 } else { 1 };
            Ok(RunOutput { json, exit_code })
        }
    }
}

/// Error document for failed runs.
pub fn error_json(err: &CliError) -> String {
    let mut inner = Obj::new();
    inner.push("kind", str_json(err.kind()));
    inner.push("message", str_json(&err.to_string()));
    if let CliError::Compute(gphase_core::Error::CutLocus { angle }) = err {
        inner.push("angle", f64_json(*angle));
    }
    let mut o = Obj::new();
    o.push("error", inner.compact());
    o.multiline()
}

/// Convenience used by the failure path of verify trials: echo the seed.
pub fn error_json_with_seed(err: &CliError, seed: u64) -> String {
    let mut inner = Obj::new();
    inner.push("kind", str_json(err.kind()));
    inner.push("message", str_json(&err.to_string()));
    inner.push("seed", u64_json(seed));
    let mut o = Obj::new();
    o.push("error", inner.compact());
    o.multiline()
}
