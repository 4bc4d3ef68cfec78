//! Job specification: the JSON input document and its validation.

use serde::Deserialize;

use gphase_core::grassmann::GrassmannPoint;
use gphase_core::{c64, ComplexMatrix, Error as CoreError};

/// Complex matrix as nested arrays of [re, im] pairs, row-major.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

fn default_n() -> usize {
    1
}
fn default_m() -> usize {
    1
}
fn default_seed() -> u64 {
    42
}
fn default_trials() -> usize {
    200
}
fn default_quad_order() -> usize {
    32
}
fn default_tol() -> f64 {
    1e-6
}
fn default_suite() -> String {
    "all".to_string()
}

/// One command invocation: either assembled from CLI flags or parsed
/// from a JSON document (`--input`).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub matrices: Vec<JsonMatrix>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_quad_order")]
    pub quad_order: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_suite")]
    pub suite: String,
    #[serde(default)]
    pub report: Option<String>,
}

impl Default for JobSpec {
    fn default() -> Self {
        JobSpec {
            command: None,
            n: default_n(),
            m: default_m(),
            matrices: Vec::new(),
            seed: default_seed(),
            trials: default_trials(),
            quad_order: default_quad_order(),
            tol: default_tol(),
            suite: default_suite(),
            report: None,
        }
    }
}

/// Failure classes map onto exit codes: input errors exit 2, compute
/// errors (cut locus, singularities, undefined phases, check failures)
/// exit 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Compute(CoreError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Compute(e) => write!(f, "compute error: {e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Compute(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Compute(_) => "compute",
        }
    }
}

/// Known command names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Overlap,
    Distance,
    Geodesic,
    Triangle,
    AreaClosed,
    AreaQuad,
    Loop,
    Embed,
    Verify,
    SphereCheck,
}

impl Command {
    pub fn parse(name: &str) -> Result<Command, CliError> {
        Ok(match name {
            "overlap" => Command::Overlap,
            "distance" => Command::Distance,
            "geodesic" => Command::Geodesic,
            "triangle" => Command::Triangle,
            "area-closed" => Command::AreaClosed,
            "area-quad" => Command::AreaQuad,
            "loop" => Command::Loop,
            "embed" => Command::Embed,
            "verify" => Command::Verify,
            "sphere-check" => Command::SphereCheck,
            other => {
                return Err(CliError::Input(format!(
                    "unknown command {other:?}; expected one of overlap, distance, geodesic, \
                     triangle, area-closed, area-quad, loop, embed, verify, sphere-check"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Overlap => "overlap",
            Command::Distance => "distance",
            Command::Geodesic => "geodesic",
            Command::Triangle => "triangle",
            Command::AreaClosed => "area-closed",
            Command::AreaQuad => "area-quad",
            Command::Loop => "loop",
            Command::Embed => "embed",
            Command::Verify => "verify",
            Command::SphereCheck => "sphere-check",
        }
    }
}

/// Parse a JSON job document; parse errors carry line and column.
pub fn parse_job(text: &str) -> Result<JobSpec, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!(
            "malformed job JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn json_matrix_to_complex(jm: &JsonMatrix) -> Result<ComplexMatrix, CliError> {
    let rows = jm.len();
    if rows == 0 {
        return Err(CliError::Input("matrix has no rows".into()));
    }
    let cols = jm[0].len();
    if cols == 0 {
        return Err(CliError::Input("matrix has no columns".into()));
    }
    if jm.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input("matrix rows have unequal lengths".into()));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for row in jm {
        for &[re, im] in row {
            entries.push(c64(re, im));
        }
    }
    ComplexMatrix::new(rows, cols, entries)
        .map_err(|e| CliError::Input(format!("invalid matrix: {e}")))
}

/// Convert and shape-check the k-th input matrix as a chart point on
/// G_n(C^{m+n}).
pub fn job_point(job: &JobSpec, index: usize) -> Result<GrassmannPoint, CliError> {
    let jm = job.matrices.get(index).ok_or_else(|| {
        CliError::Input(format!(
            "command {:?} needs matrix #{} but only {} given",
            job.command,
            index + 1,
            job.matrices.len()
        ))
    })?;
    let m = json_matrix_to_complex(jm)?;
    if m.shape() != (job.n, job.m) {
        return Err(CliError::Input(format!(
            "matrix #{} has shape {:?}, job specifies n={} m={}",
            index + 1,
            m.shape(),
            job.n,
            job.m
        )));
    }
    GrassmannPoint::new(m).map_err(|e| CliError::Input(format!("invalid chart point: {e}")))
}

pub fn require_matrices(job: &JobSpec, counts: &[usize]) -> Result<usize, CliError> {
    let got = job.matrices.len();
    if counts.contains(&got) {
        Ok(got)
    } else {
        Err(CliError::Input(format!(
            "command expects {counts:?} matrices, got {got}"
        )))
    }
}
