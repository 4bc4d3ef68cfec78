//! Seeded randomized verification suites with machine-readable reports.
//!
//! Every suite draws its trials from per-trial seeds derived
//! deterministically from the base seed, the suite label and the trial
//! index, so a report is a pure function of (seed, trials, quad_order).
//! Checks carry pinned bounds; a trial exceeding its bound lands in the
//! failure list with the offending per-trial seed.

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

use gphase_core::embedding::{cauchy_residual, herm_inner, plucker_embed};
use gphase_core::grassmann::{
    geodesic_between, moebius_to_origin, overlap_kernel, GrassmannPoint,
};
use gphase_core::holonomy::{
    full_sphere_area, loop_connection_integral, sphere_solid_angle_check, surface_area_quad,
    Connection, QuadratureSpec,
};
use gphase_core::mat::{herm_eig, svd, ComplexMatrix};
use gphase_core::phases::{
    bargmann_three_point, circular_distance, closed_form_area, fold_two_pi, phase_of,
    shape_invariant_check, wrap_pm_pi,
};
use gphase_core::rng::{random_point, splitmix64, Xoshiro256PlusPlus, DEFAULT_RADIUS_CAP};
use gphase_core::{c64, Complex64, Error as CoreError};

use crate::job::CliError;
use crate::jsonw::{f64_json, str_json, u64_json, usize_json, Obj};

/// The three manifolds of the randomized corpora: G_1(C^2), G_1(C^3),
/// G_2(C^4) as (n, m) chart shapes.
pub const MANIFOLDS: [(usize, usize); 3] = [(1, 1), (1, 2), (2, 2)];

pub const SUITE_NAMES: [&str; 7] = [
    "anchors",
    "phase-area",
    "shape-cauchy",
    "stokes",
    "deformation",
    "collinear",
    "kernels",
];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub quad_order: usize,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub seed: u64,
    pub check: &'static str,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub bound: f64,
    pub max_residual: f64,
    pub failures: Vec<Failure>,
}

impl Check {
    fn new(name: &'static str, bound: f64) -> Self {
        Check { name, bound, max_residual: 0.0, failures: Vec::new() }
    }

    fn observe(&mut self, seed: u64, value: f64) {
        if value > self.max_residual || value.is_nan() {
            self.max_residual = value;
        }
        if value.is_nan() || value > self.bound {
            self.failures.push(Failure {
                seed,
                check: self.name,
                value,
                bound: self.bound,
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suite: String,
    pub trials: usize,
    pub checks: Vec<Check>,
    pub wall_time_ms: u128,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&Failure> {
        self.checks.iter().flat_map(|c| c.failures.iter()).collect()
    }

    /// Report document; one top-level field per line so the
    /// reproducibility contract (everything except wall_time_ms) is easy
    /// to state and to test.
    pub fn to_json(&self) -> String {
        let mut residuals = Obj::new();
        for check in &self.checks {
            residuals.push(check.name, f64_json(check.max_residual));
        }
        let failures: Vec<String> = self
            .failures()
            .iter()
            .map(|f| {
                let mut o = Obj::new();
                o.push("seed", u64_json(f.seed));
                o.push("check", str_json(f.check));
                o.push("value", f64_json(f.value));
                o.push("bound", f64_json(f.bound));
                o.compact()
            })
            .collect();
        let mut doc = Obj::new();
        doc.push("suite", str_json(&self.suite));
        doc.push("trials", usize_json(self.trials));
        doc.push("max_residuals", residuals.compact());
        doc.push("failures", format!("[{}]", failures.join(",")));
        doc.push("wall_time_ms", format!("{}", self.wall_time_ms));
        doc.multiline()
    }
}

fn fnv1a(label: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Per-trial seed: one splitmix64 mix of base seed, suite label and index.
pub fn derive_seed(base: u64, label: &str, trial: u64) -> u64 {
    let mut s = base ^ fnv1a(label) ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    splitmix64(&mut s)
}

/// Retry the sampling body on cut-locus or chart-exit rejections; any
/// other error is genuine.
fn with_rejection<T>(
    rng: &mut Xoshiro256PlusPlus,
    mut attempt: impl FnMut(&mut Xoshiro256PlusPlus) -> Result<T, CoreError>,
) -> Result<T, CliError> {
    for _ in 0..100 {
        match attempt(rng) {
            Ok(v) => return Ok(v),
            Err(CoreError::CutLocus { .. }) | Err(CoreError::ChartExit(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(CliError::Compute(CoreError::NumericalDomain(
        "rejection sampling exhausted 100 attempts".into(),
    )))
}

fn suite_anchors(cfg: &VerifyConfig) -> Result<Vec<Check>, CliError> {
    let mut phase_check = Check::new("anchor_phase", 1e-12);
    let mut area_check = Check::new("anchor_area_closed", 1e-12);
    let mut quad_check = Check::new("anchor_area_quad", 1e-6);
    let mut solid_check = Check::new("anchor_solid_angle", 1e-8);
    let mut sphere_check = Check::new("anchor_sphere_area", 1e-4);

    let cp1 = |re: f64, im: f64| {
        GrassmannPoint::new(ComplexMatrix::new(1, 1, vec![c64(re, im)]).expect("1x1"))
            .expect("cp1 point")
    };
    let origin = cp1(0.0, 0.0);
    let one = cp1(1.0, 0.0);
    let i = cp1(0.0, 1.0);

    let psi = bargmann_three_point(&origin, &one, &i)?;
    phase_check.observe(cfg.seed, (phase_of(psi)? - FRAC_PI_4).abs());
    area_check.observe(cfg.seed, (closed_form_area(&one, &i)? + PI / 8.0).abs());

    let spec = QuadratureSpec::with_order(cfg.quad_order)?;
    let quad = surface_area_quad(&origin, &one, &i, &spec)?;
    quad_check.observe(cfg.seed, (quad + PI / 8.0).abs());

    let sc = sphere_solid_angle_check(c64(1.0, 0.0), c64(0.0, 1.0))?;
    solid_check.observe(cfg.seed, (sc.half_solid_angle - FRAC_PI_4).abs().max(sc.residual));

    let chart_area = full_sphere_area(cfg.quad_order)?;
    sphere_check.observe(cfg.seed, (chart_area - PI).abs());

    Ok(vec![phase_check, area_check, quad_check, solid_check, sphere_check])
}

fn suite_phase_area(cfg: &VerifyConfig) -> Result<Vec<Check>, CliError> {
    let mut phase_area = Check::new("phase_area", 1e-6);
    let mut closed_vs_quad = Check::new("closed_vs_quad", 1e-6);
    let spec = QuadratureSpec::with_order(cfg.quad_order)?;
    for (mi, &(n, m)) in MANIFOLDS.iter().enumerate() {
        let label = format!("phase-area/{mi}");
        for trial in 0..cfg.trials {
            let seed = derive_seed(cfg.seed, &label, trial as u64);
            let mut rng = Xoshiro256PlusPlus::from_seed(seed);
            let origin = GrassmannPoint::origin(n, m);
            let (phase, quad, closed) = with_rejection(&mut rng, |rng| {
                let z1 = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
                let z2 = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
                let psi = bargmann_three_point(&origin, &z1, &z2)?;
                let phase = phase_of(psi)?;
                let quad = surface_area_quad(&origin, &z1, &z2, &spec)?;
                let closed = closed_form_area(&z1, &z2)?;
                Ok((phase, quad, closed))
            })?;
            phase_area.observe(seed, circular_distance(phase, fold_two_pi(-2.0 * quad)));
            closed_vs_quad.observe(seed, (closed - quad).abs());
        }
    }
    Ok(vec![phase_area, closed_vs_quad])
}

fn suite_shape_cauchy(cfg: &VerifyConfig) -> Result<Vec<Check>, CliError> {
    let mut shape = Check::new("shape_invariant", 1e-10);
    let mut cauchy = Check::new("cauchy_formula", 1e-10);
    let mut binet = Check::new("cauchy_binet", 1e-12);
    for (mi, &(n, m)) in MANIFOLDS.iter().enumerate() {
        let label = format!("shape-cauchy/{mi}");
        for trial in 0..cfg.trials {
            let seed = derive_seed(cfg.seed, &label, trial as u64);
            let mut rng = Xoshiro256PlusPlus::from_seed(seed);
            let x = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let y = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            let z = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
            shape.observe(seed, shape_invariant_check(&x, &y, &z)?.residual_shape);
            cauchy.observe(seed, cauchy_residual(&x, &y, &z)?);
        }
    }
    // kernel vs minor-sum on pairs, manifolds interleaved
    for trial in 0..cfg.trials {
        let seed = derive_seed(cfg.seed, "cauchy-binet", trial as u64);
        let mut rng = Xoshiro256PlusPlus::from_seed(seed);
        let (n, m) = MANIFOLDS[trial % MANIFOLDS.len()];
        let p = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
        let q = random_point(&mut rng, n, m, DEFAULT_RADIUS_CAP);
        let kernel = overlap_kernel(&p, &q)?;
        let minor_sum = herm_inner(&plucker_embed(&p)?, &plucker_embed(&q)?)?;
        binet.observe(seed, (kernel - minor_sum).norm() / kernel.norm());
    }
    Ok(vec![shape, cauchy, binet])
}

fn suite_stokes(cfg: &VerifyConfig) -> Result<Vec<Check>, CliError> {
    let mut stokes = Check::new("stokes_loop", 1e-6);
    let mut gauge = Check::new("connection_gauge", 1e-8);
    let spec = QuadratureSpec::with_order(cfg.quad_order)?;
    for trial in 0..cfg.trials {
        let seed = derive_seed(cfg.seed, "stokes", trial as u64);
        let mut rng = Xoshiro256PlusPlus::from_seed(seed);
        let (n, m) = MANIFOLDS[trial % MANIFOLDS.len()];
        let (area, bundle, berry) = with_rejection(&mut rng, |rng| {
            let x = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
            let y = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
            let z = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
            let area = surface_area_quad(&x, &y, &z, &spec)?;
            let bundle =
                loop_connection_integral(&x, &y, &z, Connection::Bundle, cfg.quad_order)?;
            let berry =
                loop_connection_integral(&x, &y, &z, Connection::Berry, cfg.quad_order)?;
            Ok((area, bundle, berry))
        })?;
        let worst = (bundle.value - 2.0 * area)
            .abs()
            .max((berry.value - 2.0 * area).abs());
        stokes.observe(seed, worst);
        gauge.observe(seed, (bundle.value - berry.value).abs().max(bundle.imag_residue));
    }
    Ok(vec![stokes, gauge])
}

fn suite_deformation(cfg: &VerifyConfig) -> Result<Vec<Check>, CliError> {
    let mut deformation = Check::new("deformation", 1e-6);
    let spec = QuadratureSpec::with_order(cfg.quad_order)?;
    for trial in 0..cfg.trials {
        let seed = derive_seed(cfg.seed, "deformation", trial as u64);
        let mut rng = Xoshiro256PlusPlus::from_seed(seed);
        let (n, m) = MANIFOLDS[trial % MANIFOLDS.len()];
        let spread = with_rejection(&mut rng, |rng| {
            let x = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
            let y = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
            let z = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
            let areas = gphase_core::holonomy::deformation_residual(&x, &y, &z, &spec)?;
            Ok(areas.max_spread())
        })?;
        deformation.observe(seed, spread);
    }
    Ok(vec![deformation])
}

fn suite_collinear(cfg: &VerifyConfig) -> Result<Vec<Check>, CliError> {
    let mut phase = Check::new("collinear_phase", 1e-8);
    let mut area = Check::new("collinear_area", 1e-8);
    let trials = (cfg.trials / 2).max(1);
    for trial in 0..trials {
        let seed = derive_seed(cfg.seed, "collinear", trial as u64);
        let mut rng = Xoshiro256PlusPlus::from_seed(seed);
        let (n, m) = MANIFOLDS[trial % MANIFOLDS.len()];
        let (phase_res, area_res) = with_rejection(&mut rng, |rng| {
            let p = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
            let q = random_point(rng, n, m, DEFAULT_RADIUS_CAP);
            let seg = geodesic_between(&p, &q)?;
            let mut params = [rng.next_f64(), rng.next_f64(), rng.next_f64()];
            params.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let a = seg.point_at(params[0])?;
            let b = seg.point_at(params[1])?;
            let c = seg.point_at(params[2])?;
            let psi = bargmann_three_point(&a, &b, &c)?;
            let phase_res = wrap_pm_pi(phase_of(psi)?).abs();
            let transport = moebius_to_origin(&a)?;
            let closed =
                closed_form_area(&transport.apply(&b)?, &transport.apply(&c)?)?;
            Ok((phase_res, closed.abs()))
        })?;
        phase.observe(seed, phase_res);
        area.observe(seed, area_res);
    }
    Ok(vec![phase, area])
}

fn det_cofactor(a: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    if n == 0 {
        return c64(1.0, 0.0);
    }
    if n == 1 {
        return a[(0, 0)];
    }
    let mut acc = c64(0.0, 0.0);
    for j in 0..n {
        let minor = ComplexMatrix::from_fn(n - 1, n - 1, |r, c| {
            a[(r + 1, if c < j { c } else { c + 1 })]
        });
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += a[(0, j)] * det_cofactor(&minor) * c64(sign, 0.0);
    }
    acc
}

fn suite_kernels(cfg: &VerifyConfig) -> Result<Vec<Check>, CliError> {
    let mut eig = Check::new("eig_reconstruction", 1e-12);
    let mut svd_check = Check::new("svd_reconstruction", 1e-12);
    let mut det = Check::new("det_cofactor", 1e-12);
    let svd_shapes = [(3usize, 2usize), (2, 3), (4, 4), (5, 2), (6, 3), (1, 4)];
    for trial in 0..cfg.trials {
        let seed = derive_seed(cfg.seed, "kernels", trial as u64);
        let mut rng = Xoshiro256PlusPlus::from_seed(seed);

        let k = 1 + trial % 6;
        let g = rng.gaussian_matrix(k, k);
        let h = ComplexMatrix::from_fn(k, k, |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5);
        let dec = herm_eig(&h)?;
        let d = ComplexMatrix::rect_diag(k, k, &dec.eigenvalues);
        let rec = &(&dec.vectors * &d) * &dec.vectors.adjoint();
        let unit = (&dec.vectors.adjoint() * &dec.vectors)
            .max_abs_diff(&ComplexMatrix::identity(k));
        eig.observe(
            seed,
            (rec.max_abs_diff(&h) / h.max_abs().max(1.0)).max(unit),
        );

        let (r, c) = svd_shapes[trial % svd_shapes.len()];
        let a = rng.gaussian_matrix(r, c);
        let dec = svd(&a)?;
        svd_check.observe(
            seed,
            dec.reconstruct().max_abs_diff(&a) / a.max_abs().max(1.0),
        );

        let dsize = 2 + trial % 5;
        let b = rng.gaussian_matrix(dsize, dsize);
        let lu = b.det()?;
        let co = det_cofactor(&b);
        det.observe(seed, (lu - co).norm() / co.norm().max(1e-30));
    }
    Ok(vec![eig, svd_check, det])
}

fn run_one_suite(name: &str, cfg: &VerifyConfig) -> Result<Vec<Check>, CliError> {
    match name {
        "anchors" => suite_anchors(cfg),
        "phase-area" => suite_phase_area(cfg),
        "shape-cauchy" => suite_shape_cauchy(cfg),
        "stokes" => suite_stokes(cfg),
        "deformation" => suite_deformation(cfg),
        "collinear" => suite_collinear(cfg),
        "kernels" => suite_kernels(cfg),
        other => Err(CliError::Input(format!(
            "unknown suite {other:?}; expected \"all\" or one of {SUITE_NAMES:?}"
        ))),
    }
}

/// Run one suite or `"all"`, returning the report.
pub fn run_verify(suite: &str, cfg: &VerifyConfig) -> Result<VerifyReport, CliError> {
    let start = Instant::now();
    let mut checks = Vec::new();
    if suite == "all" {
        for name in SUITE_NAMES {
            checks.extend(run_one_suite(name, cfg)?);
        }
    } else {
        checks.extend(run_one_suite(suite, cfg)?);
    }
    Ok(VerifyReport {
        suite: suite.to_string(),
        trials: cfg.trials,
        checks,
        wall_time_ms: start.elapsed().as_millis(),
    })
}

/// Drop the wall-clock line: the byte-stable portion of a report.
pub fn report_body(report_json: &str) -> String {
    report_json
        .lines()
        .filter(|line| !line.trim_start().starts_with("\"wall_time_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}
