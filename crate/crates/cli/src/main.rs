//! gphase: coherent-state overlaps, geodesic triangles and symplectic
//! areas on complex Grassmannians.
//!
//! Exit codes: 0 success, 1 check or computation failure, 2 input error.

use std::io::Read;

use clap::{Parser, Subcommand};

use gphase_cli::job::{CliError, JobSpec};
use gphase_cli::run::{error_json, run};
use gphase_cli::parse_job;

#[derive(Parser)]
#[command(
    name = "gphase",
    about = "Coherent-state overlaps, geodesic triangles and symplectic areas on complex Grassmannians",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Option<CommandArg>,

    /// Subspace dimension n of G_n(C^{m+n}); chart matrices are n x m.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Complementary dimension m.
    #[arg(long, global = true)]
    m: Option<usize>,

    /// Base seed of the randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Trials per corpus in the randomized suites.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Gauss-Legendre nodes per axis.
    #[arg(long = "quad-order", global = true)]
    quad_order: Option<usize>,

    /// Residual gate for single-shot commands.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Verification suite name, or "all".
    #[arg(long, global = true)]
    suite: Option<String>,

    /// Read the JobSpec JSON from this file, or "-" for standard input.
    #[arg(long, global = true)]
    input: Option<String>,

    /// Also write the verify report JSON to this path.
    #[arg(long, global = true)]
    report: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum CommandArg {
    /// Overlap kernel and normalized overlap of two chart points.
    Overlap,
    /// Cayley distance between two chart points.
    Distance,
    /// Geodesic data between two chart points.
    Geodesic,
    /// Full triangle report (two matrices imply the origin as first vertex).
    Triangle,
    /// Closed-form symplectic area of a geodesic triangle.
    #[command(name = "area-closed")]
    AreaClosed,
    /// Quadrature symplectic area over the geodesic fan.
    #[command(name = "area-quad")]
    AreaQuad,
    /// Bundle and Berry connection integrals around the triangle loop.
    Loop,
    /// Pluecker embedding of a chart point.
    Embed,
    /// Seeded verification suites with a machine-readable report.
    Verify,
    /// CP^1 solid-angle cross-check of the closed-form phase.
    #[command(name = "sphere-check")]
    SphereCheck,
}

impl CommandArg {
    fn name(self) -> &'static str {
        match self {
            CommandArg::Overlap => "overlap",
            CommandArg::Distance => "distance",
            CommandArg::Geodesic => "geodesic",
            CommandArg::Triangle => "triangle",
            CommandArg::AreaClosed => "area-closed",
            CommandArg::AreaQuad => "area-quad",
            CommandArg::Loop => "loop",
            CommandArg::Embed => "embed",
            CommandArg::Verify => "verify",
            CommandArg::SphereCheck => "sphere-check",
        }
    }
}

fn assemble_job(cli: &Cli) -> Result<JobSpec, CliError> {
    let mut job = match &cli.input {
        Some(path) => {
            let text = if path == "-" {
                let mut buf = String::new();
                std::io::stdin()
                    .read_to_string(&mut buf)
                    .map_err(|e| CliError::Input(format!("cannot read standard input: {e}")))?;
                buf
            } else {
                std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?
            };
            parse_job(&text)?
        }
        None => JobSpec::default(),
    };
    if let Some(sub) = cli.command {
        if let Some(from_json) = &job.command {
            if from_json != sub.name() {
                return Err(CliError::Input(format!(
                    "subcommand {:?} conflicts with job command {:?}",
                    sub.name(),
                    from_json
                )));
            }
        }
        job.command = Some(sub.name().to_string());
    }
    if let Some(n) = cli.n {
        job.n = n;
    }
    if let Some(m) = cli.m {
        job.m = m;
    }
    if let Some(seed) = cli.seed {
        job.seed = seed;
    }
    if let Some(trials) = cli.trials {
        job.trials = trials;
    }
    if let Some(order) = cli.quad_order {
        job.quad_order = order;
    }
    if let Some(tol) = cli.tol {
        job.tol = tol;
    }
    if let Some(suite) = &cli.suite {
        job.suite = suite.clone();
    }
    if let Some(report) = &cli.report {
        job.report = Some(report.clone());
    }
    if job.n == 0 || job.m == 0 {
        return Err(CliError::Input("n and m must be positive".into()));
    }
    Ok(job)
}

fn main() {
    let cli = Cli::parse();
    let outcome = assemble_job(&cli).and_then(|job| run(&job));
    match outcome {
        Ok(output) => {
            print!("{}", output.json);
            std::process::exit(output.exit_code);
        }
        Err(err) => {
            print!("{}", error_json(&err));
            eprintln!("gphase: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
