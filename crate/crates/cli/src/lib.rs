//! CLI harness: JSON job specifications, single-shot geometry commands,
//! and the seeded verification suites with reproducible reports.

pub mod job;
pub mod jsonw;
pub mod run;
pub mod verify;

pub use job::{parse_job, CliError, Command, JobSpec};
pub use run::{error_json, run, RunOutput};
pub use verify::{report_body, run_verify, VerifyConfig, VerifyReport};
