//! Job-file driven front end for the divergence library.
//!
//! A job is one flat JSON document with a `kind` discriminator; the
//! documented schema lives in the repository README. Parsing is strict
//! (unknown fields are errors) and every numeric payload is validated
//! before any computation starts, so a job file is either rejected up
//! front with exit code 2 or runs to completion deterministically.

pub mod job;
pub mod output;
pub mod run;

pub use job::JobSpec;
pub use run::{execute_job, JobError, JobOutcome};
