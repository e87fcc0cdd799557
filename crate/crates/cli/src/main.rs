use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sbd_cli::{execute_job, JobError, JobOutcome, JobSpec};

/// Evaluate symplectic forms, conjugates, and divergences from declarative
/// job files, and run the built-in invariant suite.
#[derive(Parser)]
#[command(name = "sbd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite and print a pass/fail table.
    Check {
        /// Base seed for the deterministic sample corpus.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Execute a JSON job file.
    Run {
        /// Path to the job document.
        #[arg(long)]
        spec: PathBuf,
        /// Output file, overriding the job's own output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed override for check jobs.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn init_thread_pool() {
    // SBD_THREADS caps the rayon pool; unset or unparsable means default.
    if let Ok(text) = std::env::var("SBD_THREADS") {
        if let Ok(threads) = text.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn fail(err: &JobError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn deliver(outcome: JobOutcome, out_flag: Option<PathBuf>, base_dir: &Path) -> ExitCode {
    match outcome {
        JobOutcome::CheckTable { text, all_passed } => {
            print!("{text}");
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        JobOutcome::Artifact { text, output } => {
            let target = out_flag.or_else(|| output.path.as_ref().map(|p| base_dir.join(p)));
            match target {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &text) {
                        return fail(&JobError::io(format!("{}: {e}", path.display())));
                    }
                    ExitCode::SUCCESS
                }
                None => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
            }
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match cli.command {
        Command::Check { seed } => {
            let job = JobSpec::Check { seed };
            match execute_job(&job, Path::new("."), None) {
                Ok(outcome) => deliver(outcome, None, Path::new(".")),
                Err(e) => fail(&e),
            }
        }
        Command::Run { spec, out, seed } => {
            let text = match std::fs::read_to_string(&spec) {
                Ok(text) => text,
                Err(e) => {
                    return fail(&JobError::io(format!("{}: {e}", spec.display())));
                }
            };
            let job = match JobSpec::from_json(&text) {
                Ok(job) => job,
                Err(e) => return fail(&JobError::schema(e.to_string())),
            };
            let base_dir = spec
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."))
                .to_path_buf();
            match execute_job(&job, &base_dir, seed) {
                Ok(outcome) => deliver(outcome, out, &base_dir),
                Err(e) => fail(&e),
            }
        }
    }
}
