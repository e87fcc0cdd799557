//! The JSON job schema.
//!
//! Kinds: `form-eval`, `conjugate`, `divergence`, `sben`, `check`. Forms,
//! potentials, and solver parameters reuse the core schemas; everything
//! else is declared here. `deny_unknown_fields` everywhere keeps job files
//! archivable: a file that parses today parses identically tomorrow.

use serde::Deserialize;

use sbd_core::conjugate::SolverParams;
use sbd_core::spec::{FormSpec, PotentialSpec};

/// One job: parsed strictly, validated by `run::execute_job`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum JobSpec {
    /// Evaluate a symplectic form on point pairs.
    FormEval {
        form: FormSpec,
        points: PointsSpec,
        #[serde(default)]
        output: OutputSpec,
    },
    /// Fenchel conjugate at each target; symplectic when a form is given,
    /// ordinary otherwise.
    Conjugate {
        potential: PotentialSpec,
        #[serde(default)]
        form: Option<FormSpec>,
        targets: Vec<Vec<f64>>,
        #[serde(default)]
        solver: SolverParams,
        #[serde(default)]
        output: OutputSpec,
    },
    /// A divergence over point pairs.
    Divergence {
        divergence: DivergenceKind,
        potential: PotentialSpec,
        form: FormSpec,
        points: PointsSpec,
        #[serde(default)]
        solver: SolverParams,
        #[serde(default)]
        output: OutputSpec,
    },
    /// Score a trajectory: action plus per-node maxima, optionally after
    /// re-deriving the irreversible rates from the dissipation potential.
    Sben {
        phi: PotentialSpec,
        form: FormSpec,
        trajectory: TrajectorySpec,
        /// When true, replace the trajectory's irreversible rates with the
        /// decomposition before scoring.
        #[serde(default)]
        decompose: bool,
        #[serde(default)]
        solver: SolverParams,
        #[serde(default)]
        output: OutputSpec,
    },
    /// Run the named invariant suite.
    Check {
        #[serde(default)]
        seed: u64,
    },
}

/// Divergences addressable from job files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivergenceKind {
    SymplecticBregman,
    SymplecticFenchelYoung,
    BregmanComposite,
}

/// Point pairs for `form-eval` and `divergence` jobs.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointsSpec {
    /// Explicit list of (z1, z2) pairs, each a flat length-2n array.
    Pairs(Vec<(Vec<f64>, Vec<f64>)>),
    /// Fixed z1 against z2 sweeping a uniform grid (last axis fastest).
    Grid {
        z1: Vec<f64>,
        #[serde(rename = "box")]
        bounds: Vec<(f64, f64)>,
        resolution: usize,
    },
    /// Both points sweeping the same grid; emits all resolution^dim pairs
    /// of grid nodes (z1 outer, z2 inner).
    PairGrid {
        #[serde(rename = "box")]
        bounds: Vec<(f64, f64)>,
        resolution: usize,
    },
}

/// Trajectory input for `sben` jobs.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectorySpec {
    /// CSV file path, resolved relative to the job file.
    Path(String),
    /// CSV text carried inline.
    Inline(String),
}

/// Where and how results are written.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output file; `None` writes to stdout (the `--out` flag overrides).
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            path: None,
            format: OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl JobSpec {
    /// Strict parse of a JSON job document.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
