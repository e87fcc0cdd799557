//! Job execution.
//!
//! `execute_job` validates a parsed [`JobSpec`] and produces the output
//! artifact. Point batches evaluate data-parallel on the global rayon pool
//! (order-preserving, so output is deterministic); everything else is a
//! straight function call into the core library.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use sbd_core::conjugate::{fenchel_conjugate, symplectic_conjugate, Method};
use sbd_core::divergence::{
    bregman_composite, symplectic_bregman, symplectic_fenchel_young, DivergenceReport,
};
use sbd_core::error::Error as CoreError;
use sbd_core::matrix::Matrix;
use sbd_core::potential::Potential;
use sbd_core::sben::{self, decompose_rate, DiscretePath};
use sbd_core::space::{PhasePoint, SymplecticForm};
use sbd_core::spec::FormSpec;

use crate::job::{
    DivergenceKind, JobSpec, OutputFormat, OutputSpec, PointsSpec, TrajectorySpec,
};
use crate::output::{decimal, emit_plot_data, Table};

/// Error classes, each with a fixed process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobErrorKind {
    /// Malformed or inconsistent specification (exit 2).
    Schema,
    /// Numerical failure during computation (exit 3).
    Numeric,
    /// Filesystem failure (exit 4).
    Io,
}

/// An execution failure with its exit classification.
#[derive(Debug)]
pub struct JobError {
    pub kind: JobErrorKind,
    pub message: String,
}

impl JobError {
    pub fn schema(message: impl Into<String>) -> Self {
        Self {
            kind: JobErrorKind::Schema,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            kind: JobErrorKind::Numeric,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: JobErrorKind::Io,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            JobErrorKind::Schema => 2,
            JobErrorKind::Numeric => 3,
            JobErrorKind::Io => 4,
        }
    }

    /// Machine-readable error JSON for stderr.
    pub fn to_json(&self) -> String {
        let kind = match self.kind {
            JobErrorKind::Schema => "schema",
            JobErrorKind::Numeric => "numeric",
            JobErrorKind::Io => "io",
        };
        json!({"error": {"kind": kind, "message": self.message}}).to_string()
    }
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for JobError {}

fn schema_err(e: CoreError) -> JobError {
    JobError::schema(e.to_string())
}

fn numeric_err(e: CoreError) -> JobError {
    JobError::numeric(e.to_string())
}

/// What a finished job hands back to the caller.
#[derive(Debug)]
pub enum JobOutcome {
    /// A rendered artifact plus the output spec that routes it.
    Artifact { text: String, output: OutputSpec },
    /// The check table; exit 0 iff `all_passed`.
    CheckTable { text: String, all_passed: bool },
}

/// One typed output cell.
enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(&'static str),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => decimal(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => (*v).to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(v) => json!(v),
        }
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::ClosedForm => "closed_form",
        Method::Solver => "solver",
    }
}

fn render(header: Vec<String>, rows: Vec<Vec<Cell>>, format: OutputFormat) -> Result<String, JobError> {
    match format {
        OutputFormat::Csv => {
            let mut table = Table::new(header);
            for row in &rows {
                table.push(row.iter().map(Cell::to_csv).collect());
            }
            emit_plot_data(&table).map_err(schema_err)
        }
        OutputFormat::Json => {
            if rows.is_empty() {
                return Err(schema_err(CoreError::EmptySeries));
            }
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| Value::Array(row.iter().map(Cell::to_json).collect()))
                .collect();
            let doc = json!({"columns": header, "rows": rows});
            Ok(format!("{doc}\n"))
        }
    }
}

/// Expands a points specification into concrete (z1, z2) pairs.
fn expand_points(points: &PointsSpec, dim: usize) -> Result<Vec<(Vec<f64>, Vec<f64>)>, JobError> {
    match points {
        PointsSpec::Pairs(pairs) => {
            for (z1, z2) in pairs {
                if z1.len() != dim || z2.len() != dim {
                    return Err(JobError::schema(format!(
                        "point pair has lengths {} and {}, expected {dim}",
                        z1.len(),
                        z2.len()
                    )));
                }
            }
            Ok(pairs.clone())
        }
        PointsSpec::Grid {
            z1,
            bounds,
            resolution,
        } => {
            if z1.len() != dim {
                return Err(JobError::schema(format!(
                    "grid z1 has length {}, expected {dim}",
                    z1.len()
                )));
            }
            let nodes = grid_nodes(bounds, *resolution, dim)?;
            Ok(nodes.into_iter().map(|z2| (z1.clone(), z2)).collect())
        }
        PointsSpec::PairGrid { bounds, resolution } => {
            let nodes = grid_nodes(bounds, *resolution, dim)?;
            let mut pairs = Vec::with_capacity(nodes.len() * nodes.len());
            for z1 in &nodes {
                for z2 in &nodes {
                    pairs.push((z1.clone(), z2.clone()));
                }
            }
            Ok(pairs)
        }
    }
}

/// Uniform grid nodes over a box, last axis fastest.
fn grid_nodes(
    bounds: &[(f64, f64)],
    resolution: usize,
    dim: usize,
) -> Result<Vec<Vec<f64>>, JobError> {
    if bounds.len() != dim {
        return Err(JobError::schema(format!(
            "box has {} axes, expected {dim}",
            bounds.len()
        )));
    }
    if resolution < 2 {
        return Err(JobError::schema("grid resolution must be at least 2"));
    }
    for (lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(JobError::schema(format!("bad axis bounds [{lo}, {hi}]")));
        }
    }
    let total = resolution.pow(dim as u32);
    if total > 4_000_000 {
        return Err(JobError::schema(format!(
            "grid of {total} nodes is too large (cap 4000000)"
        )));
    }
    let mut nodes = Vec::with_capacity(total);
    let mut index = vec![0usize; dim];
    loop {
        let node: Vec<f64> = index
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                bounds[k].0 + (bounds[k].1 - bounds[k].0) * i as f64 / (resolution - 1) as f64
            })
            .collect();
        nodes.push(node);
        // Odometer with the last axis fastest.
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(nodes);
            }
            k -= 1;
            index[k] += 1;
            if index[k] < resolution {
                break;
            }
            index[k] = 0;
            if k == 0 {
                return Ok(nodes);
            }
        }
    }
}

fn phase_pair(z1: &[f64], z2: &[f64]) -> Result<(PhasePoint, PhasePoint), JobError> {
    Ok((
        PhasePoint::from_flat(z1).map_err(schema_err)?,
        PhasePoint::from_flat(z2).map_err(schema_err)?,
    ))
}

fn point_header(prefix: &str, dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("{prefix}{i}")).collect()
}

/// Runs a validated job. `base_dir` anchors relative trajectory paths;
/// `seed_override` (the `--seed` flag) replaces a check job's seed.
pub fn execute_job(
    spec: &JobSpec,
    base_dir: &Path,
    seed_override: Option<u64>,
) -> Result<JobOutcome, JobError> {
    match spec {
        JobSpec::FormEval {
            form,
            points,
            output,
        } => {
            let built = form.build().map_err(schema_err)?;
            let dim = built.dim();
            let pairs = expand_points(points, dim)?;
            let rows: Vec<Vec<Cell>> = pairs
                .par_iter()
                .map(|(z1, z2)| -> Result<Vec<Cell>, JobError> {
                    let (p1, p2) = phase_pair(z1, z2)?;
                    let omega = built.evaluate(&p1, &p2).map_err(numeric_err)?;
                    let mut row: Vec<Cell> = z1.iter().map(|v| Cell::Num(*v)).collect();
                    row.extend(z2.iter().map(|v| Cell::Num(*v)));
                    row.push(Cell::Num(omega));
                    Ok(row)
                })
                .collect::<Result<_, _>>()?;
            let mut header = point_header("z1_", dim);
            header.extend(point_header("z2_", dim));
            header.push("omega".into());
            let text = render(header, rows, output.format)?;
            Ok(JobOutcome::Artifact {
                text,
                output: output.clone(),
            })
        }

        JobSpec::Conjugate {
            potential,
            form,
            targets,
            solver,
            output,
        } => {
            let f = potential.build().map_err(schema_err)?;
            let built_form = match form {
                Some(spec) => {
                    let built = spec.build().map_err(schema_err)?;
                    if built.dim() != f.dim() {
                        return Err(JobError::schema(format!(
                            "form dimension {} does not match potential dimension {}",
                            built.dim(),
                            f.dim()
                        )));
                    }
                    Some(built)
                }
                None => None,
            };
            for target in targets {
                if target.len() != f.dim() {
                    return Err(JobError::schema(format!(
                        "target has length {}, expected {}",
                        target.len(),
                        f.dim()
                    )));
                }
            }
            let rows: Vec<Vec<Cell>> = targets
                .par_iter()
                .map(|target| -> Result<Vec<Cell>, JobError> {
                    let result = match &built_form {
                        Some(form) => {
                            let zp = PhasePoint::from_flat(target).map_err(schema_err)?;
                            symplectic_conjugate(f.as_ref(), form, &zp, solver)
                        }
                        None => fenchel_conjugate(f.as_ref(), target, solver),
                    }
                    .map_err(numeric_err)?;
                    let mut row: Vec<Cell> = target.iter().map(|v| Cell::Num(*v)).collect();
                    row.push(Cell::Num(result.value));
                    row.push(Cell::Bool(result.converged));
                    row.push(Cell::Int(result.iterations));
                    row.push(Cell::Text(method_name(result.method)));
                    Ok(row)
                })
                .collect::<Result<_, _>>()?;
            let mut header = point_header("target", f.dim());
            header.extend(
                ["value", "converged", "iterations", "method"]
                    .map(String::from),
            );
            let text = render(header, rows, output.format)?;
            Ok(JobOutcome::Artifact {
                text,
                output: output.clone(),
            })
        }

        JobSpec::Divergence {
            divergence,
            potential,
            form,
            points,
            solver,
            output,
        } => {
            let f = potential.build().map_err(schema_err)?;
            let built = form.build().map_err(schema_err)?;
            if built.dim() != f.dim() {
                return Err(JobError::schema(format!(
                    "form dimension {} does not match potential dimension {}",
                    built.dim(),
                    f.dim()
                )));
            }
            let composite_q = match (divergence, form) {
                (DivergenceKind::BregmanComposite, FormSpec::InnerProduct { matrix, .. }) => {
                    Some(Matrix::from_nested(matrix).map_err(schema_err)?)
                }
                (DivergenceKind::BregmanComposite, FormSpec::Canonical { .. }) => None,
                (DivergenceKind::BregmanComposite, FormSpec::Pairing { .. }) => {
                    return Err(JobError::schema(
                        "bregman-composite requires a canonical or inner_product form",
                    ));
                }
                _ => None,
            };
            let pairs = expand_points(points, built.dim())?;
            let rows: Vec<Vec<Cell>> = pairs
                .par_iter()
                .map(|(z1, z2)| -> Result<Vec<Cell>, JobError> {
                    let (p1, p2) = phase_pair(z1, z2)?;
                    let report: DivergenceReport = match divergence {
                        DivergenceKind::SymplecticBregman => {
                            symplectic_bregman(f.as_ref(), &built, &p1, &p2)
                        }
                        DivergenceKind::SymplecticFenchelYoung => {
                            symplectic_fenchel_young(f.as_ref(), &built, &p1, &p2, solver)
                        }
                        DivergenceKind::BregmanComposite => {
                            bregman_composite(f.as_ref(), &p1, &p2, composite_q.as_ref())
                        }
                    }
                    .map_err(numeric_err)?;
                    let residual = report.value - report.parts.reconstruct();
                    let mut row: Vec<Cell> = z1.iter().map(|v| Cell::Num(*v)).collect();
                    row.extend(z2.iter().map(|v| Cell::Num(*v)));
                    row.push(Cell::Num(report.value));
                    row.push(Cell::Text(method_name(report.method)));
                    row.push(Cell::Num(residual));
                    Ok(row)
                })
                .collect::<Result<_, _>>()?;
            let mut header = point_header("z1_", built.dim());
            header.extend(point_header("z2_", built.dim()));
            header.extend(["divergence", "method", "residual"].map(String::from));
            let text = render(header, rows, output.format)?;
            Ok(JobOutcome::Artifact {
                text,
                output: output.clone(),
            })
        }

        JobSpec::Sben {
            phi,
            form,
            trajectory,
            decompose,
            solver,
            output,
        } => {
            let potential = phi.build().map_err(schema_err)?;
            let built = form.build().map_err(schema_err)?;
            if built.dim() != potential.dim() {
                return Err(JobError::schema(format!(
                    "form dimension {} does not match potential dimension {}",
                    built.dim(),
                    potential.dim()
                )));
            }
            let text = match trajectory {
                TrajectorySpec::Path(rel) => {
                    let path = base_dir.join(rel);
                    std::fs::read_to_string(&path)
                        .map_err(|e| JobError::io(format!("{}: {e}", path.display())))?
                }
                TrajectorySpec::Inline(text) => text.clone(),
            };
            let mut path = sben::trajectory_from_csv(&text).map_err(schema_err)?;
            if path.n() * 2 != built.dim() {
                return Err(JobError::schema(format!(
                    "trajectory dimension {} does not match form dimension {}",
                    2 * path.n(),
                    built.dim()
                )));
            }
            if *decompose {
                path = decompose_trajectory(&path, potential.as_ref(), &built)?;
            }
            let report = sben::action_report(&path, potential.as_ref(), &built, solver)
                .map_err(numeric_err)?;
            let text = match output.format {
                OutputFormat::Json => {
                    let mut doc = serde_json::to_string(&report)
                        .expect("report serializes");
                    doc.push('\n');
                    doc
                }
                OutputFormat::Csv => render(
                    ["action", "nodes", "max_node_value"].map(String::from).to_vec(),
                    vec![vec![
                        Cell::Num(report.action),
                        Cell::Int(report.nodes),
                        Cell::Num(report.max_node_value),
                    ]],
                    OutputFormat::Csv,
                )?,
            };
            Ok(JobOutcome::Artifact {
                text,
                output: output.clone(),
            })
        }

        JobSpec::Check { seed } => {
            let seed = seed_override.unwrap_or(*seed);
            let started = std::time::Instant::now();
            let results = sbd_core::checks::run_all(seed);
            let mut text = String::new();
            let mut all_passed = true;
            for r in &results {
                all_passed &= r.passed;
                text.push_str(&format!(
                    "{} {} — {}\n",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.details
                ));
            }
            let passed = results.iter().filter(|r| r.passed).count();
            text.push_str(&format!(
                "{} checks: {passed} passed, {} failed ({:.2} s, seed {seed})\n",
                results.len(),
                results.len() - passed,
                started.elapsed().as_secs_f64()
            ));
            Ok(JobOutcome::CheckTable { text, all_passed })
        }
    }
}

fn decompose_trajectory(
    path: &DiscretePath,
    phi: &dyn Potential,
    form: &SymplecticForm,
) -> Result<DiscretePath, JobError> {
    let rates = path.rates();
    let mut irr = Vec::with_capacity(rates.len());
    for rate in &rates {
        irr.push(decompose_rate(phi, form, rate).map_err(numeric_err)?.1);
    }
    DiscretePath::new(path.times().to_vec(), path.points().to_vec(), irr).map_err(schema_err)
}
