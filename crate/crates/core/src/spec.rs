//! Declarative JSON specifications for forms and potentials.
//!
//! These are the untrusted-input surface of the library: parse with serde
//! (unknown fields rejected), then `build()` validates the numerical
//! invariants before anything is computed.
//!
//! Form schema: `{"kind": "canonical" | "pairing" | "inner_product",
//! "n": int, "matrix": [[...]]}` — `matrix` is required for `pairing`
//! (the n x n pairing P) and `inner_product` (the SPD Q), ignored rows/cols
//! errors are reported, and forbidden for `canonical`.
//!
//! Potential schema: `{"kind": "quadratic" | "separable" | "perspective" |
//! "entropy" | "logsumexp", ...}` with per-kind parameters documented on
//! the variants.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::potential::{
    Entropy, Generator, LogSumExp, Perspective, Potential, Quadratic, Separable,
};
use crate::space::{DualSystem, SymplecticForm};

/// JSON description of a symplectic form.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormSpec {
    /// The canonical form on R^{2n}.
    Canonical { n: usize },
    /// Form induced by a pairing matrix P (n x n, invertible).
    Pairing { n: usize, matrix: Vec<Vec<f64>> },
    /// Form induced by an inner product Q (n x n, SPD).
    InnerProduct { n: usize, matrix: Vec<Vec<f64>> },
}

impl FormSpec {
    pub fn n(&self) -> usize {
        match self {
            FormSpec::Canonical { n }
            | FormSpec::Pairing { n, .. }
            | FormSpec::InnerProduct { n, .. } => *n,
        }
    }

    /// Validates and assembles the form.
    pub fn build(&self) -> Result<SymplecticForm> {
        match self {
            FormSpec::Canonical { n } => SymplecticForm::canonical(*n),
            FormSpec::Pairing { n, matrix } => {
                let p = Self::square_matrix(matrix, *n)?;
                SymplecticForm::from_pairing(&DualSystem::new(p)?)
            }
            FormSpec::InnerProduct { n, matrix } => {
                let q = Self::square_matrix(matrix, *n)?;
                SymplecticForm::from_inner_product(&q)
            }
        }
    }

    fn square_matrix(rows: &[Vec<f64>], n: usize) -> Result<Matrix> {
        let m = Matrix::from_nested(rows)?;
        if m.rows() != n || m.cols() != n {
            return Err(Error::Spec(format!(
                "matrix is {}x{}, expected {n}x{n}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(m)
    }
}

/// JSON description of a potential.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `z' A z / 2 + b' z + c`; `a` defaults to the identity, `b` to zero,
    /// `c` to zero.
    Quadratic {
        dim: usize,
        #[serde(default)]
        a: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        b: Option<Vec<f64>>,
        #[serde(default)]
        c: f64,
    },
    /// `F1(x) + F2(y)` over the split z = (x, y).
    Separable {
        first: Box<PotentialSpec>,
        second: Box<PotentialSpec>,
    },
    /// `x f(y/x)` on x > 0 for a named 1-D generator.
    Perspective { generator: GeneratorSpec },
    /// `sum z_i ln z_i` on the positive orthant.
    Entropy { dim: usize },
    /// `ln sum exp(z_i)`.
    Logsumexp { dim: usize },
}

/// Named 1-D generators for perspective potentials.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorSpec {
    Square,
    Exp,
}

impl From<GeneratorSpec> for Generator {
    fn from(g: GeneratorSpec) -> Generator {
        match g {
            GeneratorSpec::Square => Generator::Square,
            GeneratorSpec::Exp => Generator::Exp,
        }
    }
}

impl PotentialSpec {
    /// Total dimension of the described potential.
    pub fn dim(&self) -> usize {
        match self {
            PotentialSpec::Quadratic { dim, .. }
            | PotentialSpec::Entropy { dim }
            | PotentialSpec::Logsumexp { dim } => *dim,
            PotentialSpec::Separable { first, second } => first.dim() + second.dim(),
            PotentialSpec::Perspective { .. } => 2,
        }
    }

    /// Validates and constructs the potential.
    pub fn build(&self) -> Result<Box<dyn Potential>> {
        match self {
            PotentialSpec::Quadratic { dim, a, b, c } => {
                if *dim == 0 {
                    return Err(Error::Spec("quadratic dim must be positive".into()));
                }
                let a = match a {
                    Some(rows) => {
                        let m = Matrix::from_nested(rows)?;
                        if m.rows() != *dim || m.cols() != *dim {
                            return Err(Error::Spec(format!(
                                "a is {}x{}, expected {dim}x{dim}",
                                m.rows(),
                                m.cols()
                            )));
                        }
                        m
                    }
                    None => Matrix::identity(*dim),
                };
                let b = match b {
                    Some(v) => {
                        if v.len() != *dim {
                            return Err(Error::Spec(format!(
                                "b has length {}, expected {dim}",
                                v.len()
                            )));
                        }
                        v.clone()
                    }
                    None => vec![0.0; *dim],
                };
                if !c.is_finite() {
                    return Err(Error::Spec("c must be finite".into()));
                }
                Ok(Box::new(Quadratic::new(a, b, *c)?))
            }
            PotentialSpec::Separable { first, second } => {
                let f1 = first.build()?;
                let f2 = second.build()?;
                Ok(Box::new(Separable::new(f1, f2)))
            }
            PotentialSpec::Perspective { generator } => {
                Ok(Box::new(Perspective::new((*generator).into())))
            }
            PotentialSpec::Entropy { dim } => {
                if *dim == 0 {
                    return Err(Error::Spec("entropy dim must be positive".into()));
                }
                Ok(Box::new(Entropy::new(*dim)))
            }
            PotentialSpec::Logsumexp { dim } => {
                if *dim == 0 {
                    return Err(Error::Spec("logsumexp dim must be positive".into()));
                }
                Ok(Box::new(LogSumExp::new(*dim)))
            }
        }
    }
}

/// Parses and builds a form from JSON text.
pub fn form_from_json(text: &str) -> Result<SymplecticForm> {
    let spec: FormSpec = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    spec.build()
}

/// Parses and builds a potential from JSON text.
pub fn potential_from_json(text: &str) -> Result<Box<dyn Potential>> {
    let spec: PotentialSpec =
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    spec.build()
}
