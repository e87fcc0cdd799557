//! Dual systems, phase points, and symplectic forms on Z = X + Y.
//!
//! A form is represented concretely by its Gram matrix `Omega`, with
//! `omega(z1, z2) = z1' * Omega * z2`; in finite dimensions that
//! representation is complete. Constructors enforce skew-symmetry and
//! nondegeneracy, so every `SymplecticForm` in circulation is a valid one.

use crate::error::{Error, Result};
use crate::group::omega0;
use crate::matrix::{cholesky, Matrix};
use crate::tol;

/// A nondegenerate bilinear pairing `<x, y> = x' * P * y` between two
/// n-dimensional spaces.
#[derive(Debug, Clone)]
pub struct DualSystem {
    n: usize,
    pairing: Matrix,
}

impl DualSystem {
    /// Validates that `pairing` is square and invertible.
    pub fn new(pairing: Matrix) -> Result<Self> {
        if !pairing.is_square() || pairing.rows() == 0 {
            return Err(Error::ShapeMismatch {
                expected_rows: pairing.rows(),
                expected_cols: pairing.rows(),
                rows: pairing.rows(),
                cols: pairing.cols(),
            });
        }
        if pairing.inverse().is_err() {
            return Err(Error::Degenerate {
                context: "pairing matrix is singular".into(),
            });
        }
        Ok(Self {
            n: pairing.rows(),
            pairing,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairing(&self) -> &Matrix {
        &self.pairing
    }

    /// `<x, y> = x' * P * y`.
    pub fn pair(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.n || y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len().max(y.len()),
            });
        }
        let py = self.pairing.matvec(y)?;
        Ok(x.iter().zip(&py).map(|(a, b)| a * b).sum())
    }
}

/// A point z = (x, y) of the phase space Z = X + Y.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        for (index, &value) in x.iter().chain(y.iter()).enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
        }
        Ok(Self { x, y })
    }

    /// Splits a length-2n coordinate vector into (x, y) halves.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() % 2 != 0 || flat.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: flat.len() + 1,
                got: flat.len(),
            });
        }
        let n = flat.len() / 2;
        Self::new(flat[..n].to_vec(), flat[n..].to_vec())
    }

    pub fn zero(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Concatenated (x, y) coordinates, length 2n.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.x.len());
        out.extend_from_slice(&self.x);
        out.extend_from_slice(&self.y);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a - b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            x: self.x.iter().map(|v| factor * v).collect(),
            y: self.y.iter().map(|v| factor * v).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.flat().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// A symplectic form, stored as its 2n x 2n Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    omega: Matrix,
    // (Omega')^-1, kept around for symplectic-gradient lifts.
    omega_inv_t: Matrix,
}

impl SymplecticForm {
    /// Validates skew-symmetry and nondegeneracy of a raw Gram matrix.
    pub fn from_gram(omega: Matrix) -> Result<Self> {
        if !omega.is_square() || omega.rows() % 2 != 0 || omega.rows() == 0 {
            return Err(Error::OddDimension {
                rows: omega.rows(),
                cols: omega.cols(),
            });
        }
        let skew_residual = omega.add(&omega.transpose())?.max_norm();
        if skew_residual > tol::SKEW_TOL {
            return Err(Error::Degenerate {
                context: format!("Gram matrix is not skew-symmetric (residual {skew_residual:.3e})"),
            });
        }
        let omega_inv_t = omega
            .inverse()
            .map_err(|_| Error::Degenerate {
                context: "Gram matrix is singular".into(),
            })?
            .transpose();
        Ok(Self {
            n: omega.rows() / 2,
            omega,
            omega_inv_t,
        })
    }

    /// The canonical form `Omega0` on R^{2n}.
    pub fn canonical(n: usize) -> Result<Self> {
        Self::from_gram(omega0(n)?)
    }

    /// Form induced by a dual pairing:
    /// `omega(z1, z2) = <x1, y2> - <x2, y1>`, i.e. `[[0, P], [-P', 0]]`.
    pub fn from_pairing(ds: &DualSystem) -> Result<Self> {
        let n = ds.n();
        let p = ds.pairing();
        let zero = Matrix::zeros(n, n);
        let gram = Matrix::block2x2(&zero, p, &p.transpose().scale(-1.0), &zero);
        Self::from_gram(gram)
    }

    /// Form induced by the inner product `<x, y>_Q = x' * Q * y` with Q
    /// symmetric positive-definite: `[[0, Q], [-Q, 0]]`.
    ///
    /// The resulting bilinear values agree with `from_pairing` at P = Q;
    /// assembling with Q itself (rather than a Cholesky factor) keeps the
    /// Gram matrix exactly skew-symmetric.
    pub fn from_inner_product(q: &Matrix) -> Result<Self> {
        cholesky(q)?; // SPD gate; factor itself is not needed here
        let n = q.rows();
        let zero = Matrix::zeros(n, n);
        let gram = Matrix::block2x2(&zero, q, &q.scale(-1.0), &zero);
        Self::from_gram(gram)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn gram(&self) -> &Matrix {
        &self.omega
    }

    /// `omega(z1, z2) = z1' * Omega * z2`.
    pub fn evaluate(&self, z1: &PhasePoint, z2: &PhasePoint) -> Result<f64> {
        if z1.n() != self.n || z2.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z1.n().max(z2.n()),
            });
        }
        self.evaluate_flat(&z1.flat(), &z2.flat())
    }

    /// Same as [`evaluate`](Self::evaluate) on raw length-2n slices.
    pub fn evaluate_flat(&self, z1: &[f64], z2: &[f64]) -> Result<f64> {
        if z1.len() != self.dim() || z2.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z1.len().max(z2.len()),
            });
        }
        let oz2 = self.omega.matvec(z2)?;
        Ok(z1.iter().zip(&oz2).map(|(a, b)| a * b).sum())
    }

    /// `Omega' * z`, the covector such that `omega(z, .) = (Omega' z) . `.
    pub fn transpose_apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.omega.transpose().matvec(z)
    }

    /// Solves `Omega' * a = g`, the lift of an ordinary gradient to a
    /// symplectic one.
    pub fn lift_gradient(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.omega_inv_t.matvec(g)
    }

    /// Whether this is (numerically) the canonical form.
    pub fn is_canonical(&self) -> bool {
        match omega0(self.n) {
            Ok(canon) => match self.omega.sub(&canon) {
                Ok(diff) => diff.max_norm() <= tol::SKEW_TOL,
                Err(_) => false,
            },
            Err(_) => false,
        }
    }

    /// Darboux basis (e_1..e_n, f_1..f_n) with `omega(e_i, f_j) = delta_ij`
    /// and all other pairings zero, built by symplectic Gram-Schmidt.
    pub fn darboux_basis(&self) -> Result<Vec<PhasePoint>> {
        let basis = darboux_from_gram(&self.omega, tol::DARBOUX_TOL)?;
        basis.iter().map(|v| PhasePoint::from_flat(v)).collect()
    }
}

/// The complex-structure matrix `J = [[0, -I], [I, 0]]`, acting as
/// `J(x, y) = (-y, x)`; satisfies `J^2 = -I` and is a symplectomorphism
/// of the canonical form.
pub fn complex_structure(n: usize) -> Result<Matrix> {
    Ok(omega0(n)?.scale(-1.0))
}

/// `J z = (-y, x)`.
pub fn apply_complex_structure(z: &PhasePoint) -> PhasePoint {
    PhasePoint {
        x: z.y.iter().map(|v| -v).collect(),
        y: z.x.to_vec(),
    }
}

/// The omega-compatible metric `g(z1, z2) = omega(z1, J z2)` of the
/// canonical form; equals `<x1, x2> + <y1, y2>` and is positive-definite.
///
/// Defined for the canonical form only: after a Darboux change of basis
/// this covers every form up to symplectomorphism.
pub fn compatible_metric(form: &SymplecticForm, z1: &PhasePoint, z2: &PhasePoint) -> Result<f64> {
    if !form.is_canonical() {
        return Err(Error::NotCanonical);
    }
    form.evaluate(z1, &apply_complex_structure(z2))
}

/// Symplectic Gram-Schmidt on a raw skew Gram matrix.
///
/// Returns 2n coordinate vectors ordered (e_1..e_n, f_1..f_n). Pivot pairs
/// are chosen greedily by largest `|omega(u, v)|` among the remaining
/// candidates; if that maximum falls below `tol` before n pairs are found,
/// the form is degenerate and the error reports the dimension of the
/// subspace still unpaired.
pub fn darboux_from_gram(omega: &Matrix, tol: f64) -> Result<Vec<Vec<f64>>> {
    if !omega.is_square() || omega.rows() % 2 != 0 || omega.rows() == 0 {
        return Err(Error::OddDimension {
            rows: omega.rows(),
            cols: omega.cols(),
        });
    }
    let dim = omega.rows();
    let n = dim / 2;
    let pair = |u: &[f64], v: &[f64]| -> f64 {
        let ov = omega.matvec(v).expect("validated shape");
        u.iter().zip(&ov).map(|(a, b)| a * b).sum()
    };

    let mut candidates: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut es: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut fs: Vec<Vec<f64>> = Vec::with_capacity(n);

    for _ in 0..n {
        let mut best = (0, 0, 0.0_f64);
        for i in 0..candidates.len() {
            for j in 0..candidates.len() {
                if i == j {
                    continue;
                }
                let w = pair(&candidates[i], &candidates[j]);
                if w.abs() > best.2.abs() {
                    best = (i, j, w);
                }
            }
        }
        let (i, j, w) = best;
        if w.abs() <= tol {
            return Err(Error::Degenerate {
                context: format!(
                    "no usable pairing among the remaining {}-dimensional subspace",
                    candidates.len()
                ),
            });
        }
        let e = candidates[i].clone();
        let f: Vec<f64> = candidates[j].iter().map(|v| v / w).collect();
        // Remove the chosen pair, larger index first, preserving order so
        // the canonical form yields the standard basis.
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        candidates.remove(hi);
        candidates.remove(lo);
        // Project the rest onto the omega-orthogonal complement of span(e, f).
        for c in &mut candidates {
            let along_f = pair(c, &f);
            let along_e = pair(c, &e);
            for k in 0..dim {
                c[k] = c[k] - along_f * e[k] + along_e * f[k];
            }
        }
        es.push(e);
        fs.push(f);
    }
    es.extend(fs);
    Ok(es)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(x: &[f64], y: &[f64]) -> PhasePoint {
        PhasePoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn natural_pairing_reduces_to_canonical_form() {
        let ds = DualSystem::new(Matrix::identity(1)).unwrap();
        let form = SymplecticForm::from_pairing(&ds).unwrap();
        assert_eq!(form.gram(), &omega0(1).unwrap());
        // Bit-identical with the inner-product route at Q = I.
        let form_q = SymplecticForm::from_inner_product(&Matrix::identity(1)).unwrap();
        assert_eq!(form.gram(), form_q.gram());
    }

    #[test]
    fn pairing_form_values() {
        let ds = DualSystem::new(Matrix::from_rows(&[&[2.0]])).unwrap();
        let form = SymplecticForm::from_pairing(&ds).unwrap();
        let z1 = point(&[1.0], &[0.0]);
        let z2 = point(&[0.0], &[1.0]);
        assert_eq!(form.evaluate(&z1, &z2).unwrap(), 2.0);
    }

    #[test]
    fn inner_product_form_values() {
        let form = SymplecticForm::from_inner_product(&Matrix::from_rows(&[&[4.0]])).unwrap();
        let z1 = point(&[1.0], &[0.0]);
        let z2 = point(&[0.0], &[1.0]);
        assert_eq!(form.evaluate(&z1, &z2).unwrap(), 4.0);
        // Non-SPD Q is rejected up front.
        let bad = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(SymplecticForm::from_inner_product(&bad).is_err());
    }

    #[test]
    fn inner_product_form_matches_bilinear_oracle() {
        // evaluate == x1' Q y2 - x2' Q y1 on random-ish points.
        let q = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let form = SymplecticForm::from_inner_product(&q).unwrap();
        let pts = [
            point(&[1.0, -0.5], &[0.25, 2.0]),
            point(&[0.1, 0.7], &[-1.3, 0.4]),
            point(&[-2.0, 0.3], &[0.8, -0.6]),
        ];
        for z1 in &pts {
            for z2 in &pts {
                let direct = {
                    let qy2 = q.matvec(z2.y()).unwrap();
                    let qy1 = q.matvec(z1.y()).unwrap();
                    let a: f64 = z1.x().iter().zip(&qy2).map(|(a, b)| a * b).sum();
                    let b: f64 = z2.x().iter().zip(&qy1).map(|(a, b)| a * b).sum();
                    a - b
                };
                let got = form.evaluate(z1, z2).unwrap();
                assert!((got - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn canonical_evaluation_and_signed_area() {
        let form = SymplecticForm::canonical(1).unwrap();
        assert_eq!(
            form.evaluate(&point(&[1.0], &[0.0]), &point(&[0.0], &[1.0]))
                .unwrap(),
            1.0
        );
        // omega(z, z) = 0.
        let z = point(&[0.3], &[-1.7]);
        assert_eq!(form.evaluate(&z, &z).unwrap(), 0.0);
        // Signed parallelogram area: det [[2, 5], [3, 7]] = -1.
        assert_eq!(
            form.evaluate(&point(&[2.0], &[3.0]), &point(&[5.0], &[7.0]))
                .unwrap(),
            -1.0
        );
    }

    #[test]
    fn evaluate_rejects_dimension_mismatch() {
        let form = SymplecticForm::canonical(2).unwrap();
        let err = form.evaluate(&point(&[1.0], &[0.0]), &point(&[1.0, 0.0], &[0.0, 0.0]));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn complex_structure_basics() {
        let j = complex_structure(1).unwrap();
        assert_eq!(j, Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]));
        // J(1, 0) = (0, 1).
        assert_eq!(
            apply_complex_structure(&point(&[1.0], &[0.0])),
            point(&[0.0], &[1.0])
        );
        // J^2 = -I.
        let z = point(&[0.4, -1.0], &[2.0, 0.1]);
        let jj = apply_complex_structure(&apply_complex_structure(&z));
        assert_eq!(jj, z.scale(-1.0));
        // J is a symplectomorphism of Omega0.
        assert!(crate::group::is_symplectic(&complex_structure(2).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn compatible_metric_is_the_euclidean_inner_product() {
        let form = SymplecticForm::canonical(1).unwrap();
        let z = point(&[3.0], &[4.0]);
        assert_eq!(compatible_metric(&form, &z, &z).unwrap(), 25.0);
        assert_eq!(
            compatible_metric(&form, &point(&[1.0], &[0.0]), &point(&[0.0], &[1.0])).unwrap(),
            0.0
        );
        // Restricted to the canonical form.
        let ds = DualSystem::new(Matrix::from_rows(&[&[2.0]])).unwrap();
        let skewed = SymplecticForm::from_pairing(&ds).unwrap();
        assert!(matches!(
            compatible_metric(&skewed, &z, &z),
            Err(Error::NotCanonical)
        ));
    }

    #[test]
    fn compatible_metric_is_symmetric() {
        let form = SymplecticForm::canonical(2).unwrap();
        let z1 = point(&[0.3, -1.2], &[0.9, 0.05]);
        let z2 = point(&[-0.7, 0.4], &[1.5, -2.0]);
        let g12 = compatible_metric(&form, &z1, &z2).unwrap();
        let g21 = compatible_metric(&form, &z2, &z1).unwrap();
        assert!((g12 - g21).abs() < 1e-15);
    }

    #[test]
    fn darboux_of_canonical_is_standard_basis() {
        let form = SymplecticForm::canonical(2).unwrap();
        let basis = form.darboux_basis().unwrap();
        for (i, b) in basis.iter().enumerate() {
            let mut expected = vec![0.0; 4];
            expected[i] = 1.0;
            assert_eq!(b.flat(), expected);
        }
    }

    #[test]
    fn darboux_of_scaled_pairing() {
        let ds = DualSystem::new(Matrix::from_rows(&[&[2.0]])).unwrap();
        let form = SymplecticForm::from_pairing(&ds).unwrap();
        let basis = form.darboux_basis().unwrap();
        let (e, f) = (&basis[0], &basis[1]);
        assert_eq!(e.flat(), vec![1.0, 0.0]);
        assert_eq!(f.flat(), vec![0.0, 0.5]);
        assert!((form.evaluate(e, f).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn darboux_reports_degeneracy() {
        // Skew but singular: a 2x2 symplectic block padded with zeros.
        let gram = Matrix::from_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        match darboux_from_gram(&gram, tol::DARBOUX_TOL) {
            Err(Error::Degenerate { context }) => assert!(context.contains("2-dimensional")),
            other => panic!("expected degeneracy, got {other:?}"),
        }
        // And the validated constructor refuses it outright.
        assert!(SymplecticForm::from_gram(gram).is_err());
    }

    #[test]
    fn singular_pairing_is_rejected() {
        assert!(DualSystem::new(Matrix::from_rows(&[&[0.0]])).is_err());
    }
}
