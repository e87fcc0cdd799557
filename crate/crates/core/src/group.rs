//! The real symplectic matrix group Sp(2n).
//!
//! Membership is tested against the defining relation `T' * Omega0 * T =
//! Omega0` in max norm, which sidesteps any block-condition bookkeeping.
//! The closed-form inverse `-Omega0 * T' * Omega0` comes straight from that
//! relation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tol;

/// The canonical 2n x 2n symplectic matrix `[[0, I], [-I, 0]]`.
///
/// Satisfies `Omega0' = -Omega0` and `Omega0^2 = -I`.
pub fn omega0(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::DegenerateDimension);
    }
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m.set(i, n + i, 1.0);
        m.set(n + i, i, -1.0);
    }
    Ok(m)
}

/// Max-norm residual `|T' * Omega0 * T - Omega0|_max` of the membership
/// relation; the matrix is symplectic when this is small.
pub fn symplectic_residual(t: &Matrix) -> Result<f64> {
    if !t.is_square() || t.rows() % 2 != 0 || t.rows() == 0 {
        return Err(Error::OddDimension {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let omega = omega0(t.rows() / 2)?;
    let product = t.transpose().matmul(&omega)?.matmul(t)?;
    Ok(product.sub(&omega)?.max_norm())
}

/// True iff `|T' * Omega0 * T - Omega0|_max <= tol`.
///
/// Errors on non-square or odd-sided input.
pub fn is_symplectic(t: &Matrix, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(t)? <= tol)
}

/// A matrix verified to lie in Sp(2n) at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    dim_half: usize,
    mat: Matrix,
}

impl SymplecticMatrix {
    /// Validates membership within `tol` (see [`tol::SYMPLECTIC_TOL`]).
    pub fn new(mat: Matrix, tol: f64) -> Result<Self> {
        let residual = symplectic_residual(&mat)?;
        if residual > tol {
            return Err(Error::NotSymplectic { residual, tol });
        }
        Ok(Self {
            dim_half: mat.rows() / 2,
            mat,
        })
    }

    /// Validates at the default tolerance.
    pub fn new_default(mat: Matrix) -> Result<Self> {
        Self::new(mat, tol::SYMPLECTIC_TOL)
    }

    pub fn dim_half(&self) -> usize {
        self.dim_half
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }
}

/// Closed-form group inverse `-Omega0 * T' * Omega0`.
///
/// In block terms `T = [[A, B], [C, D]]` this is `[[D', -B'], [-C', A']]`.
pub fn symplectic_inverse(t: &SymplecticMatrix) -> Result<SymplecticMatrix> {
    let omega = omega0(t.dim_half())?;
    let inv = omega
        .matmul(&t.matrix().transpose())?
        .matmul(&omega)?
        .scale(-1.0);
    SymplecticMatrix::new(inv, tol::SYMPLECTIC_TOL)
}

/// Invertible n x n matrix with moderate condition number, assembled as
/// `(I + L) * D * (I + U)` with strictly triangular L, U and positive
/// diagonal D. Determinant is the product of D's entries.
pub(crate) fn random_well_conditioned(n: usize, rng: &mut impl Rng) -> Matrix {
    let mut lower = Matrix::identity(n);
    let mut upper = Matrix::identity(n);
    let mut diag = Matrix::zeros(n, n);
    for i in 0..n {
        diag.set(i, i, rng.random_range(0.75..1.5));
        for j in 0..i {
            lower.set(i, j, rng.random_range(-0.4..0.4));
            upper.set(j, i, rng.random_range(-0.4..0.4));
        }
    }
    lower
        .matmul(&diag)
        .and_then(|m| m.matmul(&upper))
        .expect("square shapes")
}

/// Symmetric n x n matrix with entries in (-0.5, 0.5).
fn random_symmetric(n: usize, rng: &mut impl Rng) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.random_range(-0.5..0.5);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

/// Deterministic random element of Sp(2n), keyed by `seed`.
///
/// Built as a product of elementary symplectic blocks
/// `[[I, B], [0, I]]`, `[[I, 0], [C, I]]`, `[[A, 0], [0, A^-T]]`
/// with B, C symmetric and A invertible, all entries bounded. Each factor
/// satisfies the membership relation exactly in real arithmetic, so the
/// product stays within [`tol::SYMPLECTIC_TOL`] in floating point.
pub fn random_symplectic(n: usize, seed: u64) -> Result<SymplecticMatrix> {
    if n == 0 {
        return Err(Error::DegenerateDimension);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eye = Matrix::identity(n);
    let zero = Matrix::zeros(n, n);
    let mut product = Matrix::identity(2 * n);
    for _ in 0..2 {
        let shear_b = Matrix::block2x2(&eye, &random_symmetric(n, &mut rng), &zero, &eye);
        let shear_c = Matrix::block2x2(&eye, &zero, &random_symmetric(n, &mut rng), &eye);
        let a = random_well_conditioned(n, &mut rng);
        let a_inv_t = a.inverse().expect("constructed invertible").transpose();
        let diag = Matrix::block2x2(&a, &zero, &zero, &a_inv_t);
        product = product
            .matmul(&shear_b)?
            .matmul(&shear_c)?
            .matmul(&diag)?;
    }
    SymplecticMatrix::new(product, tol::SYMPLECTIC_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega0_is_the_canonical_block_matrix() {
        let m = omega0(1).unwrap();
        assert_eq!(m, Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]));
        assert!(matches!(omega0(0), Err(Error::DegenerateDimension)));
    }

    #[test]
    fn omega0_squares_to_minus_identity() {
        for n in [1, 2, 3] {
            let m = omega0(n).unwrap();
            let square = m.matmul(&m).unwrap();
            let minus_eye = Matrix::identity(2 * n).scale(-1.0);
            assert!(square.sub(&minus_eye).unwrap().max_norm() == 0.0);
        }
    }

    #[test]
    fn omega0_darboux_pairings() {
        // omega(e_i, f_j) = delta_ij, omega(e_1, e_2) = 0 for n = 2.
        let m = omega0(2).unwrap();
        assert_eq!(m.get(0, 2), 1.0);
        assert_eq!(m.get(0, 3), 0.0);
        assert_eq!(m.get(1, 3), 1.0);
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn membership_examples() {
        assert!(is_symplectic(&Matrix::identity(2), 1e-12).unwrap());
        // Diagonal [[2, 0], [0, 1/2]]: T' Omega0 T = Omega0 exactly.
        let squeeze = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.5]]);
        assert!(is_symplectic(&squeeze, 1e-12).unwrap());
        // det = 2, so not in Sp(2).
        let stretch = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 1.0]]);
        assert!(!is_symplectic(&stretch, 1e-9).unwrap());
        // Odd side is a dimension error, not `false`.
        assert!(is_symplectic(&Matrix::identity(3), 1e-9).is_err());
    }

    #[test]
    fn inverse_of_squeeze_swaps_the_diagonal() {
        let t = SymplecticMatrix::new_default(Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.5]]))
            .unwrap();
        let inv = symplectic_inverse(&t).unwrap();
        assert_eq!(
            inv.matrix(),
            &Matrix::from_rows(&[&[0.5, 0.0], &[0.0, 2.0]])
        );
    }

    #[test]
    fn inverse_of_identity_and_omega0() {
        let id = SymplecticMatrix::new_default(Matrix::identity(4)).unwrap();
        assert_eq!(symplectic_inverse(&id).unwrap().matrix(), &Matrix::identity(4));

        let omega = SymplecticMatrix::new_default(omega0(1).unwrap()).unwrap();
        let inv = symplectic_inverse(&omega).unwrap();
        assert_eq!(inv.matrix(), &omega0(1).unwrap().scale(-1.0));
    }

    #[test]
    fn non_symplectic_input_is_rejected() {
        let err = SymplecticMatrix::new_default(Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 1.0]]));
        assert!(matches!(err, Err(Error::NotSymplectic { .. })));
    }

    #[test]
    fn random_symplectic_is_deterministic_and_in_group() {
        let a = random_symplectic(1, 42).unwrap();
        let b = random_symplectic(1, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert!(symplectic_residual(a.matrix()).unwrap() <= 1e-9);

        let c = random_symplectic(3, 7).unwrap();
        assert_eq!(c.matrix().rows(), 6);
        assert!((c.matrix().determinant().unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn random_symplectic_rejects_zero_dimension() {
        assert!(matches!(
            random_symplectic(0, 1),
            Err(Error::DegenerateDimension)
        ));
    }

    #[test]
    fn closed_form_inverse_matches_block_formula() {
        let t = random_symplectic(2, 11).unwrap();
        let inv = symplectic_inverse(&t).unwrap();
        // Block formula [[D', -B'], [-C', A']].
        let n = 2;
        let m = t.matrix();
        for i in 0..n {
            for j in 0..n {
                assert!((inv.matrix().get(i, j) - m.get(n + j, n + i)).abs() < 1e-15);
                assert!((inv.matrix().get(i, n + j) - (-m.get(j, n + i))).abs() < 1e-15);
                assert!((inv.matrix().get(n + i, j) - (-m.get(n + j, i))).abs() < 1e-15);
                assert!((inv.matrix().get(n + i, n + j) - m.get(j, i)).abs() < 1e-15);
            }
        }
        // And it actually inverts T.
        let prod = m.matmul(inv.matrix()).unwrap();
        assert!(prod.sub(&Matrix::identity(2 * n)).unwrap().max_norm() < 1e-12);
    }
}
