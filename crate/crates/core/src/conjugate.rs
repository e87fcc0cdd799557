//! Fenchel conjugation, its symplectic variant, symplectic gradients, and
//! Moreau decomposition.
//!
//! The ordinary conjugate `F*(t) = sup_z <t, z> - F(z)` is computed from a
//! registered closed form when the potential has one, otherwise by gradient
//! ascent with backtracking line search. The symplectic conjugate
//! `F^{*w}(z') = sup_z w(z', z) - F(z)` reduces to the ordinary one at the
//! pulled-back target `Omega' z'`, since `w(z', z) = (Omega' z') . z`; for
//! the canonical form that target is exactly `J z'`.
//!
//! The symplectic transform optimizes over the second argument of `w`; the
//! argument order matters because `w` is skew.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{gradient, ClosedFormConjugate, ExtReal, Potential};
use crate::space::{PhasePoint, SymplecticForm};
use crate::tol;

/// Armijo sufficient-decrease coefficient for the line searches.
const ARMIJO: f64 = 1e-4;

/// Smallest line-search step before the solver declares a stall.
const MIN_STEP: f64 = 1e-18;

/// Parameters for the iterative solvers.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    /// Iteration cap (default 10000).
    pub max_iter: usize,
    /// Gradient-norm stopping criterion (default 1e-10).
    pub tol: f64,
    /// Initial backtracking step (default 1.0).
    pub step0: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            max_iter: tol::SOLVER_MAX_ITER,
            tol: tol::SOLVER_TOL,
            step0: tol::SOLVER_STEP0,
        }
    }
}

/// Which computation path produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Solver,
}

/// Result of a conjugate computation.
#[derive(Debug, Clone)]
pub struct ConjugateResult {
    pub value: f64,
    pub argmax: Vec<f64>,
    /// For solver results: the gradient norm at `argmax` reached `tol`.
    /// Closed forms are always converged.
    pub converged: bool,
    pub iterations: usize,
    pub method: Method,
}

/// `F*(target) = sup_z <target, z> - F(z)`, preferring a registered closed
/// form and falling back to gradient ascent.
pub fn fenchel_conjugate(
    f: &dyn Potential,
    target: &[f64],
    params: &SolverParams,
) -> Result<ConjugateResult> {
    if target.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: target.len(),
        });
    }
    match f.conjugate_closed_form(target) {
        Some(ClosedFormConjugate::Value { value, argmax }) => Ok(ConjugateResult {
            value,
            argmax,
            converged: true,
            iterations: 0,
            method: Method::ClosedForm,
        }),
        Some(ClosedFormConjugate::Unbounded) => Err(Error::UnboundedConjugate),
        None => fenchel_conjugate_iterative(f, target, params),
    }
}

/// Internal outcome of the shared ascent loop.
pub(crate) struct AscentOutcome {
    pub(crate) point: Vec<f64>,
    pub(crate) value: f64,
    pub(crate) converged: bool,
    pub(crate) iterations: usize,
}

/// Maximizes a smooth concave objective by gradient ascent.
///
/// Two-phase line search: Armijo backtracking while objective differences
/// are resolvable in floating point, then a gradient-contraction phase that
/// accepts steps which strictly shrink the gradient norm. The second phase
/// certifies `|grad| <= tol` even after the objective itself has saturated
/// at machine resolution.
pub(crate) fn ascend(
    start: Vec<f64>,
    objective: impl Fn(&[f64]) -> ExtReal,
    ascent_direction: impl Fn(&[f64]) -> Result<Vec<f64>>,
    params: &SolverParams,
) -> Result<AscentOutcome> {
    let mut z = start;
    let mut phi = objective(&z).expect_finite()?;
    let mut direction = ascent_direction(&z)?;
    let mut gnorm2: f64 = direction.iter().map(|v| v * v).sum();
    let mut converged = false;
    let mut iterations = 0;
    let mut saturated = false;

    for iter in 0..params.max_iter {
        iterations = iter + 1;
        if gnorm2.sqrt() <= params.tol {
            converged = true;
            break;
        }

        let mut accepted = false;
        if !saturated {
            let mut step = params.step0;
            while step >= MIN_STEP {
                let cand: Vec<f64> =
                    z.iter().zip(&direction).map(|(zi, d)| zi + step * d).collect();
                if let ExtReal::Finite(cand_phi) = objective(&cand) {
                    // Strict: when the Armijo increase rounds away, the
                    // search must fail so the contraction phase takes over.
                    if cand_phi > phi + ARMIJO * step * gnorm2 {
                        match ascent_direction(&cand) {
                            Ok(next) => {
                                z = cand;
                                phi = cand_phi;
                                direction = next;
                                gnorm2 = direction.iter().map(|v| v * v).sum();
                                accepted = true;
                            }
                            Err(_) => {
                                // Boundary crowding: keep the previous point
                                // and stop with the convergence flag down.
                                iterations = iter + 1;
                                return Ok(AscentOutcome {
                                    point: z,
                                    value: phi,
                                    converged: false,
                                    iterations,
                                });
                            }
                        }
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                saturated = true;
            }
        }

        if saturated && !accepted {
            // Objective differences are below float resolution; keep
            // stepping while the gradient norm strictly contracts.
            let slack = 1e-12 * (1.0 + phi.abs());
            let mut step = params.step0;
            while step >= MIN_STEP {
                let cand: Vec<f64> =
                    z.iter().zip(&direction).map(|(zi, d)| zi + step * d).collect();
                if let ExtReal::Finite(cand_phi) = objective(&cand) {
                    if cand_phi >= phi - slack {
                        if let Ok(next) = ascent_direction(&cand) {
                            let next_norm2: f64 = next.iter().map(|v| v * v).sum();
                            if next_norm2 < gnorm2 {
                                z = cand;
                                phi = phi.max(cand_phi);
                                direction = next;
                                gnorm2 = next_norm2;
                                accepted = true;
                                break;
                            }
                        }
                    }
                }
                step *= 0.5;
            }
        }

        if !accepted {
            break; // genuine stall
        }
        if phi > tol::DIVERGENCE_BOUND
            || z.iter().map(|v| v * v).sum::<f64>().sqrt() > tol::ITERATE_BOUND
        {
            return Err(Error::UnboundedConjugate);
        }
    }

    Ok(AscentOutcome {
        point: z,
        value: phi,
        converged,
        iterations,
    })
}

/// The gradient-ascent path of [`fenchel_conjugate`], always iterative.
///
/// Maximizes the concave `phi(z) = <target, z> - F(z)` from the potential's
/// interior start. Non-convergence within `max_iter` is flagged on the
/// result, not an error; detected unboundedness (objective above
/// [`tol::DIVERGENCE_BOUND`] or iterate norm above [`tol::ITERATE_BOUND`])
/// is an error.
pub fn fenchel_conjugate_iterative(
    f: &dyn Potential,
    target: &[f64],
    params: &SolverParams,
) -> Result<ConjugateResult> {
    if target.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: target.len(),
        });
    }
    let objective = |z: &[f64]| -> ExtReal {
        match f.value(z) {
            ExtReal::Finite(v) => {
                ExtReal::Finite(target.iter().zip(z).map(|(t, zi)| t * zi).sum::<f64>() - v)
            }
            ExtReal::PosInf => ExtReal::PosInf,
        }
    };
    let ascent_direction = |z: &[f64]| -> Result<Vec<f64>> {
        let g = gradient(f, z, tol::GRAD_STEP)?;
        Ok(target.iter().zip(&g).map(|(t, gi)| t - gi).collect())
    };
    let outcome = ascend(f.interior_start(), objective, ascent_direction, params)?;
    Ok(ConjugateResult {
        value: outcome.value,
        argmax: outcome.point,
        converged: outcome.converged,
        iterations: outcome.iterations,
        method: Method::Solver,
    })
}

/// Brute-force lower bound on the conjugate over a uniform grid, for use as
/// an independent test oracle. Restricted to dimension <= 4.
pub fn fenchel_conjugate_grid(
    f: &dyn Potential,
    target: &[f64],
    lo: &[f64],
    hi: &[f64],
    resolution: usize,
) -> Result<f64> {
    let dim = f.dim();
    if dim > 4 {
        return Err(Error::OracleScale { max: 4, got: dim });
    }
    if target.len() != dim || lo.len() != dim || hi.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: target.len().min(lo.len()).min(hi.len()),
        });
    }
    if resolution < 2 {
        return Err(Error::Spec("grid resolution must be at least 2".into()));
    }
    let mut best: Option<f64> = None;
    let mut index = vec![0usize; dim];
    let mut z = vec![0.0; dim];
    loop {
        for (k, &i) in index.iter().enumerate() {
            z[k] = lo[k] + (hi[k] - lo[k]) * (i as f64) / ((resolution - 1) as f64);
        }
        if let ExtReal::Finite(v) = f.value(&z) {
            let phi = target.iter().zip(&z).map(|(t, zi)| t * zi).sum::<f64>() - v;
            best = Some(best.map_or(phi, |b: f64| b.max(phi)));
        }
        // Odometer increment over the multi-index.
        let mut k = 0;
        loop {
            if k == dim {
                return best.ok_or(Error::OutOfDomain);
            }
            index[k] += 1;
            if index[k] < resolution {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

/// Symplectic Fenchel conjugate `F^{*w}(z') = sup_z w(z', z) - F(z)`,
/// computed as the ordinary conjugate at `Omega' z'`.
pub fn symplectic_conjugate(
    f: &dyn Potential,
    form: &SymplecticForm,
    zprime: &PhasePoint,
    params: &SolverParams,
) -> Result<ConjugateResult> {
    if f.dim() != form.dim() {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            got: f.dim(),
        });
    }
    let pulled = form.transpose_apply(&zprime.flat())?;
    fenchel_conjugate(f, &pulled, params)
}

/// The symplectic gradient: the unique `a` with `w(a, h) = <grad F(z), h>`
/// for every direction `h`, i.e. `a = Omega^-T grad F(z)`. For the
/// canonical form this is `-J(grad F(z))`.
pub fn symplectic_gradient(
    f: &dyn Potential,
    form: &SymplecticForm,
    z: &PhasePoint,
) -> Result<PhasePoint> {
    if f.dim() != form.dim() {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            got: f.dim(),
        });
    }
    let g = gradient(f, &z.flat(), tol::GRAD_STEP)?;
    PhasePoint::from_flat(&form.lift_gradient(&g)?)
}

/// Moreau decomposition of `z` against `F`.
#[derive(Debug, Clone)]
pub struct MoreauPair {
    /// Proximation with respect to F: `argmin_u F(u) + |u - z|^2 / 2`.
    pub w: Vec<f64>,
    /// Proximation with respect to F*: the remainder `z - w`.
    pub w_star: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub method: Method,
}

/// Splits `z = w + w*` with `F(w) + F*(w*) = <w, w*>` (Fenchel-Young
/// equality), `w` being the proximal point of `F` at `z`.
///
/// Uses a registered closed-form prox when available, otherwise gradient
/// descent with backtracking on the strongly convex objective.
/// `w + w_star` reconstructs `z` exactly: `w` is re-derived from `w_star`
/// so the two floating-point halves sum back bit-for-bit.
pub fn moreau_decompose(
    f: &dyn Potential,
    z: &[f64],
    params: &SolverParams,
) -> Result<MoreauPair> {
    if z.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: z.len(),
        });
    }
    let (w_raw, converged, iterations, method) = match f.prox_closed_form(z) {
        Some(w) => (w, true, 0, Method::ClosedForm),
        None => {
            let (w, converged, iterations) = prox_descent(f, z, params)?;
            (w, converged, iterations, Method::Solver)
        }
    };
    // One correction pass: recomputing w from w_star makes w + w_star == z
    // exact in floating point.
    let w_star: Vec<f64> = z.iter().zip(&w_raw).map(|(zi, wi)| zi - wi).collect();
    let w: Vec<f64> = z.iter().zip(&w_star).map(|(zi, si)| zi - si).collect();
    Ok(MoreauPair {
        w,
        w_star,
        converged,
        iterations,
        method,
    })
}

fn prox_descent(
    f: &dyn Potential,
    z: &[f64],
    params: &SolverParams,
) -> Result<(Vec<f64>, bool, usize)> {
    // Minimize psi(u) = F(u) + |u - z|^2/2 by maximizing -psi.
    let objective = |u: &[f64]| -> ExtReal {
        match f.value(u) {
            ExtReal::Finite(v) => {
                let dist2: f64 = u.iter().zip(z).map(|(ui, zi)| (ui - zi).powi(2)).sum();
                ExtReal::Finite(-(v + 0.5 * dist2))
            }
            ExtReal::PosInf => ExtReal::PosInf,
        }
    };
    let ascent_direction = |u: &[f64]| -> Result<Vec<f64>> {
        let g = gradient(f, u, tol::GRAD_STEP)?;
        Ok(g
            .iter()
            .zip(u)
            .zip(z)
            .map(|((gi, ui), zi)| -(gi + ui - zi))
            .collect())
    };
    let start = if f.in_domain(z) {
        z.to_vec()
    } else {
        f.interior_start()
    };
    let outcome = ascend(start, objective, ascent_direction, params)?;
    Ok((outcome.point, outcome.converged, outcome.iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Entropy, Exponential, Generator, Perspective, Quadratic};

    fn params() -> SolverParams {
        SolverParams::default()
    }

    #[test]
    fn quadratic_conjugate_closed_form() {
        let f = Quadratic::isotropic(2);
        let r = fenchel_conjugate(&f, &[1.0, 0.0], &params()).unwrap();
        assert_eq!(r.method, Method::ClosedForm);
        assert!((r.value - 0.5).abs() < 1e-15);
        assert_eq!(r.argmax, vec![1.0, 0.0]);
        // sup of -F is at the origin.
        let zero = fenchel_conjugate(&f, &[0.0, 0.0], &params()).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn quadratic_conjugate_iterative_matches_closed_form() {
        let f = Quadratic::new(
            crate::matrix::Matrix::from_rows(&[&[2.0, 0.5], &[0.5, 1.0]]),
            vec![0.3, -0.7],
            1.25,
        )
        .unwrap();
        for target in [[1.0, 0.0], [-0.4, 2.0], [0.0, 0.0]] {
            let closed = fenchel_conjugate(&f, &target, &params()).unwrap();
            let solved = fenchel_conjugate_iterative(&f, &target, &params()).unwrap();
            assert!(solved.converged);
            assert!(
                (closed.value - solved.value).abs() < 1e-10,
                "{} vs {}",
                closed.value,
                solved.value
            );
        }
    }

    #[test]
    fn exponential_conjugate_examples() {
        let f = Exponential::new(1);
        // sup x - e^x = -1 at x = 0.
        let r = fenchel_conjugate(&f, &[1.0], &params()).unwrap();
        assert!((r.value - (-1.0)).abs() < 1e-15);
        assert_eq!(r.argmax, vec![0.0]);
        // Negative target is unbounded.
        assert!(matches!(
            fenchel_conjugate(&f, &[-0.5], &params()),
            Err(Error::UnboundedConjugate)
        ));
        // The iterative path agrees.
        let it = fenchel_conjugate_iterative(&f, &[1.0], &params()).unwrap();
        assert!(it.converged);
        assert!((it.value - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn grid_oracle_brackets_quadratic_conjugate() {
        let f = Quadratic::isotropic(2);
        let got = fenchel_conjugate_grid(&f, &[1.0, 0.0], &[-3.0, -3.0], &[3.0, 3.0], 601)
            .unwrap();
        assert!((got - 0.5).abs() < 1e-4);
        let zero = fenchel_conjugate_grid(&f, &[0.0, 0.0], &[-3.0, -3.0], &[3.0, 3.0], 601)
            .unwrap();
        assert!(zero.abs() < 1e-4);
    }

    #[test]
    fn grid_oracle_entropy_with_linear_shift() {
        // x ln x - x has conjugate e^t: value e at t = 1, maximized at x = e.
        let f = crate::potential::AffineReparam::new(
            Entropy::new(1),
            crate::matrix::Matrix::identity(1),
            vec![0.0],
            vec![-1.0],
            0.0,
        )
        .unwrap();
        let got = fenchel_conjugate_grid(&f, &[1.0], &[1e-6], &[3.0], 601).unwrap();
        assert!((got - std::f64::consts::E).abs() < 1e-4, "got {got}");
    }

    #[test]
    fn grid_oracle_rejects_large_dimension() {
        let f = Quadratic::isotropic(6);
        assert!(matches!(
            fenchel_conjugate_grid(&f, &[0.0; 6], &[-1.0; 6], &[1.0; 6], 5),
            Err(Error::OracleScale { .. })
        ));
    }

    #[test]
    fn symplectic_conjugate_is_ordinary_at_rotated_target() {
        let f = Quadratic::isotropic(2);
        let form = SymplecticForm::canonical(1).unwrap();
        let zp = PhasePoint::new(vec![1.0], vec![0.0]).unwrap();
        let r = symplectic_conjugate(&f, &form, &zp, &params()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        // z' = 0 gives 0.
        let zero = symplectic_conjugate(
            &f,
            &form,
            &PhasePoint::zero(1),
            &params(),
        )
        .unwrap();
        assert_eq!(zero.value, 0.0);
        // (0, -1) also has norm 1.
        let r2 = symplectic_conjugate(
            &f,
            &form,
            &PhasePoint::new(vec![0.0], vec![-1.0]).unwrap(),
            &params(),
        )
        .unwrap();
        assert!((r2.value - 0.5).abs() < 1e-15);
        // Grid oracle on the rotated target agrees.
        let pulled = form
            .transpose_apply(&[0.0, -1.0])
            .unwrap();
        let grid = fenchel_conjugate_grid(&f, &pulled, &[-3.0, -3.0], &[3.0, 3.0], 601).unwrap();
        assert!((grid - r2.value).abs() < 1e-4);
    }

    #[test]
    fn symplectic_gradient_is_minus_j_of_gradient() {
        let f = Quadratic::isotropic(2);
        let form = SymplecticForm::canonical(1).unwrap();
        let z = PhasePoint::new(vec![1.0], vec![0.0]).unwrap();
        let a = symplectic_gradient(&f, &form, &z).unwrap();
        assert_eq!(a.flat(), vec![0.0, -1.0]);
        // Vanishes at the minimizer.
        let at_zero = symplectic_gradient(&f, &form, &PhasePoint::zero(1)).unwrap();
        assert_eq!(at_zero.flat(), vec![0.0, 0.0]);
    }

    #[test]
    fn symplectic_gradient_defines_the_form_pairing() {
        // w(a, h) == <grad F(z), h> for assorted directions, general form.
        let q = crate::matrix::Matrix::from_rows(&[&[2.0, 0.5], &[0.5, 1.5]]);
        let form = SymplecticForm::from_inner_product(&q).unwrap();
        let f = Quadratic::new(
            crate::matrix::Matrix::from_rows(&[
                &[3.0, 0.2, 0.0, 0.1],
                &[0.2, 2.0, 0.3, 0.0],
                &[0.0, 0.3, 1.5, 0.2],
                &[0.1, 0.0, 0.2, 2.5],
            ]),
            vec![0.1, -0.2, 0.3, 0.0],
            0.0,
        )
        .unwrap();
        let z = PhasePoint::new(vec![0.4, -0.3], vec![0.8, 0.2]).unwrap();
        let a = symplectic_gradient(&f, &form, &z).unwrap();
        let g = gradient(&f, &z.flat(), tol::GRAD_STEP).unwrap();
        for k in 0..4 {
            let mut h = vec![0.0; 4];
            h[k] = 1.0;
            let lhs = form
                .evaluate_flat(&a.flat(), &h)
                .unwrap();
            assert!((lhs - g[k]).abs() < 1e-12, "direction {k}");
        }
    }

    #[test]
    fn moreau_of_scalar_quadratic() {
        let f = Quadratic::isotropic(1);
        let pair = moreau_decompose(&f, &[2.0], &params()).unwrap();
        assert_eq!(pair.w, vec![1.0]);
        assert_eq!(pair.w_star, vec![1.0]);
        assert_eq!(pair.method, Method::ClosedForm);
        let at_zero = moreau_decompose(&f, &[0.0], &params()).unwrap();
        assert_eq!(at_zero.w, vec![0.0]);
        assert_eq!(at_zero.w_star, vec![0.0]);
        let neg = moreau_decompose(&f, &[-4.0], &params()).unwrap();
        assert_eq!(neg.w, vec![-2.0]);
        assert_eq!(neg.w_star, vec![-2.0]);
    }

    #[test]
    fn moreau_of_entropy_satisfies_fenchel_young_equality() {
        let f = Entropy::new(2);
        let z = [0.7, -1.3];
        let pair = moreau_decompose(&f, &z, &params()).unwrap();
        assert_eq!(pair.method, Method::Solver);
        assert!(pair.converged);
        // Exact reconstruction.
        for k in 0..2 {
            assert_eq!(pair.w[k] + pair.w_star[k], z[k]);
        }
        // F(w) + F*(w*) = <w, w*>.
        let fw = f.value(&pair.w).finite().unwrap();
        let conj = fenchel_conjugate(&f, &pair.w_star, &params()).unwrap();
        let dot: f64 = pair.w.iter().zip(&pair.w_star).map(|(a, b)| a * b).sum();
        assert!(
            (fw + conj.value - dot).abs() < 1e-7,
            "gap {}",
            fw + conj.value - dot
        );
    }

    #[test]
    fn perspective_conjugate_is_an_indicator() {
        let f = Perspective::new(Generator::Square);
        // Feasible target: t1 + t2^2/4 <= 0.
        let ok = fenchel_conjugate(&f, &[-0.5, 1.0], &params()).unwrap();
        assert_eq!(ok.value, 0.0);
        assert!(matches!(
            fenchel_conjugate(&f, &[0.5, 1.0], &params()),
            Err(Error::UnboundedConjugate)
        ));
    }
}
