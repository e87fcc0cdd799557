//! Divergence constructions: ordinary and dual Bregman, symplectic
//! Fenchel-Young, symplectic Bregman, composite-inner-product Bregman, the
//! dually flat Fenchel-Young divergence, and affine generator changes.
//!
//! Every operation returns a [`DivergenceReport`] carrying the value plus
//! the intermediate terms it was assembled from, so a failing tolerance in
//! a test pinpoints which term drifted.
//!
//! Sign conventions (the argument order in a skew form matters):
//!
//! | divergence              | formula                                         |
//! |-------------------------|-------------------------------------------------|
//! | `bregman(x1, x2)`       | `F(x1) - F(x2) - <x1 - x2, grad F(x2)>`          |
//! | `symplectic_fenchel_young(z, z')` | `F(z) + F^{*w}(z') - w(z', z)`        |
//! | `symplectic_bregman(z1, z2)` | `F(z1) - F(z2) - w(grad^w F(z2), z1 - z2)` |
//! | `bregman_composite(z1, z2)`  | `F(z1) - F(z2) - [z1 - z2, grad F(z2)]`    |
//! | `fenchel_young_flat(th, eta')` | `F(th) + F*(eta') - th . eta'`           |
//!
//! where `[., .]` is the composite inner product `[u, v] = <u_x, v_x> +
//! <u_y, v_y>` built from the inner product of X, and gradients are the
//! Riesz representers with respect to the inner product in play.

use crate::conjugate::{
    fenchel_conjugate, symplectic_conjugate, symplectic_gradient, ConjugateResult, Method,
    SolverParams,
};
use crate::error::{Error, Result};
use crate::matrix::{cholesky, Matrix};
use crate::potential::{eval, gradient_default, AffineReparam, Potential};
use crate::space::{PhasePoint, SymplecticForm};
use crate::tol;

/// The terms a divergence value was assembled from.
#[derive(Debug, Clone)]
pub struct DivergenceParts {
    /// `F(z1)` (or `F(z)`, `F(theta)`).
    pub potential_first: f64,
    /// `F(z2)` for Bregman-type divergences.
    pub potential_second: Option<f64>,
    /// Conjugate term for Fenchel-Young-type divergences.
    pub conjugate: Option<f64>,
    /// The subtracted pairing term: a form value, composite inner product,
    /// or dot product.
    pub coupling: f64,
    /// Gradient used by Bregman-type divergences.
    pub gradient: Option<Vec<f64>>,
}

impl DivergenceParts {
    /// Re-assembles the raw (unclamped) value from the stored terms.
    pub fn reconstruct(&self) -> f64 {
        self.potential_first - self.potential_second.unwrap_or(0.0)
            + self.conjugate.unwrap_or(0.0)
            - self.coupling
    }
}

/// A computed divergence with its audit trail.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    /// Non-negative value; raw values in `[-1e-8, 0)` are clamped to zero
    /// and flagged via `clamped`.
    pub value: f64,
    pub parts: DivergenceParts,
    /// Whether a conjugate solve ran (`Solver`) or everything came from
    /// closed forms / direct formulas (`ClosedForm`).
    pub method: Method,
    pub clamped: bool,
}

fn finish(parts: DivergenceParts, method: Method) -> Result<DivergenceReport> {
    let raw = parts.reconstruct();
    if raw < -tol::DIVERGENCE_FLOOR {
        return Err(Error::ConvexityViolation { value: raw });
    }
    let clamped = raw < 0.0;
    Ok(DivergenceReport {
        value: if clamped { 0.0 } else { raw },
        parts,
        method,
        clamped,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Q-weighted inner product `x' Q y`; `None` means the Euclidean one.
fn inner(q: Option<&Matrix>, x: &[f64], y: &[f64]) -> Result<f64> {
    match q {
        Some(q) => Ok(dot(x, &q.matvec(y)?)),
        None => Ok(dot(x, y)),
    }
}

/// Ordinary Bregman divergence `B_F(x1 : x2) = F(x1) - F(x2) -
/// <x1 - x2, grad F(x2)>` with respect to the inner product `x' Q y`
/// (Euclidean when `q` is `None`).
///
/// The gradient is the Riesz representer for that inner product, i.e.
/// `Q^-1` times the coordinate gradient, which makes the value independent
/// of the choice of Q.
pub fn bregman(
    f: &dyn Potential,
    x1: &[f64],
    x2: &[f64],
    q: Option<&Matrix>,
) -> Result<DivergenceReport> {
    if x1.len() != f.dim() || x2.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x1.len().max(x2.len()),
        });
    }
    if let Some(q) = q {
        cholesky(q)?; // SPD gate
        if q.rows() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                got: q.rows(),
            });
        }
    }
    let f1 = eval(f, x1)?.expect_finite()?;
    let f2 = eval(f, x2)?.expect_finite()?;
    let g = gradient_default(f, x2)?;
    let riesz = match q {
        Some(q) => q.solve(&g)?,
        None => g,
    };
    let diff: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a - b).collect();
    let coupling = inner(q, &diff, &riesz)?;
    finish(
        DivergenceParts {
            potential_first: f1,
            potential_second: Some(f2),
            conjugate: None,
            coupling,
            gradient: Some(riesz),
        },
        Method::ClosedForm,
    )
}

/// Dual Bregman divergence `B_{F*}(x1* : x2*)`, computed through the
/// conjugate and the numerically inverted gradient: `grad F*` at a dual
/// point is the maximizer of the conjugate supremum there.
///
/// Satisfies `B_F(x1 : x2) = B_{F*}(x2* : x1*)` for duals `xi* = grad F(xi)`.
pub fn dual_bregman(
    f: &dyn Potential,
    x1_star: &[f64],
    x2_star: &[f64],
    params: &SolverParams,
) -> Result<DivergenceReport> {
    let c1 = fenchel_conjugate(f, x1_star, params)?;
    let c2 = fenchel_conjugate(f, x2_star, params)?;
    for c in [&c1, &c2] {
        if !c.converged {
            return Err(Error::GradientInversion {
                iterations: c.iterations,
                residual: f64::NAN,
            });
        }
    }
    let diff: Vec<f64> = x1_star.iter().zip(x2_star).map(|(a, b)| a - b).collect();
    let coupling = dot(&diff, &c2.argmax);
    let method = if c1.method == Method::Solver || c2.method == Method::Solver {
        Method::Solver
    } else {
        Method::ClosedForm
    };
    finish(
        DivergenceParts {
            potential_first: c1.value,
            potential_second: Some(c2.value),
            conjugate: None,
            coupling,
            gradient: Some(c2.argmax),
        },
        method,
    )
}

/// Symplectic Fenchel-Young divergence
/// `Y_F(z, z') = F(z) + F^{*w}(z') - w(z', z)`.
///
/// Non-negative by the symplectic Fenchel-Young inequality; zero exactly
/// when `z'` is the symplectic gradient of F at `z`.
pub fn symplectic_fenchel_young(
    f: &dyn Potential,
    form: &SymplecticForm,
    z: &PhasePoint,
    zprime: &PhasePoint,
    params: &SolverParams,
) -> Result<DivergenceReport> {
    let fz = eval(f, &z.flat())?.expect_finite()?;
    let conj = symplectic_conjugate(f, form, zprime, params)?;
    let coupling = form.evaluate(zprime, z)?;
    finish(
        DivergenceParts {
            potential_first: fz,
            potential_second: None,
            conjugate: Some(conj.value),
            coupling,
            gradient: None,
        },
        conj.method,
    )
}

/// Symplectic Bregman divergence
/// `B^w_F(z1 : z2) = F(z1) - F(z2) - w(grad^w F(z2), z1 - z2)`.
///
/// Computed from the symplectic gradient alone (no conjugate solve). The
/// skew-equivalent arrangement `+ w(z1 - z2, grad^w F(z2))` is evaluated as
/// a consistency guard; the two agree to rounding by skew-symmetry.
pub fn symplectic_bregman(
    f: &dyn Potential,
    form: &SymplecticForm,
    z1: &PhasePoint,
    z2: &PhasePoint,
) -> Result<DivergenceReport> {
    let f1 = eval(f, &z1.flat())?.expect_finite()?;
    let f2 = eval(f, &z2.flat())?.expect_finite()?;
    let lifted = symplectic_gradient(f, form, z2)?;
    let diff = z1.sub(z2);
    let coupling = form.evaluate(&lifted, &diff)?;
    let flipped = form.evaluate(&diff, &lifted)?;
    // Pure skew algebra: the two orderings differ only by rounding.
    debug_assert!((coupling + flipped).abs() <= 1e-9 * (1.0 + coupling.abs()));
    finish(
        DivergenceParts {
            potential_first: f1,
            potential_second: Some(f2),
            conjugate: None,
            coupling,
            gradient: Some(lifted.flat()),
        },
        Method::ClosedForm,
    )
}

/// Ordinary Bregman divergence on Z = X x X with respect to the composite
/// inner product `[z1, z2] = <x1, x2>_Q + <y1, y2>_Q`:
/// `F(z1) - F(z2) - [z1 - z2, grad F(z2)]`.
///
/// When the symplectic form is the one induced by `<., .>_Q`, this equals
/// [`symplectic_bregman`] — the two routes are kept separate so that the
/// equality can be tested rather than assumed.
pub fn bregman_composite(
    f: &dyn Potential,
    z1: &PhasePoint,
    z2: &PhasePoint,
    q: Option<&Matrix>,
) -> Result<DivergenceReport> {
    if f.dim() != 2 * z1.n() || z1.n() != z2.n() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: 2 * z1.n(),
        });
    }
    if let Some(q) = q {
        cholesky(q)?;
        if q.rows() != z1.n() {
            return Err(Error::DimensionMismatch {
                expected: z1.n(),
                got: q.rows(),
            });
        }
    }
    let f1 = eval(f, &z1.flat())?.expect_finite()?;
    let f2 = eval(f, &z2.flat())?.expect_finite()?;
    let g = gradient_default(f, &z2.flat())?;
    let (gx, gy) = g.split_at(z1.n());
    let (rx, ry) = match q {
        Some(q) => (q.solve(gx)?, q.solve(gy)?),
        None => (gx.to_vec(), gy.to_vec()),
    };
    let diff = z1.sub(z2);
    let coupling = inner(q, diff.x(), &rx)? + inner(q, diff.y(), &ry)?;
    let mut riesz = rx;
    riesz.extend(ry);
    finish(
        DivergenceParts {
            potential_first: f1,
            potential_second: Some(f2),
            conjugate: None,
            coupling,
            gradient: Some(riesz),
        },
        Method::ClosedForm,
    )
}

/// Canonical divergence of a dually flat pair of coordinates:
/// `Y_F(theta : eta') = F(theta) + F*(eta') - theta . eta'`.
///
/// Zero exactly when `eta' = grad F(theta)`; equals the Bregman divergence
/// `B_F(theta : (grad F)^-1(eta'))`.
pub fn fenchel_young_flat(
    f: &dyn Potential,
    theta: &[f64],
    eta_prime: &[f64],
    params: &SolverParams,
) -> Result<DivergenceReport> {
    let ftheta = eval(f, theta)?.expect_finite()?;
    let conj: ConjugateResult = fenchel_conjugate(f, eta_prime, params)?;
    let coupling = dot(theta, eta_prime);
    finish(
        DivergenceParts {
            potential_first: ftheta,
            potential_second: None,
            conjugate: Some(conj.value),
            coupling,
            gradient: None,
        },
        conj.method,
    )
}

/// Affine change of generator `F_bar(theta) = F(A theta + b) + <c, theta>
/// + d`; Bregman divergences are invariant:
/// `B_F(theta1 : theta2) = B_{F_bar}(theta1_bar : theta2_bar)` with
/// `theta_bar = A^-1 (theta - b)`.
pub fn reparameterize_generator<P: Potential>(
    f: P,
    a: Matrix,
    b: Vec<f64>,
    c: Vec<f64>,
    d: f64,
) -> Result<AffineReparam<P>> {
    AffineReparam::new(f, a, b, c, d)
}
