//! Named tolerances used across the crate.
//!
//! Every numerical contract in the library points at one of these constants
//! instead of an inline magic number, so the accepted slack of each check is
//! visible in one place.

/// Default absolute max-norm tolerance for symplectic-group membership,
/// `|T'*Omega0*T - Omega0|_max <= SYMPLECTIC_TOL`.
pub const SYMPLECTIC_TOL: f64 = 1e-9;

/// Skew-symmetry of a form's Gram matrix: `|Omega + Omega'|_max`.
pub const SKEW_TOL: f64 = 1e-12;

/// Symmetry check before a Cholesky factorization.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative pivot threshold below which LU elimination reports a
/// singular matrix.
pub const RANK_TOL: f64 = 1e-10;

/// Darboux construction: smallest usable |omega(e, f)| pairing pivot.
pub const DARBOUX_TOL: f64 = 1e-9;

/// Default gradient-norm stopping criterion for the ascent/descent solvers.
pub const SOLVER_TOL: f64 = 1e-10;

/// Default iteration cap for the ascent/descent solvers.
pub const SOLVER_MAX_ITER: usize = 10_000;

/// Default initial step for backtracking line search.
pub const SOLVER_STEP0: f64 = 1.0;

/// Base step for central finite differences; scaled per coordinate by
/// `1 + |z_i|`.
pub const GRAD_STEP: f64 = 1e-5;

/// Divergence values in `[-DIVERGENCE_FLOOR, 0)` are clamped to zero and
/// flagged; anything more negative is reported as a convexity violation.
pub const DIVERGENCE_FLOOR: f64 = 1e-8;

/// Objective magnitude above which a conjugate is declared unbounded.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// Iterate norm above which a conjugate is declared unbounded.
pub const ITERATE_BOUND: f64 = 1e9;

/// Feasibility slack for closed-form indicator conjugates (perspective
/// potentials): targets within this margin of the feasible set count as
/// feasible, so the equality case of the Fenchel-Young inequality, which
/// lands exactly on the boundary, survives rounding.
pub const INDICATOR_SLACK: f64 = 1e-9;
