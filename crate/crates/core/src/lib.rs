//! Symplectic Bregman divergences and their supporting machinery.
//!
//! The crate builds, from the bottom up:
//!
//! - dense linear algebra and the symplectic matrix group Sp(2n)
//!   ([`matrix`], [`group`]);
//! - dual systems, symplectic forms from pairings and inner products, the
//!   complex structure J, and Darboux bases ([`space`]);
//! - convex potentials with gradients, Fenchel conjugation (ordinary,
//!   symplectic, and a brute-force grid oracle), symplectic gradients, and
//!   Moreau decomposition ([`potential`], [`conjugate`]);
//! - the divergence zoo: Bregman, dual Bregman, symplectic Fenchel-Young,
//!   symplectic Bregman, composite-inner-product Bregman, and dually flat
//!   Fenchel-Young, all returning auditable reports ([`divergence`]);
//! - a dissipative-dynamics demo where velocities split into reversible and
//!   irreversible parts and the natural path has zero action ([`sben`]);
//! - JSON specifications for forms and potentials ([`spec`]) and a named
//!   invariant suite ([`checks`]).
//!
//! All values are immutable and all operations are pure functions, so
//! everything here is safe to share across threads.

pub mod checks;
pub mod conjugate;
pub mod divergence;
pub mod error;
pub mod group;
pub mod matrix;
pub mod potential;
pub mod sample;
pub mod sben;
pub mod space;
pub mod spec;
pub mod tol;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use space::{PhasePoint, SymplecticForm};
