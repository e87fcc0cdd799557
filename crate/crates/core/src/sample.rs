//! Deterministic sample generators for property suites and tests.
//!
//! Everything is keyed by a seed through a counter-based ChaCha stream, so
//! the same seed reproduces the same corpus on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;
use crate::space::PhasePoint;

/// RNG for a named sub-stream of a base seed.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Random symmetric positive-definite matrix `M' M + n I`.
pub fn random_spd(n: usize, rng: &mut impl Rng) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, rng.random_range(-1.0..1.0));
        }
    }
    let mut spd = m.transpose().matmul(&m).expect("square");
    for i in 0..n {
        spd.set(i, i, spd.get(i, i) + n as f64);
    }
    spd
}

/// Random invertible matrix with moderate condition number.
pub fn random_invertible(n: usize, rng: &mut impl Rng) -> Matrix {
    crate::group::random_well_conditioned(n, rng)
}

/// Vector with entries uniform in `[lo, hi)`.
pub fn random_vector(len: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(lo..hi)).collect()
}

/// Phase point with all coordinates uniform in `[lo, hi)`.
pub fn random_point(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> PhasePoint {
    PhasePoint::new(
        random_vector(n, lo, hi, rng),
        random_vector(n, lo, hi, rng),
    )
    .expect("finite samples")
}
