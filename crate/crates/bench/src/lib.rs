//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sjg_core::group::random_jacobi_point;
use sjg_core::JacobiPoint;

/// A reproducible random point of degree `n`.
pub fn fixture_point(n: usize, extended: bool, seed: u64) -> JacobiPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_jacobi_point(n, extended, &mut rng)
}
