//! Deterministic random streams and uniform sampling of the sphere.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream for task `task` under run seed `seed`. Results of
/// parallel loops that draw from `task_rng(seed, i)` do not depend on the
/// scheduling order.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// A point drawn from the Haar (area) measure, returned as `(theta, phi)`
/// with `theta` in `[0, pi]` and `phi` in `[0, 2 pi)`.
pub fn haar_point<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    ((1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(), 2.0 * PI * v)
}

/// `n` Haar points, point `i` drawn from stream `i`.
pub fn haar_points(seed: u64, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| haar_point(&mut task_rng(seed, i as u64)))
        .collect()
}
