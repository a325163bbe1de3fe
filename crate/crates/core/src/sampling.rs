//! Seeded sample points for the identity checks.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default seed for property-report samples.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Radius of the sampling disk.
pub const SAMPLE_RADIUS: f64 = 2.0;

/// `count` points drawn uniformly from the disk `|u| ≤ radius`, kept away
/// from the origin so that regularity points are not hit by accident.
pub fn disk_points(seed: u64, count: usize, radius: f64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = radius * (0.05 + 0.95 * rng.random::<f64>().sqrt());
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            C64::from_polar(r, t)
        })
        .collect()
}

/// `count` sample pairs `(u, v)` from the default disk.
pub fn sample_pairs(seed: u64, count: usize) -> Vec<(C64, C64)> {
    let pts = disk_points(seed, 2 * count, SAMPLE_RADIUS);
    pts.chunks(2).map(|c| (c[0], c[1])).collect()
}
