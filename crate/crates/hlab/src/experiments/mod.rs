//! Seeded, deterministic experiment drivers. Trials run on the rayon pool;
//! results are collected in trial order before any reduction.

pub mod adams;
pub mod counterexample;
pub mod diam;
pub mod distortion;
pub mod nstar;
pub mod synth;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for trial `index` of a run seeded with `seed`; independent of
/// thread scheduling.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `max(a/b, b/a)`, with two zeros counting as equal.
pub fn spread(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else if a == 0.0 || b == 0.0 {
        f64::INFINITY
    } else {
        (a / b).max(b / a)
    }
}

pub fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}
