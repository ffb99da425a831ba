use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Vector;

/// Deterministic random stream. Streams are owned by value per task.
pub type RngStream = ChaCha8Rng;

/// Stream `stream_index` of the generator keyed by `master_seed`. Distinct
/// indices select non-overlapping ChaCha streams, so results never depend
/// on the order in which streams are consumed.
pub fn rng_stream(master_seed: u64, stream_index: u64) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_index);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream addressed by a hierarchical path such as `[trial, point]`.
pub fn derive_stream(master_seed: u64, path: &[u64]) -> RngStream {
    let index = path
        .iter()
        .fold(0x5EED_u64, |acc, &p| splitmix64(acc ^ splitmix64(p)));
    rng_stream(master_seed, index)
}

/// Child seed for nested experiments, e.g. `[setting, trial]`.
pub fn derive_seed(master_seed: u64, path: &[u64]) -> u64 {
    derive_stream(master_seed, path).next_u64()
}

/// Uniform point on the unit sphere of ℝⁿ (normalized Gaussian).
pub fn sample_unit_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    assert!(n >= 1, "sphere dimension must be positive");
    loop {
        let g = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm > 1e-150 {
            return g / norm;
        }
    }
}

/// Uniform point in the closed ε-ball of ℝⁿ: a uniform direction scaled by
/// `ε·u^{1/n}`.
pub fn sample_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, eps: f64) -> Vector {
    assert!(eps >= 0.0, "ball radius must be nonnegative");
    let dir = sample_unit_sphere(rng, n);
    let u: f64 = rng.random();
    if eps == 0.0 {
        return Vector::zeros(n);
    }
    dir * (eps * u.powf(1.0 / n as f64))
}
