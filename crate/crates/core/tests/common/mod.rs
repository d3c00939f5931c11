//! Shared builders for the integration tests: deterministic synthetic
//! datasets with known structure.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vsf_core::{Dataset, SensorTrace};

/// Smooth diurnal-style signal: offset sine plus uniform noise.
pub fn sine_trace(len: usize, rng: &mut ChaCha8Rng, noise: f64, phase: f64) -> Vec<f64> {
    (0..len)
        .map(|t| {
            let angle = (t as f64 / 200.0 + phase) * core::f64::consts::TAU;
            let jitter = if noise > 0.0 {
                rng.random_range(-noise..noise)
            } else {
                0.0
            };
            20.0 + 4.0 * angle.sin() + jitter
        })
        .collect()
}

/// Affine image `slope * source + intercept + link noise`.
pub fn affine_image(
    source: &[f64],
    slope: f64,
    intercept: f64,
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    source
        .iter()
        .map(|&x| {
            let jitter = if noise > 0.0 {
                rng.random_range(-noise..noise)
            } else {
                0.0
            };
            slope * x + intercept + jitter
        })
        .collect()
}

/// Two-node dataset: a smooth source and its affine image `2a + 1`.
pub fn correlated_pair(len: usize, seed: u64, base_noise: f64, link_noise: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = sine_trace(len, &mut rng, base_noise, 0.0);
    let b = affine_image(&a, 2.0, 1.0, link_noise, &mut rng);
    Dataset::from_traces(vec![
        SensorTrace::from_values("n0", "°C", a),
        SensorTrace::from_values("n1", "°C", b),
    ])
    .unwrap()
}

/// Correlated pair plus an uncorrelated third node.
pub fn correlated_pair_plus_noise(len: usize, seed: u64, link_noise: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = sine_trace(len, &mut rng, 0.05, 0.0);
    let b = affine_image(&a, 2.0, 1.0, link_noise, &mut rng);
    let c: Vec<f64> = (0..len).map(|_| rng.random_range(-5.0..5.0)).collect();
    Dataset::from_traces(vec![
        SensorTrace::from_values("n0", "°C", a),
        SensorTrace::from_values("n1", "°C", b),
        SensorTrace::from_values("n2", "°C", c),
    ])
    .unwrap()
}
