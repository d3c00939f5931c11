//! Synthetic trace generation with known ground-truth structure, for
//! experiments and oracle tests: a seeded base process per node plus exact
//! affine links between nodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use vsf_core::SensorTrace;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum BaseProcess {
    /// First-order autoregressive decay toward zero plus Gaussian noise.
    Ar1 { coeff: f64, noise_std: f64 },
    /// Gaussian random walk.
    RandomWalk { step_std: f64 },
    /// Offset sine with per-node phase plus Gaussian noise; `period` is in
    /// slots.
    SineDrift {
        period: f64,
        amplitude: f64,
        noise_std: f64,
    },
}

/// `target = slope * source + intercept + N(0, noise_std)`, slot by slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineLink {
    pub source: String,
    pub target: String,
    pub slope: f64,
    pub intercept: f64,
    pub noise_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub node_count: usize,
    pub length: usize,
    /// First sample (AR1, random walk) or center line (sine).
    pub start_value: f64,
    pub base: BaseProcess,
    pub links: Vec<AffineLink>,
    pub rng_seed: u64,
}

/// Node names are `n0..n{count-1}`, zero-padded so lexicographic order
/// matches numeric order.
pub fn node_name(index: usize, count: usize) -> String {
    let width = (count.max(2) - 1).to_string().len();
    format!("n{index:0width$}")
}

/// Deterministic traces for the spec: same seed, same bits. Link targets
/// are generated from their sources in dependency order, so with zero link
/// noise the affine relation holds exactly.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Vec<SensorTrace>, CliError> {
    if spec.node_count == 0 || spec.length == 0 {
        return Err(CliError::Config(
            "synthetic spec needs at least one node and one slot".into(),
        ));
    }
    let names: Vec<String> = (0..spec.node_count)
        .map(|i| node_name(i, spec.node_count))
        .collect();
    let index_of = |name: &str| names.iter().position(|n| n == name);

    // Validate links: known endpoints, unique targets, no cycles.
    let mut link_by_target: Vec<Option<&AffineLink>> = vec![None; spec.node_count];
    for link in &spec.links {
        let source = index_of(&link.source).ok_or_else(|| {
            CliError::Config(format!("link source '{}' is not a node", link.source))
        })?;
        let target = index_of(&link.target).ok_or_else(|| {
            CliError::Config(format!("link target '{}' is not a node", link.target))
        })?;
        if source == target {
            return Err(CliError::Config(format!(
                "link '{}' points at itself",
                link.target
            )));
        }
        if link_by_target[target].is_some() {
            return Err(CliError::Config(format!(
                "node '{}' is the target of more than one link",
                link.target
            )));
        }
        link_by_target[target] = Some(link);
    }
    // Topological order over the link chains; a cycle never resolves.
    let mut order: Vec<usize> = Vec::with_capacity(spec.node_count);
    let mut resolved = vec![false; spec.node_count];
    while order.len() < spec.node_count {
        let before = order.len();
        for i in 0..spec.node_count {
            if resolved[i] {
                continue;
            }
            let ready = match link_by_target[i] {
                None => true,
                Some(link) => resolved[index_of(&link.source).unwrap()],
            };
            if ready {
                resolved[i] = true;
                order.push(i);
            }
        }
        if order.len() == before {
            return Err(CliError::Config("affine links form a cycle".into()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut values: Vec<Option<Vec<f64>>> = vec![None; spec.node_count];
    for &i in &order {
        let trace = match link_by_target[i] {
            None => base_realization(spec, &mut rng),
            Some(link) => {
                let source = index_of(&link.source).unwrap();
                let source_values = values[source].as_ref().unwrap();
                let noise = gaussian(link.noise_std)?;
                source_values
                    .iter()
                    .map(|&x| {
                        link.slope * x
                            + link.intercept
                            + noise.as_ref().map_or(0.0, |n| n.sample(&mut rng))
                    })
                    .collect()
            }
        };
        values[i] = Some(trace);
    }

    Ok(values
        .into_iter()
        .enumerate()
        .map(|(i, v)| SensorTrace::from_values(names[i].clone(), "", v.unwrap()))
        .collect())
}

fn gaussian(std: f64) -> Result<Option<Normal<f64>>, CliError> {
    if std == 0.0 {
        return Ok(None);
    }
    Normal::new(0.0, std)
        .map(Some)
        .map_err(|e| CliError::Config(format!("bad noise std {std}: {e}")))
}

fn base_realization(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(spec.length);
    match spec.base {
        BaseProcess::Ar1 { coeff, noise_std } => {
            let noise = gaussian(noise_std).expect("validated std");
            let mut value = spec.start_value;
            for t in 0..spec.length {
                if t > 0 {
                    value = coeff * value + noise.as_ref().map_or(0.0, |n| n.sample(rng));
                }
                out.push(value);
            }
        }
        BaseProcess::RandomWalk { step_std } => {
            let noise = gaussian(step_std).expect("validated std");
            let mut value = spec.start_value;
            for t in 0..spec.length {
                if t > 0 {
                    value += noise.as_ref().map_or(0.0, |n| n.sample(rng));
                }
                out.push(value);
            }
        }
        BaseProcess::SineDrift {
            period,
            amplitude,
            noise_std,
        } => {
            let noise = gaussian(noise_std).expect("validated std");
            let phase: f64 = rng.random_range(0.0..1.0);
            for t in 0..spec.length {
                let angle = (t as f64 / period + phase) * std::f64::consts::TAU;
                let jitter = noise.as_ref().map_or(0.0, |n| n.sample(rng));
                out.push(spec.start_value + amplitude * angle.sin() + jitter);
            }
        }
    }
    out
}
