//! Seeded random reversible chains for property checks and verification
//! batches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::forms::SymmetricJumpForm;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomFormConfig {
    pub min_states: usize,
    pub max_states: usize,
    /// Probability that a non-tree pair carries jump mass.
    pub edge_probability: f64,
    /// Probability that a state carries killing mass; 0 gives `K = 0`.
    pub killing_probability: f64,
}

impl Default for RandomFormConfig {
    fn default() -> Self {
        Self {
            min_states: 2,
            max_states: 12,
            edge_probability: 0.35,
            killing_probability: 0.0,
        }
    }
}

/// A connected random form: a random spanning tree plus extra pairs, jump
/// masses log-uniform over two decades, `π` uniform on `[0.05, 1]` then
/// normalised.
pub fn random_form<S: Scalar>(seed: u64, config: &RandomFormConfig) -> Result<SymmetricJumpForm<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(config.min_states..=config.max_states.max(config.min_states));
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let pi: Vec<S> = raw.iter().map(|&p| S::of(p / total)).collect();
    let mut pairs = Vec::new();
    let mass = |rng: &mut ChaCha8Rng| S::of(10f64.powf(rng.gen_range(-2.0..0.0)));
    for j in 1..n {
        let i = rng.gen_range(0..j);
        pairs.push((i, j, mass(&mut rng)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(config.edge_probability) {
                pairs.push((i, j, mass(&mut rng)));
            }
        }
    }
    let killing = (0..n)
        .map(|_| {
            if config.killing_probability > 0.0 && rng.gen_bool(config.killing_probability) {
                S::of(10f64.powf(rng.gen_range(-2.0..0.0)))
            } else {
                S::zero()
            }
        })
        .collect();
    SymmetricJumpForm::new(pi, pairs, killing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let cfg = RandomFormConfig::default();
        let a: SymmetricJumpForm<f64> = random_form(7, &cfg).unwrap();
        let b: SymmetricJumpForm<f64> = random_form(7, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.n() >= 2 && a.n() <= 12);
        assert!(!a.has_killing());
    }
}
