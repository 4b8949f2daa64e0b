//! Closed-form lower bounds on the conductance constants of birth-death
//! chains, computed from rate ratios only.
//!
//! With `r_i = (a_i + b_i) ∨ (a_{i−1} + b_{i−1})` and the tail ratio
//! `T_i = Σ_{j≥i} π_j / π_i`, any set avoiding the origin has its minimum
//! `i₀` in the set and `i₀ − 1` outside, so its cut is at least
//! `π_{i₀} a_{i₀} / r_{i₀}^α` while its measure is at most `Σ_{j≥i₀} π_j`.

use crate::error::{Error, Result};
use crate::forms::{Alpha, BirthDeathChain};
use crate::scalar::Scalar;

/// `ratio(i)` for `i = 1..=N` together with its minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSequence<S> {
    /// `ratios[i − 1]` is the ratio at state `i`.
    pub ratios: Vec<S>,
    pub infimum: S,
    pub argmin: usize,
}

impl<S: Scalar> RatioSequence<S> {
    fn from_ratios(ratios: Vec<S>) -> Self {
        let (argmin, infimum) = ratios
            .iter()
            .enumerate()
            .fold((0, S::infinity()), |best, (k, &v)| if v < best.1 { (k + 1, v) } else { best });
        Self {
            ratios,
            infimum,
            argmin,
        }
    }

    pub fn ratio(&self, i: usize) -> S {
        self.ratios[i - 1]
    }

    /// Minimum over `1 ≤ i ≤ upto`.
    pub fn min_upto(&self, upto: usize) -> S {
        self.ratios[..upto.min(self.ratios.len())]
            .iter()
            .copied()
            .fold(S::infinity(), |a, b| a.min(b))
    }
}

fn pair_weight_below<S: Scalar>(chain: &BirthDeathChain<S>, i: usize) -> S {
    chain.pair_weight(i - 1)
}

/// `inf_i π_i a_i / (r_i^α Σ_{j≥i} π_j) = inf_i a_i / (r_i^α T_i)`, a lower
/// bound on `k^(α)'` of the chain.
pub fn birth_death_kprime<S: Scalar>(chain: &BirthDeathChain<S>, alpha: Alpha) -> RatioSequence<S> {
    let tail = chain.tail_ratios();
    let ratios = (1..=chain.levels())
        .map(|i| chain.death(i) / (alpha.power(pair_weight_below(chain, i)) * tail[i]))
        .collect();
    RatioSequence::from_ratios(ratios)
}

/// The same ratios divided by `1 − π_i`, a lower bound on `k^(α)`. Uses
/// `1/π_i = H_i + T_i − 1` with the head ratio `H_i = Σ_{j≤i} π_j / π_i`.
pub fn birth_death_k<S: Scalar>(chain: &BirthDeathChain<S>, alpha: Alpha) -> RatioSequence<S> {
    let tail = chain.tail_ratios();
    let head = chain.head_ratios();
    let ratios = (1..=chain.levels())
        .map(|i| {
            let rest = S::one() - S::one() / (head[i] + tail[i] - S::one());
            chain.death(i) / (alpha.power(pair_weight_below(chain, i)) * rest * tail[i])
        })
        .collect();
    RatioSequence::from_ratios(ratios)
}

/// Closed-form bounds under the tilted measure `π_p = p π / β_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedRatios<S> {
    /// `inf p`.
    pub alpha_p: S,
    /// `a_i / U_i` with `U_i = Σ_{j≥i} π_j p_j / π_i`; bounds `k_p'`.
    pub k_p_prime: RatioSequence<S>,
    /// The same divided by `1 − π_p(i)`; bounds `k_p`.
    pub k_p: RatioSequence<S>,
    /// `max_i q_i / p_i`; the tilt is admissible when at most 1.
    pub validity: S,
    pub worst_state: usize,
}

pub fn birth_death_kp<S: Scalar>(chain: &BirthDeathChain<S>, p: &[S]) -> Result<TiltedRatios<S>> {
    let n = chain.levels();
    if p.len() != n + 1 {
        return Err(Error::InvalidP(format!("p has length {}, expected {}", p.len(), n + 1)));
    }
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v > S::zero()) || !v.is_finite()) {
        return Err(Error::InvalidP(format!("p_{i} = {v} must be positive and finite")));
    }
    let tail = chain.tilted_tail_ratios(|i| p[i]);
    // tilted head ratio Σ_{j≤i} π_j p_j / π_i
    let mut head = vec![p[0]; n + 1];
    for i in 1..=n {
        head[i] = p[i] + chain.death(i) / chain.birth(i - 1) * head[i - 1];
    }
    let prime = (1..=n).map(|i| chain.death(i) / tail[i]).collect();
    let plain = (1..=n)
        .map(|i| {
            let weight = p[i] / (head[i] + tail[i] - p[i]);
            chain.death(i) / ((S::one() - weight) * tail[i])
        })
        .collect();
    let (worst_state, validity) = (0..=n)
        .map(|i| (i, (chain.death(i) + chain.birth(i)) / p[i]))
        .fold((0, S::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(TiltedRatios {
        alpha_p: p.iter().copied().fold(S::infinity(), |a, b| a.min(b)),
        k_p_prime: RatioSequence::from_ratios(prime),
        k_p: RatioSequence::from_ratios(plain),
        validity,
        worst_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::BirthDeathSpec;

    #[test]
    fn constant_rates_limit() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("4", "1", 2000).unwrap().rates().unwrap();
        let half = birth_death_kprime(&chain, Alpha::Half);
        assert!((half.infimum - 3.0 / 5f64.sqrt()).abs() < 1e-12);
        let one = birth_death_kprime(&chain, Alpha::One);
        assert!((one.infimum - 0.6).abs() < 1e-12);
        let k = birth_death_k(&chain, Alpha::Zero);
        assert!(k.infimum >= 3.0 - 1e-12);
        let tilted = birth_death_kp(&chain, &vec![5.0; 2001]).unwrap();
        assert!((tilted.k_p_prime.infimum - 0.6).abs() < 1e-12);
        assert!((tilted.validity - 1.0).abs() < 1e-15);
        assert_eq!(tilted.alpha_p, 5.0);
    }

    #[test]
    fn poly_ratio_at_one() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("i^2", "i^2", 100_000).unwrap().rates().unwrap();
        let seq = birth_death_kprime(&chain, Alpha::Half);
        assert_eq!(seq.argmin, 1);
        // Σ_{j≥1} j^{-2} truncated at 10^5
        let tail: f64 = (1..=100_000).map(|j| 1.0 / (j as f64 * j as f64)).sum();
        assert!((seq.infimum - 1.0 / (2f64.sqrt() * tail)).abs() < 1e-9);
    }

    #[test]
    fn bad_tilt() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("4", "1", 5).unwrap().rates().unwrap();
        assert!(matches!(birth_death_kp(&chain, &[1.0; 6].map(|x: f64| x - 1.0)), Err(Error::InvalidP(_))));
    }
}
