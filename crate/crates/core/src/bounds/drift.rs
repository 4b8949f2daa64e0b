//! Windowed drift quantities for chains on `ℤ₊` and `ℤ^d`.
//!
//! A finite window cannot certify an asymptotic sign condition. Reports
//! state the sign on the window and whether the drift visibly decays to 0.

use crate::error::{Error, Result};
use crate::forms::{BirthDeathChain, LatticeChainSpec, RateChain};
use crate::scalar::{fmax, Scalar};

/// A drift whose magnitude decays faster than `position^(-DECAY_TOLERANCE)`
/// across the window is treated as tending to zero.
pub const DECAY_TOLERANCE: f64 = 0.1;

const SUPPORT_NOTE: &str = "a negative window supports, but does not prove, a negative limit superior";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftClassification {
    NegativeOnWindow,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport<S> {
    pub name: &'static str,
    pub window: (usize, usize),
    /// State index, or `|x|₁` for lattice sites.
    pub positions: Vec<usize>,
    pub values: Vec<S>,
    pub sup: S,
    pub classification: DriftClassification,
    /// Fitted power of `|drift|` between the two halves of the window.
    pub decay_exponent: f64,
    /// Description of the test function.
    pub phi: String,
    pub note: String,
}

fn best_in<S: Scalar>(positions: &[usize], values: &[S], keep: impl Fn(usize) -> bool) -> Option<(usize, S)> {
    positions
        .iter()
        .zip(values)
        .filter(|(p, _)| keep(**p))
        .fold(None, |best: Option<(usize, S)>, (&p, &v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((p, v)),
        })
}

fn decay_exponent<S: Scalar>(window: (usize, usize), positions: &[usize], values: &[S]) -> f64 {
    let (start, end) = window;
    let mid = if start >= 1 {
        ((start as f64) * (end as f64)).sqrt()
    } else {
        (start + end) as f64 / 2.0
    };
    let first = best_in(positions, values, |p| (p as f64) <= mid);
    let second = best_in(positions, values, |p| (p as f64) > mid);
    match (first, second) {
        (Some((p1, v1)), Some((p2, v2))) if p1 > 0 && p2 > p1 => {
            let (m1, m2) = (v1.abs().to_f64_lossy(), v2.abs().to_f64_lossy());
            if m1 > 0.0 && m2 > 0.0 {
                (m2 / m1).ln() / (p2 as f64 / p1 as f64).ln()
            } else {
                0.0
            }
        }
        _ => 0.0,
    }
}

fn report<S: Scalar>(
    name: &'static str,
    window: (usize, usize),
    positions: Vec<usize>,
    values: Vec<S>,
    phi: &str,
) -> DriftReport<S> {
    let sup = values.iter().copied().fold(S::neg_infinity(), fmax);
    let decay = decay_exponent(window, &positions, &values);
    let (classification, note) = if !(sup < S::zero()) {
        (DriftClassification::Indeterminate, "drift is not negative on the window".to_string())
    } else if decay < -DECAY_TOLERANCE {
        (
            DriftClassification::Indeterminate,
            format!("drift is negative but decays to zero (exponent {decay:.3})"),
        )
    } else {
        (DriftClassification::NegativeOnWindow, SUPPORT_NOTE.to_string())
    };
    DriftReport {
        name,
        window,
        positions,
        values,
        sup,
        classification,
        decay_exponent: decay,
        phi: phi.to_string(),
        note,
    }
}

fn check_window(start: usize, end: usize, reach: usize, last: usize) -> Result<()> {
    if start > end || end + reach > last {
        return Err(Error::WindowOutOfRange { start, end, reach });
    }
    Ok(())
}

/// `Σ_j q_ij/√(q_i ∨ q_j) (j − i)` for a birth-death chain with
/// `q_i = a_i + b_i` from the untruncated rates.
pub fn birth_death_drift<S: Scalar>(chain: &BirthDeathChain<S>, start: usize, end: usize) -> Result<DriftReport<S>> {
    check_window(start, end, 1, chain.levels())?;
    let values = (start..=end)
        .map(|i| {
            let up = chain.raw_birth(i) / chain.pair_weight(i).sqrt();
            let down = if i > 0 { chain.death(i) / chain.pair_weight(i - 1).sqrt() } else { S::zero() };
            up - down
        })
        .collect();
    Ok(report("birth_death_drift", (start, end), (start..=end).collect(), values, "i"))
}

fn max_reach<S: Scalar>(chain: &RateChain<S>) -> usize {
    (0..chain.n())
        .flat_map(|i| chain.rates(i).iter().map(move |&(j, _)| i.abs_diff(j)))
        .max()
        .unwrap_or(0)
}

/// The same quantity for a finite-range chain whose states are `0..n` on
/// `ℤ₊`. Rates must be complete within twice the range beyond the window.
pub fn finite_range_drift<S: Scalar>(chain: &RateChain<S>, start: usize, end: usize) -> Result<DriftReport<S>> {
    let reach = 2 * max_reach(chain);
    check_window(start, end, reach, chain.n().saturating_sub(1))?;
    let values = (start..=end)
        .map(|i| {
            let qi = chain.total(i);
            chain
                .rates(i)
                .iter()
                .map(|&(j, q)| q / fmax(qi, chain.total(j)).sqrt() * (S::of_usize(j) - S::of_usize(i)))
                .sum()
        })
        .collect();
    Ok(report("finite_range_drift", (start, end), (start..=end).collect(), values, "i"))
}

/// Lattice drift `Σ_j q_ij/√(q_i ∨ q_j) Σ_k [|j_k| ∨ R − |i_k| ∨ R]` over
/// the sites with `start ≤ |x|₁ ≤ end`.
pub fn lattice_drift<S: Scalar>(
    spec: &LatticeChainSpec,
    chain: &RateChain<S>,
    start: usize,
    end: usize,
) -> Result<DriftReport<S>> {
    if chain.n() != spec.n() {
        return Err(Error::InvalidParams("chain does not match the lattice box".into()));
    }
    let r = spec.range as i64;
    check_window(start, end, 2 * spec.range, spec.radius)?;
    let psi = |site: &[i64]| -> i64 { site.iter().map(|x| x.abs().max(r)).sum() };
    let mut positions = Vec::new();
    let mut values = Vec::new();
    for i in 0..chain.n() {
        let site = spec.site(i);
        let norm = LatticeChainSpec::norm1(&site) as usize;
        if norm < start || norm > end {
            continue;
        }
        let qi = chain.total(i);
        let base = psi(&site);
        let v: S = chain
            .rates(i)
            .iter()
            .map(|&(j, q)| q / fmax(qi, chain.total(j)).sqrt() * S::of((psi(&spec.site(j)) - base) as f64))
            .sum();
        positions.push(norm);
        values.push(v);
    }
    Ok(report("lattice_drift", (start, end), positions, values, "sum_k max(|x_k|, R) + 1"))
}

fn require_positive_phi<S: Scalar>(phi: &[S], n: usize, start: usize, end: usize) -> Result<()> {
    if phi.len() != n {
        return Err(Error::DegeneratePhi(format!("φ has length {}, expected {n}", phi.len())));
    }
    if let Some(i) = (start..=end).find(|&i| !(phi[i] > S::zero()) || !phi[i].is_finite()) {
        return Err(Error::DegeneratePhi(format!("φ_{i} = {} must be positive", phi[i])));
    }
    Ok(())
}

/// `Ωφ/φ` with `Ωf(i) = Σ_j q_ij (f_j − f_i) − d_i f_i` on states
/// `start..=end` of a finite-range chain on `ℤ₊`.
pub fn lyapunov_drift<S: Scalar>(chain: &RateChain<S>, phi: &[S], start: usize, end: usize) -> Result<DriftReport<S>> {
    check_window(start, end, max_reach(chain), chain.n().saturating_sub(1))?;
    require_positive_phi(phi, chain.n(), start, end)?;
    let values = (start..=end)
        .map(|i| {
            let flow: S = chain.rates(i).iter().map(|&(j, q)| q * (phi[j] - phi[i])).sum();
            (flow - chain.defect(i) * phi[i]) / phi[i]
        })
        .collect();
    Ok(report("lyapunov_drift", (start, end), (start..=end).collect(), values, "supplied"))
}

/// [`lyapunov_drift`] for a birth-death chain with the untruncated rates.
pub fn birth_death_lyapunov_drift<S: Scalar>(
    chain: &BirthDeathChain<S>,
    phi: &[S],
    start: usize,
    end: usize,
) -> Result<DriftReport<S>> {
    check_window(start, end, 1, chain.levels())?;
    require_positive_phi(phi, chain.len(), start, end)?;
    let values = (start..=end)
        .map(|i| {
            let up = chain.raw_birth(i) * (phi[i + 1] - phi[i]);
            let down = if i > 0 { chain.death(i) * (phi[i - 1] - phi[i]) } else { S::zero() };
            (up + down) / phi[i]
        })
        .collect();
    Ok(report("lyapunov_drift", (start, end), (start..=end).collect(), values, "supplied"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::BirthDeathSpec;

    #[test]
    fn constant_rates_drift() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("4", "1", 100).unwrap().rates().unwrap();
        let r = birth_death_drift(&chain, 1, 99).unwrap();
        for v in &r.values {
            assert!((v + 3.0 / 5f64.sqrt()).abs() < 1e-12);
        }
        assert_eq!(r.classification, DriftClassification::NegativeOnWindow);
        assert!(matches!(
            birth_death_drift(&chain, 1, 100),
            Err(Error::WindowOutOfRange { .. })
        ));
    }

    #[test]
    fn decaying_drift_is_indeterminate() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("i^1.5", "i^1.5", 10_001).unwrap().rates().unwrap();
        let r = birth_death_drift(&chain, 1_000, 10_000).unwrap();
        assert!(r.sup < 0.0);
        assert_eq!(r.classification, DriftClassification::Indeterminate);
    }

    #[test]
    fn square_root_lyapunov() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("i^2", "i^2", 10_001).unwrap().rates().unwrap();
        let phi: Vec<f64> = (0..=10_001).map(|i| (i as f64).sqrt()).collect();
        let r = birth_death_lyapunov_drift(&chain, &phi, 1_000, 10_000).unwrap();
        assert!((r.sup + 0.25).abs() < 1e-3);
        assert_eq!(r.classification, DriftClassification::NegativeOnWindow);
    }

    #[test]
    fn rate_chain_matches_birth_death() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("4", "1", 40).unwrap().rates().unwrap();
        let rc = chain.to_chain().unwrap();
        let r = finite_range_drift(&rc, 2, 30).unwrap();
        assert!((r.sup + 3.0 / 5f64.sqrt()).abs() < 1e-12);
    }
}
