//! Upper bounds on `λ₁` from exponential moments:
//! `λ₁ ≤ (δ₂(φ)/4) sup{ε² : π(e^{εφ}) < ∞}`.

use crate::bounds::{BoundCertificate, Target};
use crate::error::{Error, Result};
use crate::expr::RateExpression;
use crate::forms::{check_normalization, BirthDeathChain, BirthDeathSpec, ModifiedFormParams, SymmetricJumpForm};
use crate::scalar::{fmax, Scalar};

fn require_phi<S: Scalar>(phi: &[S], n: usize) -> Result<()> {
    if phi.len() != n {
        return Err(Error::DegeneratePhi(format!("φ has length {}, expected {n}", phi.len())));
    }
    if phi.iter().any(|v| !(*v >= S::zero()) || !v.is_finite()) {
        return Err(Error::DegeneratePhi("φ must be finite and nonnegative".into()));
    }
    Ok(())
}

/// `δ₂(φ) = max |φ_i − φ_j|² r_ij` over pairs with `J_ij > 0`, for weights
/// satisfying the normalisation.
pub fn delta2<S: Scalar>(form: &SymmetricJumpForm<S>, phi: &[S], params: &ModifiedFormParams<S>) -> Result<S> {
    require_phi(phi, form.n())?;
    let report = check_normalization(form, params);
    if !report.holds() {
        return Err(Error::NormalizationViolated {
            max_density: report.max_density.to_f64_lossy(),
        });
    }
    Ok(form
        .edges()
        .map(|(i, j, _)| {
            let d = phi[i] - phi[j];
            d * d * params.r(i, j)
        })
        .fold(S::zero(), fmax))
}

/// `δ₂'(φ) = max_i Σ_j q_ij (φ_i − φ_j)²`.
pub fn delta2_kernel<S: Scalar>(form: &SymmetricJumpForm<S>, phi: &[S]) -> Result<S> {
    require_phi(phi, form.n())?;
    Ok((0..form.n())
        .map(|i| {
            let s: S = form
                .neighbors(i)
                .iter()
                .map(|&(j, w)| w * (phi[i] - phi[j]) * (phi[i] - phi[j]))
                .sum();
            s / form.pi()[i]
        })
        .fold(S::zero(), fmax))
}

/// [`delta2_kernel`] for a birth-death chain, with the untruncated birth
/// rates so the value describes the infinite chain on the window.
pub fn birth_death_delta2_kernel<S: Scalar>(chain: &BirthDeathChain<S>, phi: &[S]) -> Result<S> {
    require_phi(phi, chain.len())?;
    let n = chain.levels();
    Ok((0..=n)
        .map(|i| {
            let up = if i < n { chain.raw_birth(i) * (phi[i + 1] - phi[i]).powi(2) } else { S::zero() };
            let down = if i > 0 { chain.death(i) * (phi[i - 1] - phi[i]).powi(2) } else { S::zero() };
            up + down
        })
        .fold(S::zero(), fmax))
}

/// `λ₁ ≤ δ₂ ε*² / 4`. `ε* = ∞` gives a vacuous certificate; `ε* = 0`
/// proves `λ₁ = 0` for the family the moment condition describes.
pub fn exponential_moment<S: Scalar>(delta2: S, eps_star: S) -> Result<BoundCertificate<S>> {
    if !(delta2 > S::zero()) || !delta2.is_finite() {
        return Err(Error::DegeneratePhi(format!("δ₂ = {delta2} must be positive and finite")));
    }
    if !(eps_star >= S::zero()) {
        return Err(Error::InvalidParams(format!("ε* = {eps_star} must be nonnegative")));
    }
    let value = if eps_star.is_infinite() {
        S::infinity()
    } else {
        delta2 * eps_star * eps_star / S::of(4.0)
    };
    Ok(BoundCertificate::upper("exponential_moment", Target::Lambda1, value)
        .input("delta2", delta2)
        .input("eps_star", eps_star)
        .in_family())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrability {
    Converges,
    Diverges,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityReport {
    pub verdict: Integrability,
    /// Sample indices.
    pub samples: Vec<usize>,
    /// `log μ_i + ε φ_i` at each sample, with `μ_0 = 1`.
    pub log_terms: Vec<f64>,
    /// Local decay exponents between consecutive samples.
    pub exponents: Vec<f64>,
}

const PROBE_START: usize = 1_000;
const PROBE_END: usize = 1_000_000;
const PROBE_SAMPLES: usize = 31;
const PROBE_MARGIN: f64 = 0.1;

/// Heuristic classification of `Σ_i μ_i e^{ε φ_i}` for a birth-death family.
///
/// Local exponents `s = −Δ(log μ_i + ε φ_i)/Δ log i` are taken between
/// geometric samples in `[10³, 10⁶]`. All `s ≥ 1.1` with no accelerating
/// decline means convergence, all `s ≤ 1` means divergence, and exponents
/// that fall faster at every step (stretched-exponential growth of
/// `e^{εφ}`) are reported as divergent too.
pub fn integrability_probe(spec: &BirthDeathSpec, phi: &RateExpression, eps: f64) -> Result<IntegrabilityReport> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParams(format!("ε = {eps} must be finite and nonnegative")));
    }
    let ratio = (PROBE_END as f64 / PROBE_START as f64).powf(1.0 / (PROBE_SAMPLES - 1) as f64);
    let mut samples: Vec<usize> = (0..PROBE_SAMPLES)
        .map(|k| (PROBE_START as f64 * ratio.powi(k as i32)).round() as usize)
        .collect();
    samples.dedup();
    if eps == 0.0 {
        return Ok(IntegrabilityReport {
            verdict: Integrability::Converges,
            samples,
            log_terms: Vec::new(),
            exponents: Vec::new(),
        });
    }
    let mut log_terms = Vec::with_capacity(samples.len());
    let mut log_mu = 0.0f64;
    let mut prev_birth = spec.rates_at(0)?.1;
    let mut next = 0;
    for i in 1..=PROBE_END {
        let (a, b) = spec.rates_at(i)?;
        if !(a > 0.0 && prev_birth > 0.0) {
            return Err(Error::InvalidParams(format!("rates must stay positive, index {i}")));
        }
        log_mu += prev_birth.ln() - a.ln();
        prev_birth = b;
        if next < samples.len() && samples[next] == i {
            let value = log_mu + eps * phi.eval(i as i64)?;
            if !value.is_finite() {
                return Err(Error::InvalidParams(format!("log term is not finite at {i}")));
            }
            log_terms.push(value);
            next += 1;
        }
    }
    let exponents: Vec<f64> = samples
        .windows(2)
        .zip(log_terms.windows(2))
        .map(|(s, t)| -(t[1] - t[0]) / ((s[1] as f64).ln() - (s[0] as f64).ln()))
        .collect();
    let declines: Vec<f64> = exponents.windows(2).map(|w| w[0] - w[1]).collect();
    let accelerating = declines.iter().all(|&d| d > 0.0) && declines.windows(2).all(|w| w[1] > w[0]);
    let verdict = if exponents.iter().all(|&s| s <= 1.0) || accelerating {
        Integrability::Diverges
    } else if exponents.iter().all(|&s| s >= 1.0 + PROBE_MARGIN) {
        Integrability::Converges
    } else {
        Integrability::Indeterminate
    };
    Ok(IntegrabilityReport {
        verdict,
        samples,
        log_terms,
        exponents,
    })
}
