//! Cheeger-type lower bounds: the killing bound on `λ₀`, the two-sided and
//! one-sided bounds on `λ₁` through modified forms, Chung's bound and the
//! classical Lawler–Sokal bounds.

use crate::bounds::{one_minus_root, BoundCertificate, Target};
use crate::cheeger::{birth_death_k, birth_death_kprime, constants, modified_constants};
use crate::error::{Error, Result};
use crate::forms::{check_normalization, modified_form, Alpha, BirthDeathChain, ModifiedFormParams, SymmetricJumpForm};
use crate::scalar::Scalar;
use crate::spectral::{birth_death_lambda1, lambda0_exact, lambda1_exact};

/// Where `λ₁^(1)` comes from in the two-sided bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapEstimate {
    /// Exact eigenvalue of the `α = 1` form.
    Exact,
    /// `λ₁^(1) ≥ 1 − √(1 − k^(1)'²)` from Chung's bound on the `α = 1` form.
    Chained,
}

fn require_normalized<S: Scalar>(form: &SymmetricJumpForm<S>, params: &ModifiedFormParams<S>) -> Result<()> {
    let report = check_normalization(form, params);
    if report.holds() {
        Ok(())
    } else {
        Err(Error::NormalizationViolated {
            max_density: report.max_density.to_f64_lossy(),
        })
    }
}

/// `√2 + √(2 − λ₁^(1))`. The spectrum of the normalised form lies in
/// `[0, 2]`, so a gap within rounding of 2 is taken as exactly 2.
fn two_sided_denominator<S: Scalar>(lambda1_one: S) -> S {
    let two = S::of(2.0);
    let slack = two - lambda1_one;
    let slack = if slack <= S::of(16.0) * S::epsilon() { S::zero() } else { slack };
    two.sqrt() + slack.sqrt()
}

fn require_conservative<S: Scalar>(form: &SymmetricJumpForm<S>) -> Result<()> {
    if form.has_killing() {
        Err(Error::KillingPresent)
    } else {
        Ok(())
    }
}

/// `λ₀ ≥ h^(1/2)² / (2 − λ₀^(1)) ≥ h^(1/2)² / (1 + √(1 − h^(1)²))`.
///
/// Both values are recorded; the certificate carries the larger one.
pub fn killing_cheeger<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    params: &ModifiedFormParams<S>,
) -> Result<BoundCertificate<S>> {
    require_normalized(form, params)?;
    let half = modified_constants(form, &params.at(Alpha::Half))?;
    let one = modified_constants(form, &params.at(Alpha::One))?;
    let lambda0_one = lambda0_exact(&modified_form(form, &params.at(Alpha::One)))?.value;
    let h2 = half.h * half.h;
    let spectral = h2 / (S::of(2.0) - lambda0_one).max(S::one());
    let isoperimetric = h2 / (S::of(2.0) - one_minus_root(one.h));
    let cert = BoundCertificate::lower("killing_cheeger", Target::Lambda0, spectral.max(isoperimetric))
        .input("h_half", half.h)
        .input("h_one", one.h)
        .input("lambda0_one", lambda0_one)
        .input("spectral_form", spectral)
        .input("isoperimetric_form", isoperimetric)
        .with_rescale(params.rescale());
    Ok(if form.has_killing() {
        cert
    } else {
        cert.with_note("no killing: h = 0 and the bound is vacuous")
    })
}

/// `λ₁ ≥ (k^(1/2) / (√2 + √(2 − λ₁^(1))))²`.
pub fn two_sided_cheeger<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    params: &ModifiedFormParams<S>,
    gap: GapEstimate,
) -> Result<BoundCertificate<S>> {
    require_conservative(form)?;
    require_normalized(form, params)?;
    let half = modified_constants(form, &params.at(Alpha::Half))?;
    let lambda1_one = match gap {
        GapEstimate::Exact => lambda1_exact(&modified_form(form, &params.at(Alpha::One)))?.value,
        GapEstimate::Chained => one_minus_root(modified_constants(form, &params.at(Alpha::One))?.k_prime),
    };
    let ratio = half.k / two_sided_denominator(lambda1_one);
    let name = match gap {
        GapEstimate::Exact => "two_sided_cheeger",
        GapEstimate::Chained => "two_sided_cheeger_chained",
    };
    let mut cert = BoundCertificate::lower(name, Target::Lambda1, ratio * ratio)
        .input("k_half", half.k)
        .input("lambda1_one", lambda1_one)
        .with_rescale(params.rescale());
    if !half.k_exact {
        cert = cert.with_note("k_half is a closed-form lower bound");
    }
    Ok(cert)
}

/// `k^(1/2)'² / (1 + √(1 − k^(1)'²))`. Increasing in both arguments, so
/// lower bounds on the constants give a valid bound.
pub fn one_sided_value<S: Scalar>(k_half_prime: S, k_one_prime: S) -> S {
    k_half_prime * k_half_prime / (S::of(2.0) - one_minus_root(k_one_prime))
}

/// `λ₁ ≥ k^(1/2)'² / (1 + √(1 − k^(1)'²))`.
pub fn one_sided_cheeger<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    params: &ModifiedFormParams<S>,
) -> Result<BoundCertificate<S>> {
    require_conservative(form)?;
    require_normalized(form, params)?;
    let half = modified_constants(form, &params.at(Alpha::Half))?;
    let one = modified_constants(form, &params.at(Alpha::One))?;
    let mut cert = BoundCertificate::lower(
        "one_sided_cheeger",
        Target::Lambda1,
        one_sided_value(half.k_prime, one.k_prime),
    )
    .input("k_half_prime", half.k_prime)
    .input("k_one_prime", one.k_prime)
    .with_rescale(params.rescale());
    if !(half.k_prime_exact && one.k_prime_exact) {
        cert = cert.with_note("constants are closed-form lower bounds");
    }
    Ok(cert)
}

/// `M (1 − √(1 − k'²/M²))`, which lies in `[k'²/2M, k'²/M]`.
pub fn chung_value<S: Scalar>(k_prime: S, m: S) -> Result<S> {
    if !(m > S::zero()) || !m.is_finite() {
        return Err(Error::InvalidM(format!("M = {m} must be positive and finite")));
    }
    if k_prime > m * (S::one() + S::of(1e-12)) {
        return Err(Error::InvalidM(format!("M = {m} is below k' = {k_prime}")));
    }
    Ok(m * one_minus_root(k_prime / m))
}

/// `λ₁ ≥ M (1 − √(1 − k'²/M²))` for any `M ≥ max_i J(i, E)/π_i`; the default
/// is that maximum.
pub fn chung<S: Scalar>(form: &SymmetricJumpForm<S>, m: Option<S>) -> Result<BoundCertificate<S>> {
    require_conservative(form)?;
    let density = form.max_density();
    let m = m.unwrap_or(density);
    if m < density * (S::one() - S::of(1e-12)) {
        return Err(Error::InvalidM(format!("M = {m} is below the jump density {density}")));
    }
    let c = constants(form, Alpha::Zero)?;
    let value = chung_value(c.k_prime, m)?;
    let two = S::of(2.0);
    Ok(BoundCertificate::lower("chung", Target::Lambda1, value)
        .input("k_prime", c.k_prime)
        .input("M", m)
        .input("window_low", c.k_prime * c.k_prime / (two * m))
        .input("window_high", c.k_prime * c.k_prime / m))
}

/// The classical bounds with `M ≥ max_i (J(i, E) + K_i/2)/π_i`:
/// `h ≥ λ₀ ≥ h²/2M` and, when `K = 0`,
/// `k ≥ λ₁ ≥ max{κ k²/8M, k'²/2M}`.
pub fn lawler_sokal<S: Scalar>(form: &SymmetricJumpForm<S>, m: Option<S>, kappa: S) -> Result<Vec<BoundCertificate<S>>> {
    let density = form.classical_m();
    let m = m.unwrap_or(density);
    if !(m > S::zero()) || m < density * (S::one() - S::of(1e-12)) {
        return Err(Error::InvalidM(format!("M = {m} is below the density {density}")));
    }
    if !(kappa >= S::one()) {
        return Err(Error::InvalidParams(format!("κ = {kappa} must be at least 1")));
    }
    let c = constants(form, Alpha::Zero)?;
    let two = S::of(2.0);
    let mut out = vec![
        BoundCertificate::lower("lawler_sokal_killing", Target::Lambda0, c.h * c.h / (two * m))
            .input("h", c.h)
            .input("M", m),
        BoundCertificate::upper("cheeger_upper_killing", Target::Lambda0, c.h).input("h", c.h),
    ];
    if !form.has_killing() {
        let quartic = kappa * c.k * c.k / (S::of(8.0) * m);
        let small = c.k_prime * c.k_prime / (two * m);
        out.push(
            BoundCertificate::lower("lawler_sokal_gap", Target::Lambda1, quartic.max(small))
                .input("k", c.k)
                .input("k_prime", c.k_prime)
                .input("kappa", kappa)
                .input("M", m),
        );
        if c.k_exact {
            out.push(BoundCertificate::upper("cheeger_upper_gap", Target::Lambda1, c.k).input("k", c.k));
        }
    }
    Ok(out)
}

/// [`one_sided_cheeger`] for a birth-death chain from the closed-form
/// ratios, with `r_{i,i+1} = (a_i + b_i) ∨ (a_{i+1} + b_{i+1})`.
pub fn birth_death_one_sided<S: Scalar>(chain: &BirthDeathChain<S>) -> BoundCertificate<S> {
    let half = birth_death_kprime(chain, Alpha::Half);
    let one = birth_death_kprime(chain, Alpha::One);
    BoundCertificate::lower(
        "one_sided_cheeger",
        Target::Lambda1,
        one_sided_value(half.infimum, one.infimum),
    )
    .input("k_half_prime", half.infimum)
    .input("k_one_prime", one.infimum)
    .input("argmin_half", S::of_usize(half.argmin))
    .with_rescale(S::one())
}

/// [`two_sided_cheeger`] for a birth-death chain: `k^(1/2)` from the closed
/// form, `λ₁^(1)` from the modified rates.
pub fn birth_death_two_sided<S: Scalar>(chain: &BirthDeathChain<S>) -> Result<BoundCertificate<S>> {
    let k_half = birth_death_k(chain, Alpha::Half).infimum;
    let lambda1_one = birth_death_lambda1(&chain.modified(Alpha::One))?.value;
    let ratio = k_half / two_sided_denominator(lambda1_one);
    Ok(BoundCertificate::lower("two_sided_cheeger", Target::Lambda1, ratio * ratio)
        .input("k_half", k_half)
        .input("lambda1_one", lambda1_one)
        .with_rescale(S::one()))
}
