//! Cheeger constants of a form
//!
//! * `h = inf (J(A×Aᶜ) + K(A)) / π(A)`,
//! * `k = inf J(A×Aᶜ) / (π(A) π(Aᶜ))`,
//! * `k' = inf_{π(A) ≤ 1/2} J(A×Aᶜ) / π(A)`,
//!
//! computed exactly by enumeration for up to 24 states, by a closed form for
//! star graphs, and bounded below in closed form for birth-death chains.

mod birth_death;
mod enumerate;
mod functionals;
mod local;
mod star;

use crate::error::{Error, Result};
use crate::forms::{modified_form, Alpha, ModifiedFormParams, SymmetricJumpForm};
use crate::scalar::Scalar;
use crate::subset::Subset;

pub use birth_death::{birth_death_k, birth_death_kp, birth_death_kprime, RatioSequence, TiltedRatios};
pub use enumerate::MAX_ENUMERATION;
pub(crate) use enumerate::SetSystem;
pub use functionals::{
    deviation_witness, functional_h, functional_k, functional_k_centered, functional_kprime, mean_deviation,
    median_deviation,
};
pub use local::{boundary_density, local_constants, LocalMode, LocalQuantities, LocalValue};
pub(crate) use local::two_sided as local_two_sided;
pub use star::{star_center, star_constants};

/// How a set of constants was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Exhaustive enumeration: every value is exact.
    Enumeration,
    /// Star closed form: `k'` and `k` are lower bounds, exact when flagged.
    Star,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheegerConstants<S> {
    pub alpha: Alpha,
    pub h: S,
    pub k: S,
    pub k_prime: S,
    pub argmin_h: Subset,
    pub argmin_k: Subset,
    pub argmin_kprime: Subset,
    /// `K = 0`: then `h = 0`, witnessed by the whole space.
    pub h_vacuous: bool,
    pub source: Source,
    pub k_exact: bool,
    pub k_prime_exact: bool,
}

impl<S: Scalar> CheegerConstants<S> {
    /// `k' / k`.
    pub fn ratio(&self) -> S {
        self.k_prime / self.k
    }
}

pub(crate) fn full_system<S: Scalar>(form: &SymmetricJumpForm<S>) -> SetSystem<S> {
    SetSystem {
        pi: form.pi().to_vec(),
        edges: form.edges().collect(),
        boundary: vec![S::zero(); form.n()],
        killing: form.killing().to_vec(),
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION {
        return Err(Error::TooManyStates {
            n,
            max: MAX_ENUMERATION,
        });
    }
    Ok(())
}

/// Exact constants of `form` itself, labelled with `alpha`.
pub fn enumerate_constants<S: Scalar>(form: &SymmetricJumpForm<S>, alpha: Alpha) -> Result<CheegerConstants<S>> {
    let n = form.n();
    check_size(n)?;
    let m = full_system(form).minima();
    let tol = S::of(1e-12) * S::one().max(m.k_prime.value.abs());
    // both forms of k' range over the same cut ratios up to complementation
    assert!(
        m.k_prime.mask == 0 || (m.k_prime.value - m.k_prime_wedge.value).abs() <= tol,
        "k' forms disagree: {} vs {}",
        m.k_prime.value,
        m.k_prime_wedge.value
    );
    let subset = |mask: u32| Subset::from_bits(n, u64::from(mask));
    Ok(CheegerConstants {
        alpha,
        h: m.h.value,
        k: m.k.value,
        k_prime: m.k_prime.value,
        argmin_h: subset(m.h.mask),
        argmin_k: subset(m.k.mask),
        argmin_kprime: subset(m.k_prime.mask),
        h_vacuous: !form.has_killing(),
        source: Source::Enumeration,
        k_exact: true,
        k_prime_exact: true,
    })
}

/// Exact constants of the modified form `J^(α)`, `K^(α)` by enumeration.
pub fn brute_force_constants<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    params: &ModifiedFormParams<S>,
) -> Result<CheegerConstants<S>> {
    check_size(form.n())?;
    enumerate_constants(&modified_form(form, params), params.alpha)
}

/// Enumeration when the state space is small enough, otherwise the star
/// closed form when the jump graph is a star. Returns `TooManyStates` for
/// anything else.
pub fn constants<S: Scalar>(form: &SymmetricJumpForm<S>, alpha: Alpha) -> Result<CheegerConstants<S>> {
    if form.n() <= MAX_ENUMERATION {
        return enumerate_constants(form, alpha);
    }
    if let Some(center) = star_center(form) {
        return star_constants(form, center, alpha);
    }
    Err(Error::TooManyStates {
        n: form.n(),
        max: MAX_ENUMERATION,
    })
}

/// [`constants`] applied to the modified form.
pub fn modified_constants<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    params: &ModifiedFormParams<S>,
) -> Result<CheegerConstants<S>> {
    constants(&modified_form(form, params), params.alpha)
}

/// Tilted constants: `π` replaced by `π_p = p π / β_p`, each constant then
/// divided by `β_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedConstants<S> {
    pub alpha_p: S,
    pub beta_p: S,
    pub h_p: S,
    pub k_p: S,
    pub k_p_prime: S,
    pub tilted_measure: Vec<S>,
    pub exact: bool,
}

pub fn validate_tilt<S: Scalar>(p: &[S], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidP(format!("p has length {}, expected {n}", p.len())));
    }
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v > S::zero()) || !v.is_finite()) {
        return Err(Error::InvalidP(format!("p_{i} = {v} must be positive and finite")));
    }
    Ok(())
}

pub fn tilted_constants<S: Scalar>(form: &SymmetricJumpForm<S>, p: &[S]) -> Result<TiltedConstants<S>> {
    validate_tilt(p, form.n())?;
    let alpha_p = p.iter().copied().fold(S::infinity(), |a, b| a.min(b));
    let beta_p: S = form.pi().iter().zip(p).map(|(&x, &y)| x * y).sum();
    let tilted: Vec<S> = form.pi().iter().zip(p).map(|(&x, &y)| x * y / beta_p).collect();
    let c = constants(&form.with_measure(tilted.clone())?, Alpha::Zero)?;
    Ok(TiltedConstants {
        alpha_p,
        beta_p,
        h_p: c.h / beta_p,
        k_p: c.k / beta_p,
        k_p_prime: c.k_prime / beta_p,
        tilted_measure: tilted,
        exact: c.k_exact && c.k_prime_exact,
    })
}
