//! Certified bounds on `λ₀`, `λ₁` and on the isoperimetric constants.
//!
//! Every routine returns [`BoundCertificate`]s that carry the value, what it
//! bounds and in which direction, and a snapshot of the inputs it was
//! computed from.

mod drift;
mod isoperimetric;
mod local;
mod minimax;
mod moment;
mod tilted;

use std::collections::BTreeMap;
use std::fmt;

use crate::forms::Alpha;
use crate::scalar::Scalar;

pub use drift::{
    birth_death_drift, birth_death_lyapunov_drift, finite_range_drift, lattice_drift, lyapunov_drift,
    DriftClassification, DriftReport, DECAY_TOLERANCE,
};
pub use isoperimetric::{
    birth_death_one_sided, birth_death_two_sided, chung, chung_value, killing_cheeger, lawler_sokal,
    one_sided_cheeger, one_sided_value, two_sided_cheeger, GapEstimate,
};
pub use local::{
    birth_death_lyapunov, birth_death_sandwich, drift_conductance, drift_isoperimetric, local_conductance,
    local_conductance_value, local_sandwich, lyapunov_dirichlet, sandwich_lower_value, Sandwich,
};
pub use minimax::{minimax, Minimax};
pub use moment::{
    birth_death_delta2_kernel, delta2, delta2_kernel, exponential_moment, integrability_probe, Integrability,
    IntegrabilityReport,
};
pub use tilted::{birth_death_tilted, tilted};

/// The quantity a certificate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Lambda0,
    Lambda1,
    /// `k^(α)'`.
    KPrime(Alpha),
    /// `h_B` for the set the certificate was computed on.
    LocalIsoperimetric,
    /// `λ₀(Bᶜ)` for the set the certificate was computed on.
    DirichletComplement,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Lambda0 => f.write_str("lambda0"),
            Target::Lambda1 => f.write_str("lambda1"),
            Target::KPrime(a) => write!(f, "k_prime[{a}]"),
            Target::LocalIsoperimetric => f.write_str("h_local"),
            Target::DirichletComplement => f.write_str("lambda0_complement"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Upper,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Lower => "lower",
            Direction::Upper => "upper",
        })
    }
}

/// What the value is a statement about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// The finite instance the inputs describe.
    Instance,
    /// The infinite family the instance truncates; not comparable with the
    /// exact values of the truncation.
    Family,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate<S> {
    /// Descriptive identifier such as `one_sided_cheeger`.
    pub name: &'static str,
    pub target: Target,
    pub direction: Direction,
    pub value: S,
    pub inputs: BTreeMap<String, f64>,
    /// The bound carries no information (lower bound 0, upper bound `∞`).
    pub vacuous: bool,
    /// Rescale factor applied to the normalising weights, when used.
    pub rescale: Option<f64>,
    pub scope: Scope,
    pub note: Option<String>,
}

impl<S: Scalar> BoundCertificate<S> {
    /// Lower bounds below zero are clamped to 0; both zero lower bounds and
    /// infinite upper bounds are flagged vacuous.
    pub(crate) fn new(name: &'static str, target: Target, direction: Direction, value: S) -> Self {
        let (value, vacuous) = match direction {
            Direction::Lower if !(value > S::zero()) => (S::zero(), true),
            Direction::Upper if !value.is_finite() => (S::infinity(), true),
            _ => (value, false),
        };
        Self {
            name,
            target,
            direction,
            value,
            inputs: BTreeMap::new(),
            vacuous,
            rescale: None,
            scope: Scope::Instance,
            note: None,
        }
    }

    pub(crate) fn lower(name: &'static str, target: Target, value: S) -> Self {
        Self::new(name, target, Direction::Lower, value)
    }

    pub(crate) fn upper(name: &'static str, target: Target, value: S) -> Self {
        Self::new(name, target, Direction::Upper, value)
    }

    pub(crate) fn input(mut self, key: &str, value: S) -> Self {
        self.inputs.insert(key.to_string(), value.to_f64_lossy());
        self
    }

    pub(crate) fn with_rescale(mut self, c: S) -> Self {
        self.rescale = Some(c.to_f64_lossy());
        self
    }

    pub(crate) fn in_family(mut self) -> Self {
        self.scope = Scope::Family;
        self
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Whether `exact` lies on the certified side of the value, up to an
    /// absolute tolerance.
    pub fn admits(&self, exact: S, tol: S) -> bool {
        match self.direction {
            Direction::Lower => self.value <= exact + tol,
            Direction::Upper => self.value >= exact - tol,
        }
    }
}

/// `1 − √(1 − x²)`, with `x` clamped to `[0, 1]`.
pub(crate) fn one_minus_root<S: Scalar>(x: S) -> S {
    let x = x.max(S::zero()).min(S::one());
    // x² / (1 + √(1 − x²)) avoids cancellation for small x
    x * x / (S::one() + (S::one() - x * x).sqrt())
}
