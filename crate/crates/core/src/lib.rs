//! Certified lower and upper bounds on the spectral gap `λ₁` and the bottom
//! of the spectrum `λ₀` of reversible jump processes and general symmetric
//! forms on finite state spaces.
//!
//! The crate is organised around five pieces:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`forms`] | symmetric forms `(J, K, π)`, reversible rate chains, modified forms `J^(α)` |
//! | [`cheeger`] | Cheeger constants `h`, `k`, `k'` by enumeration and closed forms |
//! | [`spectral`] | exact `λ₀`, `λ₁`, local Dirichlet and Neumann eigenvalues |
//! | [`bounds`] | certificates derived from isoperimetric, local and drift arguments |
//! | [`analysis`] | runs every applicable certificate on an instance and checks soundness |
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! tolerances in the test-suite assume.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` deliberately rejects NaN.

pub mod analysis;
pub mod bounds;
pub mod cheeger;
pub mod error;
pub mod expr;
pub mod forms;
pub mod random;
pub mod scalar;
pub mod spectral;
pub mod subset;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use subset::Subset;

/// Symmetric form over `f64`.
pub type Form = forms::SymmetricJumpForm<f64>;
/// Reversible rate chain over `f64`.
pub type Chain = forms::RateChain<f64>;
/// Normalising weights over `f64`.
pub type Weights = forms::ModifiedFormParams<f64>;
/// Birth-death rates over `f64`.
pub type BirthDeath = forms::BirthDeathChain<f64>;
/// Cheeger constants over `f64`.
pub type Constants = cheeger::CheegerConstants<f64>;
/// Eigenpair over `f64`.
pub type Eigen = spectral::SpectralResult<f64>;
/// Certificate over `f64`.
pub type Certificate = bounds::BoundCertificate<f64>;
/// Analysis report over `f64`.
pub type Report = analysis::Analysis<f64>;
/// Drift report over `f64`.
pub type Drift = bounds::DriftReport<f64>;
