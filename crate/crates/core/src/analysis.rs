//! Runs every applicable bound on one instance and compares the results
//! with the exact eigenvalues.

use crate::bounds::{
    birth_death_lyapunov, birth_death_one_sided, birth_death_sandwich, birth_death_tilted, birth_death_two_sided,
    chung, drift_conductance, killing_cheeger, lawler_sokal, local_conductance, local_sandwich, lyapunov_dirichlet,
    one_sided_cheeger, tilted, two_sided_cheeger, BoundCertificate, Direction, GapEstimate, Scope, Target,
};
use crate::cheeger::{modified_constants, CheegerConstants, LocalMode};
use crate::error::{Error, Result};
use crate::forms::{default_weights, Alpha, BirthDeathChain, SymmetricJumpForm};
use crate::scalar::Scalar;
use crate::spectral::{birth_death_lambda1, lambda0_exact, lambda1_exact, SpectralResult};
use crate::subset::Subset;

/// Optional inputs for the local and tilted bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions<S> {
    pub kappa: S,
    /// Tilt `p` for the change-of-measure bounds.
    pub tilt: Option<Vec<S>>,
    /// Inner set `A` of the sandwich.
    pub a: Option<Subset>,
    /// Large set `B` of the local bounds.
    pub b: Option<Subset>,
    /// Drift test function.
    pub phi: Option<Vec<S>>,
    pub mode: LocalMode,
}

impl<S: Scalar> Default for AnalysisOptions<S> {
    fn default() -> Self {
        Self {
            kappa: S::one(),
            tilt: None,
            a: None,
            b: None,
            phi: None,
            mode: LocalMode::AllowSpectral,
        }
    }
}

/// A bound that could not be evaluated, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub name: &'static str,
    pub reason: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis<S> {
    pub n: usize,
    pub lambda0: Option<SpectralResult<S>>,
    pub lambda1: Option<SpectralResult<S>>,
    /// Constants of the modified forms with the default weights, for
    /// `α = 0, 1/2, 1`.
    pub constants: Vec<CheegerConstants<S>>,
    pub certificates: Vec<BoundCertificate<S>>,
    pub skipped: Vec<Skipped>,
}

impl<S: Scalar> Analysis<S> {
    fn new(n: usize) -> Self {
        Self {
            n,
            lambda0: None,
            lambda1: None,
            constants: Vec::new(),
            certificates: Vec::new(),
            skipped: Vec::new(),
        }
    }

    fn take(&mut self, name: &'static str, outcome: Result<BoundCertificate<S>>) {
        match outcome {
            Ok(c) => self.certificates.push(c),
            Err(reason) => self.skipped.push(Skipped { name, reason }),
        }
    }

    fn take_all(&mut self, name: &'static str, outcome: Result<Vec<BoundCertificate<S>>>) {
        match outcome {
            Ok(c) => self.certificates.extend(c),
            Err(reason) => self.skipped.push(Skipped { name, reason }),
        }
    }

    /// Largest non-vacuous lower bound, or smallest upper bound, on `target`
    /// among the instance certificates.
    pub fn best(&self, target: Target, direction: Direction) -> Option<&BoundCertificate<S>> {
        let candidates = self
            .certificates
            .iter()
            .filter(|c| c.target == target && c.direction == direction && c.scope == Scope::Instance);
        match direction {
            Direction::Lower => candidates.max_by(|a, b| a.value.partial_cmp(&b.value).expect("finite values")),
            Direction::Upper => candidates.min_by(|a, b| a.value.partial_cmp(&b.value).expect("finite values")),
        }
    }

    fn exact(&self, target: Target) -> Option<S> {
        match target {
            Target::Lambda0 => self.lambda0.as_ref().map(|r| r.value),
            Target::Lambda1 => self.lambda1.as_ref().map(|r| r.value),
            Target::KPrime(alpha) => self
                .constants
                .iter()
                .find(|c| c.alpha == alpha && c.k_prime_exact)
                .map(|c| c.k_prime),
            Target::LocalIsoperimetric | Target::DirichletComplement => None,
        }
    }
}

/// A certificate on the wrong side of the exact value.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<S> {
    pub certificate: BoundCertificate<S>,
    pub exact: S,
}

/// Certificates that contradict the exact values, with tolerance
/// `tol · max(1, |exact|)`.
pub fn verify<S: Scalar>(analysis: &Analysis<S>, tol: S) -> Vec<Violation<S>> {
    analysis
        .certificates
        .iter()
        .filter(|c| c.scope == Scope::Instance)
        .filter_map(|c| {
            let exact = analysis.exact(c.target)?;
            let slack = tol * exact.abs().max(S::one());
            (!c.admits(exact, slack)).then(|| Violation {
                certificate: c.clone(),
                exact,
            })
        })
        .collect()
}

/// Exact eigenvalues, constants and every applicable certificate for a
/// finite form, using the default weights `r_ij = q_i ∨ q_j`.
pub fn analyze_form<S: Scalar>(form: &SymmetricJumpForm<S>, options: &AnalysisOptions<S>) -> Result<Analysis<S>> {
    let mut out = Analysis::new(form.n());
    out.lambda0 = Some(lambda0_exact(form)?);
    if !form.has_killing() {
        out.lambda1 = Some(lambda1_exact(form)?);
    }
    let params = default_weights(form, Alpha::Half)?;
    for alpha in Alpha::ALL {
        match modified_constants(form, &params.at(alpha)) {
            Ok(c) => out.constants.push(c),
            Err(reason) => out.skipped.push(Skipped {
                name: "constants",
                reason,
            }),
        }
    }
    out.take("killing_cheeger", killing_cheeger(form, &params));
    out.take_all("lawler_sokal", lawler_sokal(form, None, options.kappa));
    if !form.has_killing() {
        out.take("two_sided_cheeger", two_sided_cheeger(form, &params, GapEstimate::Exact));
        out.take("two_sided_cheeger_chained", two_sided_cheeger(form, &params, GapEstimate::Chained));
        out.take("one_sided_cheeger", one_sided_cheeger(form, &params));
        out.take("chung", chung(form, None));
    }
    if let Some(p) = &options.tilt {
        out.take_all("tilted", tilted(form, p, options.kappa));
    }
    if let Some(b) = &options.b {
        let plain = params.at(Alpha::Zero);
        out.take("local_conductance", local_conductance(form, b, &plain, options.mode));
        if let Some(a) = &options.a {
            match local_sandwich(form, a, b) {
                Ok(s) => out.certificates.extend([s.lower, s.upper]),
                Err(reason) => out.skipped.push(Skipped {
                    name: "local_sandwich",
                    reason,
                }),
            }
        }
        if let Some(phi) = &options.phi {
            out.take("drift_conductance", drift_conductance(form, b, phi, &plain, options.mode));
            out.take("lyapunov_dirichlet", lyapunov_dirichlet(form, b, phi));
        }
    }
    Ok(out)
}

/// Rate-only inputs for [`analyze_birth_death`].
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathOptions<S> {
    pub kappa: S,
    pub tilt: Option<Vec<S>>,
    /// `A = {0..a_end}` and `B = {0..b_end}` for the sandwich.
    pub sandwich: Option<(usize, usize)>,
    /// Drift test function with the start of `Bᶜ`.
    pub lyapunov: Option<(Vec<S>, usize)>,
}

impl<S: Scalar> Default for BirthDeathOptions<S> {
    fn default() -> Self {
        Self {
            kappa: S::one(),
            tilt: None,
            sandwich: None,
            lyapunov: None,
        }
    }
}

/// Exact gap and the rate-only certificates for a truncated birth-death
/// chain.
pub fn analyze_birth_death<S: Scalar>(chain: &BirthDeathChain<S>, options: &BirthDeathOptions<S>) -> Result<Analysis<S>> {
    let mut out = Analysis::new(chain.len());
    out.lambda1 = Some(birth_death_lambda1(chain)?);
    out.certificates.push(birth_death_one_sided(chain));
    out.take("two_sided_cheeger", birth_death_two_sided(chain));
    if let Some(p) = &options.tilt {
        out.take_all("tilted", birth_death_tilted(chain, p, options.kappa));
    }
    if let Some((a_end, b_end)) = options.sandwich {
        match birth_death_sandwich(chain, a_end, b_end) {
            Ok(s) => out.certificates.extend([s.lower, s.upper]),
            Err(reason) => out.skipped.push(Skipped {
                name: "local_sandwich",
                reason,
            }),
        }
    }
    if let Some((phi, start)) = &options.lyapunov {
        out.take("lyapunov_dirichlet", birth_death_lyapunov(chain, *start, phi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{fixtures, BirthDeathSpec};

    #[test]
    fn two_state_is_consistent() {
        let form = fixtures::two_state::<f64>(0.5).unwrap();
        let analysis = analyze_form(&form, &AnalysisOptions::default()).unwrap();
        assert!(verify(&analysis, 1e-9).is_empty());
        let best = analysis.best(Target::Lambda1, Direction::Lower).unwrap();
        assert!((best.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn birth_death_is_consistent() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("i^2", "i^2", 200).unwrap().rates().unwrap();
        let phi: Vec<f64> = (0..=200).map(|i| (i as f64).sqrt()).collect();
        let options = BirthDeathOptions {
            sandwich: Some((3, 150)),
            lyapunov: Some((phi, 20)),
            ..Default::default()
        };
        let analysis = analyze_birth_death(&chain, &options).unwrap();
        assert!(verify(&analysis, 1e-9).is_empty());
        assert!(analysis.certificates.len() >= 4);
    }

    #[test]
    fn corrupted_certificate_is_caught() {
        let form = fixtures::path::<f64>(4).unwrap();
        let mut analysis = analyze_form(&form, &AnalysisOptions::default()).unwrap();
        let exact = analysis.lambda1.as_ref().unwrap().value;
        analysis.certificates[0] = BoundCertificate::lower("test", Target::Lambda1, exact * 2.0);
        assert_eq!(verify(&analysis, 1e-9).len(), 1);
    }
}
