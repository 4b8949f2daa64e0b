//! Bounds through a change of measure `π → π_p = p π / β_p` with
//! `α_p = inf p` and `β_p = π(p)`, valid when `q_i ≤ p_i` everywhere.

use crate::bounds::{one_minus_root, BoundCertificate, Target};
use crate::cheeger::{birth_death_kp, tilted_constants, validate_tilt};
use crate::error::{Error, Result};
use crate::forms::{BirthDeathChain, SymmetricJumpForm};
use crate::scalar::Scalar;
use crate::spectral::{birth_death_lambda1, lambda0_exact, lambda1_exact};

fn check_validity<S: Scalar>(ratios: impl Iterator<Item = S>) -> Result<S> {
    let (state, worst) = ratios
        .enumerate()
        .fold((0, S::zero()), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    if worst > S::one() + S::of(S::NORMALIZATION_TOL) {
        return Err(Error::ValidityViolated {
            state,
            ratio: worst.to_f64_lossy(),
        });
    }
    Ok(worst)
}

/// `max{κ α_p k_p²/8, α_p (1 − √(1 − k_p'²))}`.
fn conductance_value<S: Scalar>(alpha_p: S, k_p: S, k_p_prime: S, kappa: S) -> S {
    let quartic = kappa * alpha_p * k_p * k_p / S::of(8.0);
    quartic.max(alpha_p * one_minus_root(k_p_prime))
}

/// All tilted bounds on a finite form: the eigenvalue comparison
/// `λ_i ≥ (α_p/β_p) λ_{p,i}` for `i = 0, 1`, the killing bound
/// `λ₀ ≥ α_p (1 − √(1 − h_p²))` and the conductance bound on `λ₁`. The
/// `λ₁` certificates are emitted only when `K = 0`.
pub fn tilted<S: Scalar>(form: &SymmetricJumpForm<S>, p: &[S], kappa: S) -> Result<Vec<BoundCertificate<S>>> {
    validate_tilt(p, form.n())?;
    let validity = check_validity((0..form.n()).map(|i| form.total_rate(i) / p[i]))?;
    let t = tilted_constants(form, p)?;
    let tilted_form = form.with_measure(t.tilted_measure.clone())?;
    let scale = t.alpha_p / t.beta_p;
    let tag = |c: BoundCertificate<S>| {
        c.input("alpha_p", t.alpha_p)
            .input("beta_p", t.beta_p)
            .input("validity", validity)
    };
    let lambda0_p = lambda0_exact(&tilted_form)?.value;
    let mut out = vec![
        tag(BoundCertificate::lower("tilted_comparison_lambda0", Target::Lambda0, scale * lambda0_p)
            .input("lambda_p", lambda0_p)),
        tag(
            BoundCertificate::lower("tilted_killing", Target::Lambda0, t.alpha_p * one_minus_root(t.h_p))
                .input("h_p", t.h_p),
        ),
    ];
    if !form.has_killing() {
        let lambda1_p = lambda1_exact(&tilted_form)?.value;
        out.push(tag(
            BoundCertificate::lower("tilted_comparison_gap", Target::Lambda1, scale * lambda1_p)
                .input("lambda_p", lambda1_p),
        ));
        out.push(tag(
            BoundCertificate::lower(
                "tilted_conductance",
                Target::Lambda1,
                conductance_value(t.alpha_p, t.k_p, t.k_p_prime, kappa),
            )
            .input("k_p", t.k_p)
            .input("k_p_prime", t.k_p_prime)
            .input("kappa", kappa),
        ));
    }
    Ok(out)
}

/// Tilted bounds on `λ₁` of a birth-death chain from rates only: the
/// comparison `α_p λ₁` of the chain with rates divided by `p`, and the
/// conductance bound with the closed-form ratios.
pub fn birth_death_tilted<S: Scalar>(chain: &BirthDeathChain<S>, p: &[S], kappa: S) -> Result<Vec<BoundCertificate<S>>> {
    let ratios = birth_death_kp(chain, p)?;
    if ratios.validity > S::one() + S::of(S::NORMALIZATION_TOL) {
        return Err(Error::ValidityViolated {
            state: ratios.worst_state,
            ratio: ratios.validity.to_f64_lossy(),
        });
    }
    let lambda_p = birth_death_lambda1(&chain.tilted(p)?)?.value;
    let alpha_p = ratios.alpha_p;
    let k_p = ratios.k_p.infimum;
    let k_p_prime = ratios.k_p_prime.infimum;
    Ok(vec![
        BoundCertificate::lower("tilted_comparison_gap", Target::Lambda1, alpha_p * lambda_p)
            .input("alpha_p", alpha_p)
            .input("lambda_tilted_rates", lambda_p)
            .input("validity", ratios.validity),
        BoundCertificate::lower(
            "tilted_conductance",
            Target::Lambda1,
            conductance_value(alpha_p, k_p, k_p_prime, kappa),
        )
        .input("alpha_p", alpha_p)
        .input("k_p", k_p)
        .input("k_p_prime", k_p_prime)
        .input("kappa", kappa)
        .input("validity", ratios.validity),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{fixtures, BirthDeathSpec};

    #[test]
    fn unit_tilt_on_two_state() {
        let form = fixtures::two_state::<f64>(0.5).unwrap();
        let certs = tilted(&form, &[1.0, 1.0], 1.0).unwrap();
        let cmp = certs.iter().find(|c| c.name == "tilted_comparison_gap").unwrap();
        assert!((cmp.value - 2.0).abs() < 1e-12);
        let cond = certs.iter().find(|c| c.name == "tilted_conductance").unwrap();
        assert!((cond.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn violated_tilt() {
        let form = fixtures::two_state::<f64>(0.5).unwrap();
        assert!(matches!(
            tilted(&form, &[0.5, 1.0], 1.0),
            Err(Error::ValidityViolated { state: 0, .. })
        ));
        assert!(matches!(tilted(&form, &[1.0], 1.0), Err(Error::InvalidP(_))));
    }

    #[test]
    fn constant_rates_sharp() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("4", "1", 2000).unwrap().rates().unwrap();
        let certs = birth_death_tilted(&chain, &vec![5.0; 2001], 1.0).unwrap();
        assert!((certs[1].value - 1.0).abs() < 1e-10);
        assert!(certs[0].value <= 1.0 + 1e-5);
    }
}
