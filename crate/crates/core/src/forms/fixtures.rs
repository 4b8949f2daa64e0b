//! Named constructors for the standard example chains.

use crate::error::{Error, Result};
use crate::forms::{BirthDeathSpec, SymmetricJumpForm};
use crate::scalar::Scalar;

/// Output of [`build_fixture`].
#[derive(Debug, Clone, PartialEq)]
pub enum Fixture<S> {
    Form(SymmetricJumpForm<S>),
    BirthDeath(BirthDeathSpec),
}

/// Two states with `π = (p, 1 − p)` and `J_01 = J_10 = 1/2`.
pub fn two_state<S: Scalar>(p: f64) -> Result<SymmetricJumpForm<S>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParams(format!("TwoState needs 0 < p < 1, got {p}")));
    }
    SymmetricJumpForm::new(
        vec![S::of(p), S::of(1.0 - p)],
        [(0, 1, S::of(0.5))],
        vec![S::zero(); 2],
    )
}

/// Path on `n` states, uniform `π`, unit rates to each neighbour.
pub fn path<S: Scalar>(n: usize) -> Result<SymmetricJumpForm<S>> {
    if n == 0 {
        return Err(Error::InvalidParams("Path needs n >= 1".into()));
    }
    let w = S::one() / S::of_usize(n);
    SymmetricJumpForm::new(vec![w; n], (1..n).map(|i| (i - 1, i, w)), vec![S::zero(); n])
}

/// Star with centre 0 and leaves `1..=m`: `q_0k = β_k`, `q_k0 = 1/2`, so
/// `π_0 = 1/(1 + 2 q_0)` and `π_k = 2 π_0 β_k`.
pub fn star<S: Scalar>(betas: &[f64]) -> Result<SymmetricJumpForm<S>> {
    if betas.is_empty() {
        return Err(Error::InvalidParams("Star needs m >= 1".into()));
    }
    if betas.iter().any(|&b| !(b > 0.0) || !b.is_finite()) {
        return Err(Error::InvalidParams("Star rates must be positive".into()));
    }
    let q0: f64 = betas.iter().sum();
    let pi0 = 1.0 / (1.0 + 2.0 * q0);
    let mut pi = vec![S::of(pi0)];
    pi.extend(betas.iter().map(|&b| S::of(2.0 * pi0 * b)));
    let pairs: Vec<_> = betas
        .iter()
        .enumerate()
        .map(|(k, &b)| (0, k + 1, S::of(pi0 * b)))
        .collect();
    let n = pi.len();
    SymmetricJumpForm::new(pi, pairs, vec![S::zero(); n])
}

/// `β_k ∝ 2^{-k}` for `k = 1..=m`, scaled so that `Σ β_k = q0`.
pub fn geometric_star_rates(q0: f64, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidParams("Star needs m >= 1".into()));
    }
    if !(q0 > 0.0) || !q0.is_finite() {
        return Err(Error::InvalidParams(format!("Star needs q0 > 0, got {q0}")));
    }
    let raw: Vec<f64> = (1..=m).map(|k| 0.5f64.powi(k as i32)).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|b| q0 * b / total).collect())
}

/// `a_i ≡ a`, `b_i ≡ b`.
pub fn const_bd(a: f64, b: f64, levels: usize) -> Result<BirthDeathSpec> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParams(format!("ConstBD needs positive rates, got a = {a}, b = {b}")));
    }
    BirthDeathSpec::new(&format!("{a:?}"), &format!("{b:?}"), levels)
}

/// `a_i = b_i = i^γ` for `i ≥ 1`, `a_0 = 0`, `b_0 = 1`.
pub fn poly_bd(gamma: f64, levels: usize) -> Result<BirthDeathSpec> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParams(format!("PolyBD needs gamma > 0, got {gamma}")));
    }
    let expr = format!("i^{gamma:?}");
    BirthDeathSpec::new(&expr, &expr, levels)
}

/// `a_i = i^4` for even `i`, `i^2` for odd `i`, `b_i = a_i` for `i ≥ 1`, `b_0 = 1`.
pub fn parity_bd(levels: usize) -> Result<BirthDeathSpec> {
    BirthDeathSpec::new("if_even(i^4, i^2)", "if_even(i^4, i^2)", levels)
}

fn count(name: &str, x: f64) -> Result<usize> {
    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(Error::InvalidParams(format!("{name} must be a nonnegative integer, got {x}")))
    }
}

fn arity(name: &str, params: &[f64], expected: usize) -> Result<()> {
    if params.len() == expected {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "{name} takes {expected} parameter(s), got {}",
            params.len()
        )))
    }
}

/// Builds a fixture by name: `TwoState(p)`, `Path(n)`, `ConstBD(a, b, N)`,
/// `PolyBD(γ, N)`, `Star(q0, m)` (geometric rates) and `ParityBD(N)`.
pub fn build_fixture<S: Scalar>(name: &str, params: &[f64]) -> Result<Fixture<S>> {
    match name {
        "TwoState" => {
            arity(name, params, 1)?;
            Ok(Fixture::Form(two_state(params[0])?))
        }
        "Path" => {
            arity(name, params, 1)?;
            Ok(Fixture::Form(path(count("n", params[0])?)?))
        }
        "ConstBD" => {
            arity(name, params, 3)?;
            Ok(Fixture::BirthDeath(const_bd(params[0], params[1], count("N", params[2])?)?))
        }
        "PolyBD" => {
            arity(name, params, 2)?;
            Ok(Fixture::BirthDeath(poly_bd(params[0], count("N", params[1])?)?))
        }
        "Star" => {
            arity(name, params, 2)?;
            let betas = geometric_star_rates(params[0], count("m", params[1])?)?;
            Ok(Fixture::Form(star(&betas)?))
        }
        "ParityBD" => {
            arity(name, params, 1)?;
            Ok(Fixture::BirthDeath(parity_bd(count("N", params[0])?)?))
        }
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::BirthDeathChain;

    #[test]
    fn star_measure() {
        let betas = geometric_star_rates(0.4, 5).unwrap();
        let form: SymmetricJumpForm<f64> = star(&betas).unwrap();
        let pi0 = 1.0 / 1.8;
        assert!((form.pi()[0] - pi0).abs() < 1e-15);
        for k in 1..=5 {
            assert!((form.pi()[k] - 2.0 * pi0 * betas[k - 1]).abs() < 1e-15);
            assert!((form.jump(k, 0) / form.pi()[k] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn parity_measure_is_inverse_death_rate() {
        let chain: BirthDeathChain<f64> = parity_bd(40).unwrap().rates().unwrap();
        let log_mu = chain.log_mu();
        for (i, lm) in log_mu.iter().enumerate().skip(1) {
            assert!((lm + chain.death(i).ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn poly_birth_at_origin() {
        let chain: BirthDeathChain<f64> = poly_bd(1.5, 10).unwrap().rates().unwrap();
        assert_eq!(chain.raw_birth(0), 1.0);
        assert_eq!(chain.death(0), 0.0);
        assert!((chain.death(4) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn fixture_errors() {
        assert!(matches!(build_fixture::<f64>("Nope", &[]), Err(Error::UnknownFixture(_))));
        assert!(matches!(build_fixture::<f64>("PolyBD", &[0.0, 10.0]), Err(Error::InvalidParams(_))));
        assert!(matches!(build_fixture::<f64>("Star", &[0.4, 0.0]), Err(Error::InvalidParams(_))));
        assert!(build_fixture::<f64>("TwoState", &[0.3]).is_ok());
    }
}
