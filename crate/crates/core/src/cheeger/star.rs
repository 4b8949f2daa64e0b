use crate::cheeger::{CheegerConstants, Source};
use crate::error::{Error, Result};
use crate::forms::{Alpha, SymmetricJumpForm};
use crate::scalar::Scalar;
use crate::subset::Subset;

/// The centre of a star-shaped jump graph on at least three states.
pub fn star_center<S: Scalar>(form: &SymmetricJumpForm<S>) -> Option<usize> {
    let n = form.n();
    if n < 3 {
        return None;
    }
    let center = (0..n).max_by_key(|&i| form.neighbors(i).len())?;
    if form.neighbors(center).len() != n - 1 {
        return None;
    }
    let leaves_only_touch_center = (0..n)
        .filter(|&i| i != center)
        .all(|i| form.neighbors(i).len() == 1);
    leaves_only_touch_center.then_some(center)
}

/// Constants of a star without killing.
///
/// Up to complementation every set avoids the centre, so with leaf masses
/// `w_l = J_{c,l}` and measures `m_l`,
/// `J(A×Aᶜ) / (π(A) ∧ π(Aᶜ)) ≥ Σ_A w / Σ_A m ≥ ρ := min_l w_l / m_l`, with
/// equality at a minimising leaf of measure at most 1/2. Likewise
/// `k ≥ ρ / (1 − m_min)`, attained when the lightest leaf reaches `ρ`.
pub fn star_constants<S: Scalar>(form: &SymmetricJumpForm<S>, center: usize, alpha: Alpha) -> Result<CheegerConstants<S>> {
    if form.has_killing() {
        return Err(Error::KillingPresent);
    }
    let n = form.n();
    let pi = form.pi();
    let leaves: Vec<(usize, S, S)> = form
        .neighbors(center)
        .iter()
        .map(|&(l, w)| (l, w, pi[l]))
        .collect();
    let ratio = |&(_, w, m): &(usize, S, S)| w / m;
    let (arg_rho, rho) = leaves
        .iter()
        .map(|leaf| (leaf.0, ratio(leaf)))
        .fold((usize::MAX, S::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best });
    let (arg_light, light_w, light_m) = leaves
        .iter()
        .copied()
        .fold((usize::MAX, S::zero(), S::infinity()), |best, cur| if cur.2 < best.2 { cur } else { best });
    let tol = S::of(1e-12) * rho;
    let k_prime_exact = pi[arg_rho] <= S::of(0.5);
    let k_exact = (light_w / light_m - rho).abs() <= tol;
    Ok(CheegerConstants {
        alpha,
        h: S::zero(),
        k: rho / (S::one() - light_m),
        k_prime: rho,
        argmin_h: Subset::full(n),
        argmin_k: Subset::new(n, [arg_light])?,
        argmin_kprime: Subset::new(n, [arg_rho])?,
        h_vacuous: true,
        source: Source::Star,
        k_exact,
        k_prime_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheeger::enumerate_constants;
    use crate::forms::fixtures;

    #[test]
    fn matches_enumeration_on_small_star() {
        let betas = [0.3, 0.1, 0.05, 0.4, 0.02];
        let form: SymmetricJumpForm<f64> = fixtures::star(&betas).unwrap();
        assert_eq!(star_center(&form), Some(0));
        let exact = enumerate_constants(&form, Alpha::Zero).unwrap();
        let star = star_constants(&form, 0, Alpha::Zero).unwrap();
        assert!(star.k_prime_exact && star.k_exact);
        assert!((exact.k_prime - star.k_prime).abs() < 1e-12);
        assert!((exact.k - star.k).abs() < 1e-12);
    }

    #[test]
    fn path_is_not_a_star_unless_three_states() {
        assert_eq!(star_center(&fixtures::path::<f64>(3).unwrap()), Some(1));
        assert_eq!(star_center(&fixtures::path::<f64>(4).unwrap()), None);
    }
}
