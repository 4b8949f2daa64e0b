//! Bounds assembled from quantities local to a subset: the local
//! conductance bound, drift bounds on local isoperimetric constants, the
//! Dirichlet/Neumann sandwich and the Lyapunov bound on `λ₀(Bᶜ)`.

use crate::bounds::{BoundCertificate, Target};
use crate::cheeger::{boundary_density, local_constants, local_two_sided, LocalMode};
use crate::error::{Error, Result};
use crate::forms::{modified_form, BirthDeathChain, ModifiedFormParams, SymmetricJumpForm};
use crate::scalar::{fmax, Scalar};
use crate::spectral::{birth_death_dirichlet, birth_death_neumann, dirichlet_lambda0, neumann_lambda1};
use crate::subset::Subset;

fn require_conservative<S: Scalar>(form: &SymmetricJumpForm<S>) -> Result<()> {
    if form.has_killing() {
        Err(Error::KillingPresent)
    } else {
        Ok(())
    }
}

fn require_large<S: Scalar>(pi_b: S) -> Result<()> {
    if pi_b > S::of(0.5) {
        Ok(())
    } else {
        Err(Error::BNotLargeEnough {
            pi_b: pi_b.to_f64_lossy(),
        })
    }
}

fn require_universe<S: Scalar>(form: &SymmetricJumpForm<S>, set: &Subset) -> Result<()> {
    if set.universe() == form.n() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "subset lives on {} states, form has {}",
            set.universe(),
            form.n()
        )))
    }
}

fn require_phi<S: Scalar>(phi: &[S], n: usize) -> Result<()> {
    if phi.len() != n {
        return Err(Error::DegeneratePhi(format!("φ has length {}, expected {n}", phi.len())));
    }
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegeneratePhi("φ has non-finite entries".into()));
    }
    Ok(())
}

/// `h k c / (k c + 2 π(B)² (M_B + h))` with `c = 2π(B) − 1`.
pub fn local_conductance_value<S: Scalar>(h_complement: S, k_b: S, pi_b: S, m_b: S) -> S {
    let c = S::of(2.0) * pi_b - S::one();
    let num = h_complement * k_b * c;
    if num <= S::zero() {
        return S::zero();
    }
    num / (k_b * c + S::of(2.0) * pi_b * pi_b * (m_b + h_complement))
}

/// Lower bound on `k^(α)'` from `k(B)`, `h_{Bᶜ}` and `M_B` of the modified
/// form, for `π(B) > 1/2`.
pub fn local_conductance<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    b: &Subset,
    params: &ModifiedFormParams<S>,
    mode: LocalMode,
) -> Result<BoundCertificate<S>> {
    require_conservative(form)?;
    require_universe(form, b)?;
    require_large(form.pi_of(b))?;
    let local = local_constants(form, None, b, params, mode)?;
    let hc = local
        .h_complement
        .ok_or_else(|| Error::DegenerateSubset("B is the whole space".into()))?;
    let value = local_conductance_value(hc.value, local.k_b.value, local.pi_b, local.m_b);
    let mut cert = BoundCertificate::lower("local_conductance", Target::KPrime(params.alpha), value)
        .input("h_complement", hc.value)
        .input("k_B", local.k_b.value)
        .input("M_B", local.m_b)
        .input("pi_B", local.pi_b)
        .with_rescale(params.rescale());
    if !(hc.exact && local.k_b.exact) {
        cert = cert.with_note("local constants replaced by spectral lower bounds");
    }
    Ok(cert)
}

/// `Σ_j (J_ij/π_i)(φ_j − φ_i)` for every state, on the form given. The
/// killing part is left out, matching the killing-free local constants.
fn jump_drift<S: Scalar>(form: &SymmetricJumpForm<S>, phi: &[S]) -> Vec<S> {
    (0..form.n())
        .map(|i| {
            let flow: S = form.neighbors(i).iter().map(|&(j, w)| w * (phi[j] - phi[i])).sum();
            flow / form.pi()[i]
        })
        .collect()
}

/// `max |φ_i − φ_j|` over pairs with positive jump mass.
fn oscillation<S: Scalar>(form: &SymmetricJumpForm<S>, phi: &[S]) -> Result<S> {
    let d = form.edges().map(|(i, j, _)| (phi[i] - phi[j]).abs()).fold(S::zero(), fmax);
    if d > S::zero() && d.is_finite() {
        Ok(d)
    } else {
        Err(Error::DegeneratePhi(format!("oscillation δ₁ = {d} over jumps")))
    }
}

fn drift_gap<S: Scalar>(drift: &[S], set: &Subset) -> Result<S> {
    let sup = set.members().iter().map(|&i| drift[i]).fold(S::neg_infinity(), fmax);
    let gamma = -sup;
    if gamma > S::zero() {
        Ok(gamma)
    } else {
        Err(Error::NonpositiveGamma {
            gamma: gamma.to_f64_lossy(),
        })
    }
}

/// `h_B ≥ γ_B / δ₁(φ)` with `γ_B = −max_B Ω^(α)φ` and `δ₁(φ)` the largest
/// jump of `φ` under `J^(α)`.
pub fn drift_isoperimetric<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    set: &Subset,
    phi: &[S],
    params: &ModifiedFormParams<S>,
) -> Result<BoundCertificate<S>> {
    require_universe(form, set)?;
    set.require_nonempty()?;
    require_phi(phi, form.n())?;
    let modified = modified_form(form, params);
    let delta1 = oscillation(&modified, phi)?;
    let gamma = drift_gap(&jump_drift(&modified, phi), set)?;
    Ok(
        BoundCertificate::lower("drift_isoperimetric", Target::LocalIsoperimetric, gamma / delta1)
            .input("gamma", gamma)
            .input("delta1", delta1)
            .with_rescale(params.rescale()),
    )
}

/// Lower bound on `k^(α)'` from a drift condition on `Bᶜ`: the local
/// conductance bound with `h_{Bᶜ} ≥ γ/δ₁`, which gives
/// `γ k c / (k δ₁ c + 2 π(B)² (δ₁ M_B + γ))`.
///
/// The variant with `π(B)²` in place of `2π(B)²` is recorded as
/// `displayed_variant`.
pub fn drift_conductance<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    b: &Subset,
    phi: &[S],
    params: &ModifiedFormParams<S>,
    mode: LocalMode,
) -> Result<BoundCertificate<S>> {
    require_conservative(form)?;
    require_universe(form, b)?;
    require_phi(phi, form.n())?;
    let pi_b = form.pi_of(b);
    require_large(pi_b)?;
    let complement = b.complement();
    if complement.is_empty() {
        return Err(Error::DegenerateSubset("B is the whole space".into()));
    }
    let modified = modified_form(form, params);
    let delta1 = oscillation(&modified, phi)?;
    let gamma = drift_gap(&jump_drift(&modified, phi), &complement)?;
    let k_b = local_two_sided(&modified, b, mode)?;
    let m_b = boundary_density(&modified, b);
    let c = S::of(2.0) * pi_b - S::one();
    let k = k_b.value;
    let pi2 = pi_b * pi_b;
    let value = gamma * k * c / (k * delta1 * c + S::of(2.0) * pi2 * (delta1 * m_b + gamma));
    let displayed = gamma * k * c / (k * delta1 * c + pi2 * (delta1 * m_b + gamma));
    let mut cert = BoundCertificate::lower("drift_conductance", Target::KPrime(params.alpha), value)
        .input("gamma", gamma)
        .input("delta1", delta1)
        .input("k_B", k)
        .input("M_B", m_b)
        .input("pi_B", pi_b)
        .input("displayed_variant", displayed)
        .with_rescale(params.rescale());
    if !k_b.exact {
        cert = cert.with_note("k(B) replaced by the Neumann gap of B");
    }
    Ok(cert)
}

/// The two sides of the Dirichlet/Neumann sandwich on `λ₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich<S> {
    pub lower: BoundCertificate<S>,
    pub upper: BoundCertificate<S>,
}

/// `λ₁(B)[λ₀ π(B) − 2 M_A π(Bᶜ)] / (2 λ₁(B) + π(B)² [λ₀ + 2 M_A])`.
/// Increasing in `λ₀`, so a lower bound on `λ₀(Aᶜ)` may be supplied.
pub fn sandwich_lower_value<S: Scalar>(lambda1_b: S, lambda0_ac: S, pi_b: S, pi_bc: S, m_a: S) -> S {
    let two = S::of(2.0);
    let bracket = lambda0_ac * pi_b - two * m_a * pi_bc;
    lambda1_b * bracket / (two * lambda1_b + pi_b * pi_b * (lambda0_ac + two * m_a))
}

fn sandwich_certificates<S: Scalar>(lambda1_b: S, lambda0_ac: S, pi_a: S, pi_b: S, pi_bc: S, m_a: S) -> Sandwich<S> {
    let raw = sandwich_lower_value(lambda1_b, lambda0_ac, pi_b, pi_bc, m_a);
    let mut lower = BoundCertificate::lower("local_sandwich", Target::Lambda1, raw)
        .input("lambda1_B", lambda1_b)
        .input("lambda0_complement_A", lambda0_ac)
        .input("M_A", m_a)
        .input("pi_B", pi_b)
        .input("pi_complement_B", pi_bc);
    if lower.vacuous {
        lower = lower.with_note("bracket is not positive; enlarge B");
    }
    let upper = BoundCertificate::upper("dirichlet_upper", Target::Lambda1, lambda0_ac / pi_a)
        .input("lambda0_complement_A", lambda0_ac)
        .input("pi_A", pi_a);
    Sandwich { lower, upper }
}

/// `λ₀(Aᶜ)/π(A) ≥ λ₁ ≥` [`sandwich_lower_value`] for `A ⊆ B`.
pub fn local_sandwich<S: Scalar>(form: &SymmetricJumpForm<S>, a: &Subset, b: &Subset) -> Result<Sandwich<S>> {
    require_conservative(form)?;
    require_universe(form, a)?;
    require_universe(form, b)?;
    a.require_nonempty()?;
    if !a.is_subset_of(b) {
        return Err(Error::SubsetNesting);
    }
    let ac = a.complement();
    if ac.is_empty() {
        return Err(Error::DegenerateSubset("A is the whole space".into()));
    }
    let lambda0_ac = dirichlet_lambda0(form, &ac)?.value;
    let lambda1_b = if b.len() < 2 {
        return Err(Error::DegenerateSubset("λ₁(B) needs |B| >= 2".into()));
    } else {
        neumann_lambda1(form, b)?.value
    };
    let m_a = boundary_density(form, a);
    let pi_b = form.pi_of(b);
    let pi_bc = form.pi_of(&b.complement());
    Ok(sandwich_certificates(lambda1_b, lambda0_ac, form.pi_of(a), pi_b, pi_bc, m_a))
}

/// The sandwich for a birth-death chain with `A = {0..a_end}` and
/// `B = {0..b_end}`, from rates only.
pub fn birth_death_sandwich<S: Scalar>(chain: &BirthDeathChain<S>, a_end: usize, b_end: usize) -> Result<Sandwich<S>> {
    let n = chain.levels();
    if a_end > b_end {
        return Err(Error::SubsetNesting);
    }
    if a_end >= n || b_end > n {
        return Err(Error::DegenerateSubset(format!("A = {{0..{a_end}}}, B = {{0..{b_end}}} on {{0..{n}}}")));
    }
    if b_end == 0 {
        return Err(Error::DegenerateSubset("λ₁(B) needs |B| >= 2".into()));
    }
    let head = chain.head_ratios();
    let tail = chain.tail_ratios();
    // π_i = 1 / (H_i + T_i − 1); π({0..i}) = π_i H_i, π({i..N}) = π_i T_i
    let pi_at = |i: usize| S::one() / (head[i] + tail[i] - S::one());
    let pi_a = pi_at(a_end) * head[a_end];
    let pi_b = pi_at(b_end) * head[b_end];
    let pi_bc = if b_end == n { S::zero() } else { pi_at(b_end + 1) * tail[b_end + 1] };
    let lambda0_ac = birth_death_dirichlet(chain, a_end + 1)?.value;
    let lambda1_b = birth_death_neumann(chain, b_end)?.value;
    Ok(sandwich_certificates(lambda1_b, lambda0_ac, pi_a, pi_b, pi_bc, chain.birth(a_end)))
}

fn lyapunov_certificate<S: Scalar>(ratios: impl Iterator<Item = S>) -> Result<BoundCertificate<S>> {
    let sup = ratios.fold(S::neg_infinity(), fmax);
    let delta = -sup;
    if !(delta > S::zero()) {
        return Err(Error::NonpositiveDelta {
            delta: delta.to_f64_lossy(),
        });
    }
    Ok(BoundCertificate::lower("lyapunov_dirichlet", Target::DirichletComplement, delta).input("delta", delta))
}

/// `λ₀(Bᶜ) ≥ δ = −max_{Bᶜ} Ω(φ I_{Bᶜ})/φ` with
/// `Ωf(i) = Σ_j q_ij (f_j − f_i) − d_i f_i`.
pub fn lyapunov_dirichlet<S: Scalar>(form: &SymmetricJumpForm<S>, b: &Subset, phi: &[S]) -> Result<BoundCertificate<S>> {
    require_universe(form, b)?;
    require_phi(phi, form.n())?;
    let outside = b.complement();
    if outside.is_empty() {
        return Err(Error::DegenerateSubset("B is the whole space".into()));
    }
    if let Some(&i) = outside.members().iter().find(|&&i| !(phi[i] > S::zero())) {
        return Err(Error::DegeneratePhi(format!("φ_{i} = {} must be positive off B", phi[i])));
    }
    let psi = |j: usize| if b.contains(j) { S::zero() } else { phi[j] };
    lyapunov_certificate(outside.members().iter().map(|&i| {
        let flow: S = form.neighbors(i).iter().map(|&(j, w)| w * (psi(j) - phi[i])).sum();
        (flow - form.killing()[i] * phi[i]) / (form.pi()[i] * phi[i])
    }))
}

/// [`lyapunov_dirichlet`] for a birth-death chain with `B = {0..start−1}`,
/// from rates only.
pub fn birth_death_lyapunov<S: Scalar>(chain: &BirthDeathChain<S>, start: usize, phi: &[S]) -> Result<BoundCertificate<S>> {
    let n = chain.levels();
    require_phi(phi, chain.len())?;
    if start > n {
        return Err(Error::DegenerateSubset("B is the whole space".into()));
    }
    if let Some(i) = (start..=n).find(|&i| !(phi[i] > S::zero())) {
        return Err(Error::DegeneratePhi(format!("φ_{i} = {} must be positive off B", phi[i])));
    }
    let psi = |j: usize| if j < start { S::zero() } else { phi[j] };
    lyapunov_certificate((start..=n).map(|i| {
        let up = if i < n { chain.birth(i) * (psi(i + 1) - phi[i]) } else { S::zero() };
        let down = if i > 0 { chain.death(i) * (psi(i - 1) - phi[i]) } else { S::zero() };
        (up + down) / phi[i]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheeger::enumerate_constants;
    use crate::forms::{fixtures, Alpha, BirthDeathSpec};
    use crate::spectral::lambda1_exact;

    fn plain<S: Scalar>(form: &SymmetricJumpForm<S>) -> ModifiedFormParams<S> {
        ModifiedFormParams::uniform(form, Alpha::Zero, S::one(), S::one()).unwrap()
    }

    #[test]
    fn constant_rates_drift_gap() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("4", "1", 12).unwrap().rates().unwrap();
        let form = chain.to_form().unwrap();
        let params = chain.weights(&form, Alpha::Half).unwrap();
        let phi: Vec<f64> = (0..=12).map(|i| i as f64).collect();
        let set = Subset::range(13, 3, 8);
        let cert = drift_isoperimetric(&form, &set, &phi, &params).unwrap();
        assert!((cert.inputs["gamma"] - 3.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((cert.inputs["delta1"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_phi_is_degenerate() {
        let form = fixtures::path::<f64>(5).unwrap();
        let set = Subset::new(5, [0, 1]).unwrap();
        assert!(matches!(
            drift_isoperimetric(&form, &set, &[1.0; 5], &plain(&form)),
            Err(Error::DegeneratePhi(_))
        ));
        assert!(matches!(
            lyapunov_dirichlet(&form, &set, &[1.0; 5]),
            Err(Error::NonpositiveDelta { .. })
        ));
    }

    #[test]
    fn two_state_guard() {
        let form = fixtures::two_state::<f64>(0.3).unwrap();
        let b = Subset::new(2, [1]).unwrap();
        assert!(local_conductance(&form, &b, &plain(&form), LocalMode::Enumerate).is_err());
    }

    #[test]
    fn sandwich_contains_gap() {
        let form = fixtures::path::<f64>(8).unwrap();
        let a = Subset::range(8, 0, 1);
        let b = Subset::range(8, 0, 6);
        let s = local_sandwich(&form, &a, &b).unwrap();
        let exact = lambda1_exact(&form).unwrap().value;
        assert!(s.lower.admits(exact, 1e-12) && s.upper.admits(exact, 1e-12));
        let degenerate = local_sandwich(&form, &a, &a).unwrap();
        assert!(degenerate.lower.vacuous);
    }

    #[test]
    fn rate_only_sandwich_matches_form() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("i^2", "i^2", 20).unwrap().rates().unwrap();
        let form = chain.to_form().unwrap();
        let from_rates = birth_death_sandwich(&chain, 2, 15).unwrap();
        let from_form = local_sandwich(&form, &Subset::range(21, 0, 2), &Subset::range(21, 0, 15)).unwrap();
        assert!((from_rates.lower.value - from_form.lower.value).abs() < 1e-10);
        assert!((from_rates.upper.value / from_form.upper.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn local_conductance_below_enumeration() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("i^2", "i^2", 14).unwrap().rates().unwrap();
        let form = chain.to_form().unwrap();
        let params = plain(&form);
        let b = Subset::range(15, 0, 4);
        let cert = local_conductance(&form, &b, &params, LocalMode::Enumerate).unwrap();
        let exact = enumerate_constants(&form, Alpha::Zero).unwrap().k_prime;
        assert!(cert.value > 0.0 && cert.value <= exact + 1e-12);
    }

    #[test]
    fn rate_only_lyapunov_matches_form() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("i^2", "i^2", 30).unwrap().rates().unwrap();
        let form = chain.to_form().unwrap();
        let phi: Vec<f64> = (0..=30).map(|i| (i as f64).sqrt()).collect();
        let rates = birth_death_lyapunov(&chain, 5, &phi).unwrap();
        let direct = lyapunov_dirichlet(&form, &Subset::range(31, 0, 4), &phi).unwrap();
        assert!((rates.value - direct.value).abs() < 1e-9);
        let exact = crate::spectral::birth_death_dirichlet(&chain, 5).unwrap().value;
        assert!(rates.value <= exact + 1e-9);
    }
}
