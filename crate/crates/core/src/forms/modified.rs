use std::fmt;

use crate::error::{Error, Result};
use crate::forms::{form_from_rates, RateChain, SymmetricJumpForm};
use crate::scalar::{fmax, Scalar};

/// Modification level of `J^(α) = J / r^α`, `K^(α) = K / s^α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alpha {
    Zero,
    Half,
    One,
}

impl Alpha {
    pub const ALL: [Alpha; 3] = [Alpha::Zero, Alpha::Half, Alpha::One];

    pub fn value(self) -> f64 {
        match self {
            Alpha::Zero => 0.0,
            Alpha::Half => 0.5,
            Alpha::One => 1.0,
        }
    }

    pub fn from_f64(x: f64) -> Option<Self> {
        if x == 0.0 {
            Some(Alpha::Zero)
        } else if x == 0.5 {
            Some(Alpha::Half)
        } else if x == 1.0 {
            Some(Alpha::One)
        } else {
            None
        }
    }

    /// `w / r^α`.
    pub fn divide<S: Scalar>(self, w: S, r: S) -> S {
        match self {
            Alpha::Zero => w,
            Alpha::Half => w / r.sqrt(),
            Alpha::One => w / r,
        }
    }

    /// `r^α`.
    pub fn power<S: Scalar>(self, r: S) -> S {
        match self {
            Alpha::Zero => S::one(),
            Alpha::Half => r.sqrt(),
            Alpha::One => r,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Normalising weights `r` on pairs, `s` on states, a level `α`, and the
/// rescale factor `c ≥ 1` applied as `r ← c r`, `s ← c s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedFormParams<S> {
    pub alpha: Alpha,
    r: Vec<Vec<(usize, S)>>,
    s: Vec<S>,
    rescale: S,
}

impl<S: Scalar> ModifiedFormParams<S> {
    /// Weights from closures, evaluated once per unordered pair with
    /// `J_ij > 0` and once per state with `K_i > 0`.
    pub fn from_fn(
        form: &SymmetricJumpForm<S>,
        alpha: Alpha,
        mut r: impl FnMut(usize, usize) -> S,
        mut s: impl FnMut(usize) -> S,
    ) -> Result<Self> {
        let n = form.n();
        let mut rows: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
        for (i, j, _) in form.edges() {
            let w = r(i, j);
            if !(w > S::zero()) || !w.is_finite() {
                return Err(Error::InvalidParams(format!("r_{i}{j} = {w} must be positive")));
            }
            rows[i].push((j, w));
            rows[j].push((i, w));
        }
        for row in &mut rows {
            row.sort_by_key(|&(j, _)| j);
        }
        let mut svec = vec![S::one(); n];
        for (i, slot) in svec.iter_mut().enumerate() {
            if form.killing()[i] > S::zero() {
                let v = s(i);
                if !(v > S::zero()) || !v.is_finite() {
                    return Err(Error::InvalidParams(format!("s_{i} = {v} must be positive")));
                }
                *slot = v;
            }
        }
        Ok(Self {
            alpha,
            r: rows,
            s: svec,
            rescale: S::one(),
        })
    }

    /// `r ≡ r_value`, `s ≡ s_value`.
    pub fn uniform(form: &SymmetricJumpForm<S>, alpha: Alpha, r_value: S, s_value: S) -> Result<Self> {
        Self::from_fn(form, alpha, |_, _| r_value, |_| s_value)
    }

    pub fn at(&self, alpha: Alpha) -> Self {
        Self { alpha, ..self.clone() }
    }

    pub fn rescale(&self) -> S {
        self.rescale
    }

    /// Effective `c · r_ij`.
    pub fn r(&self, i: usize, j: usize) -> S {
        let row = &self.r[i];
        row.binary_search_by_key(&j, |&(k, _)| k)
            .map_or(S::one(), |p| row[p].1)
            * self.rescale
    }

    /// Effective `c · s_i`.
    pub fn s(&self, i: usize) -> S {
        self.s[i] * self.rescale
    }

    /// Applies the rescale reported by [`check_normalization`].
    pub fn normalized(mut self, form: &SymmetricJumpForm<S>) -> Self {
        let report = check_normalization(form, &self);
        // densities within rounding of 1 are left alone
        if !report.holds() {
            self.rescale *= report.required_rescale;
        }
        self
    }
}

/// Per-state densities of `J^(1)(·, E) + K^(1)` against `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationReport<S> {
    pub density: Vec<S>,
    pub max_density: S,
    /// `max(1, max_density)`.
    pub required_rescale: S,
}

impl<S: Scalar> NormalizationReport<S> {
    pub fn holds(&self) -> bool {
        self.max_density.to_f64_lossy() <= 1.0 + S::NORMALIZATION_TOL
    }
}

/// Density `[Σ_j J_ij/r_ij + K_i/s_i] / π_i` with the current effective
/// weights; the operator norm on `L¹₊(π)` is its maximum.
pub fn check_normalization<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    params: &ModifiedFormParams<S>,
) -> NormalizationReport<S> {
    let density: Vec<S> = (0..form.n())
        .map(|i| {
            let jumps: S = form.neighbors(i).iter().map(|&(j, w)| w / params.r(i, j)).sum();
            let kill = form.killing()[i];
            let kill = if kill > S::zero() { kill / params.s(i) } else { S::zero() };
            (jumps + kill) / form.pi()[i]
        })
        .collect();
    let max_density = density.iter().copied().fold(S::zero(), fmax);
    NormalizationReport {
        required_rescale: fmax(S::one(), max_density),
        density,
        max_density,
    }
}

/// `J^(α)_ij = J_ij / r_ij^α`, `K^(α)_i = K_i / s_i^α`.
pub fn modified_form<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    params: &ModifiedFormParams<S>,
) -> SymmetricJumpForm<S> {
    let alpha = params.alpha;
    if alpha == Alpha::Zero {
        return form.clone();
    }
    form.map_masses(
        |i, j, w| alpha.divide(w, params.r(i, j)),
        |i, k| alpha.divide(k, params.s(i)),
    )
}

/// `r_ij = q_i ∨ q_j`, `s_i = q_i`, rescaled so the normalisation holds.
pub fn default_weights<S: Scalar>(form: &SymmetricJumpForm<S>, alpha: Alpha) -> Result<ModifiedFormParams<S>> {
    let q: Vec<S> = (0..form.n()).map(|i| form.total_rate(i)).collect();
    for (i, &qi) in q.iter().enumerate() {
        if !(qi > S::zero()) && form.out_mass(i) > S::zero() {
            return Err(Error::ZeroRates { state: i });
        }
    }
    Ok(ModifiedFormParams::from_fn(form, alpha, |i, j| fmax(q[i], q[j]), |i| q[i])?.normalized(form))
}

/// [`default_weights`] for the form of a rate chain.
pub fn default_r_s<S: Scalar>(chain: &RateChain<S>, alpha: Alpha) -> Result<ModifiedFormParams<S>> {
    default_weights(&form_from_rates(chain)?, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::fixtures;

    #[test]
    fn alpha_zero_is_identity() {
        let form = fixtures::path::<f64>(4).unwrap();
        let params = default_weights(&form, Alpha::Zero).unwrap();
        assert_eq!(modified_form(&form, &params), form);
    }

    #[test]
    fn two_state_default_weights() {
        let form = fixtures::two_state::<f64>(0.5).unwrap();
        let params = default_weights(&form, Alpha::Half).unwrap();
        assert_eq!(params.r(0, 1), 1.0);
        assert_eq!(params.rescale(), 1.0);
        assert_eq!(modified_form(&form, &params), form);
    }

    #[test]
    fn oversized_and_undersized_r() {
        let form = fixtures::two_state::<f64>(0.5).unwrap();
        let big = ModifiedFormParams::uniform(&form, Alpha::One, 2.0, 1.0).unwrap();
        let report = check_normalization(&form, &big);
        assert_eq!(report.max_density, 0.5);
        assert_eq!(report.required_rescale, 1.0);
        let small = ModifiedFormParams::uniform(&form, Alpha::One, 0.5, 1.0).unwrap();
        let report = check_normalization(&form, &small);
        assert_eq!(report.max_density, 2.0);
        assert_eq!(report.required_rescale, 2.0);
        let fixed = small.normalized(&form);
        assert!(check_normalization(&form, &fixed).holds());
    }

    #[test]
    fn killing_with_s_equal_q_has_unit_density() {
        let chain = RateChain::new(
            vec![0.5, 0.5],
            [(0, 1, 1.0), (1, 0, 1.0)],
            vec![2.0, 0.5],
        )
        .unwrap();
        let params = default_r_s(&chain, Alpha::One).unwrap();
        let form = form_from_rates(&chain).unwrap();
        let report = check_normalization(&form, &params);
        assert!(report.holds());
        assert_eq!(params.rescale(), 1.0);
    }
}
