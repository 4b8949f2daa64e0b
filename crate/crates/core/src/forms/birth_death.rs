use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::RateExpression;
use crate::forms::{normalize_log_weights, Alpha, ModifiedFormParams, RateChain, SymmetricJumpForm};
use crate::scalar::{fmax, Scalar};

/// Death rates `a(i)`, birth rates `b(i)` and the truncation level `N`.
///
/// The truncation reflects: the birth rate out of `N` is dropped from the
/// dynamics but kept for the normalising weights. By convention `a_0 = 0`,
/// and when `b(0)` evaluates to zero the birth rate at the origin is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathSpec {
    pub death: RateExpression,
    pub birth: RateExpression,
    pub levels: usize,
    pub birth_at_zero: Option<f64>,
}

impl BirthDeathSpec {
    pub fn new(death: &str, birth: &str, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidParams("truncation level must be at least 1".into()));
        }
        Ok(Self {
            death: RateExpression::parse(death)?,
            birth: RateExpression::parse(birth)?,
            levels,
            birth_at_zero: None,
        })
    }

    pub fn with_levels(&self, levels: usize) -> Self {
        Self {
            levels,
            ..self.clone()
        }
    }

    pub fn bind(&self, values: &BTreeMap<String, f64>) -> Self {
        Self {
            death: self.death.bind(values),
            birth: self.birth.bind(values),
            ..self.clone()
        }
    }

    /// `(a_i, b_i)` at any index, with the boundary conventions applied and
    /// no truncation.
    pub fn rates_at(&self, i: usize) -> Result<(f64, f64)> {
        let idx = i as i64;
        let a = if i == 0 { 0.0 } else { self.death.eval(idx)? };
        let mut b = self.birth.eval(idx)?;
        if i == 0 {
            b = match self.birth_at_zero {
                Some(v) => v,
                None if b == 0.0 => 1.0,
                None => b,
            };
        }
        Ok((a, b))
    }

    pub fn rates<S: Scalar>(&self) -> Result<BirthDeathChain<S>> {
        let mut death = Vec::with_capacity(self.levels + 1);
        let mut birth = Vec::with_capacity(self.levels + 1);
        for i in 0..=self.levels {
            let (a, b) = self.rates_at(i)?;
            death.push(S::of(a));
            birth.push(S::of(b));
        }
        BirthDeathChain::new(death, birth)
    }
}

/// Rates of a truncated birth-death chain on `{0, …, N}`.
///
/// Every quantity here is computed from rate ratios so that chains whose
/// stationary weights underflow (for instance `π_i ∝ 4^{-i}` at `N = 2000`)
/// remain usable.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathChain<S> {
    death: Vec<S>,
    birth: Vec<S>,
}

impl<S: Scalar> BirthDeathChain<S> {
    /// `death[0]` is ignored and stored as 0; `birth[N]` is the raw,
    /// untruncated rate.
    pub fn new(mut death: Vec<S>, birth: Vec<S>) -> Result<Self> {
        if death.len() != birth.len() || death.len() < 2 {
            return Err(Error::InvalidParams("need matching rate vectors with at least two states".into()));
        }
        let n = death.len() - 1;
        death[0] = S::zero();
        for (i, &a) in death.iter().enumerate().skip(1) {
            if !(a > S::zero()) || !a.is_finite() {
                return Err(Error::InvalidParams(format!("death rate a_{i} = {a} must be positive")));
            }
        }
        for (i, &b) in birth.iter().enumerate().take(n) {
            if !(b > S::zero()) || !b.is_finite() {
                return Err(Error::InvalidParams(format!("birth rate b_{i} = {b} must be positive")));
            }
        }
        if !(birth[n] >= S::zero()) || !birth[n].is_finite() {
            return Err(Error::InvalidParams(format!("birth rate b_{n} = {} is invalid", birth[n])));
        }
        Ok(Self { death, birth })
    }

    /// Truncation level `N`.
    pub fn levels(&self) -> usize {
        self.death.len() - 1
    }

    pub fn len(&self) -> usize {
        self.death.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn death(&self, i: usize) -> S {
        self.death[i]
    }

    /// Birth rate of the truncated dynamics (zero at `N`).
    pub fn birth(&self, i: usize) -> S {
        if i == self.levels() {
            S::zero()
        } else {
            self.birth[i]
        }
    }

    pub fn raw_birth(&self, i: usize) -> S {
        self.birth[i]
    }

    /// `a_i + b_i` with the untruncated birth rate.
    pub fn weight(&self, i: usize) -> S {
        self.death[i] + self.birth[i]
    }

    /// `r_{i,i+1} = (a_i + b_i) ∨ (a_{i+1} + b_{i+1})`.
    pub fn pair_weight(&self, i: usize) -> S {
        fmax(self.weight(i), self.weight(i + 1))
    }

    /// Rates of the modified form `J^(α)` with `r_{i,i+1}` from
    /// [`Self::pair_weight`]: `a_i / r_{i−1,i}^α` and `b_i / r_{i,i+1}^α`.
    /// The stationary measure is unchanged.
    pub fn modified(&self, alpha: Alpha) -> Self {
        let n = self.levels();
        let death = (0..=n)
            .map(|i| if i == 0 { S::zero() } else { alpha.divide(self.death[i], self.pair_weight(i - 1)) })
            .collect();
        let birth = (0..=n)
            .map(|i| {
                let r = if i < n { self.pair_weight(i) } else { self.weight(n) };
                alpha.divide(self.birth[i], r)
            })
            .collect();
        Self { death, birth }
    }

    /// Rates divided by `p_i`: the generator of the same form on
    /// `L²(p π / π(p))`, up to the factor `π(p)`.
    pub fn tilted(&self, p: &[S]) -> Result<Self> {
        if p.len() != self.len() {
            return Err(Error::InvalidP(format!("p has length {}, expected {}", p.len(), self.len())));
        }
        if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v > S::zero()) || !v.is_finite()) {
            return Err(Error::InvalidP(format!("p_{i} = {v} must be positive and finite")));
        }
        Self::new(
            self.death.iter().zip(p).map(|(&a, &x)| a / x).collect(),
            self.birth.iter().zip(p).map(|(&b, &x)| b / x).collect(),
        )
    }

    /// Chain truncated at a lower level, keeping the raw rates.
    pub fn truncated(&self, levels: usize) -> Result<Self> {
        if levels == 0 || levels > self.levels() {
            return Err(Error::InvalidParams(format!("cannot truncate at {levels}")));
        }
        Self::new(self.death[..=levels].to_vec(), self.birth[..=levels].to_vec())
    }

    /// `log μ_i` with `μ_0 = 1`, `μ_i = μ_{i−1} b_{i−1} / a_i`.
    pub fn log_mu(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.len());
        let mut acc = S::zero();
        out.push(acc);
        for i in 1..self.len() {
            acc += self.birth[i - 1].ln() - self.death[i].ln();
            out.push(acc);
        }
        out
    }

    pub fn stationary(&self) -> Result<Vec<S>> {
        normalize_log_weights(&self.log_mu())
    }

    /// `T_i = Σ_{j≥i} π_j / π_i`, from `T_N = 1`, `T_i = 1 + (b_i/a_{i+1}) T_{i+1}`.
    pub fn tail_ratios(&self) -> Vec<S> {
        self.tilted_tail_ratios(|_| S::one())
    }

    /// `Σ_{j≥i} π_j p_j / π_i`.
    pub fn tilted_tail_ratios(&self, p: impl Fn(usize) -> S) -> Vec<S> {
        let n = self.levels();
        let mut out = vec![S::zero(); n + 1];
        out[n] = p(n);
        for i in (0..n).rev() {
            out[i] = p(i) + self.birth[i] / self.death[i + 1] * out[i + 1];
        }
        out
    }

    /// `H_i = Σ_{j≤i} π_j / π_i`, from `H_0 = 1`, `H_i = 1 + (a_i/b_{i−1}) H_{i−1}`.
    pub fn head_ratios(&self) -> Vec<S> {
        let mut out = vec![S::one(); self.len()];
        for i in 1..self.len() {
            out[i] = S::one() + self.death[i] / self.birth[i - 1] * out[i - 1];
        }
        out
    }

    pub fn to_chain(&self) -> Result<RateChain<S>> {
        let pi = self.stationary()?;
        let n = self.levels();
        let mut triples = Vec::with_capacity(2 * n);
        for i in 0..n {
            triples.push((i, i + 1, self.birth[i]));
            triples.push((i + 1, i, self.death[i + 1]));
        }
        RateChain::new(pi, triples, vec![S::zero(); n + 1])
    }

    /// `J_{i,i+1} = π_i b_i`. Fails with `MeasureUnderflow` when some `π_i`
    /// is not representable.
    pub fn to_form(&self) -> Result<SymmetricJumpForm<S>> {
        let pi = self.stationary()?;
        let n = self.levels();
        let pairs: Vec<_> = (0..n).map(|i| (i, i + 1, pi[i] * self.birth[i])).collect();
        SymmetricJumpForm::new(pi, pairs, vec![S::zero(); n + 1])
    }

    /// Weights `r_{i,i+1}` on the form returned by [`Self::to_form`]; the
    /// normalisation holds without rescaling since `a_i/r + b_i/r ≤ 1`.
    pub fn weights(&self, form: &SymmetricJumpForm<S>, alpha: Alpha) -> Result<ModifiedFormParams<S>> {
        Ok(ModifiedFormParams::from_fn(form, alpha, |i, _| self.pair_weight(i), |_| S::one())?.normalized(form))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::check_normalization;

    #[test]
    fn poly_measure_telescopes() {
        let spec = BirthDeathSpec::new("i^2", "i^2", 50).unwrap();
        let chain: BirthDeathChain<f64> = spec.rates().unwrap();
        assert_eq!(chain.raw_birth(0), 1.0);
        let log_mu = chain.log_mu();
        for (i, &l) in log_mu.iter().enumerate().skip(1) {
            assert!((l - (-2.0 * (i as f64).ln())).abs() < 1e-12);
        }
    }

    #[test]
    fn ratios_match_measure() {
        let spec = BirthDeathSpec::new("2 + i", "1 + 0.5*i", 12).unwrap();
        let chain: BirthDeathChain<f64> = spec.rates().unwrap();
        let pi = chain.stationary().unwrap();
        let tail = chain.tail_ratios();
        let head = chain.head_ratios();
        for i in 0..pi.len() {
            let t: f64 = pi[i..].iter().sum::<f64>() / pi[i];
            let h: f64 = pi[..=i].iter().sum::<f64>() / pi[i];
            assert!((t - tail[i]).abs() < 1e-12 * t);
            assert!((h - head[i]).abs() < 1e-12 * h);
            assert!((1.0 / pi[i] - (head[i] + tail[i] - 1.0)).abs() < 1e-10 / pi[i]);
        }
    }

    #[test]
    fn underflow_is_reported() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("4", "1", 2000).unwrap().rates().unwrap();
        assert!(matches!(chain.to_form(), Err(Error::MeasureUnderflow { .. })));
    }

    #[test]
    fn weights_satisfy_normalization() {
        let chain: BirthDeathChain<f64> = BirthDeathSpec::new("4", "1", 30).unwrap().rates().unwrap();
        let form = chain.to_form().unwrap();
        let params = chain.weights(&form, Alpha::One).unwrap();
        assert_eq!(params.rescale(), 1.0);
        assert_eq!(params.r(3, 4), 5.0);
        assert!(check_normalization(&form, &params).max_density <= 1.0 + 1e-12);
    }

    #[test]
    fn invalid_rates() {
        assert!(BirthDeathSpec::new("i - 3", "1", 5).unwrap().rates::<f64>().is_err());
        assert!(BirthDeathSpec::new("1", "1", 0).is_err());
    }
}
