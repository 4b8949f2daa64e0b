use crate::error::{Error, Result};
use crate::expr::RateExpression;
use crate::forms::RateChain;
use crate::scalar::Scalar;

/// Finite-range chain on the box `{x ∈ ℤ^d : |x_k| ≤ L}` with reflecting
/// truncation.
///
/// A jump `x → x + δ` with `1 ≤ |δ|₁ ≤ R` happens at a rate given by one of
/// three expressions evaluated at `i = |x|₁`: `outward` when `|x+δ|₁ > |x|₁`,
/// `inward` when it is smaller and `level` (default 0) when equal. The
/// stationary measure is solved from detailed balance and verified.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeChainSpec {
    pub dim: usize,
    pub radius: usize,
    pub range: usize,
    pub outward: RateExpression,
    pub inward: RateExpression,
    pub level: Option<RateExpression>,
}

impl LatticeChainSpec {
    pub const MAX_STATES: usize = 4000;

    pub fn new(dim: usize, radius: usize, range: usize, outward: &str, inward: &str) -> Result<Self> {
        let spec = Self {
            dim,
            radius,
            range,
            outward: RateExpression::parse(outward)?,
            inward: RateExpression::parse(inward)?,
            level: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParams(format!("dimension {} not in 1..=3", self.dim)));
        }
        if self.range == 0 {
            return Err(Error::InvalidParams("range must be at least 1".into()));
        }
        if self.n() > Self::MAX_STATES {
            return Err(Error::InvalidParams(format!(
                "box has {} states, limit is {}",
                self.n(),
                Self::MAX_STATES
            )));
        }
        Ok(())
    }

    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn n(&self) -> usize {
        self.side().saturating_pow(self.dim as u32)
    }

    pub fn site(&self, mut index: usize) -> Vec<i64> {
        let side = self.side();
        let mut x = vec![0i64; self.dim];
        for k in (0..self.dim).rev() {
            x[k] = (index % side) as i64 - self.radius as i64;
            index /= side;
        }
        x
    }

    pub fn index(&self, site: &[i64]) -> Option<usize> {
        let side = self.side() as i64;
        let mut idx = 0i64;
        for &c in site {
            if c.abs() > self.radius as i64 {
                return None;
            }
            idx = idx * side + c + self.radius as i64;
        }
        Some(idx as usize)
    }

    pub fn norm1(site: &[i64]) -> i64 {
        site.iter().map(|c| c.abs()).sum()
    }

    /// Offsets `δ` with `1 ≤ |δ|₁ ≤ R`.
    pub fn offsets(&self) -> Vec<Vec<i64>> {
        let r = self.range as i64;
        let mut out = Vec::new();
        let mut cur = vec![-r; self.dim];
        loop {
            let norm = Self::norm1(&cur);
            if norm >= 1 && norm <= r {
                out.push(cur.clone());
            }
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < r {
                    cur[k] += 1;
                    break;
                }
                cur[k] = -r;
            }
        }
    }

    pub fn build<S: Scalar>(&self) -> Result<RateChain<S>> {
        self.validate()?;
        let offsets = self.offsets();
        let mut triples = Vec::new();
        for idx in 0..self.n() {
            let x = self.site(idx);
            let level = Self::norm1(&x);
            for delta in &offsets {
                let y: Vec<i64> = x.iter().zip(delta).map(|(a, b)| a + b).collect();
                let Some(jdx) = self.index(&y) else { continue };
                let target = Self::norm1(&y);
                let expr = match target.cmp(&level) {
                    std::cmp::Ordering::Greater => Some(&self.outward),
                    std::cmp::Ordering::Less => Some(&self.inward),
                    std::cmp::Ordering::Equal => self.level.as_ref(),
                };
                let Some(expr) = expr else { continue };
                let rate = expr.eval(level)?;
                if !(rate >= 0.0) || !rate.is_finite() {
                    return Err(Error::InvalidParams(format!(
                        "rate `{expr}` at level {level} is {rate}"
                    )));
                }
                if rate > 0.0 {
                    triples.push((idx, jdx, S::of(rate)));
                }
            }
        }
        RateChain::from_rates(self.n(), triples, vec![S::zero(); self.n()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_walk_has_uniform_measure() {
        let spec = LatticeChainSpec::new(2, 2, 1, "1", "1").unwrap();
        let chain: RateChain<f64> = spec.build().unwrap();
        assert_eq!(chain.n(), 25);
        for &p in chain.pi() {
            assert!((p - 1.0 / 25.0).abs() < 1e-14);
        }
    }

    #[test]
    fn radial_drift_is_reversible() {
        let spec = LatticeChainSpec::new(2, 3, 1, "1", "2").unwrap();
        let chain: RateChain<f64> = spec.build().unwrap();
        let origin = spec.index(&[0, 0]).unwrap();
        let corner = spec.index(&[3, 3]).unwrap();
        assert!(chain.pi()[origin] > chain.pi()[corner]);
    }

    #[test]
    fn site_index_round_trip() {
        let spec = LatticeChainSpec::new(3, 2, 1, "1", "1").unwrap();
        for idx in 0..spec.n() {
            assert_eq!(spec.index(&spec.site(idx)), Some(idx));
        }
        assert_eq!(spec.offsets().len(), 6);
    }

    #[test]
    fn too_large_box() {
        assert!(LatticeChainSpec::new(3, 10, 1, "1", "1").is_err());
    }
}
