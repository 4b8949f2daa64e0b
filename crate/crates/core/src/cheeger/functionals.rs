//! Functional representations of the Cheeger constants.
//!
//! Each functional is minimised over indicator functions by the constant it
//! represents, and no nonnegative function goes below that constant. The
//! form passed in is used as is, so callers wanting `h^(α)` pass the
//! modified form.

use crate::error::{Error, Result};
use crate::forms::SymmetricJumpForm;
use crate::scalar::Scalar;

fn check_len<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> Result<()> {
    if f.len() != form.n() {
        return Err(Error::DegenerateInput(format!(
            "function has length {}, expected {}",
            f.len(),
            form.n()
        )));
    }
    if let Some(i) = f.iter().position(|x| !x.is_finite()) {
        return Err(Error::DegenerateInput(format!("f_{i} is not finite")));
    }
    Ok(())
}

/// `Σ_{i<j} J_ij |f_i − f_j|`, half of the ordered-pair integral.
fn variation<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> S {
    form.edges().map(|(i, j, w)| w * (f[i] - f[j]).abs()).sum()
}

fn nonzero<S: Scalar>(value: S, what: &str) -> Result<S> {
    if value > S::zero() {
        Ok(value)
    } else {
        Err(Error::DegenerateInput(format!("{what} vanishes")))
    }
}

/// `[½ ∫J|f(x) − f(y)| + K(f)] / π(f)` for `f ≥ 0`.
pub fn functional_h<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> Result<S> {
    check_len(form, f)?;
    if let Some(i) = f.iter().position(|&x| x < S::zero()) {
        return Err(Error::DegenerateInput(format!("f_{i} is negative")));
    }
    let mass = nonzero(form.pi_mean(f), "π(f)")?;
    let kill: S = form.killing().iter().zip(f).map(|(&k, &x)| k * x).sum();
    Ok((variation(form, f) + kill) / mass)
}

/// `∫J|f(x) − f(y)| / ∫∫ π(dx)π(dy)|f(x) − f(y)|`.
pub fn functional_k<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> Result<S> {
    check_len(form, f)?;
    let pi = form.pi();
    let mut spread = S::zero();
    for i in 0..f.len() {
        for j in (i + 1)..f.len() {
            spread += pi[i] * pi[j] * (f[i] - f[j]).abs();
        }
    }
    // the double integral counts each unordered pair twice
    let spread = nonzero(spread + spread, "pairwise spread")?;
    Ok((variation(form, f) + variation(form, f)) / spread)
}

/// `∫J|f(x) − f(y)| / π(|f − π(f)|)`.
pub fn functional_k_centered<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> Result<S> {
    check_len(form, f)?;
    let spread = nonzero(mean_deviation(form, f), "mean deviation")?;
    Ok((variation(form, f) + variation(form, f)) / spread)
}

/// `½ ∫J|f(x) − f(y)| / min_c π(|f − c|)`.
pub fn functional_kprime<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> Result<S> {
    check_len(form, f)?;
    let (_, spread) = median_deviation(form, f);
    let spread = nonzero(spread, "median deviation")?;
    Ok(variation(form, f) / spread)
}

/// `π(|f − π(f)|)`.
pub fn mean_deviation<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> S {
    let mean = form.pi_mean(f);
    form.pi().iter().zip(f).map(|(&p, &x)| p * (x - mean).abs()).sum()
}

/// `(c₀, π(|f − c₀|))` with `c₀` a `π`-median of `f`, where the minimum over
/// `c` is attained.
pub fn median_deviation<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> (S, S) {
    let pi = form.pi();
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[a].partial_cmp(&f[b]).expect("finite values"));
    let half = S::of(0.5);
    let mut below = S::zero();
    let mut median = f[order[0]];
    for &i in &order {
        median = f[i];
        below += pi[i];
        if below >= half {
            break;
        }
    }
    let dev = pi.iter().zip(f).map(|(&p, &x)| p * (x - median).abs()).sum();
    (median, dev)
}

/// The extremal dual function of the mean deviation:
/// `g₀ = I_{A⁺} − I_{A⁻} − π(A⁺) + π(A⁻)` with `A⁺ = {f ≥ π(f)}`, together
/// with `c₀ = 1 − 2π(A⁺)`. Then `π(g₀) = 0`, `π(f g₀) = π(|f − π(f)|)` and
/// `‖g₀ − c₀‖_∞ = 1`.
pub fn deviation_witness<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> (Vec<S>, S) {
    let mean = form.pi_mean(f);
    let upper: S = form.pi().iter().zip(f).filter(|(_, &x)| x >= mean).map(|(&p, _)| p).sum();
    let lower = S::one() - upper;
    let g = f
        .iter()
        .map(|&x| if x >= mean { S::one() - upper + lower } else { -S::one() - upper + lower })
        .collect();
    (g, S::one() - upper - upper)
}
