use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimax {
    /// Crossing point of `f` and `g`.
    pub gamma0: f64,
    /// `f(γ₀) = inf_γ max{f(γ), g(γ)}`.
    pub value: f64,
}

/// Crossing of a nondecreasing `f` and a nonincreasing `g` on `[0, 1]` by
/// bisection to width `tol`.
pub fn minimax(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, tol: f64) -> Result<Minimax> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance {tol} must be positive")));
    }
    let h = |x: f64| f(x) - g(x);
    if !(h(0.0) < 0.0 && h(1.0) > 0.0) {
        return Err(Error::PreconditionViolated(
            "need f(0) < g(0) and f(1) > g(1)".into(),
        ));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma0 = 0.5 * (lo + hi);
    Ok(Minimax {
        gamma0,
        value: f(gamma0).max(g(gamma0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_crossing() {
        let m = minimax(|x| x, |x| 1.0 - x, 1e-12).unwrap();
        assert!((m.gamma0 - 0.5).abs() < 1e-12);
        assert!((m.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn flat_g() {
        let m = minimax(|x| x * x, |_| 0.25, 1e-12).unwrap();
        assert!((m.gamma0 - 0.5).abs() < 1e-11);
        assert!((m.value - 0.25).abs() < 1e-11);
    }

    #[test]
    fn quadratic_pair() {
        let m = minimax(|x| 2.0 * x * x, |x| 4.0 * (1.0 - x).powi(2) / 2.0, 1e-12).unwrap();
        assert!((m.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn wrong_sign_pattern() {
        assert!(matches!(minimax(|x| 1.0 - x, |x| x, 1e-9), Err(Error::PreconditionViolated(_))));
    }
}
