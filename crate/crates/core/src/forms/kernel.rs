use crate::error::{Error, Result};
use crate::forms::SymmetricJumpForm;
use crate::scalar::{fmax, Scalar};

/// The form of `M − P` for a `π`-symmetric kernel `P`, with `M` carried so
/// eigenvalues map back as `eig(P) = M − λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelForm<S> {
    pub form: SymmetricJumpForm<S>,
    pub m: S,
}

impl<S: Scalar> KernelForm<S> {
    pub fn kernel_eigenvalue(&self, lambda: S) -> S {
        self.m - lambda
    }
}

/// `J_ij = π_i p_ij` off the diagonal and `K_i = π_i (M − Σ_j p_ij)` where
/// the row sum includes `p_ii`, so `⟨f, (M − P) f⟩_π = D(f, f)` exactly.
pub fn form_from_kernel<S: Scalar>(p: &[Vec<S>], pi: &[S]) -> Result<KernelForm<S>> {
    let n = pi.len();
    if p.len() != n || p.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidForm(format!("kernel must be {n} x {n}")));
    }
    for (i, row) in p.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if !(x >= S::zero()) || !x.is_finite() {
                return Err(Error::InvalidForm(format!("p_{i}{j} = {x} is not a finite nonnegative number")));
            }
        }
    }
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let a = pi[i] * p[i][j];
            let b = pi[j] * p[j][i];
            let scale = fmax(fmax(a, b), S::of(1e-300));
            let rel = ((a - b).abs() / scale).to_f64_lossy();
            if rel > S::BALANCE_TOL && worst.is_none_or(|w| rel > w.2) {
                worst = Some((i, j, rel));
            }
        }
    }
    if let Some((i, j, rel_error)) = worst {
        return Err(Error::SymmetryViolation { i, j, rel_error });
    }
    let row_sums: Vec<S> = p.iter().map(|row| row.iter().copied().sum()).collect();
    let m = row_sums.iter().copied().fold(S::zero(), fmax);
    let half = S::of(0.5);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = half * (pi[i] * p[i][j] + pi[j] * p[j][i]);
            if w > S::zero() {
                pairs.push((i, j, w));
            }
        }
    }
    let killing = (0..n).map(|i| fmax(S::zero(), pi[i] * (m - row_sums[i]))).collect();
    let form = SymmetricJumpForm::new(pi.to_vec(), pairs, killing)?;
    Ok(KernelForm { form, m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_kernel_is_zero_form() {
        let kf = form_from_kernel(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.5, 0.5]).unwrap();
        assert_eq!(kf.m, 1.0);
        assert_eq!(kf.form.edge_count(), 0);
        assert!(!kf.form.has_killing());
        assert_eq!(kf.kernel_eigenvalue(0.0), 1.0);
    }

    #[test]
    fn zero_kernel() {
        let kf = form_from_kernel(&[vec![0.0, 0.0], vec![0.0, 0.0]], &[0.5, 0.5]).unwrap();
        assert_eq!(kf.m, 0.0);
        assert!(!kf.form.has_killing());
    }

    #[test]
    fn asymmetric_kernel_rejected() {
        let err = form_from_kernel(&[vec![0.0, 1.0], vec![0.5, 0.0]], &[0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { i: 0, j: 1, .. }));
    }

    #[test]
    fn quadratic_identity() {
        let pi = [0.2, 0.3, 0.5];
        // π_i p_ij symmetric: choose symmetric masses then divide
        let mass = [[0.05, 0.04, 0.06], [0.04, 0.1, 0.09], [0.06, 0.09, 0.2]];
        let p: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| mass[i][j] / pi[i]).collect()).collect();
        let kf = form_from_kernel(&p, &pi).unwrap();
        let f = [1.3, -0.7, 2.1];
        let pf: Vec<f64> = (0..3).map(|i| (0..3).map(|j| p[i][j] * f[j]).sum()).collect();
        let lhs: f64 = (0..3).map(|i| pi[i] * f[i] * (kf.m * f[i] - pf[i])).sum();
        assert!((lhs - kf.form.dirichlet(&f)).abs() < 1e-12);
    }
}
