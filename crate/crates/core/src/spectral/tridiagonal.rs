//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection and
//! eigenvectors by inverse iteration.

use crate::scalar::{fmax, fmin, Scalar};

/// Number of eigenvalues strictly below `x`, from the signs of the `LDLᵀ`
/// pivots of `T − x I`.
pub fn sturm_count<S: Scalar>(diag: &[S], off: &[S], x: S) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let guard = S::min_positive_value().sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    for i in 0..n {
        if i > 0 {
            let q_prev = if q.abs() < guard { guard } else { q };
            q = diag[i] - x - off[i - 1] * off[i - 1] / q_prev;
        }
        if q < S::zero() {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the spectrum.
pub fn gershgorin<S: Scalar>(diag: &[S], off: &[S]) -> (S, S) {
    let n = diag.len();
    let mut lo = S::infinity();
    let mut hi = S::neg_infinity();
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { S::zero() };
        let right = if i + 1 < n { off[i].abs() } else { S::zero() };
        lo = fmin(lo, diag[i] - left - right);
        hi = fmax(hi, diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based), bisected until the bracket is
/// narrower than `S::BISECTION_TOL` or cannot shrink further.
pub fn kth_eigenvalue<S: Scalar>(diag: &[S], off: &[S], k: usize) -> S {
    let (lo, hi) = gershgorin(diag, off);
    let pad = fmax(S::one(), fmax(lo.abs(), hi.abs())) * S::epsilon() * S::of(4.0);
    let mut lo = lo - pad;
    let mut hi = hi + pad;
    let tol = S::of(S::BISECTION_TOL);
    for _ in 0..2000 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) * S::of(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo + (hi - lo) * S::of(0.5)
}

/// Solves `(T − σ I) x = rhs` by Gaussian elimination with partial
/// pivoting; zero pivots are replaced by a tiny multiple of `‖T‖`.
fn shifted_solve<S: Scalar>(diag: &[S], off: &[S], sigma: S, rhs: &mut [S]) {
    let n = diag.len();
    let scale = diag
        .iter()
        .chain(off)
        .fold(S::zero(), |m, &x| fmax(m, x.abs()));
    let tiny = fmax(scale, S::one()) * S::epsilon() * S::epsilon();
    let mut b: Vec<S> = diag.iter().map(|&d| d - sigma).collect();
    let mut c: Vec<S> = off.to_vec();
    c.push(S::zero());
    let mut c2 = vec![S::zero(); n];
    for i in 0..n.saturating_sub(1) {
        let a = off[i];
        if b[i].abs() >= a.abs() {
            if b[i] == S::zero() {
                b[i] = tiny;
            }
            let m = a / b[i];
            b[i + 1] -= m * c[i];
            rhs[i + 1] -= m * rhs[i];
        } else {
            let m = b[i] / a;
            let next_diag = b[i + 1];
            let next_super = if i + 1 < n - 1 { c[i + 1] } else { S::zero() };
            b[i] = a;
            b[i + 1] = c[i] - m * next_diag;
            c[i] = next_diag;
            c2[i] = next_super;
            if i + 1 < n - 1 {
                c[i + 1] = -m * next_super;
            }
            rhs.swap(i, i + 1);
            rhs[i + 1] -= m * rhs[i];
        }
    }
    if b[n - 1] == S::zero() {
        b[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        if i + 1 < n {
            acc -= c[i] * rhs[i + 1];
        }
        if i + 2 < n {
            acc -= c2[i] * rhs[i + 2];
        }
        rhs[i] = acc / b[i];
    }
}

pub(crate) fn normalize<S: Scalar>(v: &mut [S]) -> S {
    let top = v.iter().fold(S::zero(), |m, &x| fmax(m, x.abs()));
    if top == S::zero() {
        return S::zero();
    }
    let norm = v.iter().map(|&x| (x / top) * (x / top)).sum::<S>().sqrt() * top;
    for x in v.iter_mut() {
        *x /= norm;
    }
    norm
}

/// Unit eigenvector for the eigenvalue `lambda`, three inverse-iteration
/// steps from a fixed start vector.
pub fn inverse_iteration<S: Scalar>(diag: &[S], off: &[S], lambda: S) -> Vec<S> {
    let n = diag.len();
    let mut v: Vec<S> = (0..n)
        .map(|i| S::of(0.5 + ((i * 7919) % 101) as f64 / 101.0))
        .collect();
    normalize(&mut v);
    for _ in 0..3 {
        shifted_solve(diag, off, lambda, &mut v);
        if normalize(&mut v) == S::zero() || v.iter().any(|x| !x.is_finite()) {
            v = vec![S::zero(); n];
            v[0] = S::one();
        }
    }
    v
}

/// `‖T v − λ v‖₂`.
pub fn residual<S: Scalar>(diag: &[S], off: &[S], v: &[S], lambda: S) -> S {
    let n = diag.len();
    let mut acc = S::zero();
    for i in 0..n {
        let mut tv = diag[i] * v[i];
        if i > 0 {
            tv += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            tv += off[i] * v[i + 1];
        }
        let r = tv - lambda * v[i];
        acc += r * r;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_laplacian_spectrum() {
        // eigenvalues of the free path Laplacian: 2 − 2 cos(kπ/n)
        let n = 40;
        let mut diag = vec![2.0; n];
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        let off = vec![-1.0; n - 1];
        for k in 0..5 {
            let exact = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / n as f64).cos();
            let got = kth_eigenvalue(&diag, &off, k);
            assert!((got - exact).abs() < 1e-11, "{k}: {got} vs {exact}");
            let v = inverse_iteration(&diag, &off, got);
            assert!(residual(&diag, &off, &v, got) < 1e-9);
        }
    }

    #[test]
    fn sturm_counts() {
        let diag = [1.0, 2.0, 3.0];
        let off = [0.0, 0.0];
        assert_eq!(sturm_count(&diag, &off, 0.5), 0);
        assert_eq!(sturm_count(&diag, &off, 2.5), 2);
        assert_eq!(sturm_count(&diag, &off, 10.0), 3);
    }

    #[test]
    fn pivoting_path() {
        let diag = [0.0, 0.0, 0.0, 0.0];
        let off = [1.0, 1.0, 1.0];
        let lam = kth_eigenvalue(&diag, &off, 0);
        let v = inverse_iteration(&diag, &off, lam);
        assert!(residual(&diag, &off, &v, lam) < 1e-9);
    }
}
