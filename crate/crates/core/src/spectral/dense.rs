//! Dense symmetric eigensolvers: cyclic Jacobi for small matrices and
//! Householder tridiagonalisation followed by bisection for larger ones.

use crate::error::{Error, Result};
use crate::scalar::{fmax, Scalar};
use crate::spectral::tridiagonal;

/// Row-major symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseSym<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    /// Adds `v` at `(i, j)` and, off the diagonal, at `(j, i)`.
    pub fn add_sym(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] += v;
        if i != j {
            self.data[j * self.n + i] += v;
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(&a, &x)| a * x)
                    .sum()
            })
            .collect()
    }

    /// Upper end of the Gershgorin interval.
    pub fn gershgorin_upper(&self) -> S {
        (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                row[i] + row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, a)| a.abs()).sum::<S>()
            })
            .fold(S::neg_infinity(), fmax)
    }

    pub fn residual(&self, v: &[S], lambda: S) -> S {
        self.mul_vec(v)
            .iter()
            .zip(v)
            .map(|(&av, &x)| (av - lambda * x) * (av - lambda * x))
            .sum::<S>()
            .sqrt()
    }
}

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// All eigenpairs by cyclic Jacobi rotations, sorted ascending. Column `k`
/// of the returned row-major matrix is the eigenvector of `values[k]`.
pub fn jacobi<S: Scalar>(m: &DenseSym<S>) -> Result<(Vec<S>, Vec<Vec<S>>)> {
    let n = m.n;
    let mut a = m.data.clone();
    let mut v = vec![S::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = S::one();
    }
    let scale = a.iter().fold(S::zero(), |acc, &x| fmax(acc, x.abs()));
    let mut converged = n <= 1;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: S = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off.sqrt() <= S::epsilon() * fmax(scale, S::min_positive_value()) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == S::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (S::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let t = if theta == S::zero() { S::one() } else { t };
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = S::zero();
                a[q * n + p] = S::zero();
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigensolverNoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].partial_cmp(&a[y * n + y]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = order.iter().map(|&k| (0..n).map(|i| v[i * n + k]).collect()).collect();
    Ok((values, vectors))
}

/// Householder reduction `Qᵀ A Q = T`. The reflectors are kept so that
/// eigenvectors of `T` can be mapped back.
pub struct Tridiagonal<S> {
    pub diag: Vec<S>,
    pub off: Vec<S>,
    reflectors: Vec<(Vec<S>, S)>,
}

pub fn tridiagonalize<S: Scalar>(m: &DenseSym<S>) -> Tridiagonal<S> {
    let n = m.n;
    let mut a = m.data.clone();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<S> = (0..len).map(|t| a[(k + 1 + t) * n + k]).collect();
        let norm = x.iter().map(|&v| v * v).sum::<S>().sqrt();
        if norm == S::zero() {
            off.push(S::zero());
            reflectors.push((vec![S::zero(); len], S::zero()));
            continue;
        }
        let alpha = if x[0] > S::zero() { -norm } else { norm };
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: S = v.iter().map(|&t| t * t).sum();
        let beta = S::of(2.0) / vnorm2;
        // p = β A₂₂ v, w = p − (β/2)(vᵀp) v, A₂₂ ← A₂₂ − v wᵀ − w vᵀ
        let base = k + 1;
        let mut p = vec![S::zero(); len];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &a[(base + r) * n + base..(base + r) * n + base + len];
            *pr = beta * row.iter().zip(&v).map(|(&x, &y)| x * y).sum::<S>();
        }
        let kdot = S::of(0.5) * beta * v.iter().zip(&p).map(|(&x, &y)| x * y).sum::<S>();
        let w: Vec<S> = p.iter().zip(&v).map(|(&pi, &vi)| pi - kdot * vi).collect();
        for r in 0..len {
            let row = &mut a[(base + r) * n + base..(base + r) * n + base + len];
            for (c, entry) in row.iter_mut().enumerate() {
                *entry -= v[r] * w[c] + w[r] * v[c];
            }
        }
        off.push(alpha);
        reflectors.push((v, beta));
    }
    if n >= 2 {
        off.push(a[(n - 1) * n + (n - 2)]);
    }
    let diag = (0..n).map(|i| a[i * n + i]).collect();
    Tridiagonal { diag, off, reflectors }
}

impl<S: Scalar> Tridiagonal<S> {
    /// Maps an eigenvector of `T` to one of `A`: `x = H₀ H₁ ⋯ y`.
    pub fn back_transform(&self, y: &[S]) -> Vec<S> {
        let n = y.len();
        let mut x = y.to_vec();
        for (k, (v, beta)) in self.reflectors.iter().enumerate().rev() {
            if *beta == S::zero() {
                continue;
            }
            let seg = &mut x[k + 1..n];
            let dot: S = seg.iter().zip(v).map(|(&a, &b)| a * b).sum();
            for (s, &vi) in seg.iter_mut().zip(v) {
                *s -= *beta * dot * vi;
            }
        }
        x
    }
}

/// Smallest eigenpair through the tridiagonal path.
pub fn smallest_householder<S: Scalar>(m: &DenseSym<S>) -> (S, Vec<S>) {
    let t = tridiagonalize(m);
    let lambda = tridiagonal::kth_eigenvalue(&t.diag, &t.off, 0);
    let y = tridiagonal::inverse_iteration(&t.diag, &t.off, lambda);
    let mut x = t.back_transform(&y);
    tridiagonal::normalize(&mut x);
    (lambda, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> DenseSym<f64> {
        let mut m = DenseSym::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = ((i * 31 + j * 17) % 13) as f64 / 7.0 - 0.8;
                m.add_sym(i, j, v);
            }
        }
        m
    }

    #[test]
    fn jacobi_diagonalizes() {
        let m = sample(9);
        let (vals, vecs) = jacobi(&m).unwrap();
        for (lam, v) in vals.iter().zip(&vecs) {
            assert!(m.residual(v, *lam) < 1e-12);
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn householder_matches_jacobi() {
        let m = sample(30);
        let (vals, _) = jacobi(&m).unwrap();
        let (lam, v) = smallest_householder(&m);
        assert!((lam - vals[0]).abs() < 1e-10);
        assert!(m.residual(&v, lam) < 1e-9);
    }

    #[test]
    fn trace_preserved() {
        let m = sample(12);
        let t = tridiagonalize(&m);
        let tr: f64 = (0..12).map(|i| m.get(i, i)).sum();
        assert!((t.diag.iter().sum::<f64>() - tr).abs() < 1e-12);
    }
}
