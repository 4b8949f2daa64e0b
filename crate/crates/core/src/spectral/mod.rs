//! Exact bottom eigenvalues of forms on finite state spaces.
//!
//! Everything is computed on the symmetric matrix `Π^{-1/2} L Π^{-1/2}`,
//! `S_ij = L_ij / √(π_i π_j)`, where `L_ii = J(i,E) + K_i`
//! and `L_ij = −J_ij`. Eigenvectors `g` of `S` map to eigenfunctions
//! `f = g / √π` with `π(f²) = 1`.
//!
//! Birth-death chains have a rate-only path: the tridiagonal matrix has
//! diagonal `a_i + b_i` and off-diagonal `−√(b_i a_{i+1})`, so no stationary
//! weight is ever formed.

pub mod dense;
pub mod tridiagonal;

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::{form_from_rates, BirthDeathChain, BirthDeathSpec, LatticeChainSpec, SymmetricJumpForm};
use crate::scalar::Scalar;
use crate::subset::Subset;
use dense::DenseSym;

/// Largest matrix handed to the Jacobi solver; bigger ones are reduced to
/// tridiagonal form first.
pub const JACOBI_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed form (constants for `λ₀` without killing, 1×1 matrices).
    Trivial,
    Jacobi,
    Householder,
    TridiagonalBisection,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Trivial => "trivial",
            Method::Jacobi => "dense-jacobi",
            Method::Householder => "dense-householder",
            Method::TridiagonalBisection => "tridiagonal-bisection",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult<S> {
    pub value: S,
    /// Eigenfunction with `π(f²) = 1`. `None` when the stationary weights
    /// are not representable (rate-only birth-death path).
    pub eigvec: Option<Vec<S>>,
    /// Unit eigenvector of the symmetric matrix, `g = √π f`.
    pub symmetric_vector: Vec<S>,
    /// `‖S g − λ g‖₂`.
    pub residual: S,
    pub method: Method,
    /// Set when the jump graph splits; `λ₁` is then 0.
    pub disconnected: bool,
}

/// Sparse symmetric operator `S` in index-local coordinates.
struct Operator<S> {
    diag: Vec<S>,
    /// `(i, j, S_ij)` with `i < j`.
    entries: Vec<(usize, usize, S)>,
}

enum Target<'a, S> {
    Lowest,
    /// Lowest eigenvalue on the orthogonal complement of a unit vector that
    /// spans the ground state.
    AboveGround(&'a [S]),
}

impl<S: Scalar> Operator<S> {
    fn n(&self) -> usize {
        self.diag.len()
    }

    /// `(diag, off)` when the matrix is an irreducible tridiagonal one.
    fn as_tridiagonal(&self) -> Option<(Vec<S>, Vec<S>)> {
        let n = self.n();
        if n < 2 || self.entries.len() != n - 1 {
            return None;
        }
        let mut off = vec![S::zero(); n - 1];
        for &(i, j, v) in &self.entries {
            if j != i + 1 || v == S::zero() {
                return None;
            }
            off[i] = v;
        }
        Some((self.diag.clone(), off))
    }

    fn to_dense(&self) -> DenseSym<S> {
        let mut m = DenseSym::zeros(self.n());
        for (i, &d) in self.diag.iter().enumerate() {
            m.add_sym(i, i, d);
        }
        for &(i, j, v) in &self.entries {
            m.add_sym(i, j, v);
        }
        m
    }

    fn residual(&self, g: &[S], lambda: S) -> S {
        let mut out: Vec<S> = self.diag.iter().zip(g).map(|(&d, &x)| (d - lambda) * x).collect();
        for &(i, j, v) in &self.entries {
            out[i] += v * g[j];
            out[j] += v * g[i];
        }
        out.iter().map(|&r| r * r).sum::<S>().sqrt()
    }

    fn solve(&self, target: Target<'_, S>) -> Result<(S, Vec<S>, Method)> {
        let n = self.n();
        if n == 1 {
            if let Target::AboveGround(_) = target {
                return Err(Error::DegenerateSubset("the spectral gap needs at least two states".into()));
            }
            return Ok((self.diag[0], vec![S::one()], Method::Trivial));
        }
        if let Some((diag, off)) = self.as_tridiagonal() {
            let k = match target {
                Target::Lowest => 0,
                Target::AboveGround(_) => 1,
            };
            let lambda = tridiagonal::kth_eigenvalue(&diag, &off, k);
            let mut g = tridiagonal::inverse_iteration(&diag, &off, lambda);
            if let Target::AboveGround(u) = target {
                project_out(&mut g, u);
            }
            return Ok((lambda, g, Method::TridiagonalBisection));
        }
        let mut m = self.to_dense();
        if let Target::AboveGround(u) = target {
            // push the ground state above the rest of the spectrum
            let c = m.gershgorin_upper().abs() + S::one();
            for i in 0..n {
                for j in i..n {
                    m.add_sym(i, j, c * u[i] * u[j]);
                }
            }
        }
        let (lambda, mut g, method) = if n <= JACOBI_LIMIT {
            let (values, vectors) = dense::jacobi(&m)?;
            (values[0], vectors[0].clone(), Method::Jacobi)
        } else {
            let (lambda, g) = dense::smallest_householder(&m);
            (lambda, g, Method::Householder)
        };
        if let Target::AboveGround(u) = target {
            project_out(&mut g, u);
        }
        Ok((lambda, g, method))
    }
}

fn project_out<S: Scalar>(g: &mut [S], u: &[S]) {
    let dot: S = g.iter().zip(u).map(|(&a, &b)| a * b).sum();
    for (x, &ui) in g.iter_mut().zip(u) {
        *x -= dot * ui;
    }
    tridiagonal::normalize(g);
}

fn sqrt_pi<S: Scalar>(pi: &[S]) -> Vec<S> {
    pi.iter().map(|p| p.sqrt()).collect()
}

fn eigenfunction<S: Scalar>(g: &[S], sqrt_pi: &[S]) -> Vec<S> {
    g.iter().zip(sqrt_pi).map(|(&x, &s)| x / s).collect()
}

fn connected<S: Scalar>(form: &SymmetricJumpForm<S>) -> bool {
    let n = form.n();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for &(j, _) in form.neighbors(i) {
            if !seen[j] {
                seen[j] = true;
                count += 1;
                stack.push(j);
            }
        }
    }
    count == n
}

fn form_operator<S: Scalar>(form: &SymmetricJumpForm<S>, members: &[usize]) -> Operator<S> {
    let pi = form.pi();
    let mut local = vec![usize::MAX; form.n()];
    for (k, &i) in members.iter().enumerate() {
        local[i] = k;
    }
    let diag = members
        .iter()
        .map(|&i| (form.out_mass(i) + form.killing()[i]) / pi[i])
        .collect();
    let mut entries = Vec::new();
    for (a, &i) in members.iter().enumerate() {
        for &(j, w) in form.neighbors(i) {
            let b = local[j];
            if b != usize::MAX && b > a {
                entries.push((a, b, -w / (pi[i] * pi[j]).sqrt()));
            }
        }
    }
    Operator { diag, entries }
}

/// `D(f,f) / π(f²)`.
pub fn rayleigh_quotient<S: Scalar>(form: &SymmetricJumpForm<S>, f: &[S]) -> S {
    form.dirichlet(f) / form.pi_norm2(f)
}

/// `λ₀ = inf{D(f,f) : π(f²) = 1}`.
pub fn lambda0_exact<S: Scalar>(form: &SymmetricJumpForm<S>) -> Result<SpectralResult<S>> {
    let root = sqrt_pi(form.pi());
    if !form.has_killing() {
        return Ok(SpectralResult {
            value: S::zero(),
            eigvec: Some(vec![S::one(); form.n()]),
            symmetric_vector: root,
            residual: S::zero(),
            method: Method::Trivial,
            disconnected: !connected(form),
        });
    }
    let members: Vec<usize> = (0..form.n()).collect();
    let op = form_operator(form, &members);
    let (value, g, method) = op.solve(Target::Lowest)?;
    Ok(SpectralResult {
        value,
        eigvec: Some(eigenfunction(&g, &root)),
        residual: op.residual(&g, value),
        symmetric_vector: g,
        method,
        disconnected: !connected(form),
    })
}

/// `λ₁ = inf{D(f,f) : π(f) = 0, π(f²) = 1}`; requires `K = 0`.
pub fn lambda1_exact<S: Scalar>(form: &SymmetricJumpForm<S>) -> Result<SpectralResult<S>> {
    if form.has_killing() {
        return Err(Error::KillingPresent);
    }
    if form.n() < 2 {
        return Err(Error::DegenerateSubset("the spectral gap needs at least two states".into()));
    }
    let root = sqrt_pi(form.pi());
    let members: Vec<usize> = (0..form.n()).collect();
    let op = form_operator(form, &members);
    let (value, g, method) = op.solve(Target::AboveGround(&root))?;
    let disconnected = !connected(form);
    Ok(SpectralResult {
        value: if disconnected { S::zero() } else { value },
        eigvec: Some(eigenfunction(&g, &root)),
        residual: op.residual(&g, value),
        symmetric_vector: g,
        method,
        disconnected,
    })
}

/// `λ₀(B) = inf{D(f,f) : π(f²) = 1, f = 0 off B}`. Jumps leaving `B` act as
/// killing. The eigenfunction is returned on the whole space.
pub fn dirichlet_lambda0<S: Scalar>(form: &SymmetricJumpForm<S>, set: &Subset) -> Result<SpectralResult<S>> {
    set.require_nonempty()?;
    if set.len() == form.n() {
        return lambda0_exact(form);
    }
    let members = set.members();
    let op = form_operator(form, members);
    let (value, g, method) = op.solve(Target::Lowest)?;
    let pi = form.pi();
    let mut f = vec![S::zero(); form.n()];
    let mut full_g = vec![S::zero(); form.n()];
    for (k, &i) in members.iter().enumerate() {
        f[i] = g[k] / pi[i].sqrt();
        full_g[i] = g[k];
    }
    Ok(SpectralResult {
        value,
        eigvec: Some(f),
        residual: op.residual(&g, value),
        symmetric_vector: full_g,
        method,
        disconnected: false,
    })
}

/// Spectral gap of the interior form on `B` under `π(·∩B)/π(B)`. The
/// eigenfunction is indexed by the members of `B` in increasing order.
pub fn neumann_lambda1<S: Scalar>(form: &SymmetricJumpForm<S>, set: &Subset) -> Result<SpectralResult<S>> {
    set.require_nonempty()?;
    if set.len() < 2 {
        return Err(Error::DegenerateSubset("Neumann gap needs |B| >= 2".into()));
    }
    let (local, _) = form.neumann_restriction(set)?;
    lambda1_exact(&local)
}

fn birth_death_operator<S: Scalar>(chain: &BirthDeathChain<S>, start: usize) -> Operator<S> {
    let n = chain.levels();
    let diag = (start..=n).map(|i| chain.death(i) + chain.birth(i)).collect();
    let entries = (start..n)
        .map(|i| (i - start, i - start + 1, -(chain.birth(i) * chain.death(i + 1)).sqrt()))
        .collect();
    Operator { diag, entries }
}

/// Spectral gap of a truncated birth-death chain from its rates alone.
pub fn birth_death_lambda1<S: Scalar>(chain: &BirthDeathChain<S>) -> Result<SpectralResult<S>> {
    let op = birth_death_operator(chain, 0);
    let pi = chain.stationary().ok();
    let root = pi.as_deref().map(sqrt_pi);
    let (diag, off) = op.as_tridiagonal().expect("birth-death rates are positive");
    let value = tridiagonal::kth_eigenvalue(&diag, &off, 1);
    let mut g = tridiagonal::inverse_iteration(&diag, &off, value);
    if let Some(u) = &root {
        project_out(&mut g, u);
    }
    Ok(SpectralResult {
        value,
        eigvec: root.as_deref().map(|u| eigenfunction(&g, u)),
        residual: tridiagonal::residual(&diag, &off, &g, value),
        symmetric_vector: g,
        method: Method::TridiagonalBisection,
        disconnected: false,
    })
}

/// `λ₀({start, …, N})`: Dirichlet condition on `{0, …, start − 1}`.
pub fn birth_death_dirichlet<S: Scalar>(chain: &BirthDeathChain<S>, start: usize) -> Result<SpectralResult<S>> {
    let n = chain.levels();
    if start > n {
        return Err(Error::EmptySubset);
    }
    let op = birth_death_operator(chain, start);
    let (value, g, method) = op.solve(Target::Lowest)?;
    let eigvec = chain.stationary().ok().map(|pi| {
        let mut f = vec![S::zero(); n + 1];
        for (k, &x) in g.iter().enumerate() {
            f[start + k] = x / pi[start + k].sqrt();
        }
        f
    });
    let mut full_g = vec![S::zero(); n + 1];
    full_g[start..].copy_from_slice(&g);
    Ok(SpectralResult {
        value,
        eigvec,
        residual: op.residual(&g, value),
        symmetric_vector: full_g,
        method,
        disconnected: false,
    })
}

/// `λ₁({0, …, end})` of the interior form (original jump masses, variance
/// under `π^B`). This is `π(B)` times the gap of the chain reflected at
/// `end`.
pub fn birth_death_neumann<S: Scalar>(chain: &BirthDeathChain<S>, end: usize) -> Result<SpectralResult<S>> {
    if end == 0 {
        return Err(Error::DegenerateSubset("Neumann gap needs |B| >= 2".into()));
    }
    let mut result = birth_death_lambda1(&chain.truncated(end)?)?;
    let head = chain.head_ratios()[end];
    let tail = chain.tail_ratios()[end];
    // π({0..end}) = H_end π_end with π_end = 1 / (H_end + T_end − 1)
    let mass = head / (head + tail - S::one());
    result.value *= mass;
    result.residual *= mass;
    Ok(result)
}

/// One row of a birth-death truncation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<S> {
    pub levels: usize,
    pub lambda1: S,
    /// `λ₀({1, …, N})`, the Dirichlet eigenvalue away from the origin.
    pub lambda0_off_origin: S,
    /// `λ₀({1, …, N}) / π_0`, the upper bound on `λ₁` with `A = {0}`.
    pub upper_off_origin: S,
}

fn check_increasing(levels: &[usize]) -> Result<()> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams("sweep levels must be strictly increasing".into()));
    }
    Ok(())
}

/// Exact values at each truncation level. Levels are evaluated in parallel.
pub fn truncation_sweep<S: Scalar>(spec: &BirthDeathSpec, levels: &[usize]) -> Result<Vec<SweepRow<S>>> {
    check_increasing(levels)?;
    let Some(&top) = levels.last() else {
        return Ok(Vec::new());
    };
    let full: BirthDeathChain<S> = spec.with_levels(top).rates()?;
    levels
        .par_iter()
        .map(|&n| {
            let chain = full.truncated(n)?;
            let lambda1 = birth_death_lambda1(&chain)?.value;
            let lambda0 = birth_death_dirichlet(&chain, 1)?.value;
            // 1/π_0 = Σ_j π_j/π_0, the tail ratio at the origin
            let inv_pi0 = chain.tail_ratios()[0];
            Ok(SweepRow {
                levels: n,
                lambda1,
                lambda0_off_origin: lambda0,
                upper_off_origin: lambda0 * inv_pi0,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSweepRow<S> {
    pub radius: usize,
    pub states: usize,
    pub lambda1: S,
}

/// Dense spectral gaps of the box truncations at each radius.
pub fn lattice_sweep<S: Scalar>(spec: &LatticeChainSpec, radii: &[usize]) -> Result<Vec<LatticeSweepRow<S>>> {
    check_increasing(radii)?;
    radii
        .par_iter()
        .map(|&radius| {
            let boxed = LatticeChainSpec { radius, ..spec.clone() };
            let chain = boxed.build::<S>()?;
            let form = form_from_rates(&chain)?;
            Ok(LatticeSweepRow {
                radius,
                states: boxed.n(),
                lambda1: lambda1_exact(&form)?.value,
            })
        })
        .collect()
}
