//! Symmetric forms `D(f,f) = ½ Σ J_ij (f_i − f_j)² + Σ K_i f_i²` on a finite
//! state space, reversible rate chains, and the modified forms built from
//! normalising weights.

mod birth_death;
pub mod fixtures;
mod kernel;
mod lattice;
mod modified;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{fmax, Scalar};
use crate::subset::Subset;

pub use birth_death::{BirthDeathChain, BirthDeathSpec};
pub use kernel::{form_from_kernel, KernelForm};
pub use lattice::LatticeChainSpec;
pub use modified::{
    check_normalization, default_r_s, default_weights, modified_form, Alpha, ModifiedFormParams,
    NormalizationReport,
};

/// The pair `(J, K)` with reference measure `π`.
///
/// `J` is stored per ordered pair: `jump(i, j)` is the mass on `(i, j)` and
/// `J(A × Aᶜ) = Σ_{i∈A, j∉A} J_ij`. Construction enforces exact symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricJumpForm<S> {
    pi: Vec<S>,
    adj: Vec<Vec<(usize, S)>>,
    killing: Vec<S>,
}

pub(crate) fn validate_measure<S: Scalar>(pi: &[S]) -> Result<()> {
    if pi.is_empty() {
        return Err(Error::InvalidMeasure("state space is empty".into()));
    }
    for (i, &p) in pi.iter().enumerate() {
        if !(p > S::zero()) || !p.is_finite() {
            return Err(Error::InvalidMeasure(format!("π_{i} = {p} is not positive")));
        }
    }
    let total: S = pi.iter().copied().sum();
    if (total - S::one()).abs().to_f64_lossy() > S::NORMALIZATION_TOL {
        return Err(Error::InvalidMeasure(format!("π sums to {total}")));
    }
    Ok(())
}

impl<S: Scalar> SymmetricJumpForm<S> {
    /// Builds a form from unordered pairs `(i, j, w)`, each meaning
    /// `J_ij = J_ji = w`. Repeated pairs accumulate.
    pub fn new(
        pi: Vec<S>,
        pairs: impl IntoIterator<Item = (usize, usize, S)>,
        killing: Vec<S>,
    ) -> Result<Self> {
        validate_measure(&pi)?;
        let n = pi.len();
        if killing.len() != n {
            return Err(Error::InvalidForm(format!(
                "killing vector has length {}, expected {n}",
                killing.len()
            )));
        }
        for (i, &k) in killing.iter().enumerate() {
            if !(k >= S::zero()) || !k.is_finite() {
                return Err(Error::InvalidForm(format!("K_{i} = {k} is not a finite nonnegative number")));
            }
        }
        let mut acc: BTreeMap<(usize, usize), S> = BTreeMap::new();
        for (i, j, w) in pairs {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            if i == j {
                return Err(Error::InvalidForm(format!("diagonal jump mass at state {i}")));
            }
            if !(w >= S::zero()) || !w.is_finite() {
                return Err(Error::InvalidForm(format!("J_{i}{j} = {w} is not a finite nonnegative number")));
            }
            *acc.entry((i.min(j), i.max(j))).or_insert_with(S::zero) += w;
        }
        let mut adj = vec![Vec::new(); n];
        for ((i, j), w) in acc {
            if w > S::zero() {
                adj[i].push((j, w));
                adj[j].push((i, w));
            }
        }
        for row in &mut adj {
            row.sort_by_key(|&(j, _)| j);
        }
        Ok(Self { pi, adj, killing })
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[S] {
        &self.pi
    }

    pub fn killing(&self) -> &[S] {
        &self.killing
    }

    pub fn has_killing(&self) -> bool {
        self.killing.iter().any(|&k| k > S::zero())
    }

    /// Neighbours of `i` with their jump mass, sorted by index.
    pub fn neighbors(&self, i: usize) -> &[(usize, S)] {
        &self.adj[i]
    }

    pub fn jump(&self, i: usize, j: usize) -> S {
        self.adj[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map_or(S::zero(), |pos| self.adj[i][pos].1)
    }

    /// Unordered pairs `(i, j, J_ij)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().filter(move |&&(j, _)| j > i).map(move |&(j, w)| (i, j, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// `J(i, E) = Σ_j J_ij`.
    pub fn out_mass(&self, i: usize) -> S {
        self.adj[i].iter().map(|&(_, w)| w).sum()
    }

    /// Total rate `q_i = (J(i, E) + K_i) / π_i` of the associated chain.
    pub fn total_rate(&self, i: usize) -> S {
        (self.out_mass(i) + self.killing[i]) / self.pi[i]
    }

    /// `max_i (J(i, E) + K_i) / π_i`, the operator norm on `L¹₊(π)`.
    pub fn max_density(&self) -> S {
        (0..self.n()).map(|i| self.total_rate(i)).fold(S::zero(), fmax)
    }

    /// `max_i (J(i, E) + K_i / 2) / π_i`, the constant of the classical bounds.
    pub fn classical_m(&self) -> S {
        let half = S::of(0.5);
        (0..self.n())
            .map(|i| (self.out_mass(i) + half * self.killing[i]) / self.pi[i])
            .fold(S::zero(), fmax)
    }

    pub fn dirichlet(&self, f: &[S]) -> S {
        let mut total = S::zero();
        for (i, j, w) in self.edges() {
            let d = f[i] - f[j];
            total += w * d * d;
        }
        for (k, &x) in self.killing.iter().zip(f) {
            total += *k * x * x;
        }
        total
    }

    pub fn pi_mean(&self, f: &[S]) -> S {
        self.pi.iter().zip(f).map(|(&p, &x)| p * x).sum()
    }

    pub fn pi_norm2(&self, f: &[S]) -> S {
        self.pi.iter().zip(f).map(|(&p, &x)| p * x * x).sum()
    }

    pub fn pi_of(&self, set: &Subset) -> S {
        set.members().iter().map(|&i| self.pi[i]).sum()
    }

    /// `J(A × Aᶜ)`.
    pub fn cut(&self, set: &Subset) -> S {
        set.members()
            .iter()
            .flat_map(|&i| self.adj[i].iter())
            .filter(|&&(j, _)| !set.contains(j))
            .map(|&(_, w)| w)
            .sum()
    }

    pub fn killing_of(&self, set: &Subset) -> S {
        set.members().iter().map(|&i| self.killing[i]).sum()
    }

    /// Same `(J, K)` over a different reference measure.
    pub fn with_measure(&self, pi: Vec<S>) -> Result<Self> {
        validate_measure(&pi)?;
        if pi.len() != self.n() {
            return Err(Error::InvalidMeasure(format!(
                "measure has length {}, expected {}",
                pi.len(),
                self.n()
            )));
        }
        Ok(Self {
            pi,
            adj: self.adj.clone(),
            killing: self.killing.clone(),
        })
    }

    /// Same measure with every jump mass passed through `map(i, j, J_ij)`
    /// and every killing mass through `kill(i, K_i)`.
    pub(crate) fn map_masses(
        &self,
        mut map: impl FnMut(usize, usize, S) -> S,
        mut kill: impl FnMut(usize, S) -> S,
    ) -> Self {
        let mut adj = self.adj.clone();
        for (i, row) in adj.iter_mut().enumerate() {
            for entry in row.iter_mut() {
                let (a, b) = (i.min(entry.0), i.max(entry.0));
                entry.1 = map(a, b, entry.1);
            }
        }
        let killing = self
            .killing
            .iter()
            .enumerate()
            .map(|(i, &k)| if k > S::zero() { kill(i, k) } else { k })
            .collect();
        Self {
            pi: self.pi.clone(),
            adj,
            killing,
        }
    }

    /// The interior form on `B` with conditioned measure `π(·∩B)/π(B)`;
    /// edges leaving `B` and killing are dropped. Returns the form and the
    /// map from local to global indices.
    pub fn neumann_restriction(&self, set: &Subset) -> Result<(Self, Vec<usize>)> {
        set.require_nonempty()?;
        let members = set.members().to_vec();
        let mut local = vec![usize::MAX; self.n()];
        for (k, &i) in members.iter().enumerate() {
            local[i] = k;
        }
        let mass = self.pi_of(set);
        let pi: Vec<S> = members.iter().map(|&i| self.pi[i] / mass).collect();
        let mut adj = vec![Vec::new(); members.len()];
        for (k, &i) in members.iter().enumerate() {
            for &(j, w) in &self.adj[i] {
                if set.contains(j) {
                    adj[k].push((local[j], w));
                }
            }
        }
        let killing = vec![S::zero(); members.len()];
        Ok((Self { pi, adj, killing }, members))
    }
}

/// Reversible rates `q_ij` with total rates `q_i = Σ_j q_ij + d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateChain<S> {
    pi: Vec<S>,
    rates: Vec<Vec<(usize, S)>>,
    total: Vec<S>,
    defect: Vec<S>,
}

fn collect_rates<S: Scalar>(
    n: usize,
    triples: impl IntoIterator<Item = (usize, usize, S)>,
) -> Result<Vec<Vec<(usize, S)>>> {
    let mut acc: BTreeMap<(usize, usize), S> = BTreeMap::new();
    for (i, j, q) in triples {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        if i == j {
            return Err(Error::InvalidForm(format!("diagonal rate at state {i}")));
        }
        if !(q >= S::zero()) || !q.is_finite() {
            return Err(Error::InvalidForm(format!("q_{i}{j} = {q} is not a finite nonnegative number")));
        }
        *acc.entry((i, j)).or_insert_with(S::zero) += q;
    }
    let mut rates = vec![Vec::new(); n];
    for ((i, j), q) in acc {
        if q > S::zero() {
            rates[i].push((j, q));
        }
    }
    Ok(rates)
}

fn clamp_defect<S: Scalar>(defect: Vec<S>, n: usize) -> Result<Vec<S>> {
    if defect.len() != n {
        return Err(Error::InvalidForm(format!(
            "defect vector has length {}, expected {n}",
            defect.len()
        )));
    }
    defect
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            if !d.is_finite() || d.to_f64_lossy() < -S::NORMALIZATION_TOL {
                Err(Error::InvalidForm(format!("d_{i} = {d} is negative")))
            } else {
                Ok(fmax(d, S::zero()))
            }
        })
        .collect()
}

impl<S: Scalar> RateChain<S> {
    pub fn new(
        pi: Vec<S>,
        triples: impl IntoIterator<Item = (usize, usize, S)>,
        defect: Vec<S>,
    ) -> Result<Self> {
        validate_measure(&pi)?;
        let n = pi.len();
        let rates = collect_rates(n, triples)?;
        let defect = clamp_defect(defect, n)?;
        let chain = Self::assemble(pi, rates, defect);
        chain.check_balance()?;
        Ok(chain)
    }

    /// Solves `π` from detailed balance along a spanning tree of the rate
    /// graph, then verifies balance on every pair.
    pub fn from_rates(
        n: usize,
        triples: impl IntoIterator<Item = (usize, usize, S)>,
        defect: Vec<S>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMeasure("state space is empty".into()));
        }
        let rates = collect_rates(n, triples)?;
        let defect = clamp_defect(defect, n)?;
        let rate = |i: usize, j: usize| {
            rates[i]
                .binary_search_by_key(&j, |&(k, _)| k)
                .map_or(S::zero(), |p| rates[i][p].1)
        };
        let mut log_pi: Vec<Option<S>> = vec![None; n];
        log_pi[0] = Some(S::zero());
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let li = log_pi[i].expect("visited");
            for &(j, q) in &rates[i] {
                if log_pi[j].is_some() {
                    continue;
                }
                let back = rate(j, i);
                if back <= S::zero() {
                    return Err(Error::DetailedBalanceViolation { i, j, rel_error: 1.0 });
                }
                log_pi[j] = Some(li + q.ln() - back.ln());
                queue.push_back(j);
            }
        }
        let Some(log_pi) = log_pi.into_iter().collect::<Option<Vec<S>>>() else {
            return Err(Error::InvalidMeasure("rate graph is not connected".into()));
        };
        let pi = normalize_log_weights(&log_pi)?;
        let chain = Self::assemble(pi, rates, defect);
        chain.check_balance()?;
        Ok(chain)
    }

    fn assemble(pi: Vec<S>, rates: Vec<Vec<(usize, S)>>, defect: Vec<S>) -> Self {
        let total = rates
            .iter()
            .zip(&defect)
            .map(|(row, &d)| row.iter().map(|&(_, q)| q).sum::<S>() + d)
            .collect();
        Self {
            pi,
            rates,
            total,
            defect,
        }
    }

    fn check_balance(&self) -> Result<()> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..self.n() {
            for &(j, q) in &self.rates[i] {
                let lhs = self.pi[i] * q;
                let rhs = self.pi[j] * self.rate(j, i);
                let scale = fmax(fmax(lhs, rhs), S::of(1e-300));
                let rel = ((lhs - rhs).abs() / scale).to_f64_lossy();
                if rel > S::BALANCE_TOL && worst.is_none_or(|w| rel > w.2) {
                    worst = Some((i, j, rel));
                }
            }
        }
        match worst {
            Some((i, j, rel_error)) => Err(Error::DetailedBalanceViolation { i, j, rel_error }),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[S] {
        &self.pi
    }

    pub fn rates(&self, i: usize) -> &[(usize, S)] {
        &self.rates[i]
    }

    pub fn rate(&self, i: usize, j: usize) -> S {
        self.rates[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map_or(S::zero(), |p| self.rates[i][p].1)
    }

    /// `q_i`.
    pub fn total(&self, i: usize) -> S {
        self.total[i]
    }

    /// `d_i = q_i − Σ_j q_ij`.
    pub fn defect(&self, i: usize) -> S {
        self.defect[i]
    }

    /// Reads the rates back from a form: `q_ij = J_ij/π_i`, `d_i = K_i/π_i`.
    pub fn from_form(form: &SymmetricJumpForm<S>) -> Self {
        let pi = form.pi().to_vec();
        let rates = (0..form.n())
            .map(|i| form.neighbors(i).iter().map(|&(j, w)| (j, w / pi[i])).collect())
            .collect();
        let defect = (0..form.n()).map(|i| form.killing()[i] / pi[i]).collect();
        Self::assemble(pi, rates, defect)
    }
}

/// `π_i = exp(ℓ_i) / Σ_j exp(ℓ_j)`, failing when a weight underflows.
pub(crate) fn normalize_log_weights<S: Scalar>(log_w: &[S]) -> Result<Vec<S>> {
    let top = log_w.iter().copied().fold(S::neg_infinity(), fmax);
    let z: S = log_w.iter().map(|&l| (l - top).exp()).sum();
    let log_z = top + z.ln();
    log_w
        .iter()
        .enumerate()
        .map(|(state, &l)| {
            let p = (l - log_z).exp();
            if p < S::min_positive_value() {
                Err(Error::MeasureUnderflow { state })
            } else {
                Ok(p)
            }
        })
        .collect()
}

/// `J_ij = (π_i q_ij + π_j q_ji)/2`, `K_i = π_i d_i`.
pub fn form_from_rates<S: Scalar>(chain: &RateChain<S>) -> Result<SymmetricJumpForm<S>> {
    chain.check_balance()?;
    let half = S::of(0.5);
    let pi = chain.pi();
    let mut pairs = Vec::new();
    for i in 0..chain.n() {
        for &(j, q) in chain.rates(i) {
            // balance guarantees q_ji > 0, so the pair is also seen from j
            if j > i {
                pairs.push((i, j, half * (pi[i] * q + pi[j] * chain.rate(j, i))));
            }
        }
    }
    let killing = (0..chain.n()).map(|i| pi[i] * chain.defect(i)).collect();
    SymmetricJumpForm::new(pi.to_vec(), pairs, killing)
}
