//! Local isoperimetric quantities on a subset `B`.
//!
//! * `k(B)`: the two-sided constant of the interior form on `B` under the
//!   conditioned measure `π(·∩B)/π(B)`,
//! * `h_B = inf_{∅≠A⊆B} J(A×Aᶜ)/π(A)` with the complement taken in the
//!   whole space,
//! * `M_A = max_{i∈A} J(i, Aᶜ)/π_i`.
//!
//! Sets too large to enumerate fall back on spectral lower bounds:
//! `k(B) ≥ λ₁(B)` and `h_B ≥ λ₀(B)` (test `λ₀(B)` against indicators).

use crate::cheeger::{SetSystem, MAX_ENUMERATION};
use crate::error::{Error, Result};
use crate::forms::{modified_form, ModifiedFormParams, SymmetricJumpForm};
use crate::scalar::{fmax, Scalar};
use crate::spectral::{dirichlet_lambda0, neumann_lambda1};
use crate::subset::Subset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalMode {
    /// Exact values only; sets beyond the enumeration limit are an error.
    Enumerate,
    /// Fall back on spectral lower bounds for large sets.
    AllowSpectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalValue<S> {
    pub value: S,
    /// Minimising set in global indices when the value is exact.
    pub witness: Option<Subset>,
    /// `false` when `value` is only a lower bound.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalQuantities<S> {
    pub k_b: LocalValue<S>,
    pub h_b: LocalValue<S>,
    /// `h_{Bᶜ}`; absent when `B` is the whole space.
    pub h_complement: Option<LocalValue<S>>,
    pub m_a: Option<S>,
    pub m_b: S,
    pub pi_b: S,
}

/// `max_{i∈A} J(i, Aᶜ)/π_i`.
pub fn boundary_density<S: Scalar>(form: &SymmetricJumpForm<S>, set: &Subset) -> S {
    set.members()
        .iter()
        .map(|&i| {
            let out: S = form
                .neighbors(i)
                .iter()
                .filter(|&&(j, _)| !set.contains(j))
                .map(|&(_, w)| w)
                .sum();
            out / form.pi()[i]
        })
        .fold(S::zero(), fmax)
}

fn witness(set: &Subset, mask: u32) -> Subset {
    let members = set.members();
    let picked = (0..members.len()).filter(|k| mask >> k & 1 == 1).map(|k| members[k]);
    Subset::new(set.universe(), picked).expect("members are in range")
}

fn local_system<S: Scalar>(form: &SymmetricJumpForm<S>, set: &Subset, conditioned: bool) -> SetSystem<S> {
    let members = set.members();
    let mut local = vec![usize::MAX; form.n()];
    for (k, &i) in members.iter().enumerate() {
        local[i] = k;
    }
    let mass = if conditioned { form.pi_of(set) } else { S::one() };
    let mut edges = Vec::new();
    let mut boundary = vec![S::zero(); members.len()];
    for (k, &i) in members.iter().enumerate() {
        for &(j, w) in form.neighbors(i) {
            if !set.contains(j) {
                boundary[k] += w;
            } else if j > i {
                edges.push((k, local[j], w));
            }
        }
    }
    SetSystem {
        pi: members.iter().map(|&i| form.pi()[i] / mass).collect(),
        edges,
        boundary: if conditioned { vec![S::zero(); members.len()] } else { boundary },
        killing: vec![S::zero(); members.len()],
    }
}

fn too_large(set: &Subset) -> Error {
    Error::SubsetTooLarge {
        size: set.len(),
        max: MAX_ENUMERATION,
    }
}

/// `k(B)` of `form` (already modified).
pub(crate) fn two_sided<S: Scalar>(form: &SymmetricJumpForm<S>, set: &Subset, mode: LocalMode) -> Result<LocalValue<S>> {
    if set.len() < 2 {
        return Err(Error::DegenerateSubset("k(B) needs |B| >= 2".into()));
    }
    if set.len() <= MAX_ENUMERATION {
        let best = local_system(form, set, true).minima().k;
        return Ok(LocalValue {
            value: best.value,
            witness: Some(witness(set, best.mask)),
            exact: true,
        });
    }
    if mode == LocalMode::Enumerate {
        return Err(too_large(set));
    }
    Ok(LocalValue {
        value: neumann_lambda1(form, set)?.value,
        witness: None,
        exact: false,
    })
}

/// `h_B` of `form` (already modified), ignoring killing.
fn one_sided<S: Scalar>(form: &SymmetricJumpForm<S>, set: &Subset, mode: LocalMode) -> Result<LocalValue<S>> {
    set.require_nonempty()?;
    if set.len() <= MAX_ENUMERATION {
        let best = local_system(form, set, false).minima().h;
        return Ok(LocalValue {
            value: best.value,
            witness: Some(witness(set, best.mask)),
            exact: true,
        });
    }
    if mode == LocalMode::Enumerate {
        return Err(too_large(set));
    }
    let conservative = form.map_masses(|_, _, w| w, |_, _| S::zero());
    Ok(LocalValue {
        value: dirichlet_lambda0(&conservative, set)?.value,
        witness: None,
        exact: false,
    })
}

/// Local quantities of the modified form `J^(α)` on `B`, and `M_A` when `A`
/// is given.
pub fn local_constants<S: Scalar>(
    form: &SymmetricJumpForm<S>,
    a: Option<&Subset>,
    b: &Subset,
    params: &ModifiedFormParams<S>,
    mode: LocalMode,
) -> Result<LocalQuantities<S>> {
    b.require_nonempty()?;
    if b.universe() != form.n() {
        return Err(Error::InvalidParams(format!(
            "B lives on {} states, form has {}",
            b.universe(),
            form.n()
        )));
    }
    if let Some(a) = a {
        a.require_nonempty()?;
        if !a.is_subset_of(b) {
            return Err(Error::SubsetNesting);
        }
    }
    let modified = modified_form(form, params);
    let complement = b.complement();
    let h_complement = if complement.is_empty() {
        None
    } else {
        Some(one_sided(&modified, &complement, mode)?)
    };
    Ok(LocalQuantities {
        k_b: two_sided(&modified, b, mode)?,
        h_b: one_sided(&modified, b, mode)?,
        h_complement,
        m_a: a.map(|a| boundary_density(&modified, a)),
        m_b: boundary_density(&modified, b),
        pi_b: form.pi_of(b),
    })
}
