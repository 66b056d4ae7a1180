//! The brace on the permutation group of a finite cycle set.
//!
//! Elements are permutations `g_a` indexed by multisets `a` of points, with
//! `g_∅ = id`. Addition is multiset union, multiplication is composition.
//! Under [`Convention::Primary`] `g_{a+e_x} = σ_{g_a(x)} ∘ g_a`; under
//! [`Convention::Mirrored`] every element is replaced by its inverse, so
//! `g_{a+e_x} = g_a ∘ σ⁻¹_{g_a⁻¹(x)}`. The result is only returned after
//! passing full brace validation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::analysis::retraction_tower;
use crate::brace::SkewBrace;
use crate::canon::are_isomorphic;
use crate::error::{Error, Result};
use crate::perm::{group_closure, Permutation, PermGroupClosure};
use crate::qcycle::QCycleSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Primary,
    Mirrored,
}

#[derive(Clone, Debug)]
pub struct PermBrace {
    pub brace: SkewBrace,
    /// Element `i` of the brace; sorted by image list, identity first.
    pub elements: Vec<Permutation>,
    /// One multiset per element, as a list of 0-based points in the order
    /// they were added.
    pub reps: Vec<Vec<usize>>,
    pub convention: Convention,
    /// `σ_x` for each point.
    pub sigmas: Vec<Permutation>,
}

impl PermBrace {
    /// Element index of a group member.
    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        self.elements.binary_search(g).ok()
    }

    /// `g_a` folded over `points` in the given order.
    pub fn fold(&self, points: &[usize]) -> Permutation {
        fold(&self.sigmas, self.convention, points)
    }

    /// Index of `g_{e_x}`.
    pub fn generator_index(&self, x: usize) -> usize {
        self.index_of(&self.fold(&[x])).expect("generators are elements")
    }

    /// Cycle notation of each element, keyed by index.
    pub fn sidecar(&self) -> Vec<String> {
        self.elements.iter().map(|g| g.to_string()).collect()
    }
}

/// `𝒢(X)`, the group generated by all `σ_x`.
pub fn permutation_group(x: &QCycleSet) -> Result<PermGroupClosure> {
    if !x.is_cycle_set() {
        return Err(Error::NotInvolutive);
    }
    x.require_nondegenerate()?;
    group_closure(&(0..x.n()).map(|p| x.sigma(p)).collect::<Vec<_>>())
}

fn step(sigmas: &[Permutation], c: Convention, g: &Permutation, x: usize) -> Permutation {
    match c {
        Convention::Primary => sigmas[g.apply(x)].then_unchecked(g),
        Convention::Mirrored => g.then_unchecked(&sigmas[g.inverse().apply(x)].inverse()),
    }
}

fn fold(sigmas: &[Permutation], c: Convention, points: &[usize]) -> Permutation {
    let n = sigmas.len();
    points.iter().fold(Permutation::identity(n), |g, &x| step(sigmas, c, &g, x))
}

fn build(x: &QCycleSet, group: &PermGroupClosure, c: Convention) -> Result<PermBrace> {
    let n = x.n();
    let sigmas: Vec<Permutation> = (0..n).map(|p| x.sigma(p)).collect();
    let inconsistent = |m: String| Error::ConstructionInconsistent(format!("{c:?}: {m}"));
    // Breadth-first additive closure from the identity.
    let mut reps: HashMap<Permutation, Vec<usize>> = HashMap::new();
    let id = Permutation::identity(n);
    reps.insert(id.clone(), Vec::new());
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for p in 0..n {
                let h = step(&sigmas, c, g, p);
                if !reps.contains_key(&h) {
                    let mut r = reps[g].clone();
                    r.push(p);
                    reps.insert(h.clone(), r);
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    if reps.len() != group.order() || reps.keys().any(|g| !group.contains(g)) {
        return Err(inconsistent(format!("additive closure has {} elements, the group {}", reps.len(), group.order())));
    }
    let elements = group.elements.clone();
    let size = elements.len();
    let index: HashMap<&Permutation, u32> = elements.iter().enumerate().map(|(i, g)| (g, i as u32)).collect();
    let reps: Vec<Vec<usize>> = elements.iter().map(|g| reps[g].clone()).collect();
    let mut add = Vec::with_capacity(size * size);
    let mut mul = Vec::with_capacity(size * size);
    for g in &elements {
        for (h, rh) in elements.iter().zip(&reps) {
            let sum = rh.iter().fold(g.clone(), |acc, &p| step(&sigmas, c, &acc, p));
            add.push(index[&sum]);
            mul.push(index[&g.then_unchecked(h)]);
        }
    }
    let brace = SkewBrace::from_flat(size, add, mul).map_err(|e| inconsistent(e.to_string()))?;
    if !brace.is_abelian() {
        return Err(inconsistent("additive group is not abelian".into()));
    }
    Ok(PermBrace { brace, elements, reps, convention: c, sigmas })
}

/// Builds and validates the permutation brace, trying the primary then the
/// mirrored convention.
pub fn permutation_brace(x: &QCycleSet) -> Result<PermBrace> {
    let group = permutation_group(x)?;
    match build(x, &group, Convention::Primary) {
        Ok(b) => Ok(b),
        Err(Error::ConstructionInconsistent(first)) => build(x, &group, Convention::Mirrored).map_err(|e| match e {
            Error::ConstructionInconsistent(second) => Error::ConstructionInconsistent(format!("{first}; {second}")),
            other => other,
        }),
        Err(e) => Err(e),
    }
}

/// For irretractable `X`: whether some transitive cycle base of its
/// permutation brace is isomorphic to `X`.
pub fn irretractable_base_check(x: &QCycleSet) -> Result<bool> {
    if !x.is_cycle_set() {
        return Err(Error::NotInvolutive);
    }
    if !retraction_tower(x)?.is_irretractable() {
        return Err(Error::NotIrretractable);
    }
    let pb = permutation_brace(x)?;
    Ok(pb
        .brace
        .transitive_cycle_bases()?
        .iter()
        .any(|b| b.structure.n() == x.n() && are_isomorphic(&b.structure, x).is_some()))
}
