//! Isomorphism-reduced enumeration of small cycle sets and the census built
//! on it.

pub mod census;
pub mod search;

use std::collections::BTreeSet;

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::qcycle::QCycleSet;

pub use census::{classification_report, classify, Budget, CensusOutcome, ClassRecord, ClassificationRecord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Filter {
    pub indecomposable: bool,
}

pub(crate) fn table_to_cycle_set(n: usize, t: &[u8]) -> Result<QCycleSet> {
    let flat: Vec<u32> = t.iter().map(|&v| v as u32).collect();
    QCycleSet::from_flat(n, flat.clone(), flat)
}

/// One cycle set per isomorphism class, in canonical form, sorted by table.
pub fn enumerate_cycle_sets(n: usize, filter: Filter) -> Result<Vec<QCycleSet>> {
    if n == 0 || n > search::MAX_N {
        return Err(Error::SizeOutOfRange(n));
    }
    let (tables, _) = search::enumerate_tables(search::SearchOptions { n, indecomposable: filter.indecomposable });
    canonical_sorted(n, &tables)
}

pub(crate) fn canonical_sorted(n: usize, tables: &[Vec<u8>]) -> Result<Vec<QCycleSet>> {
    let mut out = Vec::with_capacity(tables.len());
    for t in tables {
        let x = table_to_cycle_set(n, t)?;
        out.push(canonical_form(&x).form);
    }
    out.sort_by(|a, b| a.sigma_flat().cmp(b.sigma_flat()));
    let before = out.len();
    out.dedup();
    if out.len() != before {
        return Err(Error::Internal("search emitted two isomorphic tables".into()));
    }
    Ok(out)
}

/// Number of labeled structures in the class of `x`: `n! / |Aut(x)|`.
pub fn labeled_count(x: &QCycleSet) -> u64 {
    let fact: u64 = (1..=x.n() as u64).product();
    fact / crate::canon::automorphisms(x).len() as u64
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    fn go(k: usize, p: &mut Vec<usize>, out: &mut Vec<Permutation>) {
        if k == p.len() {
            out.push(Permutation::from_images(p.clone()).expect("a permutation"));
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            go(k + 1, p, out);
            p.swap(k, i);
        }
    }
    let mut out = Vec::new();
    go(0, &mut (0..n).collect(), &mut out);
    out
}

/// Non-degenerate q-cycle sets of size `n ≤ 4` up to isomorphism, both
/// operations free. Rows are chosen as pairs `(σ_x, δ_x)` and every axiom
/// instance is checked as soon as the rows it reads are fixed.
pub fn enumerate_qcycle_sets(n: usize, filter: Filter) -> Result<Vec<QCycleSet>> {
    if n == 0 || n > 4 {
        return Err(Error::SizeOutOfRange(n));
    }
    let perms: Vec<Vec<u32>> = all_permutations(n).iter().map(|p| p.images().iter().map(|&v| v as u32).collect()).collect();
    let mut found = BTreeSet::new();
    let mut sigma = vec![0u32; n * n];
    let mut delta = vec![0u32; n * n];
    rows(n, 0, &perms, &mut sigma, &mut delta, &mut |s, d| {
        let x = QCycleSet::from_flat_unchecked(n, s.to_vec(), d.to_vec());
        if x.is_nondegenerate() && (!filter.indecomposable || crate::analysis::is_indecomposable(&x)) {
            let c = canonical_form(&x).form;
            found.insert((c.sigma_flat().to_vec(), c.delta_flat().to_vec()));
        }
    });
    found
        .into_iter()
        .map(|(s, d)| QCycleSet::from_flat(n, s, d))
        .collect()
}

fn rows(
    n: usize,
    x: usize,
    perms: &[Vec<u32>],
    sigma: &mut [u32],
    delta: &mut [u32],
    emit: &mut dyn FnMut(&[u32], &[u32]),
) {
    if x == n {
        emit(sigma, delta);
        return;
    }
    for ps in perms {
        sigma[x * n..(x + 1) * n].copy_from_slice(ps);
        for pd in perms {
            delta[x * n..(x + 1) * n].copy_from_slice(pd);
            if partial_axioms_hold(n, x + 1, sigma, delta) {
                rows(n, x + 1, perms, sigma, delta, emit);
            }
        }
    }
}

/// q1–q3 on every instance whose row lookups all fall in rows `< known`;
/// instances reading a later row pass vacuously.
fn partial_axioms_hold(n: usize, known: usize, s: &[u32], d: &[u32]) -> bool {
    let get = |t: &[u32], a: usize, b: usize| if a < known { Some(t[a * n + b] as usize) } else { None };
    let dot = |a: usize, b: usize| get(s, a, b);
    let col = |a: usize, b: usize| get(d, a, b);
    let eq = |l: Option<usize>, r: Option<usize>| match (l, r) {
        (Some(l), Some(r)) => l == r,
        _ => true,
    };
    let ap = |f: &dyn Fn(usize, usize) -> Option<usize>, a: Option<usize>, b: Option<usize>| match (a, b) {
        (Some(a), Some(b)) => f(a, b),
        _ => None,
    };
    for x in 0..known {
        for y in 0..known {
            for z in 0..n {
                let q1 = eq(ap(&dot, dot(x, y), dot(x, z)), ap(&dot, col(y, x), dot(y, z)));
                let q2 = eq(ap(&col, col(x, y), col(x, z)), ap(&col, dot(y, x), col(y, z)));
                let q3 = eq(ap(&col, dot(x, y), dot(x, z)), ap(&dot, col(y, x), col(y, z)));
                if !(q1 && q2 && q3) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cycle_set_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| enumerate_cycle_sets(n, Filter::default()).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 23]);
    }

    #[test]
    fn labeled_counts_sum_to_brute_force_totals() {
        // Labeled cycle sets of size 2: trivial and the swap structure.
        let total: u64 = enumerate_cycle_sets(2, Filter::default()).unwrap().iter().map(labeled_count).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn qcycle_utility_contains_the_cycle_sets() {
        for n in 1..=3 {
            let general = enumerate_qcycle_sets(n, Filter::default()).unwrap();
            let cycle: Vec<_> = general.iter().filter(|x| x.is_cycle_set()).collect();
            assert_eq!(cycle.len(), enumerate_cycle_sets(n, Filter::default()).unwrap().len());
        }
    }
}
