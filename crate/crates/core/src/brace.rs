//! Finite skew braces as pairs of Cayley tables with identity 0.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::analysis::closure;
use crate::error::{Error, Result};
use crate::perm::{orbits, Permutation};
use crate::qcycle::QCycleSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewBrace {
    n: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    minv: Vec<u32>,
    abelian: bool,
}

/// Checks a Cayley table is a group with identity 0 and returns inverses.
fn check_group(table: &'static str, n: usize, t: &[u32]) -> Result<Vec<u32>> {
    let err = |reason: String| Error::NotGroup { table, reason };
    for a in 0..n {
        if t[a] as usize != a || t[a * n] as usize != a {
            return Err(err(format!("0 is not an identity (element {a})")));
        }
    }
    let mut inv = vec![u32::MAX; n];
    for a in 0..n {
        let mut seen = vec![false; n];
        for b in 0..n {
            let v = t[a * n + b] as usize;
            if std::mem::replace(&mut seen[v], true) {
                return Err(err(format!("row {a} repeats {v}")));
            }
            if v == 0 {
                inv[a] = b as u32;
            }
        }
    }
    for a in 0..n {
        if t[inv[a] as usize * n + a] != 0 {
            return Err(err(format!("left and right inverse of {a} differ")));
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = t[a * n + b] as usize;
            for c in 0..n {
                if t[ab * n + c] != t[a * n + t[b * n + c] as usize] {
                    return Err(err(format!("not associative at ({a}, {b}, {c})")));
                }
            }
        }
    }
    Ok(inv)
}

fn flatten(name: &str, table: &[Vec<usize>]) -> Result<Vec<u32>> {
    let n = table.len();
    let mut out = Vec::with_capacity(n * n);
    for (a, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Shape(format!("{name} row {a} has {} entries, expected {n}", row.len())));
        }
        for &v in row {
            if v >= n {
                return Err(Error::OutOfRange { value: v as i64, n, at: format!("{name} row {a}") });
            }
            out.push(v as u32);
        }
    }
    Ok(out)
}

impl SkewBrace {
    /// Validates two 0-based tables. If both groups share an identity other
    /// than 0, that element and 0 are swapped first.
    pub fn new(add: Vec<Vec<usize>>, mul: Vec<Vec<usize>>) -> Result<SkewBrace> {
        let n = add.len();
        if n == 0 || mul.len() != n {
            return Err(Error::Shape("tables must be non-empty and of equal size".into()));
        }
        SkewBrace::from_flat(n, flatten("add", &add)?, flatten("mul", &mul)?)
    }

    pub fn from_flat(n: usize, add: Vec<u32>, mul: Vec<u32>) -> Result<SkewBrace> {
        if add.len() != n * n || mul.len() != n * n {
            return Err(Error::Shape(format!("tables must have {} entries", n * n)));
        }
        let identity = |t: &[u32]| (0..n).find(|&e| (0..n).all(|a| t[e * n + a] as usize == a && t[a * n + e] as usize == a));
        let e_add = identity(&add).ok_or_else(|| Error::NotGroup { table: "add", reason: "no identity".into() })?;
        let e_mul = identity(&mul).ok_or_else(|| Error::NotGroup { table: "mul", reason: "no identity".into() })?;
        if e_add != e_mul {
            return Err(Error::NotGroup { table: "mul", reason: format!("identity {e_mul} differs from additive {e_add}") });
        }
        let (add, mul) = if e_add == 0 {
            (add, mul)
        } else {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, e_add);
            (renumber(n, &add, &swap), renumber(n, &mul, &swap))
        };
        let neg = check_group("add", n, &add)?;
        let minv = check_group("mul", n, &mul)?;
        let abelian = (0..n).all(|a| (0..n).all(|b| add[a * n + b] == add[b * n + a]));
        let brace = SkewBrace { n, add, mul, neg, minv, abelian };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = brace.mul(a, brace.add(b, c));
                    let rhs = brace.add(brace.sub(brace.mul(a, b), a), brace.mul(a, c));
                    if lhs != rhs {
                        return Err(Error::Compatibility { a, b, c });
                    }
                }
            }
        }
        Ok(brace)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    /// Inverse in `(B, ∘)`, written `a⁻`.
    #[inline]
    pub fn minv(&self, a: usize) -> usize {
        self.minv[a] as usize
    }

    /// `a - b`, meaning `a + (-b)`.
    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `λ_a(b) = -a + a∘b`.
    pub fn lambda(&self, a: usize, b: usize) -> usize {
        self.add(self.neg(a), self.mul(a, b))
    }

    /// `δ_a(b) = a∘b - a`.
    pub fn delta(&self, a: usize, b: usize) -> usize {
        self.sub(self.mul(a, b), a)
    }

    pub fn add_table(&self) -> Vec<Vec<usize>> {
        self.add.chunks(self.n).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }

    pub fn mul_table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.n).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }

    fn map_perm(&self, f: impl Fn(usize) -> usize) -> Permutation {
        Permutation::from_images_unchecked((0..self.n).map(|b| f(b) as u32).collect())
    }

    pub fn lambda_perm(&self, a: usize) -> Permutation {
        self.map_perm(|b| self.lambda(a, b))
    }

    pub fn delta_perm(&self, a: usize) -> Permutation {
        self.map_perm(|b| self.delta(a, b))
    }

    /// `a·b = λ_{a⁻}(b)` and `a:b = δ_{a⁻}(b)`.
    pub fn associated_qcycle(&self) -> QCycleSet {
        let n = self.n;
        let mut s = Vec::with_capacity(n * n);
        let mut d = Vec::with_capacity(n * n);
        for a in 0..n {
            let ai = self.minv(a);
            for b in 0..n {
                s.push(self.lambda(ai, b) as u32);
                d.push(self.delta(ai, b) as u32);
            }
        }
        QCycleSet::from_flat_unchecked(n, s, d)
    }

    /// Subgroup of `(B, +)` generated by `seed`.
    pub fn additive_closure(&self, seed: &[usize]) -> Vec<usize> {
        self.subgroup(seed, |a, b| self.add(a, b))
    }

    /// Subgroup of `(B, ∘)` generated by `seed`.
    pub fn multiplicative_closure(&self, seed: &[usize]) -> Vec<usize> {
        self.subgroup(seed, |a, b| self.mul(a, b))
    }

    fn subgroup(&self, seed: &[usize], op: impl Fn(usize, usize) -> usize) -> Vec<usize> {
        let mut inside = FixedBitSet::with_capacity(self.n);
        inside.insert(0);
        let mut members = vec![0usize];
        let mut k = 0;
        while k < members.len() {
            let a = members[k];
            k += 1;
            for &g in seed {
                let v = op(a, g);
                if !inside.put(v) {
                    members.push(v);
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// `B(x)` with layers `B_0 = {0, x}`, `B_n = {a∘b} ∪ {λ_a(b)}` over `B_{n-1}`.
    pub fn brace_closure(&self, x: usize) -> BraceClosureTrace {
        let mut cur = FixedBitSet::with_capacity(self.n);
        cur.insert(0);
        cur.insert(x);
        let mut layers = vec![cur.ones().collect::<Vec<_>>()];
        loop {
            let members: Vec<usize> = cur.ones().collect();
            let mut next = cur.clone();
            for &a in &members {
                for &b in &members {
                    next.insert(self.mul(a, b));
                    next.insert(self.lambda(a, b));
                }
            }
            if next == cur {
                break;
            }
            layers.push(next.ones().collect());
            cur = next;
        }
        let result: Vec<usize> = cur.ones().collect();
        BraceClosureTrace { seed: x, generates: result.len() == self.n, layers, result }
    }

    /// Orbits of the group generated by all λ_a and δ_a.
    pub fn lambda_delta_orbits(&self) -> Vec<Vec<usize>> {
        let gens: Vec<Permutation> = (0..self.n).flat_map(|a| [self.lambda_perm(a), self.delta_perm(a)]).collect();
        orbits(&gens, self.n).expect("degrees agree")
    }

    /// Every λ/δ-orbit with its induced q-cycle set and whether it alone
    /// generates `(B, +)`.
    pub fn cycle_bases(&self) -> Result<Vec<OrbitBase>> {
        let x = self.associated_qcycle();
        self.lambda_delta_orbits()
            .into_iter()
            .map(|orbit| {
                let generated = self.additive_closure(&orbit);
                let structure = x.substructure(&orbit)?;
                Ok(OrbitBase { transitive_cycle_base: generated.len() == self.n, elements: orbit, structure })
            })
            .collect()
    }

    pub fn transitive_cycle_bases(&self) -> Result<Vec<OrbitBase>> {
        Ok(self.cycle_bases()?.into_iter().filter(|o| o.transitive_cycle_base).collect())
    }

    /// The standalone brace on a subset closed under `+` and `∘`; element
    /// `i` of the result is the `i`-th smallest member (0 stays 0).
    pub fn sub_brace(&self, elements: &[usize]) -> Result<SkewBrace> {
        let mut el = elements.to_vec();
        el.sort_unstable();
        el.dedup();
        if el.first() != Some(&0) {
            return Err(Error::Shape("sub-brace must contain 0".into()));
        }
        let mut index = vec![u32::MAX; self.n];
        for (i, &e) in el.iter().enumerate() {
            index[e] = i as u32;
        }
        let m = el.len();
        let mut add = Vec::with_capacity(m * m);
        let mut mul = Vec::with_capacity(m * m);
        for &a in &el {
            for &b in &el {
                let (s, p) = (index[self.add(a, b)], index[self.mul(a, b)]);
                if s == u32::MAX || p == u32::MAX {
                    return Err(Error::Shape(format!("subset not closed at ({a}, {b})")));
                }
                add.push(s);
                mul.push(p);
            }
        }
        SkewBrace::from_flat(m, add, mul)
    }

    /// `B^{(1)} = B`, `B^{(m)} = ⟨-a + a∘b - b : a ∈ B^{(m-1)}, b ∈ B⟩_+`,
    /// until two consecutive terms agree.
    pub fn brace_series(&self) -> BraceSeries {
        let mut terms = vec![(0..self.n).collect::<Vec<_>>()];
        loop {
            let last = terms.last().expect("series is never empty");
            let mut gens = Vec::new();
            for &a in last {
                for b in 0..self.n {
                    gens.push(self.sub(self.lambda(a, b), b));
                }
            }
            gens.sort_unstable();
            gens.dedup();
            let next = self.additive_closure(&gens);
            if &next == last {
                break;
            }
            terms.push(next);
        }
        let reaches_zero = terms.last().is_some_and(|t| t.len() == 1);
        BraceSeries { terms, reaches_zero }
    }
}

fn renumber(n: usize, t: &[u32], pi: &[usize]) -> Vec<u32> {
    // pi is an involution here, so it is its own inverse.
    let mut out = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            out[pi[a] * n + pi[b]] = pi[t[a * n + b] as usize] as u32;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraceClosureTrace {
    pub seed: usize,
    pub layers: Vec<Vec<usize>>,
    pub result: Vec<usize>,
    pub generates: bool,
}

#[derive(Clone, Debug)]
pub struct OrbitBase {
    pub elements: Vec<usize>,
    pub transitive_cycle_base: bool,
    /// Induced structure; point `i` is `elements[i]`.
    pub structure: QCycleSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraceSeries {
    pub terms: Vec<Vec<usize>>,
    pub reaches_zero: bool,
}

/// One-generator analysis by two independent routes: direct `B(x)`
/// closures, and transitive cycle bases that are one-generator cycle sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneGeneratorReport {
    pub n: usize,
    /// `{x : B(x) = B}`, 0-based.
    pub generators: Vec<usize>,
    /// Sizes of the transitive cycle bases.
    pub transitive_cycle_base_sizes: Vec<usize>,
    /// For each transitive cycle base, its generating points (0-based
    /// brace elements).
    pub base_generators: Vec<Vec<usize>>,
    pub one_generator: bool,
}

pub fn one_generator_brace_report(b: &SkewBrace) -> Result<OneGeneratorReport> {
    let n = b.n();
    let generators: Vec<usize> = (0..n).filter(|&x| b.brace_closure(x).generates).collect();
    let x = b.associated_qcycle();
    let bases = b.transitive_cycle_bases()?;
    let orbit_of = {
        let mut o = vec![usize::MAX; n];
        for (i, orb) in b.lambda_delta_orbits().iter().enumerate() {
            for &e in orb {
                o[e] = i;
            }
        }
        o
    };
    // Certificate for each direct generator: its orbit is a transitive
    // cycle base and equals ⟨g⟩ in the associated q-cycle set.
    for &g in &generators {
        let orbit: Vec<usize> = (0..n).filter(|&e| orbit_of[e] == orbit_of[g]).collect();
        if b.additive_closure(&orbit).len() != n {
            return Err(Error::Internal(format!("orbit of generator {g} is not a cycle base")));
        }
        let sub: Vec<usize> = closure(&x, &[g]).ones().collect();
        if sub != orbit {
            return Err(Error::Internal(format!("<{g}> differs from the orbit of {g}")));
        }
    }
    let mut base_generators = Vec::new();
    for base in &bases {
        let gens: Vec<usize> = base
            .elements
            .iter()
            .copied()
            .filter(|&e| closure(&x, &[e]).count_ones(..) == base.elements.len())
            .collect();
        base_generators.push(gens);
    }
    // Second route: a transitive cycle base X with X = ⟨x⟩ gives B = B(x).
    let via_bases: Vec<usize> = {
        let mut v: Vec<usize> = base_generators.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    };
    if via_bases != generators {
        return Err(Error::Internal(format!(
            "direct generators {generators:?} disagree with cycle-base generators {via_bases:?}"
        )));
    }
    Ok(OneGeneratorReport {
        n,
        one_generator: !generators.is_empty(),
        transitive_cycle_base_sizes: bases.iter().map(|o| o.elements.len()).collect(),
        base_generators,
        generators,
    })
}

/// Counts of violated instances of the laws relating `λ`, `δ` and `∘`.
///
/// With maps composed right to left, `λ_{a∘b} = λ_a λ_b` and
/// `δ_{a∘b} = δ_a δ_b`. Written with left-to-right composition the second
/// identity reads `δ_{a∘b} = δ_b · δ_a`, the anti-homomorphism form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    /// `(a, b)` with `λ_a(b + c) ≠ λ_a(b) + λ_a(c)` for some `c`.
    pub lambda_not_automorphism: usize,
    pub delta_not_automorphism: usize,
    /// `(a, b)` with `λ_{a∘b} ≠ λ_a ∘ λ_b`.
    pub lambda_homomorphism_violations: usize,
    /// `(a, b)` with `δ_{a∘b} ≠ δ_a ∘ δ_b`.
    pub delta_law_violations: usize,
}

impl LawReport {
    pub fn is_clean(&self) -> bool {
        *self == LawReport::default()
    }
}

pub fn check_laws(b: &SkewBrace) -> LawReport {
    let n = b.n();
    let mut r = LawReport::default();
    for a in 0..n {
        for x in 0..n {
            let lam = (0..n).any(|c| b.lambda(a, b.add(x, c)) != b.add(b.lambda(a, x), b.lambda(a, c)));
            let del = (0..n).any(|c| b.delta(a, b.add(x, c)) != b.add(b.delta(a, x), b.delta(a, c)));
            r.lambda_not_automorphism += lam as usize;
            r.delta_not_automorphism += del as usize;
            let ax = b.mul(a, x);
            r.lambda_homomorphism_violations += (0..n).any(|c| b.lambda(ax, c) != b.lambda(a, b.lambda(x, c))) as usize;
            r.delta_law_violations += (0..n).any(|c| b.delta(ax, c) != b.delta(a, b.delta(x, c))) as usize;
        }
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub elements: Vec<usize>,
    pub transitive_cycle_base: bool,
    pub cycle_set: bool,
    /// Generating points of the induced structure, as brace elements.
    pub generators: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraceReport {
    pub n: usize,
    pub abelian: bool,
    pub laws: LawReport,
    pub orbits: Vec<OrbitSummary>,
    pub one_generator: OneGeneratorReport,
    pub series_sizes: Vec<usize>,
    pub series_reaches_zero: bool,
}

pub fn brace_report(b: &SkewBrace) -> Result<BraceReport> {
    let orbits = b
        .cycle_bases()?
        .into_iter()
        .map(|o| {
            let gens = crate::analysis::generator_set(&o.structure);
            OrbitSummary {
                transitive_cycle_base: o.transitive_cycle_base,
                cycle_set: o.structure.is_cycle_set(),
                generators: gens.iter().map(|&g| o.elements[g]).collect(),
                elements: o.elements,
            }
        })
        .collect();
    let series = b.brace_series();
    Ok(BraceReport {
        n: b.n(),
        abelian: b.is_abelian(),
        laws: check_laws(b),
        orbits,
        one_generator: one_generator_brace_report(b)?,
        series_sizes: series.terms.iter().map(|t| t.len()).collect(),
        series_reaches_zero: series.reaches_zero,
    })
}

/// Cyclic group table `Z/n`.
pub fn cyclic_add(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp2(p: usize) -> SkewBrace {
        let n = p * p;
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b + p * a * b) % n).collect()).collect();
        SkewBrace::new(cyclic_add(n), mul).unwrap()
    }

    #[test]
    fn trivial_and_zp2_braces_validate() {
        let t = SkewBrace::new(cyclic_add(3), cyclic_add(3)).unwrap();
        assert!(t.is_abelian());
        let b = zp2(2);
        assert_eq!(b.n(), 4);
        assert_eq!(b.mul(2, 2), 0);
    }

    #[test]
    fn broken_associativity_is_rejected() {
        // Z/3 addition with a multiplication that is a Latin square with
        // identity 0 but not associative.
        let mul = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]];
        assert!(matches!(SkewBrace::new(cyclic_add(3), mul), Err(Error::NotGroup { table: "mul", .. })));
    }

    #[test]
    fn identity_is_moved_to_zero() {
        // Z/2 written with identity 1.
        let add = vec![vec![1, 0], vec![0, 1]];
        let b = SkewBrace::new(add.clone(), add).unwrap();
        assert_eq!(b.add(0, 0), 0);
    }

    #[test]
    fn closures_in_zp2() {
        let b = zp2(2);
        assert_eq!(b.additive_closure(&[2]), vec![0, 2]);
        assert_eq!(b.multiplicative_closure(&[2]), vec![0, 2]);
        assert_eq!(b.brace_closure(1).result, vec![0, 1, 2, 3]);
        assert_eq!(b.brace_closure(0).result, vec![0]);
    }

    #[test]
    fn trivial_brace_series_hits_zero() {
        let t = SkewBrace::new(cyclic_add(4), cyclic_add(4)).unwrap();
        let s = t.brace_series();
        assert_eq!(s.terms[1], vec![0]);
        assert!(s.reaches_zero);
    }

    #[test]
    fn delta_composes_in_the_same_order_as_lambda() {
        // Trivial brace on S3: δ_a is conjugation by a.
        let s3 = crate::constructions::trivial_brace("S3").unwrap();
        assert!(check_laws(&s3).is_clean());
        let anti = (0..6).any(|a| {
            (0..6).any(|b| (0..6).any(|c| s3.delta(s3.mul(a, b), c) != s3.delta(b, s3.delta(a, c))))
        });
        assert!(anti, "right-to-left anti-homomorphism form fails on a non-abelian group");
    }

    #[test]
    fn trivial_cyclic_brace_generators() {
        let t = SkewBrace::new(cyclic_add(5), cyclic_add(5)).unwrap();
        let r = one_generator_brace_report(&t).unwrap();
        assert_eq!(r.generators, vec![1, 2, 3, 4]);
        let t6 = SkewBrace::new(cyclic_add(6), cyclic_add(6)).unwrap();
        let bases = t6.transitive_cycle_bases().unwrap();
        let singles: Vec<usize> = bases.iter().map(|o| o.elements[0]).collect();
        assert_eq!(singles, vec![1, 5]);
    }
}
