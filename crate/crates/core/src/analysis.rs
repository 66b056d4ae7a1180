//! Generated substructures, one-generator and irreducibility predicates,
//! indecomposability and retraction towers.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::canon::are_isomorphic;
use crate::error::{Error, Result};
use crate::perm::is_transitive;
use crate::qcycle::QCycleSet;

/// Layers `C_0 ⊆ C_1 ⊆ …` of a generated substructure; all sets sorted,
/// 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureTrace {
    pub seed: Vec<usize>,
    /// `layers[0]` is the seed; each later layer is strictly larger.
    pub layers: Vec<Vec<usize>>,
    pub result: Vec<usize>,
}

fn bits_to_vec(b: &FixedBitSet) -> Vec<usize> {
    b.ones().collect()
}

/// `⟨S⟩` with its layer trace: `C_n = C_{n-1} ∪ {a·b} ∪ {a:b}`, `a, b ∈ C_{n-1}`.
pub fn generated_sub(x: &QCycleSet, seed: &[usize]) -> ClosureTrace {
    let n = x.n();
    let mut cur = FixedBitSet::with_capacity(n);
    for &s in seed {
        cur.insert(s);
    }
    let seed_sorted = bits_to_vec(&cur);
    let mut layers = vec![seed_sorted.clone()];
    loop {
        let members = bits_to_vec(&cur);
        let mut next = cur.clone();
        for &a in &members {
            for &b in &members {
                next.insert(x.dot(a, b));
                next.insert(x.colon(a, b));
            }
        }
        if next == cur {
            break;
        }
        layers.push(bits_to_vec(&next));
        cur = next;
    }
    ClosureTrace { seed: seed_sorted, result: bits_to_vec(&cur), layers }
}

/// `⟨S⟩` by worklist; same set as [`generated_sub`] without the layers.
pub fn closure(x: &QCycleSet, seed: &[usize]) -> FixedBitSet {
    let n = x.n();
    let mut inside = FixedBitSet::with_capacity(n);
    let mut members: Vec<usize> = Vec::new();
    for &s in seed {
        if !inside.put(s) {
            members.push(s);
        }
    }
    let mut done = 0;
    while done < members.len() {
        let a = members[done];
        done += 1;
        // Pair the new member with every earlier one, both ways round.
        for i in 0..done {
            let b = members[i];
            for v in [x.dot(a, b), x.colon(a, b), x.dot(b, a), x.colon(b, a)] {
                if !inside.put(v) {
                    members.push(v);
                }
            }
        }
    }
    inside
}

/// The set `𝒢 = {x : ⟨x⟩ = X}`, computed for every point.
pub fn generator_set(x: &QCycleSet) -> Vec<usize> {
    (0..x.n()).filter(|&p| closure(x, &[p]).count_ones(..) == x.n()).collect()
}

pub fn is_one_generator(x: &QCycleSet) -> bool {
    !generator_set(x).is_empty()
}

/// Every singleton generates.
pub fn is_irreducible(x: &QCycleSet) -> bool {
    generator_set(x).len() == x.n()
}

/// The group generated by all σ_x and δ_x is transitive.
pub fn is_indecomposable(x: &QCycleSet) -> bool {
    x.is_regular() && is_transitive(&x.generators(), x.n()).unwrap_or(false)
}

/// Quotient by `x ∼ y ⇔ σ_x = σ_y and δ_x = δ_y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retract {
    pub quotient: QCycleSet,
    /// `projection[x]` is the class of `x`; classes are numbered by their
    /// minimum representative.
    pub projection: Vec<usize>,
}

pub fn retract(x: &QCycleSet) -> Result<Retract> {
    x.require_nondegenerate()?;
    let n = x.n();
    let row = |p: usize| (&x.sigma_flat()[p * n..(p + 1) * n], &x.delta_flat()[p * n..(p + 1) * n]);
    let mut projection = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for p in 0..n {
        if projection[p] != usize::MAX {
            continue;
        }
        let class = reps.len();
        reps.push(p);
        for q in p..n {
            if projection[q] == usize::MAX && row(q) == row(p) {
                projection[q] = class;
            }
        }
    }
    let m = reps.len();
    let mut s = Vec::with_capacity(m * m);
    let mut d = Vec::with_capacity(m * m);
    for &a in &reps {
        for &b in &reps {
            s.push(projection[x.dot(a, b)] as u32);
            d.push(projection[x.colon(a, b)] as u32);
        }
    }
    let quotient = QCycleSet::from_flat(m, s, d)?;
    quotient
        .require_nondegenerate()
        .map_err(|e| Error::Internal(format!("retract lost non-degeneracy: {e}")))?;
    Ok(Retract { quotient, projection })
}

/// `Ret^0(X), Ret^1(X), …` up to the first level isomorphic to its retract.
#[derive(Clone, Debug)]
pub struct RetractionTower {
    /// `levels[0]` is the input; the last entry is `Ret^{m+1}(X)`.
    pub levels: Vec<QCycleSet>,
    /// `projections[i]` maps level `i` onto level `i + 1`.
    pub projections: Vec<Vec<usize>>,
    /// Smallest `m` with `Ret^m(X) ≅ Ret^{m+1}(X)`.
    pub terminal_index: usize,
}

impl RetractionTower {
    pub fn absolute_retraction(&self) -> &QCycleSet {
        &self.levels[self.terminal_index]
    }

    pub fn is_multipermutation(&self) -> bool {
        self.absolute_retraction().n() == 1
    }

    pub fn multipermutation_level(&self) -> Option<usize> {
        self.is_multipermutation().then_some(self.terminal_index)
    }

    pub fn is_irretractable(&self) -> bool {
        self.terminal_index == 0 && self.levels[0].n() > 1
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels[..=self.terminal_index].iter().map(QCycleSet::n).collect()
    }
}

pub fn retraction_tower(x: &QCycleSet) -> Result<RetractionTower> {
    let mut levels = vec![x.clone()];
    let mut projections = Vec::new();
    loop {
        let last = levels.last().expect("tower is never empty");
        let r = retract(last)?;
        let stop = are_isomorphic(last, &r.quotient).is_some();
        levels.push(r.quotient);
        projections.push(r.projection);
        if stop {
            let terminal_index = levels.len() - 2;
            return Ok(RetractionTower { levels, projections, terminal_index });
        }
    }
}

/// The group generated by `𝔮` and `𝔮′` is transitive.
pub fn squaring_transitivity(x: &QCycleSet) -> Result<bool> {
    let (q, qp) = x.squaring_maps()?;
    is_transitive(&[q, qp], x.n())
}

/// `{𝔮^k(p), 𝔮′^k(p) : k ≥ 0}` for a generator `p`; each member is
/// re-verified as a generator.
pub fn squaring_generators(x: &QCycleSet, p: usize) -> Result<Vec<usize>> {
    let (q, qp) = x.squaring_maps()?;
    let n = x.n();
    if closure(x, &[p]).count_ones(..) != n {
        return Err(Error::NotGenerator(p + 1));
    }
    let mut out = FixedBitSet::with_capacity(n);
    for m in [&q, &qp] {
        let mut c = p;
        loop {
            out.insert(c);
            c = m.apply(c);
            if c == p {
                break;
            }
        }
    }
    let set = bits_to_vec(&out);
    for &g in &set {
        if closure(x, &[g]).count_ones(..) != n {
            return Err(Error::Internal(format!("squaring image {} is not a generator", g + 1)));
        }
    }
    Ok(set)
}

/// Structural summary; point lists are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub cycle_set: bool,
    pub indecomposable: bool,
    pub one_generator: bool,
    pub irreducible: bool,
    pub irretractable: bool,
    pub multipermutation: bool,
    pub squaring_transitive: bool,
    pub generators: Vec<usize>,
    pub multipermutation_level: Option<usize>,
    pub tower_sizes: Vec<usize>,
    pub squaring_cycle_type: Vec<usize>,
}

pub fn analyze(x: &QCycleSet) -> Result<AnalysisReport> {
    x.require_nondegenerate()?;
    let gens = generator_set(x);
    let tower = retraction_tower(x)?;
    let (q, _) = x.squaring_maps()?;
    let report = AnalysisReport {
        n: x.n(),
        cycle_set: x.is_cycle_set(),
        indecomposable: is_indecomposable(x),
        one_generator: !gens.is_empty(),
        irreducible: gens.len() == x.n(),
        irretractable: tower.is_irretractable(),
        multipermutation: tower.is_multipermutation(),
        squaring_transitive: squaring_transitivity(x)?,
        generators: gens.iter().map(|g| g + 1).collect(),
        multipermutation_level: tower.multipermutation_level(),
        tower_sizes: tower.sizes(),
        squaring_cycle_type: q.cycle_type(),
    };
    if report.squaring_transitive && !report.irreducible {
        return Err(Error::Internal("squaring maps transitive but structure reducible".into()));
    }
    Ok(report)
}
