//! Canonical forms and isomorphism tests for q-cycle sets.
//!
//! The canonical form is the lexicographically least table pair `(σ, δ)`,
//! σ row-major first, over all relabelings. Labels are handed out in order
//! while row 0 of σ is read, so every branch happens in row 0; the rest of
//! the table is forced by the labeling. Branches whose next cell would be
//! larger than some sibling's are cut, and siblings exchanged by a known
//! automorphism fixing the labeled prefix are skipped.

use crate::perm::Permutation;
use crate::qcycle::QCycleSet;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub form: QCycleSet,
    /// Original point to canonical label: `form = X.relabel(relabeling)`.
    pub relabeling: Permutation,
}

struct Search<'a> {
    x: &'a QCycleSet,
    n: usize,
    /// Best tables so far, σ then δ, and the labeling that produced them.
    best: Option<(Vec<u32>, Vec<u32>)>,
    autos: Vec<Vec<u32>>,
}

#[derive(Clone)]
struct Labels {
    fwd: Vec<u32>,
    inv: Vec<u32>,
    count: usize,
}

impl Labels {
    fn give(&mut self, p: usize) -> u32 {
        if self.fwd[p] == NONE {
            self.fwd[p] = self.count as u32;
            self.inv[self.count] = p as u32;
            self.count += 1;
        }
        self.fwd[p]
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Prefix {
    /// Row 0 so far equals the best row 0.
    Tied,
    /// Row 0 is already smaller; everything below wins.
    Ahead,
}

impl<'a> Search<'a> {
    fn image(&self, labels: &Labels) -> Vec<u32> {
        let n = self.n;
        let mut t = vec![0u32; 2 * n * n];
        for a in 0..n {
            let u = labels.inv[a] as usize;
            for b in 0..n {
                let v = labels.inv[b] as usize;
                t[a * n + b] = labels.fwd[self.x.dot(u, v)];
                t[n * n + a * n + b] = labels.fwd[self.x.colon(u, v)];
            }
        }
        t
    }

    fn leaf(&mut self, labels: &Labels) {
        let t = self.image(labels);
        match &self.best {
            Some((bt, bfwd)) => match t.cmp(bt) {
                std::cmp::Ordering::Less => self.best = Some((t, labels.fwd.clone())),
                std::cmp::Ordering::Equal => {
                    // best⁻¹ ∘ current is an automorphism.
                    let mut binv = vec![0u32; self.n];
                    for (p, &l) in bfwd.iter().enumerate() {
                        binv[l as usize] = p as u32;
                    }
                    let auto: Vec<u32> = labels.fwd.iter().map(|&l| binv[l as usize]).collect();
                    if auto.iter().enumerate().any(|(i, &v)| v as usize != i) {
                        self.autos.push(auto);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
            None => self.best = Some((t, labels.fwd.clone())),
        }
    }

    /// Orbit representative map of the group generated by the known
    /// automorphisms that fix every labeled point.
    fn stabilizer_orbits(&self, labels: &Labels) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for g in &self.autos {
            let fixes = labels.inv[..labels.count].iter().all(|&p| g[p as usize] == p);
            if !fixes {
                continue;
            }
            for (a, &b) in g.iter().enumerate() {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b as usize));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        (0..self.n).map(|a| find(&mut parent, a)).collect()
    }

    /// Value row 0 would get at column `j` if `v` took label `j` next.
    fn trial(&self, labels: &Labels, u: Option<usize>, v: usize) -> u32 {
        let u = u.unwrap_or(v);
        let t = self.x.dot(u, v);
        let k = labels.count as u32;
        if labels.fwd[t] != NONE {
            labels.fwd[t]
        } else if t == v {
            k
        } else {
            k + 1
        }
    }

    fn row0_best(&self, j: usize) -> Option<u32> {
        self.best.as_ref().map(|(t, _)| t[j])
    }

    fn walk(&mut self, labels: Labels, j: usize, prefix: Prefix) {
        let n = self.n;
        if j == n {
            self.leaf(&labels);
            return;
        }
        if j < labels.count {
            let mut labels = labels;
            let u = labels.inv[0] as usize;
            let v = labels.inv[j] as usize;
            let val = labels.give(self.x.dot(u, v));
            let prefix = match (prefix, self.row0_best(j)) {
                (Prefix::Tied, Some(b)) if val > b => return,
                (Prefix::Tied, Some(b)) if val < b => Prefix::Ahead,
                (p, _) => p,
            };
            self.walk(labels, j + 1, prefix);
            return;
        }
        // Column j is unlabeled: choose which point gets label j.
        let u = if j == 0 { None } else { Some(labels.inv[0] as usize) };
        let free: Vec<usize> = (0..n).filter(|&p| labels.fwd[p] == NONE).collect();
        let best_val = free.iter().map(|&v| self.trial(&labels, u, v)).min().expect("a free point");
        let mut tried: Vec<usize> = Vec::new();
        for &v in &free {
            if self.trial(&labels, u, v) != best_val {
                continue;
            }
            let orbits = self.stabilizer_orbits(&labels);
            if tried.iter().any(|&w| orbits[w] == orbits[v]) {
                continue;
            }
            tried.push(v);
            let prefix = match (prefix, self.row0_best(j)) {
                (Prefix::Tied, Some(b)) if best_val > b => return,
                (Prefix::Tied, Some(b)) if best_val < b => Prefix::Ahead,
                (p, _) => p,
            };
            let mut child = labels.clone();
            child.give(v);
            let u = u.unwrap_or(v);
            child.give(self.x.dot(u, v));
            self.walk(child, j + 1, prefix);
        }
    }
}

pub fn canonical_form(x: &QCycleSet) -> CanonicalForm {
    let n = x.n();
    let mut s = Search { x, n, best: None, autos: Vec::new() };
    let labels = Labels { fwd: vec![NONE; n], inv: vec![NONE; n], count: 0 };
    s.walk(labels, 0, Prefix::Tied);
    let (t, fwd) = s.best.expect("at least one labeling");
    let relabeling = Permutation::from_images_unchecked(fwd);
    let form = QCycleSet::from_flat_unchecked(n, t[..n * n].to_vec(), t[n * n..].to_vec());
    debug_assert_eq!(x.relabel(&relabeling), form);
    CanonicalForm { form, relabeling }
}

/// Cheap relabeling invariant: sorted cycle types of all rows plus the
/// squaring maps.
fn invariant(x: &QCycleSet) -> Vec<Vec<usize>> {
    let n = x.n();
    let mut rows: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            let mut v = x.sigma(p).cycle_type();
            if x.is_regular() {
                v.push(0);
                v.extend(x.delta(p).cycle_type());
            }
            v
        })
        .collect();
    rows.sort();
    let q: Vec<u32> = (0..n).map(|p| x.dot(p, p) as u32).collect();
    if let Ok(perm) = Permutation::from_images(q.iter().map(|&v| v as usize).collect()) {
        rows.push(perm.cycle_type());
    }
    rows
}

/// A point bijection `f` with `f(x·y) = f(x)·f(y)` and `f(x:y) = f(x):f(y)`,
/// or `None` when no isomorphism exists.
pub fn are_isomorphic(a: &QCycleSet, b: &QCycleSet) -> Option<Permutation> {
    if a.n() != b.n() || a.is_regular() != b.is_regular() || invariant(a) != invariant(b) {
        return None;
    }
    let ca = canonical_form(a);
    let cb = canonical_form(b);
    if ca.form != cb.form {
        return None;
    }
    let f = cb.relabeling.inverse().then_unchecked(&ca.relabeling);
    debug_assert!(a.is_homomorphism(&f.images(), b));
    Some(f)
}

/// Every automorphism of `x`, by extending partial maps point by point and
/// checking each operation entry as soon as both arguments are mapped.
pub fn automorphisms(x: &QCycleSet) -> Vec<Permutation> {
    fn go(x: &QCycleSet, img: &mut Vec<u32>, used: &mut Vec<bool>, k: usize, out: &mut Vec<Permutation>) {
        let n = x.n();
        if k == n {
            out.push(Permutation::from_images_unchecked(img.clone()));
            return;
        }
        for v in 0..n {
            if used[v] {
                continue;
            }
            img[k] = v as u32;
            let ok = (0..=k).all(|a| {
                [(a, k), (k, a)].iter().all(|&(p, q)| {
                    let s = x.dot(p, q);
                    let d = x.colon(p, q);
                    let (ip, iq) = (img[p] as usize, img[q] as usize);
                    (s > k || img[s] as usize == x.dot(ip, iq)) && (d > k || img[d] as usize == x.colon(ip, iq))
                })
            });
            if ok {
                used[v] = true;
                go(x, img, used, k + 1, out);
                used[v] = false;
            }
        }
    }
    let n = x.n();
    let mut out = Vec::new();
    go(x, &mut vec![NONE; n], &mut vec![false; n], 0, &mut out);
    out
}
