//! q-cycle sets, solutions and the dictionary between them.
//!
//! Points are 0-based in this API. `dot(x, y)` is `x·y = σ_x(y)` and
//! `colon(x, y)` is `x:y = δ_x(y)`.

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QCycleSet {
    n: usize,
    sigma: Vec<u32>,
    delta: Vec<u32>,
    regular: bool,
    nondegenerate: bool,
}

fn row_is_bijective(row: &[u32]) -> bool {
    let mut seen = vec![false; row.len()];
    row.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
}

fn flatten(name: &str, n: usize, table: &[Vec<usize>]) -> Result<Vec<u32>> {
    if table.len() != n {
        return Err(Error::Shape(format!("{name} has {} rows, expected {n}", table.len())));
    }
    let mut flat = Vec::with_capacity(n * n);
    for (x, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Shape(format!("{name} row {} has {} entries, expected {n}", x + 1, row.len())));
        }
        for (y, &v) in row.iter().enumerate() {
            if v >= n {
                return Err(Error::OutOfRange { value: v as i64 + 1, n, at: format!("{name}[{}][{}]", x + 1, y + 1) });
            }
            flat.push(v as u32);
        }
    }
    Ok(flat)
}

impl QCycleSet {
    /// Validates two 0-based tables. Checks σ-row bijectivity, then q1–q3
    /// over `(x, y, z)` in lexicographic order; the first failure wins.
    pub fn new(sigma: Vec<Vec<usize>>, delta: Vec<Vec<usize>>) -> Result<QCycleSet> {
        let n = sigma.len();
        let s = flatten("sigma", n, &sigma)?;
        let d = flatten("delta", n, &delta)?;
        QCycleSet::from_flat(n, s, d)
    }

    /// Cycle set: both operations given by one table.
    pub fn cycle_set(sigma: Vec<Vec<usize>>) -> Result<QCycleSet> {
        QCycleSet::new(sigma.clone(), sigma)
    }

    /// Row-major flat tables, `t[x * n + y]`.
    pub fn from_flat(n: usize, sigma: Vec<u32>, delta: Vec<u32>) -> Result<QCycleSet> {
        if n == 0 {
            return Err(Error::Shape("empty carrier".into()));
        }
        if sigma.len() != n * n || delta.len() != n * n {
            return Err(Error::Shape(format!("flat tables must have {} entries", n * n)));
        }
        if let Some(v) = sigma.iter().chain(&delta).find(|&&v| v as usize >= n) {
            return Err(Error::OutOfRange { value: *v as i64 + 1, n, at: "table".into() });
        }
        for x in 0..n {
            if !row_is_bijective(&sigma[x * n..(x + 1) * n]) {
                return Err(Error::NotBijective(format!("sigma row {}", x + 1)));
            }
        }
        let x = QCycleSet::from_flat_unchecked(n, sigma, delta);
        x.first_violation().map_or(Ok(x), Err)
    }

    /// Skips the axiom scan; the caller vouches for the tables.
    pub(crate) fn from_flat_unchecked(n: usize, sigma: Vec<u32>, delta: Vec<u32>) -> QCycleSet {
        let regular = (0..n).all(|x| row_is_bijective(&delta[x * n..(x + 1) * n]));
        let q: Vec<u32> = (0..n).map(|x| sigma[x * n + x]).collect();
        let qp: Vec<u32> = (0..n).map(|x| delta[x * n + x]).collect();
        let nondegenerate = regular && row_is_bijective(&q) && row_is_bijective(&qp);
        QCycleSet { n, sigma, delta, regular, nondegenerate }
    }

    fn first_violation(&self) -> Option<Error> {
        let n = self.n;
        let (d, c) = (|a, b| self.dot(a, b), |a, b| self.colon(a, b));
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let fail = if d(d(x, y), d(x, z)) != d(c(y, x), d(y, z)) {
                        Some("q1")
                    } else if c(c(x, y), c(x, z)) != c(d(y, x), c(y, z)) {
                        Some("q2")
                    } else if c(d(x, y), d(x, z)) != d(c(y, x), c(y, z)) {
                        Some("q3")
                    } else {
                        None
                    };
                    if let Some(axiom) = fail {
                        return Some(Error::Axiom { axiom, x: x + 1, y: y + 1, z: z + 1 });
                    }
                }
            }
        }
        None
    }

    /// The one-point q-cycle set.
    pub fn singleton() -> QCycleSet {
        QCycleSet::from_flat_unchecked(1, vec![0], vec![0])
    }

    /// All rows the identity.
    pub fn trivial(n: usize) -> QCycleSet {
        let t: Vec<u32> = (0..n * n).map(|c| (c % n) as u32).collect();
        QCycleSet::from_flat_unchecked(n, t.clone(), t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dot(&self, x: usize, y: usize) -> usize {
        self.sigma[x * self.n + y] as usize
    }

    #[inline]
    pub fn colon(&self, x: usize, y: usize) -> usize {
        self.delta[x * self.n + y] as usize
    }

    pub fn sigma_flat(&self) -> &[u32] {
        &self.sigma
    }

    pub fn delta_flat(&self) -> &[u32] {
        &self.delta
    }

    pub fn sigma_table(&self) -> Vec<Vec<usize>> {
        self.sigma.chunks(self.n).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }

    pub fn delta_table(&self) -> Vec<Vec<usize>> {
        self.delta.chunks(self.n).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.nondegenerate
    }

    pub fn is_cycle_set(&self) -> bool {
        self.sigma == self.delta
    }

    pub fn sigma(&self, x: usize) -> Permutation {
        Permutation::from_images_unchecked(self.sigma[x * self.n..(x + 1) * self.n].to_vec())
    }

    /// Panics on a non-regular structure.
    pub fn delta(&self, x: usize) -> Permutation {
        assert!(self.regular, "delta rows are not bijective");
        Permutation::from_images_unchecked(self.delta[x * self.n..(x + 1) * self.n].to_vec())
    }

    /// All σ_x followed by all δ_x, as permutations.
    pub fn generators(&self) -> Vec<Permutation> {
        (0..self.n).map(|x| self.sigma(x)).chain((0..self.n).map(|x| self.delta(x))).collect()
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.nondegenerate {
            Ok(())
        } else if !self.regular {
            Err(Error::Degenerate("a delta row is not bijective".into()))
        } else {
            Err(Error::Degenerate("a squaring map is not bijective".into()))
        }
    }

    /// `(𝔮, 𝔮′)` with `𝔮(x) = x·x` and `𝔮′(x) = x:x`.
    pub fn squaring_maps(&self) -> Result<(Permutation, Permutation)> {
        self.require_nondegenerate()?;
        let q = (0..self.n).map(|x| self.dot(x, x) as u32).collect();
        let qp = (0..self.n).map(|x| self.colon(x, x) as u32).collect();
        Ok((Permutation::from_images_unchecked(q), Permutation::from_images_unchecked(qp)))
    }

    /// Transports the structure along `pi`: `π(x)·π(y) = π(x·y)` in the result.
    pub fn relabel(&self, pi: &Permutation) -> QCycleSet {
        assert_eq!(pi.degree(), self.n);
        let n = self.n;
        let inv = pi.inverse();
        let mut s = vec![0u32; n * n];
        let mut d = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let (x, y) = (inv.apply(a), inv.apply(b));
                s[a * n + b] = pi.apply(self.dot(x, y)) as u32;
                d[a * n + b] = pi.apply(self.colon(x, y)) as u32;
            }
        }
        QCycleSet { n, sigma: s, delta: d, regular: self.regular, nondegenerate: self.nondegenerate }
    }

    /// Whether `points` is closed under both operations.
    pub fn is_closed(&self, points: &[usize]) -> bool {
        let mut inside = vec![false; self.n];
        for &p in points {
            inside[p] = true;
        }
        points.iter().all(|&a| points.iter().all(|&b| inside[self.dot(a, b)] && inside[self.colon(a, b)]))
    }

    /// The induced structure on a closed subset; point `i` of the result is
    /// `points[i]` after sorting.
    pub fn substructure(&self, points: &[usize]) -> Result<QCycleSet> {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        if pts.is_empty() || !self.is_closed(&pts) {
            return Err(Error::Shape("subset is empty or not closed".into()));
        }
        let m = pts.len();
        let mut index = vec![u32::MAX; self.n];
        for (i, &p) in pts.iter().enumerate() {
            index[p] = i as u32;
        }
        let mut s = Vec::with_capacity(m * m);
        let mut d = Vec::with_capacity(m * m);
        for &a in &pts {
            for &b in &pts {
                s.push(index[self.dot(a, b)]);
                d.push(index[self.colon(a, b)]);
            }
        }
        // Restricted bijective rows stay bijective on a finite closed subset,
        // but the axioms are re-checked anyway.
        QCycleSet::from_flat(m, s, d)
    }

    /// Whether `f` (0-based images into `target`) preserves both operations.
    pub fn is_homomorphism(&self, f: &[usize], target: &QCycleSet) -> bool {
        f.len() == self.n
            && (0..self.n).all(|x| {
                (0..self.n).all(|y| {
                    f[self.dot(x, y)] == target.dot(f[x], f[y]) && f[self.colon(x, y)] == target.colon(f[x], f[y])
                })
            })
    }

    /// The associated solution `r(x,y) = (σ_x⁻¹(y), δ_{σ_x⁻¹(y)}(x))`.
    pub fn to_solution(&self) -> Result<Solution> {
        self.require_nondegenerate()?;
        let n = self.n;
        let mut sinv = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                sinv[x * n + self.dot(x, y)] = y as u32;
            }
        }
        let mut r = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let u = sinv[x * n + y] as usize;
                r.push((u as u32, self.colon(u, x) as u32));
            }
        }
        Ok(Solution { n, r })
    }

    /// Inverse of [`QCycleSet::to_solution`]: `x·y = λ_x⁻¹(y)`,
    /// `x:y = ρ_{λ_y⁻¹(x)}(y)`.
    pub fn from_solution(s: &Solution) -> Result<QCycleSet> {
        if !s.is_nondegenerate() {
            return Err(Error::Degenerate("solution translations are not bijective".into()));
        }
        if !s.is_bijective() {
            return Err(Error::NotBijective("solution map r".into()));
        }
        let n = s.n;
        let mut linv = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                linv[x * n + s.lambda(x, y)] = y as u32;
            }
        }
        let mut sig = vec![0u32; n * n];
        let mut del = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                sig[x * n + y] = linv[x * n + y];
                let u = linv[y * n + x] as usize;
                del[x * n + y] = s.rho(u, y) as u32;
            }
        }
        QCycleSet::from_flat(n, sig, del)
    }
}

/// A map `r` on pairs, stored as `r[x * n + y] = (λ_x(y), ρ_y(x))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Solution {
    n: usize,
    r: Vec<(u32, u32)>,
}

impl Solution {
    pub fn new(n: usize, r: Vec<(usize, usize)>) -> Result<Solution> {
        if r.len() != n * n || n == 0 {
            return Err(Error::Shape(format!("r must have {} entries", n * n)));
        }
        if let Some(&(u, v)) = r.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::OutOfRange { value: u.max(v) as i64 + 1, n, at: "r".into() });
        }
        Ok(Solution { n, r: r.into_iter().map(|(u, v)| (u as u32, v as u32)).collect() })
    }

    pub fn identity(n: usize) -> Solution {
        Solution { n, r: (0..n * n).map(|c| ((c / n) as u32, (c % n) as u32)).collect() }
    }

    /// The twist `(x, y) ↦ (y, x)`.
    pub fn twist(n: usize) -> Solution {
        Solution { n, r: (0..n * n).map(|c| ((c % n) as u32, (c / n) as u32)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: usize, y: usize) -> (usize, usize) {
        let (u, v) = self.r[x * self.n + y];
        (u as usize, v as usize)
    }

    /// λ_x(y), the first component of `r(x, y)`.
    pub fn lambda(&self, x: usize, y: usize) -> usize {
        self.r[x * self.n + y].0 as usize
    }

    /// ρ_y(x), the second component of `r(x, y)`.
    pub fn rho(&self, y: usize, x: usize) -> usize {
        self.r[x * self.n + y].1 as usize
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.n * self.n];
        self.r.iter().all(|&(u, v)| !std::mem::replace(&mut seen[u as usize * self.n + v as usize], true))
    }

    pub fn is_nondegenerate(&self) -> bool {
        let n = self.n;
        (0..n).all(|x| {
            let l: Vec<u32> = (0..n).map(|y| self.lambda(x, y) as u32).collect();
            let r: Vec<u32> = (0..n).map(|y| self.rho(x, y) as u32).collect();
            row_is_bijective(&l) && row_is_bijective(&r)
        })
    }

    pub fn is_involutive(&self) -> bool {
        (0..self.n).all(|x| {
            (0..self.n).all(|y| {
                let (u, v) = self.apply(x, y);
                self.apply(u, v) == (x, y)
            })
        })
    }

    /// Braid identity over all triples; `Err` carries the first failing
    /// `(x, y, z)` in lexicographic order, 0-based.
    pub fn yb_check(&self) -> std::result::Result<(), (usize, usize, usize)> {
        let n = self.n;
        let r12 = |(a, b, c): (usize, usize, usize)| {
            let (u, v) = self.apply(a, b);
            (u, v, c)
        };
        let r23 = |(a, b, c): (usize, usize, usize)| {
            let (u, v) = self.apply(b, c);
            (a, u, v)
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let t = (x, y, z);
                    if r12(r23(r12(t))) != r23(r12(r23(t))) {
                        return Err(t);
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn zp_shift(p: usize) -> QCycleSet {
        let s = (0..p).map(|_| (0..p).map(|y| (y + 1) % p).collect()).collect();
        let d = (0..p).map(|_| (0..p).map(|y| (y + 2) % p).collect()).collect();
        QCycleSet::new(s, d).unwrap()
    }

    #[test]
    fn shift_example_is_valid_and_nondegenerate() {
        let x = zp_shift(3);
        assert!(x.is_nondegenerate());
        assert!(!x.is_cycle_set());
        let (q, qp) = x.squaring_maps().unwrap();
        assert_eq!(q.images(), vec![1, 2, 0]);
        assert_eq!(qp.images(), vec![2, 0, 1]);
    }

    #[test]
    fn singleton_and_bad_row() {
        assert!(QCycleSet::cycle_set(vec![vec![0]]).unwrap().is_nondegenerate());
        let err = QCycleSet::cycle_set(vec![vec![0, 0], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, Error::NotBijective(_)));
    }

    #[test]
    fn axiom_witness_is_lexicographically_first() {
        // σ_1 = (1,2), σ_2 = id on two points is not a cycle set.
        let err = QCycleSet::cycle_set(vec![vec![1, 0], vec![0, 1]]).unwrap_err();
        assert_eq!(err, Error::Axiom { axiom: "q1", x: 1, y: 2, z: 1 });
    }

    #[test]
    fn to_solution_examples() {
        let s = zp_shift(3).to_solution().unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(s.apply(x, y), ((y + 2) % 3, (x + 2) % 3));
            }
        }
        assert!(s.yb_check().is_ok());
        assert!(!s.is_involutive());

        let c = QCycleSet::cycle_set(vec![vec![1, 0], vec![1, 0]]).unwrap();
        let s = c.to_solution().unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(s.apply(x, y), ((y + 1) % 2, (x + 1) % 2));
            }
        }
        assert!(s.is_involutive());
        assert_eq!(QCycleSet::singleton().to_solution().unwrap(), Solution::identity(1));
    }

    #[test]
    fn from_solution_examples() {
        let t = QCycleSet::from_solution(&Solution::twist(2)).unwrap();
        assert_eq!(t, QCycleSet::trivial(2));
        let x = zp_shift(3);
        assert_eq!(QCycleSet::from_solution(&x.to_solution().unwrap()).unwrap(), x);
        assert_eq!(QCycleSet::from_solution(&Solution::identity(1)).unwrap(), QCycleSet::singleton());
    }

    #[test]
    fn classical_solutions_satisfy_braid_identity() {
        assert!(Solution::identity(3).yb_check().is_ok());
        assert!(Solution::twist(3).yb_check().is_ok());
        // r(x, y) = (x + y, x) on Z/3 breaks the braid identity first at (2, 1, 1) in 1-based points.
        let r = (0..9).map(|c| ((c / 3 + c % 3) % 3, c / 3)).collect();
        let bad = Solution::new(3, r).unwrap();
        assert_eq!(bad.yb_check(), Err((1, 0, 0)));
    }

    #[test]
    fn relabel_transports_structure() {
        let x = zp_shift(3);
        let pi = Permutation::parse_cycles(3, "(1,2)").unwrap();
        let y = x.relabel(&pi);
        assert!(QCycleSet::from_flat(3, y.sigma_flat().to_vec(), y.delta_flat().to_vec()).is_ok());
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(y.dot(pi.apply(a), pi.apply(b)), pi.apply(x.dot(a, b)));
            }
        }
    }
}
