//! Permutations of `{0..n}` with 1-based cycle notation at the edges.
//!
//! Composition applies right to left: `p.compose(&q)` maps `i` to `p(q(i))`.
//! Every other module relies on this order.

use std::collections::HashSet;
use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation { images: (0..n as u32).collect() }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for (i, &v) in images.iter().enumerate() {
            if v >= n {
                return Err(Error::OutOfRange { value: v as i64 + 1, n, at: format!("point {}", i + 1) });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotBijective(format!("image {} repeated", v + 1)));
            }
        }
        Ok(Permutation { images: images.into_iter().map(|v| v as u32).collect() })
    }

    /// Caller guarantees bijectivity.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Permutation {
        debug_assert!(Permutation::from_images(images.iter().map(|&v| v as usize).collect()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation from cycles of 0-based points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Permutation> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut moved = vec![false; n];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= n {
                    return Err(Error::OutOfRange { value: p as i64 + 1, n, at: "cycle".into() });
                }
                if std::mem::replace(&mut moved[p], true) {
                    return Err(Error::NotBijective(format!("point {} appears twice", p + 1)));
                }
                images[p] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.then_unchecked(other))
    }

    #[inline]
    pub(crate) fn then_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&i| self.images[i as usize]).collect() }
    }

    /// Disjoint cycles of length at least 2, each starting at its minimum,
    /// ordered by that minimum. Points are 0-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.apply(p);
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted cycle lengths including fixed points.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        let moved: usize = lens.iter().sum();
        lens.extend(std::iter::repeat_n(1, self.degree() - moved));
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    /// Parses 1-based cycle notation such as `(2,3)(4,6)(5,8)`; `()` and
    /// `id` denote the identity.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Permutation> {
        let s = text.trim();
        if s.is_empty() || s == "id" || s == "()" {
            return Ok(Permutation::identity(n));
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        let mut col = text.len() - text.trim_start().len() + 1;
        let err = |col: usize, msg: &str| Error::Parse { line: 1, col, msg: msg.to_string() };
        while !rest.is_empty() {
            let body_start = rest.strip_prefix('(').ok_or_else(|| err(col, "expected `(`"))?;
            let close = body_start.find(')').ok_or_else(|| err(col, "unclosed cycle"))?;
            let body = &body_start[..close];
            let mut cycle = Vec::new();
            for tok in body.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    if body.trim().is_empty() {
                        break;
                    }
                    return Err(err(col, "empty point"));
                }
                let v: usize = tok.parse().map_err(|_| err(col, &format!("bad point `{tok}`")))?;
                if v == 0 || v > n {
                    return Err(Error::OutOfRange { value: v as i64, n, at: format!("column {col}") });
                }
                cycle.push(v - 1);
            }
            if cycle.len() > 1 {
                cycles.push(cycle);
            }
            let consumed = close + 2;
            col += consumed;
            let after = &rest[consumed..];
            let trimmed = after.trim_start();
            col += after.len() - trimmed.len();
            rest = trimmed;
        }
        Permutation::from_cycles(n, &cycles)
    }
}

impl fmt::Display for Permutation {
    /// 1-based cycle notation; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

/// A finite permutation group stored as its full element list.
#[derive(Clone, Debug)]
pub struct PermGroupClosure {
    pub degree: usize,
    /// Sorted; the identity comes first.
    pub elements: Vec<Permutation>,
    pub generators: Vec<Permutation>,
}

impl PermGroupClosure {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }
}

fn check_degrees(gens: &[Permutation], n: usize) -> Result<()> {
    for g in gens {
        if g.degree() != n {
            return Err(Error::DegreeMismatch(n, g.degree()));
        }
    }
    Ok(())
}

/// Breadth-first product closure of the generators.
pub fn group_closure(gens: &[Permutation]) -> Result<PermGroupClosure> {
    let first = gens.first().ok_or(Error::NoGenerators)?;
    let n = first.degree();
    check_degrees(gens, n)?;
    let id = Permutation::identity(n);
    let mut seen: HashSet<Permutation> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = s.then_unchecked(&g);
            if !seen.contains(&h) {
                seen.insert(h.clone());
                queue.push_back(h);
            }
        }
    }
    let mut elements: Vec<Permutation> = seen.into_iter().collect();
    elements.sort();
    Ok(PermGroupClosure { degree: n, elements, generators: gens.to_vec() })
}

/// Orbits of the group generated by `gens` on `{0..n}`, each sorted and
/// listed by minimum element.
pub fn orbits(gens: &[Permutation], n: usize) -> Result<Vec<Vec<usize>>> {
    check_degrees(gens, n)?;
    let mut block = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if block[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        block[start] = id;
        let mut orbit = vec![start];
        let mut k = 0;
        while k < orbit.len() {
            let p = orbit[k];
            k += 1;
            for g in gens {
                let q = g.apply(p);
                if block[q] == usize::MAX {
                    block[q] = id;
                    orbit.push(q);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    Ok(out)
}

pub fn is_transitive(gens: &[Permutation], n: usize) -> Result<bool> {
    Ok(orbits(gens, n)?.len() <= 1)
}
