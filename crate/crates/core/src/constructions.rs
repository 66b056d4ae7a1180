//! Dynamical extensions, covering decompositions, the characteristic-2
//! matrix family and named examples.

use std::collections::VecDeque;

use crate::analysis::is_indecomposable;
use crate::brace::{cyclic_add, SkewBrace};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::qcycle::QCycleSet;

/// The field with `2^k` elements. Elements are bit vectors of polynomial
/// coefficients, bit `i` holding the coefficient of `t^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiniteField2k {
    k: u32,
    /// Reduction polynomial including the leading term.
    modulus: u32,
}

impl FiniteField2k {
    /// Supported degrees and their reduction polynomials:
    /// k=1 `t+1`, k=2 `t²+t+1`, k=3 `t³+t+1`, k=4 `t⁴+t+1`.
    pub fn new(k: u32) -> Result<FiniteField2k> {
        let modulus = match k {
            1 => 0b11,
            2 => 0b111,
            3 => 0b1011,
            4 => 0b10011,
            _ => return Err(Error::SizeOutOfRange(k as usize)),
        };
        Ok(FiniteField2k { k, modulus })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> usize {
        1 << self.k
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let mut acc = 0u32;
        for i in 0..self.k {
            if b >> i & 1 == 1 {
                acc ^= a << i;
            }
        }
        for i in (self.k..2 * self.k).rev() {
            if acc >> i & 1 == 1 {
                acc ^= self.modulus << (i - self.k);
            }
        }
        acc
    }
}

/// `x·y = Q⁻¹x + Py` on `K×K`, `K = GF(2^k)`, with `P = [[1,1],[0,1]]` and
/// `Q = Q⁻¹ = [[1,0],[1,1]]`, i.e. `x·y = (x₁+y₁+y₂, x₁+x₂+y₂)`. The point
/// `(x₁, x₂)` is numbered `x₁·2^k + x₂` (0-based).
pub fn rump_family(k: u32) -> Result<QCycleSet> {
    let f = FiniteField2k::new(k)?;
    let q = f.size();
    let n = q * q;
    let split = |p: usize| ((p / q) as u32, (p % q) as u32);
    let mut sigma = vec![vec![0usize; n]; n];
    for (x, row) in sigma.iter_mut().enumerate() {
        let (x1, x2) = split(x);
        for (y, cell) in row.iter_mut().enumerate() {
            let (y1, y2) = split(y);
            let z1 = f.add(f.add(x1, y1), y2);
            let z2 = f.add(f.add(x1, x2), y2);
            *cell = z1 as usize * q + z2 as usize;
        }
    }
    QCycleSet::cycle_set(sigma)
}

/// Named structure produced by [`builtin`].
#[derive(Clone, Debug)]
pub enum Builtin {
    QCycle(QCycleSet),
    Brace(SkewBrace),
}

const X1: [&str; 8] = [
    "(2,3)(4,6)(5,8)",
    "(1,4)(3,5)(6,7)",
    "(1,4)(2,8)(6,7)",
    "(1,7)(2,3)(5,8)",
    "(1,2,7,8)(3,4)(5,6)",
    "(1,8,7,2)(3,4)(5,6)",
    "(1,2)(3,4,5,6)(7,8)",
    "(1,2)(3,6,5,4)(7,8)",
];

const X2: [&str; 8] = [
    "(1,2)(3,4,8,6)(5,7)",
    "(1,2)(3,6,8,4)(5,7)",
    "(1,2,7,5)(3,4)(6,8)",
    "(1,5,7,2)(3,4)(6,8)",
    "(1,3,7,8)(2,4)(5,6)",
    "(1,8,7,3)(2,4)(5,6)",
    "(1,3)(2,4,5,6)(7,8)",
    "(1,3)(2,6,5,4)(7,8)",
];

const X3: [&str; 8] = [
    "(1,5,7,8)",
    "(1,4,7,6)(2,8)(3,5)",
    "(2,6,3,4)",
    "(2,4,3,6)",
    "(1,8,7,5)",
    "(1,4)(2,5,3,8)(6,7)",
    "(1,4)(2,8,3,5)(6,7)",
    "(1,6,7,4)(2,8)(3,5)",
];

/// Cycle set whose row `x` is the permutation `σ_x` given in 1-based cycle
/// notation.
pub fn cycle_set_from_cycles(rows: &[&str]) -> Result<QCycleSet> {
    let n = rows.len();
    let sigma = rows
        .iter()
        .map(|r| Permutation::parse_cycles(n, r).map(|p| p.images()))
        .collect::<Result<Vec<_>>>()?;
    QCycleSet::cycle_set(sigma)
}

pub fn x1() -> QCycleSet {
    cycle_set_from_cycles(&X1).expect("X1 table is valid")
}

pub fn x2() -> QCycleSet {
    cycle_set_from_cycles(&X2).expect("X2 table is valid")
}

pub fn x3() -> QCycleSet {
    cycle_set_from_cycles(&X3).expect("X3 table is valid")
}

/// `x·y = y+1`, `x:y = y+2` on `Z/p`.
pub fn zp_shift(p: usize) -> Result<QCycleSet> {
    if p == 0 {
        return Err(Error::SizeOutOfRange(0));
    }
    let s = (0..p).map(|_| (0..p).map(|y| (y + 1) % p).collect()).collect();
    let d = (0..p).map(|_| (0..p).map(|y| (y + 2) % p).collect()).collect();
    QCycleSet::new(s, d)
}

/// `Z/p²` with `a∘b = a + b + p·a·b`.
pub fn zp2_brace(p: usize) -> Result<SkewBrace> {
    if p == 0 {
        return Err(Error::SizeOutOfRange(0));
    }
    let n = p * p;
    let mul = (0..n).map(|a| (0..n).map(|b| (a + b + p * a * b) % n).collect()).collect();
    SkewBrace::new(cyclic_add(n), mul)
}

/// Group table from a spec such as `Z/6`, `Z/2xZ/4` or `S3`.
pub fn group_table(spec: &str) -> Result<Vec<Vec<usize>>> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("S3") {
        let perms: Vec<Permutation> = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
            .iter()
            .map(|i| Permutation::from_images(i.to_vec()).expect("a permutation"))
            .collect();
        let index = |p: &Permutation| perms.iter().position(|q| q == p).expect("closed");
        return Ok(perms
            .iter()
            .map(|a| perms.iter().map(|b| index(&a.compose(b).expect("same degree"))).collect())
            .collect());
    }
    let mut moduli = Vec::new();
    for part in spec.split(['x', '×']) {
        let m = part
            .trim()
            .strip_prefix("Z/")
            .or_else(|| part.trim().strip_prefix('Z'))
            .and_then(|m| m.parse::<usize>().ok())
            .filter(|&m| m > 0)
            .ok_or_else(|| Error::UnknownBuiltin(format!("group `{spec}`")))?;
        moduli.push(m);
    }
    let n: usize = moduli.iter().product();
    // Mixed radix, first factor most significant.
    let digits = |mut a: usize| {
        let mut d = vec![0; moduli.len()];
        for (i, &m) in moduli.iter().enumerate().rev() {
            d[i] = a % m;
            a /= m;
        }
        d
    };
    let pack = |d: &[usize]| d.iter().zip(&moduli).fold(0, |acc, (&x, &m)| acc * m + x);
    Ok((0..n)
        .map(|a| {
            let da = digits(a);
            (0..n)
                .map(|b| {
                    let s: Vec<usize> = da.iter().zip(digits(b)).zip(&moduli).map(|((x, y), m)| (x + y) % m).collect();
                    pack(&s)
                })
                .collect()
        })
        .collect())
}

/// `a∘b = a + b` on the given group.
pub fn trivial_brace(spec: &str) -> Result<SkewBrace> {
    let t = group_table(spec)?;
    SkewBrace::new(t.clone(), t)
}

/// Resolves `X1`, `X2`, `X3`, `zp_shift(p)`, `zp2_brace(p)`,
/// `trivial_brace(<group>)` and `rump(k)`.
pub fn builtin(name: &str) -> Result<Builtin> {
    let name = name.trim();
    let unknown = || Error::UnknownBuiltin(name.to_string());
    match name {
        "X1" => return Ok(Builtin::QCycle(x1())),
        "X2" => return Ok(Builtin::QCycle(x2())),
        "X3" => return Ok(Builtin::QCycle(x3())),
        _ => {}
    }
    let (head, arg) = name
        .strip_suffix(')')
        .and_then(|s| s.split_once('('))
        .ok_or_else(unknown)?;
    let num = || arg.trim().parse::<usize>().map_err(|_| unknown());
    match head.trim() {
        "zp_shift" => Ok(Builtin::QCycle(zp_shift(num()?)?)),
        "zp2_brace" => Ok(Builtin::Brace(zp2_brace(num()?)?)),
        "trivial_brace" => Ok(Builtin::Brace(trivial_brace(arg)?)),
        "rump" => Ok(Builtin::QCycle(rump_family(num()? as u32)?)),
        _ => Err(unknown()),
    }
}

pub const BUILTIN_NAMES: &[&str] = &["X1", "X2", "X3", "zp_shift(p)", "zp2_brace(p)", "trivial_brace(Z/n[xZ/m...]|S3)", "rump(k)"];

/// Cocycle data over a base q-cycle set `Y` and a fiber `S = {0..m-1}`.
///
/// `alpha[((y1·|Y| + y2)·m + s)·m + t] = α_{(y1,y2)}(s,t)`, same layout for
/// `alpha_prime`. Base points and fiber elements are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicalPair {
    pub base: QCycleSet,
    pub fiber: usize,
    pub alpha: Vec<u32>,
    pub alpha_prime: Vec<u32>,
}

/// Which cocycle identity failed, and where.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CocycleWitness {
    /// 1, 2 or 3, in the order the identities are listed on [`DynamicalPair::validate`].
    pub identity: u8,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub s: usize,
    pub t: usize,
    pub u: usize,
}

impl DynamicalPair {
    /// `α = α′ = (s, t) ↦ t`.
    pub fn trivial(base: QCycleSet, fiber: usize) -> DynamicalPair {
        let n = base.n();
        let len = n * n * fiber * fiber;
        let alpha: Vec<u32> = (0..len).map(|i| (i % fiber) as u32).collect();
        DynamicalPair { base, fiber, alpha_prime: alpha.clone(), alpha }
    }

    #[inline]
    fn idx(&self, y1: usize, y2: usize, s: usize, t: usize) -> usize {
        ((y1 * self.base.n() + y2) * self.fiber + s) * self.fiber + t
    }

    #[inline]
    pub fn a(&self, y1: usize, y2: usize, s: usize, t: usize) -> usize {
        self.alpha[self.idx(y1, y2, s, t)] as usize
    }

    #[inline]
    pub fn ap(&self, y1: usize, y2: usize, s: usize, t: usize) -> usize {
        self.alpha_prime[self.idx(y1, y2, s, t)] as usize
    }

    /// True when every `α′_{(x,y)}(s, ·)` is a bijection.
    pub fn alpha_prime_regular(&self) -> bool {
        self.alpha_prime.chunks(self.fiber).all(|c| is_bijection(c, self.fiber))
    }

    /// Checks shape, that each `α_{(x,y)}(s, ·)` is a bijection, and
    /// 1. `α_{x·y,x·z}(α_{x,y}(s,t), α_{x,z}(s,u)) = α_{y:x,y·z}(α′_{y,x}(t,s), α_{y,z}(t,u))`
    /// 2. `α′_{x:y,x:z}(α′_{x,y}(s,t), α′_{x,z}(s,u)) = α′_{y·x,y:z}(α_{y,x}(t,s), α′_{y,z}(t,u))`
    /// 3. `α′_{x·y,x·z}(α_{x,y}(s,t), α_{x,z}(s,u)) = α_{y:x,y:z}(α′_{y,x}(t,s), α′_{y,z}(t,u))`
    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|e| match e {
            Check::Shape(m) => Error::Cocycle(m),
            Check::Witness(w) => Error::Cocycle(format!(
                "identity {} fails at (x, y, z, s, t, u) = ({}, {}, {}, {}, {}, {})",
                w.identity,
                w.x + 1,
                w.y + 1,
                w.z + 1,
                w.s,
                w.t,
                w.u
            )),
        })
    }

    /// The first failing identity in `(x, y, z, s, t, u)` lex order.
    pub fn witness(&self) -> Option<CocycleWitness> {
        match self.check() {
            Err(Check::Witness(w)) => Some(w),
            _ => None,
        }
    }

    fn check(&self) -> std::result::Result<(), Check> {
        let n = self.base.n();
        let m = self.fiber;
        if m == 0 {
            return Err(Check::Shape("fiber must be non-empty".into()));
        }
        let len = n * n * m * m;
        if self.alpha.len() != len || self.alpha_prime.len() != len {
            return Err(Check::Shape(format!("alpha tables must have {len} entries")));
        }
        if let Some(v) = self.alpha.iter().chain(&self.alpha_prime).find(|&&v| v as usize >= m) {
            return Err(Check::Shape(format!("fiber value {v} outside 0..{m}")));
        }
        for (i, c) in self.alpha.chunks(m).enumerate() {
            if !is_bijection(c, m) {
                let (s, y2, y1) = (i % m, i / m % n, i / m / n);
                return Err(Check::Shape(format!("alpha_({},{})({s}, -) is not a bijection", y1 + 1, y2 + 1)));
            }
        }
        let b = &self.base;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (xy, xz, yx_d, yz, yx_s, yz_d) =
                        (b.dot(x, y), b.dot(x, z), b.colon(y, x), b.dot(y, z), b.dot(y, x), b.colon(y, z));
                    let (xy_d, xz_d) = (b.colon(x, y), b.colon(x, z));
                    for s in 0..m {
                        for t in 0..m {
                            for u in 0..m {
                                let w = |identity| CocycleWitness { identity, x, y, z, s, t, u };
                                let l1 = self.a(xy, xz, self.a(x, y, s, t), self.a(x, z, s, u));
                                let r1 = self.a(yx_d, yz, self.ap(y, x, t, s), self.a(y, z, t, u));
                                if l1 != r1 {
                                    return Err(Check::Witness(w(1)));
                                }
                                let l2 = self.ap(xy_d, xz_d, self.ap(x, y, s, t), self.ap(x, z, s, u));
                                let r2 = self.ap(yx_s, yz_d, self.a(y, x, t, s), self.ap(y, z, t, u));
                                if l2 != r2 {
                                    return Err(Check::Witness(w(2)));
                                }
                                let l3 = self.ap(xy, xz, self.a(x, y, s, t), self.a(x, z, s, u));
                                let r3 = self.a(yx_d, yz_d, self.ap(y, x, t, s), self.ap(y, z, t, u));
                                if l3 != r3 {
                                    return Err(Check::Witness(w(3)));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

enum Check {
    Shape(String),
    Witness(CocycleWitness),
}

fn is_bijection(c: &[u32], m: usize) -> bool {
    let mut seen = vec![false; m];
    c.iter().all(|&v| (v as usize) < m && !std::mem::replace(&mut seen[v as usize], true))
}

/// `(x,s)·(y,t) = (x·y, α_{(x,y)}(s,t))` and
/// `(x,s):(y,t) = (x:y, α′_{(x,y)}(s,t))` on `Y×S`, with `(y, s)` numbered
/// `y·|S| + s`. Fails with [`Error::Degenerate`] if `require_nondegenerate`
/// is set and the result is degenerate.
pub fn dynamical_extension(dp: &DynamicalPair, require_nondegenerate: bool) -> Result<QCycleSet> {
    dp.validate()?;
    if require_nondegenerate && !dp.base.is_nondegenerate() {
        return Err(Error::Degenerate("base is degenerate".into()));
    }
    let (n, m) = (dp.base.n(), dp.fiber);
    let big = n * m;
    let mut sigma = Vec::with_capacity(big * big);
    let mut delta = Vec::with_capacity(big * big);
    for x in 0..n {
        for s in 0..m {
            for y in 0..n {
                for t in 0..m {
                    sigma.push((dp.base.dot(x, y) * m + dp.a(x, y, s, t)) as u32);
                    delta.push((dp.base.colon(x, y) * m + dp.ap(x, y, s, t)) as u32);
                }
            }
        }
    }
    let out = QCycleSet::from_flat(big, sigma, delta)?;
    if require_nondegenerate && !out.is_nondegenerate() {
        let why = if dp.alpha_prime_regular() { "squaring map not bijective" } else { "some alpha'_(x,y)(s, -) is not a bijection" };
        return Err(Error::Degenerate(why.into()));
    }
    Ok(out)
}

/// A dynamical pair with `dynamical_extension(pair) ≅ X` and the
/// isomorphism: `iso[y·|S| + s]` is the point of `X` that `(y, s)` maps to.
#[derive(Clone, Debug)]
pub struct Covering {
    pub pair: DynamicalPair,
    pub iso: Permutation,
    /// How the fiber bijections were chosen.
    pub transport: &'static str,
}

pub const TRANSPORT_RULE: &str =
    "breadth-first transport from the minimum point; sigma maps before delta maps, smaller acting point first";

/// Writes `X` as a dynamical extension of `Y` along the epimorphism `p`
/// (`p[x]` is the image of point `x`).
///
/// Fiber bijections `φ_y : S → p⁻¹(y)` are fixed by enumerating the fiber of
/// `p(min point)` in increasing order and transporting along `σ_x` and
/// `δ_x` breadth-first.
pub fn covering_decomposition(x: &QCycleSet, y: &QCycleSet, p: &[usize]) -> Result<Covering> {
    x.require_nondegenerate()?;
    let (nx, ny) = (x.n(), y.n());
    if p.len() != nx || p.iter().any(|&v| v >= ny) {
        return Err(Error::NotEpimorphism(format!("map must send {nx} points into 1..={ny}")));
    }
    if !x.is_homomorphism(p, y) {
        return Err(Error::NotEpimorphism("map is not a homomorphism".into()));
    }
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); ny];
    for (pt, &img) in p.iter().enumerate() {
        fibers[img].push(pt);
    }
    if let Some(missed) = fibers.iter().position(|f| f.is_empty()) {
        return Err(Error::NotEpimorphism(format!("point {} of the target is not hit", missed + 1)));
    }
    if !is_indecomposable(x) {
        return Err(Error::Decomposable);
    }
    let m = fibers[0].len();
    if fibers.iter().any(|f| f.len() != m) {
        return Err(Error::Internal("fibers of an indecomposable structure differ in size".into()));
    }
    // phi[y][s] = point; pos[point] = s.
    let mut phi: Vec<Option<Vec<usize>>> = vec![None; ny];
    let start = p[0];
    phi[start] = Some(fibers[start].clone());
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        let here = phi[cur].clone().expect("queued fibers are placed");
        for use_delta in [false, true] {
            for a in 0..nx {
                let act = |pt: usize| if use_delta { x.colon(a, pt) } else { x.dot(a, pt) };
                let target = p[act(here[0])];
                if phi[target].is_none() {
                    phi[target] = Some(here.iter().map(|&pt| act(pt)).collect());
                    queue.push_back(target);
                }
            }
        }
    }
    let phi: Vec<Vec<usize>> = phi
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Internal("transport did not reach every fiber".into()))?;
    let mut pos = vec![0usize; nx];
    for f in &phi {
        for (s, &pt) in f.iter().enumerate() {
            pos[pt] = s;
        }
    }
    let mut alpha = Vec::with_capacity(ny * ny * m * m);
    let mut alpha_prime = Vec::with_capacity(ny * ny * m * m);
    for y1 in 0..ny {
        for y2 in 0..ny {
            for s in 0..m {
                for t in 0..m {
                    let (a, b) = (phi[y1][s], phi[y2][t]);
                    alpha.push(pos[x.dot(a, b)] as u32);
                    alpha_prime.push(pos[x.colon(a, b)] as u32);
                }
            }
        }
    }
    let pair = DynamicalPair { base: y.clone(), fiber: m, alpha, alpha_prime };
    pair.validate().map_err(|e| Error::Internal(format!("decomposition is not a dynamical pair: {e}")))?;
    let iso = Permutation::from_images(phi.iter().flatten().copied().collect())?;
    Ok(Covering { pair, iso, transport: TRANSPORT_RULE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{closure, retract};

    #[test]
    fn field_multiplication() {
        let f = FiniteField2k::new(2).unwrap();
        // t·t = t+1, t·(t+1) = 1.
        assert_eq!(f.mul(0b10, 0b10), 0b11);
        assert_eq!(f.mul(0b10, 0b11), 1);
        let g = FiniteField2k::new(3).unwrap();
        for a in 1..8 {
            assert_eq!((1..8).filter(|&b| g.mul(a, b) == 1).count(), 1);
        }
    }

    #[test]
    fn rump_closures_follow_the_case_split() {
        for k in 1..=2 {
            let x = rump_family(k).unwrap();
            let q = 1usize << k;
            for pt in 0..x.n() {
                let (a, b) = (pt / q, pt % q);
                let got: Vec<usize> = closure(&x, &[pt]).ones().collect();
                let mut want = vec![pt];
                if a != b {
                    want = vec![a * q + b, a * q + a, b * q + b, b * q + a];
                    want.sort_unstable();
                }
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn named_tables_validate() {
        for x in [x1(), x2(), x3()] {
            assert_eq!(x.n(), 8);
            assert!(is_indecomposable(&x));
        }
    }

    #[test]
    fn builtin_names() {
        assert!(matches!(builtin("zp_shift(5)").unwrap(), Builtin::QCycle(x) if x.n() == 5));
        assert!(matches!(builtin("zp2_brace(3)").unwrap(), Builtin::Brace(b) if b.n() == 9));
        assert!(matches!(builtin("trivial_brace(Z/2xZ/2)").unwrap(), Builtin::Brace(b) if b.n() == 4));
        assert!(matches!(builtin("trivial_brace(S3)").unwrap(), Builtin::Brace(b) if !b.is_abelian()));
        assert!(matches!(builtin("X9"), Err(Error::UnknownBuiltin(_))));
    }

    #[test]
    fn trivial_pair_is_valid_and_constant_alpha_is_not() {
        let y = zp_shift(3).unwrap();
        let dp = DynamicalPair::trivial(y.clone(), 2);
        dp.validate().unwrap();
        assert_eq!(dynamical_extension(&dp, true).unwrap().n(), 6);
        let mut bad = dp.clone();
        bad.alpha.iter_mut().for_each(|v| *v = 0);
        assert!(matches!(bad.validate(), Err(Error::Cocycle(_))));
    }

    #[test]
    fn decomposition_over_the_retract_round_trips() {
        let x = x1();
        let r = retract(&x).unwrap();
        let c = covering_decomposition(&x, &r.quotient, &r.projection).unwrap();
        let ext = dynamical_extension(&c.pair, true).unwrap();
        assert!(ext.is_homomorphism(&c.iso.images(), &x));
    }
}
