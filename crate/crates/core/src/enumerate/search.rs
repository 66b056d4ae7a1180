//! Backtracking kernel that fills a cycle-set table cell by cell.
//!
//! Tables are 0-based and row-major: `t[x * n + y] = x·y`. The squaring map
//! `x ↦ x·x` is fixed to a canonical representative of each cycle type, and
//! the remaining relabeling freedom (the centralizer of that map) is removed
//! by keeping only tables that are lexicographically minimal in their
//! centralizer orbit. Cells are filled and compared in one static order that
//! interleaves row `k` with column `k`, so both `x·y` and `y·x` become known
//! early and the identity starts propagating after very few branches.
//!
//! Every finite cycle set has a bijective squaring map and any isomorphism
//! between two tables with the same squaring map commutes with it, so each
//! isomorphism class is emitted exactly once.

use rayon::prelude::*;

/// Largest supported table side.
pub const MAX_N: usize = 10;
const CELLS: usize = MAX_N * MAX_N;
const UNK: u8 = u8::MAX;

/// One relabeling `π` together with its inverse.
#[derive(Clone, Debug)]
struct Relabel {
    fwd: [u8; MAX_N],
    inv: [u8; MAX_N],
}

/// Search-wide constants for one squaring-map cycle type.
struct Frame {
    n: usize,
    square: Vec<u8>,
    sym: Vec<Relabel>,
    indecomposable: bool,
    /// Fill and comparison order of the cells.
    order: Vec<u16>,
}

#[derive(Clone)]
struct State {
    val: [u8; CELLS],
    dom: [u16; CELLS],
    inv: [u8; CELLS],
    /// Union-find over cells forced to carry equal values; `dom` and
    /// `rows` are meaningful at class roots only.
    link: [u8; CELLS],
    next: [u8; CELLS],
    rows: [u16; CELLS],
}

/// Pending lexicographic comparisons: `(relabeling index, order position)`.
type Active = Vec<(u32, u16)>;

/// Root of an independent subtree: the first table row is complete.
///
/// The pending comparisons are recomputed from the state when the shard
/// runs; storing them would cost one entry per centralizer element.
struct Shard {
    frame: usize,
    state: State,
}

/// Counters for one run; merged across shards.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub emitted: u64,
}

impl SearchStats {
    pub fn merge(mut self, other: SearchStats) -> SearchStats {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        self.emitted += other.emitted;
        self
    }
}

/// All integer partitions of `n`, parts in non-increasing order, listed in
/// reverse lexicographic order (`[n]` first, `[1,1,...]` last).
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Canonical permutation of the given cycle type: consecutive points form
/// each cycle, `i ↦ i+1` inside a cycle.
pub fn cycle_type_representative(parts: &[usize]) -> Vec<u8> {
    let n: usize = parts.iter().sum();
    let mut perm = vec![0u8; n];
    let mut start = 0;
    for &len in parts {
        for i in 0..len {
            perm[start + i] = (start + (i + 1) % len) as u8;
        }
        start += len;
    }
    perm
}

/// Every permutation commuting with the representative of `parts`: each
/// cycle goes onto a cycle of the same length, with some rotation.
fn centralizer(parts: &[usize]) -> Vec<Relabel> {
    struct Walk<'a> {
        parts: &'a [usize],
        starts: Vec<usize>,
        target: Vec<usize>,
        used: Vec<bool>,
        rot: Vec<usize>,
        out: Vec<Relabel>,
    }
    fn go(w: &mut Walk<'_>, i: usize) {
        if i == w.parts.len() {
            let mut fwd = [0u8; MAX_N];
            let mut inv = [0u8; MAX_N];
            for (c, &len) in w.parts.iter().enumerate() {
                for k in 0..len {
                    let from = w.starts[c] + k;
                    let to = w.starts[w.target[c]] + (k + w.rot[c]) % len;
                    fwd[from] = to as u8;
                    inv[to] = from as u8;
                }
            }
            w.out.push(Relabel { fwd, inv });
            return;
        }
        for j in 0..w.parts.len() {
            if w.used[j] || w.parts[j] != w.parts[i] {
                continue;
            }
            w.used[j] = true;
            w.target[i] = j;
            for r in 0..w.parts[i] {
                w.rot[i] = r;
                go(w, i + 1);
            }
            w.used[j] = false;
        }
    }
    let mut starts = Vec::with_capacity(parts.len());
    let mut s = 0;
    for &len in parts {
        starts.push(s);
        s += len;
    }
    let mut walk = Walk {
        parts,
        starts,
        target: vec![0; parts.len()],
        used: vec![false; parts.len()],
        rot: vec![0; parts.len()],
        out: Vec::new(),
    };
    go(&mut walk, 0);
    walk.out
}

/// Row `k` interleaved with column `k`: `(k,k), (k,k+1), (k+1,k), ...`.
fn pair_order(n: usize) -> Vec<u16> {
    let mut order = Vec::with_capacity(n * n);
    for k in 0..n {
        order.push((k * n + k) as u16);
        for j in k + 1..n {
            order.push((k * n + j) as u16);
            order.push((j * n + k) as u16);
        }
    }
    order
}

impl Frame {
    fn new(parts: &[usize], indecomposable: bool) -> Frame {
        let n: usize = parts.iter().sum();
        assert!((1..=MAX_N).contains(&n), "table side out of range");
        Frame {
            n,
            square: cycle_type_representative(parts),
            sym: centralizer(parts),
            indecomposable,
            order: pair_order(n),
        }
    }

    fn root(&self) -> Option<State> {
        let n = self.n;
        let full: u16 = (1u16 << n) - 1;
        let mut st = State {
            val: [UNK; CELLS],
            dom: [0; CELLS],
            inv: [UNK; CELLS],
            link: [0; CELLS],
            next: [0; CELLS],
            rows: [0; CELLS],
        };
        for c in 0..n * n {
            st.dom[c] = full;
            st.link[c] = c as u8;
            st.next[c] = c as u8;
            st.rows[c] = 1 << (c / n);
        }
        let mut queue = Vec::with_capacity(CELLS);
        for x in 0..n {
            if !self.assign(&mut st, x * n + x, self.square[x], &mut queue) {
                return None;
            }
        }
        if self.propagate(&mut st, &mut queue) && self.sweep(&mut st, &mut queue) {
            Some(st)
        } else {
            None
        }
    }

    #[inline]
    fn find(st: &mut State, mut c: usize) -> usize {
        while st.link[c] as usize != c {
            let up = st.link[c] as usize;
            st.link[c] = st.link[up];
            c = up;
        }
        c
    }

    /// Assigns `v` to `cell` and to every cell known to equal it.
    fn assign(&self, st: &mut State, cell: usize, v: u8, queue: &mut Vec<u16>) -> bool {
        let cur = st.val[cell];
        if cur != UNK {
            return cur == v;
        }
        let root = Self::find(st, cell);
        let bit = 1u16 << v;
        if st.dom[root] & bit == 0 {
            return false;
        }
        st.dom[root] = bit;
        let n = self.n;
        let mut c = root;
        loop {
            if st.val[c] == UNK {
                let slot = (c / n) * n + v as usize;
                if st.inv[slot] != UNK {
                    return false;
                }
                st.inv[slot] = (c % n) as u8;
                st.val[c] = v;
                queue.push(c as u16);
            }
            c = st.next[c] as usize;
            if c == root {
                break;
            }
        }
        true
    }

    fn equalize(&self, st: &mut State, a: usize, b: usize, queue: &mut Vec<u16>) -> bool {
        let (va, vb) = (st.val[a], st.val[b]);
        match (va == UNK, vb == UNK) {
            (false, false) => va == vb,
            (false, true) => self.assign(st, b, va, queue),
            (true, false) => self.assign(st, a, vb, queue),
            (true, true) => {
                let ra = Self::find(st, a);
                let rb = Self::find(st, b);
                if ra == rb {
                    return true;
                }
                // Two equal cells in one row contradict row bijectivity.
                if st.rows[ra] & st.rows[rb] != 0 {
                    return false;
                }
                let d = st.dom[ra] & st.dom[rb];
                if d == 0 {
                    return false;
                }
                st.link[rb] = ra as u8;
                st.rows[ra] |= st.rows[rb];
                st.next.swap(ra, rb);
                st.dom[ra] = d;
                if d.count_ones() == 1 {
                    return self.assign(st, a, d.trailing_zeros() as u8, queue);
                }
                true
            }
        }
    }

    /// Cycle-set identity for the triple: `(x·y)·(x·z) = (y·x)·(y·z)`.
    #[inline]
    fn triple(&self, st: &mut State, x: usize, y: usize, z: usize, queue: &mut Vec<u16>) -> bool {
        if x == y {
            return true;
        }
        let n = self.n;
        let a = st.val[x * n + y];
        let b = st.val[x * n + z];
        let c = st.val[y * n + x];
        let d = st.val[y * n + z];
        if a == UNK || b == UNK || c == UNK || d == UNK {
            return true;
        }
        self.equalize(st, a as usize * n + b as usize, c as usize * n + d as usize, queue)
    }

    fn propagate(&self, st: &mut State, queue: &mut Vec<u16>) -> bool {
        let n = self.n;
        while let Some(cell) = queue.pop() {
            let cell = cell as usize;
            let (p, q) = (cell / n, cell % n);
            let bit = 1u16 << st.val[cell];
            // Row bijectivity: naked singles.
            for y in 0..n {
                let c = p * n + y;
                if st.val[c] != UNK {
                    continue;
                }
                let r = Self::find(st, c);
                if st.dom[r] & bit == 0 {
                    continue;
                }
                st.dom[r] &= !bit;
                match st.dom[r].count_ones() {
                    0 => return false,
                    1 => {
                        let w = st.dom[r].trailing_zeros() as u8;
                        if !self.assign(st, c, w, queue) {
                            return false;
                        }
                    }
                    _ => {}
                }
            }
            // Row bijectivity: hidden singles.
            for w in 0..n {
                if st.inv[p * n + w] != UNK {
                    continue;
                }
                let wb = 1u16 << w;
                let mut count = 0;
                let mut last = 0;
                for y in 0..n {
                    let c = p * n + y;
                    if st.val[c] == UNK && st.dom[Self::find(st, c)] & wb != 0 {
                        count += 1;
                        last = c;
                    }
                }
                match count {
                    0 => return false,
                    1 => {
                        if !self.assign(st, last, w as u8, queue) {
                            return false;
                        }
                    }
                    _ => {}
                }
            }
            // The new cell as one of the four inner cells of a triple.
            for k in 0..n {
                if !self.triple(st, p, q, k, queue)
                    || !self.triple(st, p, k, q, queue)
                    || !self.triple(st, q, p, k, queue)
                    || !self.triple(st, k, p, q, queue)
                {
                    return false;
                }
            }
            // The new cell as an outer cell: x·y = p and x·z = q.
            for x in 0..n {
                let y = st.inv[x * n + p];
                let z = st.inv[x * n + q];
                if y != UNK && z != UNK && !self.triple(st, x, y as usize, z as usize, queue) {
                    return false;
                }
            }
        }
        true
    }

    /// Domain reasoning over all triples with `x·y` and `y·x` known: from
    /// `σ_a(b) = σ_c(d)` one side's inner cell follows from the other.
    fn sweep(&self, st: &mut State, queue: &mut Vec<u16>) -> bool {
        let n = self.n;
        loop {
            let mut changed = false;
            for x in 0..n {
                for y in 0..n {
                    if x == y {
                        continue;
                    }
                    let a = st.val[x * n + y];
                    let c = st.val[y * n + x];
                    if a == UNK || c == UNK {
                        continue;
                    }
                    let (a, c) = (a as usize, c as usize);
                    for z in 0..n {
                        let b = st.val[x * n + z];
                        let d = st.val[y * n + z];
                        let (outer, open_cell, other_row) = match (b == UNK, d == UNK) {
                            (false, true) => (a * n + b as usize, y * n + z, c),
                            (true, false) => (c * n + d as usize, x * n + z, a),
                            _ => continue,
                        };
                        let w = st.val[outer];
                        if w == UNK {
                            continue;
                        }
                        let forced = st.inv[other_row * n + w as usize];
                        if forced != UNK {
                            if !self.assign(st, open_cell, forced, queue) {
                                return false;
                            }
                            changed = true;
                            continue;
                        }
                        let r = Self::find(st, open_cell);
                        let mut keep = 0u16;
                        let mut cand = st.dom[r];
                        while cand != 0 {
                            let v = cand.trailing_zeros() as usize;
                            cand &= cand - 1;
                            let cr = Self::find(st, other_row * n + v);
                            if st.dom[cr] & (1 << w) != 0 {
                                keep |= 1 << v;
                            }
                        }
                        if keep != st.dom[r] {
                            st.dom[r] = keep;
                            changed = true;
                            match keep.count_ones() {
                                0 => return false,
                                1 => {
                                    let v = keep.trailing_zeros() as u8;
                                    if !self.assign(st, open_cell, v, queue) {
                                        return false;
                                    }
                                }
                                _ => {}
                            }
                        }
                    }
                }
            }
            if !queue.is_empty() && !self.propagate(st, queue) {
                return false;
            }
            if !changed {
                return true;
            }
        }
    }

    /// Advances every pending comparison of `T` against `π(T)` along the
    /// fill order. Returns `false` if some relabeling yields a smaller table.
    fn lex_filter(&self, st: &State, active: &[(u32, u16)], next: &mut Active) -> bool {
        let n = self.n;
        let total = self.order.len() as u16;
        next.clear();
        for &(idx, mut pos) in active {
            let pi = &self.sym[idx as usize];
            let mut keep = true;
            while pos < total {
                let cell = self.order[pos as usize] as usize;
                let t = st.val[cell];
                if t == UNK {
                    break;
                }
                let (i, j) = (cell / n, cell % n);
                let u = st.val[pi.inv[i] as usize * n + pi.inv[j] as usize];
                if u == UNK {
                    break;
                }
                let pu = pi.fwd[u as usize];
                if pu < t {
                    return false;
                }
                if pu > t {
                    keep = false;
                    break;
                }
                pos += 1;
            }
            if keep && pos < total {
                next.push((idx, pos));
            }
        }
        true
    }

    fn first_open(&self, st: &State) -> Option<usize> {
        self.order.iter().map(|&c| c as usize).find(|&c| st.val[c] == UNK)
    }

    fn row0_done(&self, st: &State) -> bool {
        st.val[..self.n].iter().all(|&v| v != UNK)
    }

    fn is_transitive(&self, st: &State) -> bool {
        let n = self.n;
        let mut seen = 1u16;
        let mut stack = vec![0usize];
        while let Some(p) = stack.pop() {
            for x in 0..n {
                let img = st.val[x * n + p] as usize;
                if seen & (1 << img) == 0 {
                    seen |= 1 << img;
                    stack.push(img);
                }
            }
        }
        seen.count_ones() as usize == n
    }

    fn dfs<F: FnMut(&[u8])>(&self, st: &State, active: &[(u32, u16)], ctx: &mut Dfs<'_, F>) {
        ctx.stats.nodes += 1;
        if let Some(shards) = ctx.shards.as_mut() {
            if self.row0_done(st) {
                shards.push(st.clone());
                return;
            }
        }
        let open = match self.first_open(st) {
            None => {
                ctx.stats.leaves += 1;
                if active.is_empty() && (!self.indecomposable || self.is_transitive(st)) {
                    ctx.stats.emitted += 1;
                    (ctx.emit)(&st.val[..self.n * self.n]);
                }
                return;
            }
            Some(c) => c,
        };
        let mut queue = Vec::with_capacity(CELLS);
        let mut next = Vec::with_capacity(active.len());
        let mut probe = st.clone();
        let root = Self::find(&mut probe, open);
        let mut dom = probe.dom[root];
        while dom != 0 {
            let v = dom.trailing_zeros() as u8;
            dom &= dom - 1;
            let mut child = probe.clone();
            queue.clear();
            if !self.assign(&mut child, open, v, &mut queue)
                || !self.propagate(&mut child, &mut queue)
                || !self.sweep(&mut child, &mut queue)
            {
                continue;
            }
            if !self.lex_filter(&child, active, &mut next) {
                continue;
            }
            self.dfs(&child, &next, ctx);
        }
    }
}

struct Dfs<'a, F> {
    stats: SearchStats,
    emit: &'a mut F,
    shards: Option<Vec<State>>,
}

/// Options for a [`Plan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub n: usize,
    /// Only emit tables whose rows generate a transitive group.
    pub indecomposable: bool,
}

/// A planned search: the shards of every squaring-map cycle type.
pub struct Plan {
    opts: SearchOptions,
    frames: Vec<Frame>,
    shards: Vec<Shard>,
}

/// What one shard produced.
#[derive(Clone, Debug, Default)]
pub struct ShardOutput {
    pub tables: Vec<Vec<u8>>,
    pub stats: SearchStats,
}

impl Plan {
    pub fn new(opts: SearchOptions) -> Plan {
        let mut frames = Vec::new();
        let mut shards = Vec::new();
        for parts in partitions(opts.n) {
            // Finite square-free cycle sets are decomposable (Rump), so the
            // identity squaring map contributes nothing to an indecomposable
            // search. Its centralizer is all of Sym(n), the costliest frame.
            if opts.indecomposable && opts.n > 1 && parts.iter().all(|&p| p == 1) {
                continue;
            }
            let frame = Frame::new(&parts, opts.indecomposable);
            let fi = frames.len();
            if let Some(root) = frame.root() {
                let all: Active = (0..frame.sym.len() as u32).map(|i| (i, 0)).collect();
                let mut active = Vec::new();
                if frame.lex_filter(&root, &all, &mut active) {
                    let mut ctx = Dfs {
                        stats: SearchStats::default(),
                        emit: &mut |_: &[u8]| {},
                        shards: Some(Vec::new()),
                    };
                    frame.dfs(&root, &active, &mut ctx);
                    for state in ctx.shards.unwrap_or_default() {
                        shards.push(Shard { frame: fi, state });
                    }
                }
            }
            frames.push(frame);
        }
        Plan { opts, frames, shards }
    }

    pub fn options(&self) -> SearchOptions {
        self.opts
    }

    pub fn shard_count(&self) -> usize {
        self.shards.len()
    }

    /// Squaring-map cycle type searched by a shard.
    pub fn shard_type(&self, idx: usize) -> Vec<u8> {
        self.frames[self.shards[idx].frame].square.clone()
    }

    /// Runs one shard to completion.
    pub fn run_shard(&self, idx: usize) -> ShardOutput {
        let shard = &self.shards[idx];
        let frame = &self.frames[shard.frame];
        let all: Active = (0..frame.sym.len() as u32).map(|i| (i, 0)).collect();
        let mut active = Vec::new();
        let passed = frame.lex_filter(&shard.state, &all, &mut active);
        debug_assert!(passed, "shards are recorded after passing the filter");
        drop(all);
        let mut tables = Vec::new();
        let mut emit = |t: &[u8]| tables.push(t.to_vec());
        let mut ctx = Dfs {
            stats: SearchStats::default(),
            emit: &mut emit,
            shards: None,
        };
        frame.dfs(&shard.state, &active, &mut ctx);
        let stats = ctx.stats;
        ShardOutput { tables, stats }
    }

    /// Runs the listed shards on the rayon pool, results in input order.
    pub fn run_many(&self, which: &[usize]) -> Vec<ShardOutput> {
        which.par_iter().map(|&i| self.run_shard(i)).collect()
    }
}

/// Every table of the search, sorted, plus merged counters.
pub fn enumerate_tables(opts: SearchOptions) -> (Vec<Vec<u8>>, SearchStats) {
    let plan = Plan::new(opts);
    let all: Vec<usize> = (0..plan.shard_count()).collect();
    let mut tables = Vec::new();
    let mut stats = SearchStats::default();
    for out in plan.run_many(&all) {
        tables.extend(out.tables);
        stats = stats.merge(out.stats);
    }
    tables.sort();
    (tables, stats)
}
