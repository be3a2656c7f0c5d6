//! Core predicates over a repair-group structure.
//!
//! A set S is a core when no group is over-represented: a group S_i may meet S
//! in at most cap_i = |S_i|−δ+1 coordinates. Inside a hub block whose hub is
//! absent from S, at most one group may reach its cap.

use crate::covers::CoverStructure;

/// Precomputed view of a structure for core queries.
#[derive(Clone, Debug)]
pub struct CoreQuery<'a> {
    structure: &'a CoverStructure,
    k: usize,
    caps: Vec<usize>,
    // 0-based group numbers containing each coordinate; index 0 unused
    member: Vec<Vec<usize>>,
    // hub block index of each group
    block_of: Vec<Option<usize>>,
    // 0-based group numbers of each hub block
    blocks: Vec<Vec<usize>>,
    hubs: Vec<usize>,
}

impl<'a> CoreQuery<'a> {
    pub fn new(structure: &'a CoverStructure, delta: usize, k: usize) -> Self {
        let n = structure.n;
        let caps = structure.groups.iter().map(|g| (g.len() + 1).saturating_sub(delta)).collect();
        let mut member = vec![Vec::new(); n + 1];
        for (i, g) in structure.groups.iter().enumerate() {
            for &c in g {
                member[c].push(i);
            }
        }
        let blocks: Vec<Vec<usize>> =
            structure.hub_blocks.iter().map(|b| b.iter().map(|&i| i - 1).collect()).collect();
        let mut block_of = vec![None; structure.t()];
        for (j, b) in blocks.iter().enumerate() {
            for &i in b {
                block_of[i] = Some(j);
            }
        }
        CoreQuery { structure, k, caps, member, block_of, blocks, hubs: structure.hubs.clone() }
    }

    pub fn structure(&self) -> &CoverStructure {
        self.structure
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// |S_i| − δ + 1 for the 1-based group `i`.
    pub fn cap(&self, i: usize) -> usize {
        self.caps[i - 1]
    }

    fn counts(&self, s: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.caps.len()];
        for &c in s {
            for &g in &self.member[c] {
                counts[g] += 1;
            }
        }
        counts
    }

    /// Whether `s` is a core.
    pub fn is_core(&self, s: &[usize]) -> bool {
        if s.iter().any(|&c| c == 0 || c > self.structure.n) {
            return false;
        }
        let counts = self.counts(s);
        if counts.iter().zip(&self.caps).any(|(c, cap)| c > cap) {
            return false;
        }
        for (block, &hub) in self.blocks.iter().zip(&self.hubs) {
            if s.contains(&hub) {
                continue;
            }
            let fits = |ij: usize| {
                block.iter().all(|&i| if i == ij { counts[i] <= self.caps[i] } else { counts[i] < self.caps[i] })
            };
            if !block.iter().any(|&ij| fits(ij)) {
                return false;
            }
        }
        true
    }

    /// Whether `s` is a core of size k.
    pub fn is_k_core(&self, s: &[usize]) -> bool {
        s.len() == self.k && self.is_core(s)
    }
}

/// Ω₀ together with the per-group picks U_i it was assembled from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Omega0 {
    pub indices: Vec<usize>,
    pub per_group_picks: Vec<Vec<usize>>,
}

/// Smallest cap_i coordinates of every group; in a hub block the hub is taken first.
pub fn omega0(q: &CoreQuery) -> Omega0 {
    let s = q.structure;
    let mut picks = Vec::with_capacity(s.t());
    for (i, g) in s.groups.iter().enumerate() {
        let cap = q.caps[i];
        let mut sorted = g.clone();
        sorted.sort_unstable();
        let u: Vec<usize> = match q.block_of[i] {
            Some(j) => {
                let hub = q.hubs[j];
                let mut u = vec![hub];
                u.extend(sorted.iter().copied().filter(|&c| c != hub).take(cap.saturating_sub(1)));
                u.sort_unstable();
                u
            }
            None => sorted.into_iter().take(cap).collect(),
        };
        picks.push(u);
    }
    let mut indices: Vec<usize> = picks.iter().flatten().copied().collect();
    indices.sort_unstable();
    indices.dedup();
    Omega0 { indices, per_group_picks: picks }
}

/// Callbacks for [`visit_lambda_cores`]. `enter`/`exit` bracket every
/// coordinate added to the partial selection; `leaf` sees each complete S₀.
pub trait CoreVisitor {
    /// Return false to skip the subtree below `c`.
    fn enter(&mut self, _c: usize) -> bool {
        true
    }
    fn exit(&mut self, _c: usize) {}
    /// Return false to stop the whole search.
    fn leaf(&mut self, s0: &[usize]) -> bool;
}

struct Search<'q, 'a, V> {
    q: &'q CoreQuery<'a>,
    ground: &'q [usize],
    target: usize,
    counts: Vec<usize>,
    in_s: Vec<bool>,
    // primary (first) group of each ground element, for the capacity bound
    primary: Vec<usize>,
    // remaining[g]: ground elements after the cursor whose primary group is g
    remaining: Vec<usize>,
    partial: Vec<usize>,
    visitor: V,
    stopped: bool,
}

impl<V: CoreVisitor> Search<'_, '_, V> {
    fn add(&mut self, c: usize) -> bool {
        self.in_s[c] = true;
        let mut ok = true;
        for &g in &self.q.member[c] {
            self.counts[g] += 1;
            ok &= self.counts[g] <= self.q.caps[g];
        }
        if ok {
            for &g in &self.q.member[c] {
                if let Some(j) = self.q.block_of[g] {
                    ok &= self.block_ok(j);
                }
            }
        }
        ok
    }

    fn remove(&mut self, c: usize) {
        self.in_s[c] = false;
        for &g in &self.q.member[c] {
            self.counts[g] -= 1;
        }
    }

    // counts within caps already; at most one group at cap when the hub is absent
    fn block_ok(&self, j: usize) -> bool {
        if self.in_s[self.q.hubs[j]] {
            return true;
        }
        self.q.blocks[j].iter().filter(|&&i| self.counts[i] == self.q.caps[i]).count() <= 1
    }

    fn headroom(&self) -> usize {
        self.remaining
            .iter()
            .enumerate()
            .map(|(g, &left)| left.min(self.q.caps[g].saturating_sub(self.counts[g])))
            .sum()
    }

    fn run(&mut self, from: usize) {
        if self.partial.len() == self.target {
            if !self.visitor.leaf(&self.partial) {
                self.stopped = true;
            }
            return;
        }
        for pos in from..self.ground.len() {
            let c = self.ground[pos];
            self.remaining[self.primary[pos]] -= 1;
            if self.stopped {
                continue;
            }
            let need = self.target - self.partial.len();
            if self.ground.len() - pos < need {
                continue;
            }
            let ok = self.add(c);
            // c itself plus what the rest can still contribute
            if ok && 1 + self.headroom() >= need && self.visitor.enter(c) {
                self.partial.push(c);
                self.run(pos + 1);
                self.partial.pop();
                self.visitor.exit(c);
            }
            self.remove(c);
        }
        for pos in from..self.ground.len() {
            self.remaining[self.primary[pos]] += 1;
        }
    }
}

/// Depth-first search, in lexicographic order, over every `size`-subset X of
/// `ground` such that X ∪ `forced` is a core. `ground` must be sorted and
/// disjoint from `forced`. Returns the visitor and whether the search ran to
/// completion.
pub fn visit_cores<V: CoreVisitor>(
    q: &CoreQuery,
    ground: &[usize],
    forced: &[usize],
    size: usize,
    visitor: V,
) -> (V, bool) {
    let n = q.structure.n;
    let mut search = Search {
        q,
        ground,
        target: size,
        counts: vec![0; q.caps.len()],
        in_s: vec![false; n + 1],
        primary: ground.iter().map(|&c| q.member[c][0]).collect(),
        remaining: vec![0; q.caps.len()],
        partial: Vec::with_capacity(size),
        visitor,
        stopped: false,
    };
    for &g in &search.primary {
        search.remaining[g] += 1;
    }
    let mut ok = true;
    for &c in forced {
        ok &= search.add(c);
    }
    if ok {
        search.run(0);
    }
    let completed = !search.stopped;
    (search.visitor, completed)
}

/// [`visit_cores`] for Λ: (k−1)-subsets S₀ with S₀ ∪ {λ} a core.
pub fn visit_lambda_cores<V: CoreVisitor>(q: &CoreQuery, ground: &[usize], lambda: usize, visitor: V) -> (V, bool) {
    visit_cores(q, ground, &[lambda], q.k.saturating_sub(1), visitor)
}

struct Collect(Vec<Vec<usize>>);

impl CoreVisitor for Collect {
    fn leaf(&mut self, s0: &[usize]) -> bool {
        self.0.push(s0.to_vec());
        true
    }
}

struct Count(u64);

impl CoreVisitor for Count {
    fn leaf(&mut self, _: &[usize]) -> bool {
        self.0 += 1;
        true
    }
}

/// Λ for coordinate λ: every (k−1)-subset S₀ of `ground` with S₀ ∪ {λ} a core.
/// `ground` must be sorted and must not contain λ.
pub fn lambda_cores(q: &CoreQuery, ground: &[usize], lambda: usize) -> impl Iterator<Item = Vec<usize>> {
    debug_assert!(!ground.contains(&lambda));
    visit_lambda_cores(q, ground, lambda, Collect(Vec::new())).0 .0.into_iter()
}

pub fn count_lambda_cores(q: &CoreQuery, ground: &[usize], lambda: usize) -> u64 {
    visit_lambda_cores(q, ground, lambda, Count(0)).0 .0
}

/// A k-subset of `t` that is a core, built from the largest core W ⊆ T that
/// caps every over-full group. W keeps the hub where the hub is in T; otherwise
/// the first over-full group of a hub block keeps cap coordinates and the others
/// cap−1. Returns the k smallest coordinates of W, or None if |W| < k.
pub fn core_within(t: &[usize], q: &CoreQuery) -> Option<Vec<usize>> {
    let s = q.structure;
    let mut in_t = vec![false; s.n + 1];
    for &c in t {
        if c >= 1 && c <= s.n {
            in_t[c] = true;
        }
    }
    let sorted_meet = |i: usize| -> Vec<usize> {
        let mut v: Vec<usize> = s.groups[i].iter().copied().filter(|&c| in_t[c]).collect();
        v.sort_unstable();
        v
    };
    let mut w: Vec<usize> = Vec::new();
    for (i, cap) in q.caps.iter().copied().enumerate() {
        if q.block_of[i].is_none() {
            w.extend(sorted_meet(i).into_iter().take(cap));
        }
    }
    for (block, &hub) in q.blocks.iter().zip(&q.hubs) {
        let saturated: Vec<usize> = block.iter().copied().filter(|&i| sorted_meet(i).len() >= q.caps[i]).collect();
        for &i in block {
            let meet = sorted_meet(i);
            let cap = q.caps[i];
            if !saturated.contains(&i) {
                w.extend(meet);
            } else if in_t[hub] {
                w.push(hub);
                w.extend(meet.into_iter().filter(|&c| c != hub).take(cap - 1));
            } else if saturated[0] == i {
                w.extend(meet.into_iter().take(cap));
            } else {
                w.extend(meet.into_iter().take(cap - 1));
            }
        }
    }
    w.sort_unstable();
    w.dedup();
    if w.len() < q.k {
        return None;
    }
    w.truncate(q.k);
    debug_assert!(q.is_core(&w));
    Some(w)
}
