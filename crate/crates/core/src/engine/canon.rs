//! Graph positions solved up to isomorphism.
//!
//! A graph position is reduced to a canonical adjacency encoding by colour
//! refinement plus individualization, keeping the lexicographically least leaf.
//! Optionally, pairs of non-adjacent vertices with equal neighbourhoods are
//! deleted first: swapping them is an automorphism that moves every vertex off
//! its neighbours, and such a swap leaves the value of the remaining graph intact.

use std::sync::atomic::{AtomicU64, Ordering};

use smallvec::SmallVec;

use super::{mex, EngineConfig, EngineStats, Grundy, TranspositionTable};
use crate::complex::Face;
use crate::error::{Error, ResourceKind, Result};
use crate::state::{GameState, Move};

pub const MAX_VERTICES: usize = 64;

/// Simple graph on at most 64 vertices, one adjacency word per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    adj: Vec<u64>,
}

type CanonKey = Box<[u64]>;

#[inline]
fn bit(v: usize) -> u64 {
    1u64 << v
}

/// Packs the bits of `word` selected by `mask` into the low bits.
fn compress(word: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros();
        if word >> v & 1 == 1 {
            out |= 1 << k;
        }
        k += 1;
        m &= m - 1;
    }
    out
}

impl SmallGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::NotApplicable(format!("{n} vertices exceed the {MAX_VERTICES}-vertex limit")));
        }
        let mut adj = vec![0u64; n];
        for (a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidComplex(format!("bad edge ({a}, {b}) on {n} vertices")));
            }
            adj[a] |= bit(b);
            adj[b] |= bit(a);
        }
        Ok(SmallGraph { adj })
    }

    /// Remaining vertices and edges of a graph position, renumbered in vertex order.
    pub fn from_state(state: &GameState) -> Result<Self> {
        if !state.is_graph() {
            return Err(Error::NotAGraph);
        }
        let mut ids = Vec::new();
        let mut edges = Vec::new();
        for f in state.faces() {
            match f.vertices() {
                [v] => ids.push(*v),
                [a, b] => edges.push((*a, *b)),
                _ => unreachable!(),
            }
        }
        let pos = |v| ids.binary_search(&v).expect("edge endpoints are present");
        let edges: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (pos(a), pos(b))).collect();
        SmallGraph::new(ids.len(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] & bit(b) != 0
    }

    pub fn neighbours(&self, v: usize) -> u64 {
        self.adj[v]
    }

    fn all(&self) -> u64 {
        if self.adj.len() == 64 {
            u64::MAX
        } else {
            bit(self.adj.len()) - 1
        }
    }

    /// Subgraph induced on the vertices in `mask`, renumbered in order.
    pub fn induced(&self, mask: u64) -> SmallGraph {
        let mut adj = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            adj.push(compress(self.adj[v], mask));
            m &= m - 1;
        }
        SmallGraph { adj }
    }

    pub fn remove_vertex(&self, v: usize) -> SmallGraph {
        self.induced(self.all() & !bit(v))
    }

    pub fn remove_edge(&self, a: usize, b: usize) -> SmallGraph {
        let mut g = self.clone();
        g.adj[a] &= !bit(b);
        g.adj[b] &= !bit(a);
        g
    }

    /// Vertex masks of the connected components, ordered by smallest vertex.
    pub fn components(&self) -> SmallVec<[u64; 4]> {
        let mut out = SmallVec::new();
        let mut left = self.all();
        while left != 0 {
            let mut comp = left & left.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0;
                let mut f = frontier;
                while f != 0 {
                    next |= self.adj[f.trailing_zeros() as usize];
                    f &= f - 1;
                }
                frontier = next & !comp;
                comp |= next;
            }
            out.push(comp);
            left &= !comp;
        }
        out
    }

    /// Repeatedly deletes pairs of non-adjacent vertices with identical neighbourhoods.
    pub fn reduce_false_twins(&self) -> SmallGraph {
        let mut g = self.clone();
        'outer: loop {
            let n = g.adj.len();
            for u in 0..n {
                for v in u + 1..n {
                    if g.adj[u] == g.adj[v] && g.adj[u] & bit(v) == 0 {
                        g = g.induced(g.all() & !bit(u) & !bit(v));
                        continue 'outer;
                    }
                }
            }
            return g;
        }
    }

    #[inline]
    fn twins(&self, u: usize, v: usize) -> bool {
        self.adj[u] & !bit(v) == self.adj[v] & !bit(u)
    }

    /// Splits colour classes by the multiset of neighbour colours until stable.
    /// Colours stay dense and ranked, so the result depends only on the isomorphism type.
    fn refine(&self, col: &mut [u32]) {
        let n = self.adj.len();
        let mut classes = col.iter().copied().max().map_or(0, |m| m + 1);
        loop {
            let mut sigs: Vec<(u32, SmallVec<[u32; 16]>, usize)> = (0..n)
                .map(|v| {
                    let mut ns: SmallVec<[u32; 16]> = SmallVec::new();
                    let mut m = self.adj[v];
                    while m != 0 {
                        ns.push(col[m.trailing_zeros() as usize]);
                        m &= m - 1;
                    }
                    ns.sort_unstable();
                    (col[v], ns, v)
                })
                .collect();
            sigs.sort_unstable();
            let mut rank = 0u32;
            for i in 0..n {
                if i > 0 && (sigs[i].0 != sigs[i - 1].0 || sigs[i].1 != sigs[i - 1].1) {
                    rank += 1;
                }
                col[sigs[i].2] = rank;
            }
            let now = if n == 0 { 0 } else { rank + 1 };
            if now == classes {
                return;
            }
            classes = now;
        }
    }

    /// Isomorphism-invariant encoding: equal keys iff the graphs are isomorphic.
    pub fn canonical_form(&self) -> CanonKey {
        let n = self.adj.len();
        let col: Vec<u32> = self.adj.iter().map(|w| w.count_ones()).collect();
        // Degrees need not be dense; rank them before refining.
        let mut degrees = col.clone();
        degrees.sort_unstable();
        degrees.dedup();
        let col = col.iter().map(|d| degrees.binary_search(d).unwrap() as u32).collect();
        let mut search = Labeling { g: self, best: None, autos: Vec::new(), prefix: Vec::new() };
        search.search(col);
        search.best.map_or_else(|| vec![0u64; n].into_boxed_slice(), |b| b.rows.into_boxed_slice())
    }
}

/// Least leaf seen so far: adjacency rows in canonical order and the vertex at each position.
struct Leaf {
    rows: Vec<u64>,
    at: Vec<u8>,
}

/// Automorphisms kept for pruning; more rarely pay for themselves.
const MAX_AUTOMORPHISMS: usize = 32;

struct Labeling<'a> {
    g: &'a SmallGraph,
    best: Option<Leaf>,
    /// Automorphisms found by comparing leaves with equal rows.
    autos: Vec<Vec<u8>>,
    /// Vertices individualized on the path to the current node.
    prefix: Vec<usize>,
}

impl Labeling<'_> {
    fn search(&mut self, mut col: Vec<u32>) {
        let g = self.g;
        g.refine(&mut col);
        let n = g.adj.len();
        let mut sizes = vec![0u32; n];
        for &c in &col {
            sizes[c as usize] += 1;
        }
        let Some(target) = sizes.iter().position(|&s| s > 1) else {
            self.leaf(&col);
            return;
        };
        let target = target as u32;
        let mut tried: SmallVec<[usize; 8]> = SmallVec::new();
        for v in (0..n).filter(|&v| col[v] == target) {
            // Swapping twins is an automorphism fixing everything individualized so far.
            if tried.iter().any(|&u| g.twins(u, v) || self.same_orbit(u, v)) {
                continue;
            }
            tried.push(v);
            let next = col
                .iter()
                .enumerate()
                .map(|(w, &c)| if c > target || (c == target && w != v) { c + 1 } else { c })
                .collect();
            self.prefix.push(v);
            self.search(next);
            self.prefix.pop();
        }
    }

    fn leaf(&mut self, col: &[u32]) {
        let g = self.g;
        let n = g.adj.len();
        let mut rows = vec![0u64; n];
        let mut at = vec![0u8; n];
        for v in 0..n {
            let mut row = 0;
            let mut m = g.adj[v];
            while m != 0 {
                row |= bit(col[m.trailing_zeros() as usize] as usize);
                m &= m - 1;
            }
            rows[col[v] as usize] = row;
            at[col[v] as usize] = v as u8;
        }
        match &self.best {
            Some(b) if rows == b.rows => {
                // Same leaf up to relabelling: v here plays the part of `b.at[col[v]]` there.
                let gamma: Vec<u8> = (0..n).map(|v| b.at[col[v] as usize]).collect();
                if self.autos.len() < MAX_AUTOMORPHISMS && gamma.iter().enumerate().any(|(v, &w)| v != w as usize) {
                    self.autos.push(gamma);
                }
            }
            Some(b) if rows >= b.rows => {}
            _ => self.best = Some(Leaf { rows, at }),
        }
    }

    /// Whether the known automorphisms fixing the prefix join `u` and `v` in one orbit.
    fn same_orbit(&self, u: usize, v: usize) -> bool {
        let stab: SmallVec<[&Vec<u8>; 8]> =
            self.autos.iter().filter(|a| self.prefix.iter().all(|&p| a[p] as usize == p)).collect();
        if stab.is_empty() {
            return false;
        }
        let mut orbit = bit(u);
        let mut frontier = bit(u);
        while frontier != 0 {
            let w = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            for a in &stab {
                let x = bit(a[w] as usize);
                if orbit & x == 0 {
                    orbit |= x;
                    frontier |= x;
                }
            }
        }
        orbit & bit(v) != 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalOptions {
    pub twin_reduction: bool,
}

impl Default for CanonicalOptions {
    fn default() -> Self {
        CanonicalOptions { twin_reduction: true }
    }
}

/// Solver for graph positions memoized on canonical forms.
pub struct CanonicalEngine {
    tt: TranspositionTable<CanonKey>,
    config: EngineConfig,
    options: CanonicalOptions,
    nodes: AtomicU64,
}

struct Search<'a> {
    engine: &'a CanonicalEngine,
    nodes: u64,
    budget: u64,
}

impl CanonicalEngine {
    pub fn new(config: EngineConfig, options: CanonicalOptions) -> Self {
        CanonicalEngine {
            tt: TranspositionTable::new(config.table_capacity),
            config,
            options,
            nodes: AtomicU64::new(0),
        }
    }

    pub fn stats(&self) -> EngineStats {
        EngineStats {
            nodes_expanded: self.nodes.load(Ordering::Relaxed),
            table_entries: self.tt.len(),
            table_hits: self.tt.hits(),
            table_misses: self.tt.misses(),
        }
    }

    pub fn grundy(&self, state: &GameState) -> Result<Grundy> {
        self.grundy_graph(&SmallGraph::from_state(state)?)
    }

    pub fn grundy_graph(&self, g: &SmallGraph) -> Result<Grundy> {
        let mut search = Search { engine: self, nodes: 0, budget: self.config.node_budget };
        let result = search.position(g);
        self.nodes.fetch_add(search.nodes, Ordering::Relaxed);
        result.map(Grundy)
    }

    /// First move in move order to a zero position, or `None` when the position is lost.
    pub fn best_move(&self, state: &GameState) -> Result<Option<Move>> {
        if self.grundy(state)?.is_zero() {
            return Ok(None);
        }
        let faces: Vec<Face> = state.faces().cloned().collect();
        for face in faces {
            let mv = Move::new(face);
            let child = state.apply_move(&mv)?;
            if self.grundy(&child)?.is_zero() {
                return Ok(Some(mv));
            }
        }
        unreachable!("a nonzero position always has a move to zero")
    }
}

impl Search<'_> {
    fn position(&mut self, g: &SmallGraph) -> Result<u32> {
        let reduced;
        let g = if self.engine.options.twin_reduction {
            reduced = g.reduce_false_twins();
            &reduced
        } else {
            g
        };
        let comps = g.components();
        if comps.len() == 1 {
            return self.component(g);
        }
        let mut value = 0;
        for mask in comps {
            value ^= self.component(&g.induced(mask))?;
        }
        Ok(value)
    }

    fn component(&mut self, g: &SmallGraph) -> Result<u32> {
        match g.vertex_count() {
            0 => return Ok(0),
            1 => return Ok(1),
            2 => return Ok(2),
            _ => {}
        }
        let key = g.canonical_form();
        if let Some(v) = self.engine.tt.get(&key) {
            return Ok(v);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceExceeded(ResourceKind::NodeBudget(self.budget)));
        }
        let n = g.vertex_count();
        let mut values = Vec::with_capacity(n + g.edge_count());
        for v in 0..n {
            values.push(self.position(&g.remove_vertex(v))?);
        }
        for a in 0..n {
            let mut m = g.neighbours(a) & !(bit(a + 1) - 1);
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                values.push(self.position(&g.remove_edge(a, b))?);
                m &= m - 1;
            }
        }
        let value = mex(values);
        self.engine.tt.insert(key, value)?;
        Ok(value)
    }
}

/// One-shot value of a graph position through a fresh canonical engine.
pub fn grundy_canonicalized(state: &GameState, config: &EngineConfig, options: CanonicalOptions) -> Result<Grundy> {
    CanonicalEngine::new(config.clone(), options).grundy(state)
}

/// Upper bound on the number of connected sub-positions the exact engine can meet:
/// per component, the sum over vertex subsets `S` of `2^e(S)`. Counting stops once it
/// passes `limit`. `None` when the position is not a small graph.
pub fn exact_state_bound(state: &GameState, limit: u64) -> Option<u64> {
    let g = SmallGraph::from_state(state).ok()?;
    let mut total: u64 = 0;
    for mask in g.components() {
        let c = g.induced(mask);
        let (n, e) = (c.vertex_count(), c.edge_count());
        if n + e < 63 && (1u64 << (n + e)) <= limit {
            total = total.saturating_add(1 << (n + e));
            continue;
        }
        if n > 24 {
            return Some(limit.saturating_add(1));
        }
        for s in 1u64..(1u64 << n) {
            let mut edges = 0;
            let mut m = s;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                edges += (c.adj[v] & s).count_ones();
                m &= m - 1;
            }
            total = total.saturating_add(1u64.checked_shl(edges / 2).unwrap_or(u64::MAX));
            if total > limit {
                return Some(total);
            }
        }
    }
    Some(total)
}
