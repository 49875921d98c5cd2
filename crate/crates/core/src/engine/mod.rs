//! Exhaustive Sprague–Grundy solver.
//!
//! Values are computed by memoized mex recursion on connected components and
//! combined with XOR. The exact-state engine here keys its table on the raw face
//! bitmask; [`canon`] provides an isomorphism-invariant variant for graphs.

pub mod canon;

use std::fmt;
use std::ops::BitXor;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};

use crate::bits::FaceSet;
use crate::error::{Error, ResourceKind, Result};
use crate::state::{FaceTable, GameState, Move};

pub use canon::{grundy_canonicalized, CanonicalEngine, CanonicalOptions};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;
pub const DEFAULT_TABLE_CAPACITY: usize = 20_000_000;

/// Nim-value of a position. Zero exactly when the player to move loses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grundy(pub u32);

impl Grundy {
    pub const ZERO: Grundy = Grundy(0);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn outcome(self) -> Outcome {
        if self.0 == 0 {
            Outcome::B
        } else {
            Outcome::A
        }
    }
}

impl BitXor for Grundy {
    type Output = Grundy;

    fn bitxor(self, rhs: Grundy) -> Grundy {
        Grundy(self.0 ^ rhs.0)
    }
}

impl fmt::Display for Grundy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Who wins with perfect play: `A` moves first, `B` second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    A,
    B,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::A => "A",
            Outcome::B => "B",
            Outcome::Unknown => "Unknown",
        })
    }
}

/// Smallest nonnegative integer missing from `values`.
pub fn mex(values: impl IntoIterator<Item = u32>) -> u32 {
    let mut set = MexSet::default();
    for v in values {
        set.insert(v);
    }
    set.mex()
}

pub fn xor_sum(a: Grundy, b: Grundy) -> Grundy {
    a ^ b
}

#[derive(Default)]
struct MexSet {
    low: u64,
    high: Vec<u32>,
}

impl MexSet {
    #[inline]
    fn insert(&mut self, v: u32) {
        if v < 64 {
            self.low |= 1 << v;
        } else {
            self.high.push(v);
        }
    }

    fn mex(mut self) -> u32 {
        let low = (!self.low).trailing_zeros();
        if low < 64 {
            return low;
        }
        self.high.sort_unstable();
        self.high.dedup();
        let mut m = 64;
        for v in self.high {
            if v == m {
                m += 1;
            } else if v > m {
                break;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Maximum number of positions expanded by one call.
    pub node_budget: u64,
    /// Maximum number of entries kept in the transposition table.
    pub table_capacity: usize,
    /// Disable to run the bare mex recursion (tests only; exponential).
    pub memoize: bool,
    /// Evaluate the children of the root component on the rayon pool.
    pub parallel: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            node_budget: DEFAULT_NODE_BUDGET,
            table_capacity: DEFAULT_TABLE_CAPACITY,
            memoize: true,
            parallel: false,
        }
    }
}

impl EngineConfig {
    /// Defaults, overridden by `CHOMP_NODE_BUDGET` and `CHOMP_TT_CAP` when set.
    pub fn from_env() -> Self {
        let mut cfg = EngineConfig::default();
        if let Some(v) = std::env::var("CHOMP_NODE_BUDGET").ok().and_then(|s| s.trim().parse().ok()) {
            cfg.node_budget = v;
        }
        if let Some(v) = std::env::var("CHOMP_TT_CAP").ok().and_then(|s| s.trim().parse().ok()) {
            cfg.table_capacity = v;
        }
        cfg
    }

    pub fn with_budget(mut self, node_budget: u64) -> Self {
        self.node_budget = node_budget;
        self
    }
}

/// Concurrent map from position key to its final Grundy value.
///
/// Values never change once computed, so when two threads race on a key the
/// second insert simply overwrites an identical value.
pub struct TranspositionTable<K: std::hash::Hash + Eq> {
    map: DashMap<K, u32, FxBuildHasher>,
    capacity: usize,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl<K: std::hash::Hash + Eq> TranspositionTable<K> {
    pub fn new(capacity: usize) -> Self {
        TranspositionTable {
            map: DashMap::with_hasher(FxBuildHasher),
            capacity,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    #[inline]
    pub fn get(&self, key: &K) -> Option<u32> {
        match self.map.get(key) {
            Some(v) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(*v)
            }
            None => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    #[inline]
    pub fn insert(&self, key: K, value: u32) -> Result<()> {
        if self.map.len() >= self.capacity {
            return Err(Error::ResourceExceeded(ResourceKind::TableCapacity(self.capacity)));
        }
        self.map.insert(key, value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn clear(&self) {
        self.map.clear();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub nodes_expanded: u64,
    pub table_entries: usize,
    pub table_hits: u64,
    pub table_misses: u64,
}

/// Exact-state solver bound to one face table. Cheap to share across threads.
pub struct Engine {
    table: Arc<FaceTable>,
    tt: TranspositionTable<FaceSet>,
    config: EngineConfig,
    nodes: AtomicU64,
}

struct Search<'a> {
    engine: &'a Engine,
    nodes: AtomicU64,
    budget: u64,
}

impl Engine {
    pub fn new(table: Arc<FaceTable>, config: EngineConfig) -> Self {
        let tt = TranspositionTable::new(config.table_capacity);
        Engine { table, tt, config, nodes: AtomicU64::new(0) }
    }

    /// Engine over the face table a position lives on.
    pub fn for_state(state: &GameState, config: EngineConfig) -> Self {
        Engine::new(state.table().clone(), config)
    }

    pub fn table(&self) -> &Arc<FaceTable> {
        &self.table
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn stats(&self) -> EngineStats {
        EngineStats {
            nodes_expanded: self.nodes.load(Ordering::Relaxed),
            table_entries: self.tt.len(),
            table_hits: self.tt.hits(),
            table_misses: self.tt.misses(),
        }
    }

    fn check_table(&self, state: &GameState) -> Result<()> {
        if Arc::ptr_eq(&self.table, state.table()) {
            Ok(())
        } else {
            Err(Error::InvalidParams("position belongs to a different face table".into()))
        }
    }

    pub fn grundy(&self, state: &GameState) -> Result<Grundy> {
        self.grundy_with_budget(state, self.config.node_budget)
    }

    /// As [`Engine::grundy`] with a per-call node budget.
    pub fn grundy_with_budget(&self, state: &GameState, budget: u64) -> Result<Grundy> {
        self.check_table(state)?;
        let search = Search { engine: self, nodes: AtomicU64::new(0), budget };
        let result = search.position(state.present(), self.config.parallel);
        self.nodes.fetch_add(search.nodes.load(Ordering::Relaxed), Ordering::Relaxed);
        result.map(Grundy)
    }

    /// First move in move order leading to a zero position, or `None` when every move loses.
    pub fn best_move(&self, state: &GameState) -> Result<Option<Move>> {
        self.best_move_with_budget(state, self.config.node_budget)
    }

    pub fn best_move_with_budget(&self, state: &GameState, budget: u64) -> Result<Option<Move>> {
        if self.grundy_with_budget(state, budget)?.is_zero() {
            return Ok(None);
        }
        for i in state.present().iter() {
            let child = state.apply_index(i);
            if self.grundy_with_budget(&child, budget)?.is_zero() {
                return Ok(Some(Move::new(self.table.face(i).clone())));
            }
        }
        unreachable!("a nonzero position always has a move to zero")
    }

    /// `A` iff the value is nonzero; resource exhaustion folds into `Unknown`.
    pub fn outcome(&self, state: &GameState) -> Outcome {
        match self.grundy(state) {
            Ok(g) => g.outcome(),
            Err(_) => Outcome::Unknown,
        }
    }

    /// Grundy values of every child, in move order.
    pub fn child_values(&self, state: &GameState) -> Result<Vec<(Move, Grundy)>> {
        state
            .present()
            .iter()
            .map(|i| {
                let child = state.apply_index(i);
                Ok((Move::new(self.table.face(i).clone()), self.grundy(&child)?))
            })
            .collect()
    }
}

impl Search<'_> {
    fn position(&self, present: &FaceSet, parallel: bool) -> Result<u32> {
        if present.is_empty() {
            return Ok(0);
        }
        let mut value = 0;
        for comp in self.engine.table.components(present) {
            value ^= self.component(comp, parallel)?;
        }
        Ok(value)
    }

    fn component(&self, comp: FaceSet, parallel: bool) -> Result<u32> {
        if comp.len() == 1 {
            // a lone vertex
            return Ok(1);
        }
        let engine = self.engine;
        if engine.config.memoize {
            if let Some(v) = engine.tt.get(&comp) {
                return Ok(v);
            }
        }
        let expanded = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if expanded > self.budget {
            return Err(Error::ResourceExceeded(ResourceKind::NodeBudget(self.budget)));
        }

        let value = if parallel {
            let moves: Vec<usize> = comp.iter().collect();
            let values = moves
                .par_iter()
                .map(|&i| self.position(&comp.difference(engine.table.upset(i)), false))
                .collect::<Result<Vec<u32>>>()?;
            mex(values)
        } else {
            let mut seen = MexSet::default();
            for i in comp.iter() {
                seen.insert(self.position(&comp.difference(engine.table.upset(i)), false)?);
            }
            seen.mex()
        };

        if engine.config.memoize {
            engine.tt.insert(comp, value)?;
        }
        Ok(value)
    }
}

/// One-shot exact value with a fresh engine.
pub fn grundy(state: &GameState, config: &EngineConfig) -> Result<Grundy> {
    Engine::for_state(state, config.clone()).grundy(state)
}

pub fn best_move(state: &GameState, config: &EngineConfig) -> Result<Option<Move>> {
    Engine::for_state(state, config.clone()).best_move(state)
}

pub fn outcome(state: &GameState, config: &EngineConfig) -> Outcome {
    Engine::for_state(state, config.clone()).outcome(state)
}

/// Which solver produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Exact,
    Canonical,
    CanonicalTwins,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMethod::Exact => "exact",
            SolveMethod::Canonical => "canonical",
            SolveMethod::CanonicalTwins => "canonical+twins",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Solved {
    pub value: Grundy,
    pub method: SolveMethod,
    pub nodes: u64,
}

/// Graphs whose exact state bound is at most this are searched exactly by `solve_auto`.
pub const EXACT_STATE_LIMIT: u64 = 1 << 16;

/// Either engine behind one interface, chosen per starting position.
pub enum Solver {
    Exact(Engine),
    Canonical(CanonicalEngine),
}

impl Solver {
    /// Exact search on complexes and on graphs with a small state space, otherwise the
    /// canonical graph engine with false-twin pruning.
    pub fn for_state(state: &GameState, config: &EngineConfig) -> Self {
        let limit = EXACT_STATE_LIMIT.min(config.node_budget);
        // `None` covers complexes and graphs too large for the canonical engine.
        if canon::exact_state_bound(state, limit).map_or(true, |b| b <= limit) {
            Solver::Exact(Engine::for_state(state, config.clone()))
        } else {
            Solver::Canonical(CanonicalEngine::new(config.clone(), CanonicalOptions { twin_reduction: true }))
        }
    }

    pub fn method(&self) -> SolveMethod {
        match self {
            Solver::Exact(_) => SolveMethod::Exact,
            Solver::Canonical(_) => SolveMethod::CanonicalTwins,
        }
    }

    pub fn stats(&self) -> EngineStats {
        match self {
            Solver::Exact(e) => e.stats(),
            Solver::Canonical(e) => e.stats(),
        }
    }

    pub fn grundy(&self, state: &GameState) -> Result<Grundy> {
        match self {
            Solver::Exact(e) => e.grundy(state),
            Solver::Canonical(e) => e.grundy(state),
        }
    }

    pub fn best_move(&self, state: &GameState) -> Result<Option<Move>> {
        match self {
            Solver::Exact(e) => e.best_move(state),
            Solver::Canonical(e) => e.best_move(state),
        }
    }
}

impl fmt::Debug for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Solver({})", self.method())
    }
}

/// One-shot value through [`Solver::for_state`].
pub fn solve_auto(state: &GameState, config: &EngineConfig) -> Result<Solved> {
    let solver = Solver::for_state(state, config);
    let value = solver.grundy(state)?;
    Ok(Solved { value, method: solver.method(), nodes: solver.stats().nodes_expanded })
}
