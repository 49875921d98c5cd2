//! Playing an involution reduction as a strategy.
//!
//! The strategy holds a chain of face involutions `ψ_1, ψ_2, …`, each acting on
//! the faces fixed by the previous one. Outside the innermost fixed part every
//! opponent move `x` is answered with `ψ_i(x)` for the first level that moves it;
//! inside, the engine plays on the fixed part alone.

use std::sync::Arc;

use crate::bits::FaceSet;
use crate::complex::VertexId;
use crate::engine::{Engine, EngineConfig};
use crate::error::{Error, Result};
use crate::state::{FaceTable, GameState, Move};

#[derive(Debug)]
struct Level {
    /// Face index to the index of its image; identity outside `domain`.
    image: Vec<usize>,
    domain: FaceSet,
    fixed: FaceSet,
}

pub struct MirrorStrategy {
    table: Arc<FaceTable>,
    levels: Vec<Level>,
    inner: FaceSet,
    engine: Engine,
}

impl std::fmt::Debug for MirrorStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MirrorStrategy").field("levels", &self.levels.len()).field("inner", &self.inner).finish()
    }
}

impl MirrorStrategy {
    /// Chain of vertex maps, each acting on the part fixed by the ones before it.
    /// Fails with `NotApplicable` unless every level is a valid face involution there.
    pub fn from_vertex_maps(table: Arc<FaceTable>, maps: &[Vec<VertexId>], config: EngineConfig) -> Result<Self> {
        let face_maps = maps
            .iter()
            .map(|phi| {
                (0..table.len())
                    .map(|i| {
                        let image = table.face(i).map(|v| phi.get(v as usize).copied().unwrap_or(v));
                        table.index_of(&image).ok_or_else(|| {
                            Error::NotApplicable(format!("{} maps to {image}, which is not a face", table.face(i)))
                        })
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_face_maps(table, face_maps, config)
    }

    /// Chain of face-index maps over `table`.
    pub fn from_face_maps(table: Arc<FaceTable>, maps: Vec<Vec<usize>>, config: EngineConfig) -> Result<Self> {
        let mut domain = table.full();
        let mut levels = Vec::new();
        for (depth, image) in maps.into_iter().enumerate() {
            let bad = |what: &str| Error::NotApplicable(format!("level {}: {what}", depth + 1));
            if image.len() != table.len() {
                return Err(bad("map has the wrong length"));
            }
            let mut fixed = FaceSet::empty(table.len());
            for i in domain.iter() {
                let j = image[i];
                if !domain.contains(j) || image[j] != i {
                    return Err(bad("not a self-inverse map of its domain"));
                }
                if j == i {
                    fixed.insert(i);
                }
            }
            for i in domain.iter() {
                let up = table.upset(i).intersection(&domain);
                for u in up.iter() {
                    if !table.upset(image[i]).contains(image[u]) {
                        return Err(bad("does not preserve inclusion"));
                    }
                }
                if fixed.contains(i) {
                    continue;
                }
                // Fixed faces must not sit above moved ones.
                if !up.is_disjoint(&fixed) {
                    return Err(bad("fixed faces are not down-closed"));
                }
            }
            let image = (0..table.len()).map(|i| if domain.contains(i) { image[i] } else { i }).collect();
            let next = fixed.clone();
            levels.push(Level { image, domain, fixed });
            domain = next;
        }
        let engine = Engine::new(table.clone(), config);
        Ok(MirrorStrategy { table, levels, inner: domain, engine })
    }

    pub fn table(&self) -> &Arc<FaceTable> {
        &self.table
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Faces fixed by every level; play there is delegated to the engine.
    pub fn inner_faces(&self) -> &FaceSet {
        &self.inner
    }

    /// The position restricted to the innermost fixed part.
    pub fn inner_state(&self, state: &GameState) -> GameState {
        state.restrict(&self.inner)
    }

    /// Each level's part of `state` must be symmetric under that level's map.
    pub fn check_discipline(&self, state: &GameState) -> Result<()> {
        if !Arc::ptr_eq(state.table(), &self.table) {
            return Err(Error::DisciplineBroken("position belongs to a different face table".into()));
        }
        for (depth, level) in self.levels.iter().enumerate() {
            for i in state.present().intersection(&level.domain).iter() {
                if !state.present().contains(level.image[i]) {
                    return Err(Error::DisciplineBroken(format!(
                        "level {}: {} is present but its image {} is not",
                        depth + 1,
                        self.table.face(i),
                        self.table.face(level.image[i])
                    )));
                }
            }
        }
        Ok(())
    }

    fn inner_move(&self, state: &GameState) -> Result<Option<Move>> {
        let inner = self.inner_state(state);
        if inner.is_terminal() {
            return Ok(None);
        }
        Ok(Some(match self.engine.best_move(&inner)? {
            Some(m) => m,
            // Not a winning seat; any inner move keeps the symmetry.
            None => inner.legal_moves().swap_remove(0),
        }))
    }

    /// First move for the mirror player: the engine's move on the fixed part.
    pub fn opening(&self, state: &GameState) -> Result<Option<Move>> {
        self.check_discipline(state)?;
        self.inner_move(state)
    }

    /// Reply to `opponent` played from `before`. `None` when no face is left.
    pub fn mirror_reply(&self, before: &GameState, opponent: &Move) -> Result<Option<Move>> {
        self.check_discipline(before)?;
        let x = self
            .table
            .index_of(&opponent.face)
            .filter(|&i| before.present().contains(i))
            .ok_or_else(|| Error::FaceNotPresent(opponent.face.clone()))?;
        let after = before.apply_index(x);
        for level in &self.levels {
            if level.domain.contains(x) && !level.fixed.contains(x) {
                let y = level.image[x];
                debug_assert!(after.present().contains(y));
                return Ok(Some(Move::new(self.table.face(y).clone())));
            }
        }
        if let Some(m) = self.inner_move(&after)? {
            return Ok(Some(m));
        }
        // Only reachable when the inner part is exhausted in a lost seat.
        Ok(after.legal_moves().into_iter().next())
    }
}
