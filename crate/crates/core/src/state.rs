//! Game positions as bitmasks over the face table of a starting complex.
//!
//! Every position reachable from a complex is a sub-family of it, so one table built
//! up front gives each face a stable index and each position a fixed-width key.

use std::collections::BTreeSet;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::bits::FaceSet;
use crate::complex::{Complex, Face, VertexId, DEFAULT_FACE_CAP};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub face: Face,
}

impl Move {
    pub fn new(face: Face) -> Self {
        Move { face }
    }
}

impl std::fmt::Display for Move {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.face.fmt(f)
    }
}

impl From<Face> for Move {
    fn from(face: Face) -> Self {
        Move { face }
    }
}

/// Index of every face of a starting complex, in move order (cardinality, then lex).
#[derive(Debug)]
pub struct FaceTable {
    labels: Vec<Option<String>>,
    faces: Vec<Face>,
    index: FxHashMap<Face, usize>,
    upsets: Vec<FaceSet>,
    /// For vertex-face `i` (vertex-faces occupy the first indices): its incident edges
    /// as `(edge face index, other endpoint's vertex-face index)`.
    vertex_edges: Vec<Vec<(u32, u32)>>,
    vertex_mask: FaceSet,
}

impl FaceTable {
    pub fn new(complex: &Complex) -> Result<Self> {
        Self::with_cap(complex, DEFAULT_FACE_CAP)
    }

    pub fn with_cap(complex: &Complex, cap: usize) -> Result<Self> {
        if complex.face_count() > cap {
            return Err(Error::TooLarge { faces: complex.face_count(), cap });
        }
        let faces: Vec<Face> = complex.faces().cloned().collect();
        let len = faces.len();
        let index: FxHashMap<Face, usize> = faces.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();

        let mut stars = vec![FaceSet::empty(len); complex.vertex_count()];
        for (i, f) in faces.iter().enumerate() {
            for &v in f.vertices() {
                stars[v as usize].insert(i);
            }
        }
        let upsets = faces
            .iter()
            .map(|f| {
                let mut up = stars[f.vertices()[0] as usize].clone();
                for &v in &f.vertices()[1..] {
                    up.intersect_with(&stars[v as usize]);
                }
                up
            })
            .collect();

        let vertex_face_count = faces.iter().take_while(|f| f.len() == 1).count();
        let mut vertex_edges = vec![Vec::new(); vertex_face_count];
        for (i, f) in faces.iter().enumerate().filter(|(_, f)| f.len() == 2) {
            let a = index[&Face::vertex(f.vertices()[0])];
            let b = index[&Face::vertex(f.vertices()[1])];
            vertex_edges[a].push((i as u32, b as u32));
            vertex_edges[b].push((i as u32, a as u32));
        }

        let vertex_mask = FaceSet::from_indices(len, 0..vertex_face_count);
        Ok(FaceTable { labels: complex.labels().to_vec(), faces, index, upsets, vertex_edges, vertex_mask })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    #[inline]
    pub fn face(&self, i: usize) -> &Face {
        &self.faces[i]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn index_of(&self, face: &Face) -> Option<usize> {
        self.index.get(face).copied()
    }

    /// Faces containing face `i`, itself included.
    #[inline]
    pub fn upset(&self, i: usize) -> &FaceSet {
        &self.upsets[i]
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// Indices of the vertex-faces, which come first in move order.
    pub fn vertex_faces(&self) -> &FaceSet {
        &self.vertex_mask
    }

    pub fn full(&self) -> FaceSet {
        FaceSet::full(self.len())
    }

    pub fn is_graph(&self) -> bool {
        self.faces.last().map_or(true, |f| f.len() <= 2)
    }

    pub fn complex_of(&self, present: &FaceSet) -> Complex {
        let faces: BTreeSet<Face> = present.iter().map(|i| self.faces[i].clone()).collect();
        Complex::from_parts_unchecked(self.labels.clone(), faces)
    }

    /// Splits a down-closed face set into the face sets of its connected components,
    /// ordered by smallest vertex.
    pub fn components(&self, present: &FaceSet) -> SmallVec<[FaceSet; 4]> {
        let mut out = SmallVec::new();
        let mut unvisited = present.intersection(&self.vertex_mask);
        let mut stack: Vec<u32> = Vec::new();
        while let Some(start) = unvisited.first() {
            let mut comp_vertices = Vec::new();
            unvisited.remove(start);
            stack.push(start as u32);
            while let Some(v) = stack.pop() {
                comp_vertices.push(v as usize);
                for &(e, w) in &self.vertex_edges[v as usize] {
                    if present.contains(e as usize) && unvisited.contains(w as usize) {
                        unvisited.remove(w as usize);
                        stack.push(w);
                    }
                }
            }
            if out.is_empty() && unvisited.is_empty() {
                out.push(present.clone());
                return out;
            }
            let mut mask = FaceSet::empty(self.len());
            for v in comp_vertices {
                mask.union_with(&self.upsets[v]);
            }
            mask.intersect_with(present);
            out.push(mask);
        }
        out
    }
}

/// A chomp position: the faces still on the board.
#[derive(Clone)]
pub struct GameState {
    table: Arc<FaceTable>,
    present: FaceSet,
}

impl GameState {
    /// Starting position on a whole complex.
    pub fn new(complex: &Complex) -> Result<Self> {
        let table = Arc::new(FaceTable::new(complex)?);
        let present = table.full();
        Ok(GameState { table, present })
    }

    pub fn from_table(table: Arc<FaceTable>) -> Self {
        let present = table.full();
        GameState { table, present }
    }

    /// Position over `table` with the given faces; `present` must be down-closed.
    pub fn from_parts(table: Arc<FaceTable>, present: FaceSet) -> Self {
        debug_assert_eq!(present.words().len(), table.full().words().len());
        GameState { table, present }
    }

    pub fn table(&self) -> &Arc<FaceTable> {
        &self.table
    }

    pub fn present(&self) -> &FaceSet {
        &self.present
    }

    /// Deterministic hashing key: the raw bitmask over the starting face table.
    pub fn canonical_key(&self) -> &[u64] {
        self.present.words()
    }

    pub fn face_count(&self) -> usize {
        self.present.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.present.is_empty()
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.table.index_of(face).is_some_and(|i| self.present.contains(i))
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> + '_ {
        self.present.iter().map(|i| self.table.face(i))
    }

    pub fn is_graph(&self) -> bool {
        self.faces().all(|f| f.len() <= 2)
    }

    pub fn to_complex(&self) -> Complex {
        self.table.complex_of(&self.present)
    }

    /// Picks `mv.face` and removes every face containing it.
    pub fn apply_move(&self, mv: &Move) -> Result<GameState> {
        let i = self
            .table
            .index_of(&mv.face)
            .filter(|&i| self.present.contains(i))
            .ok_or_else(|| Error::FaceNotPresent(mv.face.clone()))?;
        Ok(self.apply_index(i))
    }

    pub(crate) fn apply_index(&self, i: usize) -> GameState {
        GameState { table: self.table.clone(), present: self.present.difference(self.table.upset(i)) }
    }

    /// One move per remaining face, in (cardinality, lex) order.
    pub fn legal_moves(&self) -> Vec<Move> {
        self.faces().cloned().map(Move::new).collect()
    }

    pub fn connected_components(&self) -> Vec<GameState> {
        if self.present.is_empty() {
            return Vec::new();
        }
        self.table
            .components(&self.present)
            .into_iter()
            .map(|present| GameState { table: self.table.clone(), present })
            .collect()
    }

    /// Same table, faces restricted to `mask`. The caller keeps the result down-closed.
    pub fn restrict(&self, mask: &FaceSet) -> GameState {
        GameState { table: self.table.clone(), present: self.present.intersection(mask) }
    }

    pub fn label(&self, v: VertexId) -> String {
        self.table.labels.get(v as usize).and_then(|l| l.clone()).unwrap_or_else(|| v.to_string())
    }

    pub fn format_face(&self, face: &Face) -> String {
        let parts: Vec<String> = face.vertices().iter().map(|&v| self.label(v)).collect();
        format!("[{}]", parts.join(", "))
    }
}

impl PartialEq for GameState {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.table, &other.table) && self.present == other.present)
            || self.to_complex() == other.to_complex()
    }
}

impl std::fmt::Debug for GameState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.faces()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Graph;

    fn f(ids: &[VertexId]) -> Face {
        Face::new(ids.iter().copied()).unwrap()
    }

    fn state(g: &Graph) -> GameState {
        GameState::new(g.as_complex()).unwrap()
    }

    fn faces(s: &GameState) -> Vec<Face> {
        s.faces().cloned().collect()
    }

    #[test]
    fn taking_an_edge_removes_only_it() {
        let s = state(&Graph::new(2, [(0, 1)]).unwrap());
        let t = s.apply_move(&f(&[0, 1]).into()).unwrap();
        assert_eq!(faces(&t), vec![f(&[0]), f(&[1])]);
    }

    #[test]
    fn taking_a_vertex_removes_incident_edges() {
        let s = state(&Graph::new(2, [(0, 1)]).unwrap());
        let t = s.apply_move(&f(&[0]).into()).unwrap();
        assert_eq!(faces(&t), vec![f(&[1])]);
    }

    #[test]
    fn taking_a_vertex_of_a_full_triangle() {
        let (c, _) = Complex::closure(3, [f(&[0, 1, 2])]).unwrap();
        let s = GameState::new(&c).unwrap();
        let t = s.apply_move(&f(&[1]).into()).unwrap();
        assert_eq!(faces(&t), vec![f(&[0]), f(&[2]), f(&[0, 2])]);
        assert!(t.to_complex().is_down_closed());
    }

    #[test]
    fn absent_face_is_an_error() {
        let s = state(&Graph::new(2, [(0, 1)]).unwrap());
        let t = s.apply_move(&f(&[0]).into()).unwrap();
        assert_eq!(t.apply_move(&f(&[0, 1]).into()).unwrap_err(), Error::FaceNotPresent(f(&[0, 1])));
        assert!(s.apply_move(&f(&[5]).into()).is_err());
    }

    #[test]
    fn legal_moves_in_move_order() {
        assert!(GameState::new(&Complex::empty(0)).unwrap().legal_moves().is_empty());
        let one = state(&Graph::new(1, []).unwrap());
        assert_eq!(one.legal_moves(), vec![Move::new(f(&[0]))]);
        let edge = state(&Graph::new(2, [(0, 1)]).unwrap());
        let moves: Vec<Face> = edge.legal_moves().into_iter().map(|m| m.face).collect();
        assert_eq!(moves, vec![f(&[0]), f(&[1]), f(&[0, 1])]);
    }

    #[test]
    fn components_of_disjoint_edges() {
        let s = state(&Graph::new(6, [(0, 1), (2, 3), (4, 5)]).unwrap());
        let comps = s.connected_components();
        assert_eq!(comps.len(), 3);
        assert_eq!(faces(&comps[1]), vec![f(&[2]), f(&[3]), f(&[2, 3])]);
        let iso = state(&Graph::new(2, []).unwrap());
        assert_eq!(iso.connected_components().len(), 2);
    }

    #[test]
    fn component_split_follows_removed_edges() {
        let s = state(&Graph::new(3, [(0, 1), (1, 2)]).unwrap());
        assert_eq!(s.connected_components().len(), 1);
        let t = s.apply_move(&f(&[1]).into()).unwrap();
        assert_eq!(t.connected_components().len(), 2);
    }
}
