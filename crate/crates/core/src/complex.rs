//! Faces, simplicial complexes and graphs, plus the JSON exchange format.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest complex the toolkit will build.
pub const DEFAULT_FACE_CAP: usize = 4096;

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub label: Option<String>,
}

/// A nonempty, strictly increasing list of vertex ids.
///
/// Faces order by cardinality first and lexicographically second, which is
/// the move order used everywhere a deterministic choice is needed.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<VertexId>", into = "Vec<VertexId>")]
pub struct Face(Vec<VertexId>);

impl Face {
    /// Builds a face from arbitrary ids, sorting them. Fails on empty input or duplicates.
    pub fn new(ids: impl IntoIterator<Item = VertexId>) -> Result<Self> {
        let mut v: Vec<VertexId> = ids.into_iter().collect();
        v.sort_unstable();
        if v.is_empty() {
            return Err(Error::InvalidComplex("faces must be nonempty".into()));
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidComplex(format!("face {v:?} repeats a vertex")));
        }
        Ok(Face(v))
    }

    pub fn vertex(v: VertexId) -> Self {
        Face(vec![v])
    }

    pub fn edge(u: VertexId, v: VertexId) -> Self {
        assert_ne!(u, v, "an edge needs two distinct endpoints");
        if u < v {
            Face(vec![u, v])
        } else {
            Face(vec![v, u])
        }
    }

    #[inline]
    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset_of(&self, other: &Face) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|x| it.by_ref().any(|y| y == x))
    }

    /// All nonempty proper and improper subfaces, including `self`.
    pub fn subfaces(&self) -> impl Iterator<Item = Face> + '_ {
        let d = self.0.len();
        (1u64..(1u64 << d)).map(move |mask| Face((0..d).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect()))
    }

    /// Faces obtained by dropping exactly one vertex (empty for vertex-faces).
    pub fn facets(&self) -> impl Iterator<Item = Face> + '_ {
        let d = self.0.len();
        (0..if d > 1 { d } else { 0 })
            .map(move |skip| Face(self.0.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()))
    }

    /// Image under a vertex map, re-sorted.
    pub fn map(&self, f: impl Fn(VertexId) -> VertexId) -> Face {
        let mut v: Vec<VertexId> = self.0.iter().map(|&x| f(x)).collect();
        v.sort_unstable();
        v.dedup();
        Face(v)
    }
}

impl Ord for Face {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<VertexId>> for Face {
    type Error = Error;

    fn try_from(v: Vec<VertexId>) -> Result<Self> {
        Face::new(v)
    }
}

impl From<Face> for Vec<VertexId> {
    fn from(f: Face) -> Self {
        f.0
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite down-closed family of nonempty faces over vertex ids `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    labels: Vec<Option<String>>,
    faces: BTreeSet<Face>,
}

impl Complex {
    pub fn empty(vertex_count: usize) -> Self {
        Complex { labels: vec![None; vertex_count], faces: BTreeSet::new() }
    }

    /// Closes `faces` downward under the default face cap. Returns the complex and
    /// whether closing added anything that was not listed.
    pub fn closure(vertex_count: usize, faces: impl IntoIterator<Item = Face>) -> Result<(Self, bool)> {
        Self::closure_with_cap(vertex_count, faces, DEFAULT_FACE_CAP)
    }

    pub fn closure_with_cap(
        vertex_count: usize,
        faces: impl IntoIterator<Item = Face>,
        cap: usize,
    ) -> Result<(Self, bool)> {
        let listed: BTreeSet<Face> = faces.into_iter().collect();
        let mut closed = BTreeSet::new();
        for face in &listed {
            if let Some(&v) = face.vertices().last() {
                if v as usize >= vertex_count {
                    return Err(Error::InvalidComplex(format!(
                        "face {face} uses vertex {v} but there are only {vertex_count} vertices"
                    )));
                }
            }
            let subface_count = 1usize.checked_shl(face.len() as u32).map_or(usize::MAX, |x| x - 1);
            if face.len() >= 63 || subface_count > cap {
                return Err(Error::TooLarge { faces: subface_count, cap });
            }
            if closed.contains(face) {
                continue;
            }
            for sub in face.subfaces() {
                closed.insert(sub);
            }
            if closed.len() > cap {
                return Err(Error::TooLarge { faces: closed.len(), cap });
            }
        }
        let added = closed.len() != listed.len();
        Ok((Complex { labels: vec![None; vertex_count], faces: closed }, added))
    }

    /// Builds a complex from faces that must already be down-closed.
    pub fn from_down_closed(vertex_count: usize, faces: impl IntoIterator<Item = Face>) -> Result<Self> {
        let (c, added) = Self::closure(vertex_count, faces)?;
        if added {
            return Err(Error::InvalidComplex("face family is not down-closed".into()));
        }
        Ok(c)
    }

    /// Wraps a face set known to be down-closed (internal fast path).
    pub(crate) fn from_parts_unchecked(labels: Vec<Option<String>>, faces: BTreeSet<Face>) -> Self {
        Complex { labels, faces }
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::InvalidComplex(format!("{} labels for {} vertices", labels.len(), self.labels.len())));
        }
        self.labels = labels;
        Ok(self)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.labels.iter().enumerate().map(|(i, l)| Vertex { id: i as VertexId, label: l.clone() })
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// Vertex label, falling back to the numeric id.
    pub fn label(&self, v: VertexId) -> String {
        self.labels.get(v as usize).and_then(|l| l.clone()).unwrap_or_else(|| v.to_string())
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> + '_ {
        self.faces.iter()
    }

    pub fn face_set(&self) -> &BTreeSet<Face> {
        &self.faces
    }

    #[inline]
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.faces.contains(face)
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn dimension_bound(&self) -> usize {
        self.faces.iter().map(Face::len).max().unwrap_or(0)
    }

    pub fn is_graph(&self) -> bool {
        self.dimension_bound() <= 2
    }

    pub fn is_down_closed(&self) -> bool {
        self.faces.iter().all(|f| f.facets().all(|g| self.faces.contains(&g)))
    }

    /// Vertices that carry a vertex-face.
    pub fn live_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.faces.iter().take_while(|f| f.len() == 1).map(|f| f.vertices()[0])
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.faces
            .iter()
            .skip_while(|f| f.len() < 2)
            .take_while(|f| f.len() == 2)
            .map(|f| (f.vertices()[0], f.vertices()[1]))
    }

    /// Disjoint union; vertex ids of `other` are shifted past ours.
    pub fn disjoint_union(&self, other: &Complex) -> Complex {
        let shift = self.vertex_count() as VertexId;
        let mut faces = self.faces.clone();
        faces.extend(other.faces.iter().map(|f| f.map(|v| v + shift)));
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Complex { labels, faces }
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            vertices: (0..self.vertex_count() as VertexId).map(|v| self.label(v)).collect(),
            faces: self.faces.iter().map(|f| f.vertices().to_vec()).collect(),
        }
    }
}

/// Wire/file form: `{"vertices": ["<label>", ...], "faces": [[0,1], [2], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub vertices: Vec<String>,
    pub faces: Vec<Vec<VertexId>>,
}

/// A complex read from JSON, with a note of whether the loader had to close it downward.
#[derive(Debug, Clone)]
pub struct LoadedComplex {
    pub complex: Complex,
    pub closure_added: bool,
}

impl ComplexJson {
    /// Every listed vertex becomes a vertex-face; listed faces are closed downward.
    pub fn load(&self) -> Result<LoadedComplex> {
        let n = self.vertices.len();
        let mut listed = Vec::with_capacity(self.faces.len());
        for f in &self.faces {
            listed.push(Face::new(f.iter().copied())?);
        }
        let listed_set: BTreeSet<Face> = listed.iter().cloned().collect();
        let all = listed.into_iter().chain((0..n as VertexId).map(Face::vertex));
        let (complex, _) = Complex::closure(n, all)?;
        let closure_added = complex.face_count() != listed_set.len();
        let complex = complex.with_labels(self.vertices.iter().cloned().map(Some).collect())?;
        Ok(LoadedComplex { complex, closure_added })
    }

    pub fn parse(text: &str) -> Result<LoadedComplex> {
        let json: ComplexJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidComplex(format!("bad complex JSON: {e}")))?;
        json.load()
    }
}

/// A complex whose faces all have at most two vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph(Complex);

impl Graph {
    /// Graph on vertices `0..vertex_count` with the given edges; every vertex is present.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut faces: BTreeSet<Face> = (0..vertex_count as VertexId).map(Face::vertex).collect();
        for (u, v) in edges {
            if u == v || u as usize >= vertex_count || v as usize >= vertex_count {
                return Err(Error::InvalidComplex(format!("bad edge ({u},{v})")));
            }
            faces.insert(Face::edge(u, v));
        }
        if faces.len() > DEFAULT_FACE_CAP {
            return Err(Error::TooLarge { faces: faces.len(), cap: DEFAULT_FACE_CAP });
        }
        Ok(Graph(Complex { labels: vec![None; vertex_count], faces }))
    }

    pub fn with_labels(self, labels: Vec<Option<String>>) -> Result<Self> {
        Ok(Graph(self.0.with_labels(labels)?))
    }

    pub fn as_complex(&self) -> &Complex {
        &self.0
    }

    pub fn into_complex(self) -> Complex {
        self.0
    }

    pub fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.0.edges().count()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.0.edges()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u != v && self.0.contains(&Face::edge(u, v))
    }

    pub fn label(&self, v: VertexId) -> String {
        self.0.label(v)
    }

    /// Adjacency lists indexed by vertex id.
    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (u, v) in self.edges() {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }

    /// Induced subgraph on `keep` (renumbered in the given order, labels carried over).
    pub fn induced(&self, keep: &[VertexId]) -> Graph {
        let mut new_id = vec![None; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v as usize] = Some(i as VertexId);
        }
        let edges: Vec<_> =
            self.edges().filter_map(|(u, v)| Some((new_id[u as usize]?, new_id[v as usize]?))).collect();
        let labels = keep.iter().map(|&v| self.0.labels[v as usize].clone()).collect();
        Graph::new(keep.len(), edges)
            .and_then(|g| g.with_labels(labels))
            .expect("induced subgraph of a valid graph is valid")
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        Graph(self.0.disjoint_union(&other.0))
    }
}

impl TryFrom<Complex> for Graph {
    type Error = Error;

    fn try_from(c: Complex) -> Result<Self> {
        if !c.is_graph() {
            return Err(Error::NotAGraph);
        }
        Ok(Graph(c))
    }
}

impl From<Graph> for Complex {
    fn from(g: Graph) -> Self {
        g.0
    }
}
