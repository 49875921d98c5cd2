//! Involution reductions.
//!
//! A self-inverse automorphism that never maps a vertex to a neighbour can be
//! mirrored move for move, so the value of the graph equals the value of the
//! subgraph induced on its fixed points. The same holds for face maps of a
//! complex that preserve inclusion and fix a down-set.

mod mirror;

use std::fmt;

use serde::Serialize;

pub use mirror::MirrorStrategy;

use crate::complex::{Complex, Face, Graph, VertexId};
use crate::error::{Error, Result};
use crate::families::{binomial, join_graph, subsets_colex, JohnsonParams, KneserParams, MultipartiteSpec};

/// A vertex map, checked (or not yet) against the reduction hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Involution {
    mapping: Vec<VertexId>,
    validated: bool,
    provenance: String,
}

/// A hypothesis that a candidate vertex map fails, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    WrongLength { expected: usize, found: usize },
    OutOfRange { vertex: VertexId, image: VertexId },
    NotSelfInverse { vertex: VertexId, image: VertexId, back: VertexId },
    NotAutomorphism { edge: (VertexId, VertexId), image: (VertexId, VertexId) },
    FixedEdge { vertex: VertexId, image: VertexId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongLength { expected, found } => write!(f, "map has {found} entries, graph has {expected}"),
            Violation::OutOfRange { vertex, image } => write!(f, "{vertex} maps to missing vertex {image}"),
            Violation::NotSelfInverse { vertex, image, back } => {
                write!(f, "not self-inverse: {vertex} -> {image} -> {back}")
            }
            Violation::NotAutomorphism { edge, image } => {
                write!(f, "not an automorphism: edge {edge:?} maps to non-edge {image:?}")
            }
            Violation::FixedEdge { vertex, image } => write!(f, "{vertex} maps to its neighbour {image}"),
        }
    }
}

impl Involution {
    pub fn identity(n: usize) -> Self {
        Involution { mapping: (0..n as VertexId).collect(), validated: true, provenance: "identity".into() }
    }

    /// A map that has not been checked yet.
    pub fn unchecked(mapping: Vec<VertexId>) -> Self {
        Involution { mapping, validated: false, provenance: String::new() }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn mapping(&self) -> &[VertexId] {
        &self.mapping
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.mapping[v as usize]
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &v)| i as VertexId == v)
    }

    pub fn fixed_points(&self) -> Vec<VertexId> {
        (0..self.mapping.len() as VertexId).filter(|&v| self.apply(v) == v).collect()
    }
}

/// Checks that `phi` is self-inverse, an automorphism, and maps no vertex to a neighbour.
pub fn validate_involution(g: &Graph, phi: &[VertexId]) -> std::result::Result<Involution, Vec<Violation>> {
    let n = g.vertex_count();
    if phi.len() != n {
        return Err(vec![Violation::WrongLength { expected: n, found: phi.len() }]);
    }
    let mut violations: Vec<Violation> = phi
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w as usize >= n)
        .map(|(v, &w)| Violation::OutOfRange { vertex: v as VertexId, image: w })
        .collect();
    if !violations.is_empty() {
        return Err(violations);
    }
    for (v, &w) in phi.iter().enumerate() {
        let back = phi[w as usize];
        if back != v as VertexId {
            violations.push(Violation::NotSelfInverse { vertex: v as VertexId, image: w, back });
        }
    }
    for (a, b) in g.edges() {
        let (x, y) = (phi[a as usize], phi[b as usize]);
        if !g.has_edge(x, y) {
            violations.push(Violation::NotAutomorphism { edge: (a, b), image: (x, y) });
        }
    }
    for (v, &w) in phi.iter().enumerate() {
        if (v as VertexId) < w && g.has_edge(v as VertexId, w) {
            violations.push(Violation::FixedEdge { vertex: v as VertexId, image: w });
        }
    }
    if violations.is_empty() {
        Ok(Involution { mapping: phi.to_vec(), validated: true, provenance: String::new() })
    } else {
        Err(violations)
    }
}

/// Subgraph induced on the fixed points; it has the same Nim-value as `g`.
pub fn fixed_subgraph(g: &Graph, phi: &Involution) -> Result<Graph> {
    if !phi.validated {
        return Err(Error::NotValidated);
    }
    if phi.mapping.len() != g.vertex_count() {
        return Err(Error::InvalidParams("involution and graph sizes differ".into()));
    }
    Ok(g.induced(&phi.fixed_points()))
}

/// Product of disjoint transpositions on the ground set `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroundPermutation {
    pairs: Vec<(u32, u32)>,
}

impl GroundPermutation {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self> {
        let mut seen = 0u64;
        for &(a, b) in &pairs {
            if a == b || a == 0 || b == 0 || a > 63 || b > 63 {
                return Err(Error::InvalidParams(format!("bad transposition ({a} {b})")));
            }
            let bits = 1u64 << (a - 1) | 1u64 << (b - 1);
            if seen & bits != 0 {
                return Err(Error::InvalidParams("transpositions must be disjoint".into()));
            }
            seen |= bits;
        }
        Ok(GroundPermutation { pairs })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// Number of transpositions.
    pub fn t(&self) -> usize {
        self.pairs.len()
    }

    pub fn apply(&self, x: u32) -> u32 {
        for &(a, b) in &self.pairs {
            if x == a {
                return b;
            }
            if x == b {
                return a;
            }
        }
        x
    }

    /// Image of a subset bitmask (bit `i-1` for element `i`).
    pub fn apply_set(&self, mask: u64) -> u64 {
        let mut out = mask;
        for &(a, b) in &self.pairs {
            let (ba, bb) = (mask >> (a - 1) & 1, mask >> (b - 1) & 1);
            out &= !(1 << (a - 1) | 1 << (b - 1));
            out |= bb << (a - 1) | ba << (b - 1);
        }
        out
    }

    /// The induced map on subset vertices: vertex `i` carries subset `subsets[i]`.
    pub fn lift(&self, subsets: &[u64]) -> Result<Involution> {
        let index: std::collections::HashMap<u64, usize> = subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mapping = subsets
            .iter()
            .map(|&s| {
                index
                    .get(&self.apply_set(s))
                    .map(|&i| i as VertexId)
                    .ok_or_else(|| Error::InvalidParams("permutation does not preserve the vertex family".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Involution::unchecked(mapping).with_provenance(format!("lift of {self}")))
    }
}

impl fmt::Display for GroundPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return f.write_str("()");
        }
        for (a, b) in &self.pairs {
            write!(f, "({a} {b})")?;
        }
        Ok(())
    }
}

/// The permutations `π_1..π_m` whose successive fixed-point reductions shrink
/// KG(n,k,l) to the subsets that contain all or none of `1..=2^m`.
pub fn kneser_halving_chain(p: &KneserParams) -> Result<Vec<GroundPermutation>> {
    let m = p.m().ok_or_else(|| Error::NotApplicable("halving needs l < k".into()))?;
    let big_m = 1i64 << m;
    if m > 0 && big_m > p.n {
        return Err(Error::NotApplicable(format!("2^{m} = {big_m} exceeds n = {}", p.n)));
    }
    (1..=m)
        .map(|i| {
            let (step, half) = (1u32 << i, 1u32 << (i - 1));
            let pairs =
                (1..=big_m as u32).filter(|j| j % step != 0 && j % step <= half).map(|j| (j, j + half)).collect();
            GroundPermutation::new(pairs)
        })
        .collect()
}

/// Complete multipartite graph with the same Nim-value as KG(n,k,l), for `0 ≤ l ≤ k − 1`:
/// `C(t,j)` parts of size `C(n mod 2^m, k mod 2^m)`, or no parts when that size is zero.
pub fn kneser_multipartite_reduction(p: &KneserParams) -> Result<MultipartiteSpec> {
    if !(0 <= p.l && p.l < p.k) {
        return Err(Error::InvalidParams(format!("need 0 <= l < k, got k={}, l={}", p.k, p.l)));
    }
    if p.is_empty_graph() {
        return Ok(MultipartiteSpec { parts: Vec::new() });
    }
    let m = p.m().unwrap();
    let q = 1i64 << m;
    let size = binomial((p.n % q) as u64, (p.k % q) as u64);
    let count = binomial((p.n / q) as u64, (p.k / q) as u64);
    if size == 0 {
        return Ok(MultipartiteSpec { parts: Vec::new() });
    }
    let (size, count) = (u32::try_from(size), usize::try_from(count));
    match (size, count) {
        (Ok(size), Ok(count)) if count <= 1 << 20 => Ok(MultipartiteSpec { parts: vec![size; count] }),
        _ => Err(Error::TooLarge { faces: usize::MAX, cap: crate::complex::DEFAULT_FACE_CAP }),
    }
}

/// Involution on the join of two graphs acting as `phi1` and `phi2` on the two sides.
pub fn join_involution(g1: &Graph, phi1: &Involution, g2: &Graph, phi2: &Involution) -> Result<(Graph, Involution)> {
    if !phi1.validated || !phi2.validated {
        return Err(Error::NotValidated);
    }
    let join = join_graph(g1, g2)?;
    let shift = g1.vertex_count() as VertexId;
    let mapping: Vec<VertexId> = phi1.mapping.iter().copied().chain(phi2.mapping.iter().map(|&v| v + shift)).collect();
    let inv = validate_involution(&join, &mapping).map_err(|v| {
        Error::InvalidParams(format!(
            "join map invalid: {}",
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
        ))
    })?;
    Ok((join, inv.with_provenance("join of two involutions")))
}

/// The reducing involution of J(n,k), when one exists: the pairing lift of
/// `(1 2)(3 4)…` when n and k are even, complementation when n = 2k ≥ 4,
/// and nothing otherwise (no non-identity involution qualifies).
pub fn johnson_involution(p: &JohnsonParams) -> Result<Option<Involution>> {
    let (graph, subsets) = p.build()?;
    let (n, k) = (p.n, p.k);
    let candidate = if n % 2 == 0 && k % 2 == 0 {
        let pi = GroundPermutation::new((1..=n / 2).map(|i| (2 * i - 1, 2 * i)).collect())?;
        pi.lift(&subsets)?.with_provenance(format!("johnson pairing involution {pi}"))
    } else if n == 2 * k && k >= 2 {
        let full = (1u64 << n) - 1;
        let index: std::collections::HashMap<u64, usize> = subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mapping = subsets.iter().map(|&s| index[&(full & !s)] as VertexId).collect();
        Involution::unchecked(mapping).with_provenance("johnson complementation involution")
    } else {
        return Ok(None);
    };
    let provenance = candidate.provenance.clone();
    let inv = validate_involution(&graph, &candidate.mapping)
        .map_err(|_| Error::InvalidParams("johnson involution failed validation".into()))?;
    Ok(Some(inv.with_provenance(provenance)))
}

/// Involution on a complete multipartite graph pairing vertices inside each part;
/// the fixed points form K_t with t the number of odd parts.
pub fn multipartite_pairing(spec: &MultipartiteSpec) -> Result<Involution> {
    let g = crate::families::multipartite_graph(spec)?;
    let mut mapping = Vec::new();
    for &size in &spec.parts {
        let base = mapping.len() as VertexId;
        for i in 0..size {
            let partner = if i + 1 == size && size % 2 == 1 { i } else { i ^ 1 };
            mapping.push(base + partner);
        }
    }
    let inv = validate_involution(&g, &mapping).expect("pairing inside parts is always valid");
    Ok(inv.with_provenance("pairing inside each part"))
}

/// All order-2 permutations of `1..=n`, the identity included.
pub fn ground_involutions(n: u32) -> Vec<GroundPermutation> {
    fn go(free: Vec<u32>, acc: &mut Vec<(u32, u32)>, out: &mut Vec<GroundPermutation>) {
        let Some((&first, rest)) = free.split_first() else {
            out.push(GroundPermutation { pairs: acc.clone() });
            return;
        };
        go(rest.to_vec(), acc, out);
        for (i, &b) in rest.iter().enumerate() {
            let remaining: Vec<u32> = rest.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            acc.push((first, b));
            go(remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go((1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Subset vertex list of KG(n,k,l) or J(n,k) in vertex order.
pub fn subset_vertices(n: u32, k: u32) -> Vec<u64> {
    subsets_colex(n, k).collect()
}

/// A face map on a complex, checked against the poset reduction hypotheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetInvolution {
    images: Vec<(Face, Face)>,
    fixed: Complex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PosetViolation {
    ImageNotAFace { face: Face, image: Face },
    NotSelfInverse { face: Face, image: Face, back: Face },
    NotOrderPreserving { lower: Face, upper: Face },
    FixedSetNotDownSet { fixed: Face, below: Face },
}

impl fmt::Display for PosetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosetViolation::ImageNotAFace { face, image } => write!(f, "{face} maps to {image}, which is not a face"),
            PosetViolation::NotSelfInverse { face, image, back } => {
                write!(f, "not self-inverse: {face} -> {image} -> {back}")
            }
            PosetViolation::NotOrderPreserving { lower, upper } => {
                write!(f, "inclusion {lower} < {upper} is not preserved")
            }
            PosetViolation::FixedSetNotDownSet { fixed, below } => {
                write!(f, "{fixed} is fixed but its subface {below} is not")
            }
        }
    }
}

impl PosetInvolution {
    pub fn image(&self, face: &Face) -> Option<&Face> {
        self.images.binary_search_by(|(f, _)| f.cmp(face)).ok().map(|i| &self.images[i].1)
    }

    /// The fixed faces; chomp on them has the same Nim-value as on the whole complex.
    pub fn fixed_complex(&self) -> &Complex {
        &self.fixed
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().all(|(a, b)| a == b)
    }
}

/// Checks self-inverse, inclusion-preserving in both directions, and fixed faces down-closed.
///
/// For a self-inverse map, preserving every facet inclusion already implies
/// preservation both ways, so only covers are checked.
pub fn validate_poset_involution(
    c: &Complex,
    psi: impl Fn(&Face) -> Face,
) -> std::result::Result<PosetInvolution, Vec<PosetViolation>> {
    let images: Vec<(Face, Face)> = c.faces().map(|f| (f.clone(), psi(f))).collect();
    let mut violations = Vec::new();
    for (face, image) in &images {
        if !c.contains(image) {
            violations.push(PosetViolation::ImageNotAFace { face: face.clone(), image: image.clone() });
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    let lookup = |f: &Face| -> &Face { &images[images.binary_search_by(|(x, _)| x.cmp(f)).unwrap()].1 };
    for (face, image) in &images {
        let back = lookup(image);
        if back != face {
            violations.push(PosetViolation::NotSelfInverse {
                face: face.clone(),
                image: image.clone(),
                back: back.clone(),
            });
        }
    }
    for (face, image) in &images {
        for below in face.facets() {
            if !lookup(&below).is_subset_of(image) {
                violations.push(PosetViolation::NotOrderPreserving { lower: below, upper: face.clone() });
            }
        }
    }
    for (face, image) in &images {
        if face == image {
            for below in face.facets() {
                if lookup(&below) != &below {
                    violations.push(PosetViolation::FixedSetNotDownSet { fixed: face.clone(), below });
                }
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    let fixed: std::collections::BTreeSet<Face> =
        images.iter().filter(|(a, b)| a == b).map(|(a, _)| a.clone()).collect();
    let fixed = Complex::from_parts_unchecked(c.labels().to_vec(), fixed);
    Ok(PosetInvolution { images, fixed })
}

/// Face map induced by a vertex involution, validated on `c`.
pub fn lift_vertex_involution(
    c: &Complex,
    phi: &Involution,
) -> std::result::Result<PosetInvolution, Vec<PosetViolation>> {
    validate_poset_involution(c, |f| f.map(|v| phi.apply(v)))
}
