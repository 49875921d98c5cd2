//! Constructors for the graph and complex families the solver is checked on.
//!
//! Subset families (Kneser, Johnson) number their vertices by the colexicographic
//! rank of the subset and label them like `{1,3}` over the ground set `1..=n`.

mod spec;

use serde::{Deserialize, Serialize};

pub use spec::{Built, FamilySpec};

use crate::complex::{Complex, Face, Graph, VertexId, DEFAULT_FACE_CAP};
use crate::error::{Error, Result};

/// `C(n, k)` saturating at `u64::MAX`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// `⌈log₂ x⌉` for `x ≥ 1`.
pub(crate) fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

/// k-subsets of `1..=n` as bitmasks (bit `i-1` for element `i`), in colex order.
pub fn subsets_colex(n: u32, k: u32) -> impl Iterator<Item = u64> {
    assert!(n < 64, "ground sets are limited to 63 elements");
    let end = 1u64 << n;
    let mut next = if k > n { end } else { (1u64 << k) - 1 };
    std::iter::from_fn(move || {
        if next >= end {
            return None;
        }
        let cur = next;
        if cur == 0 {
            next = end;
        } else {
            // Gosper's hack: next larger word with the same popcount.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            next = (((r ^ cur) >> 2) / c) | r;
        }
        Some(cur)
    })
}

/// Renders a subset bitmask as `{1,3}`.
pub fn subset_label(mask: u64) -> String {
    let elems: Vec<String> = (0..64).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", elems.join(","))
}

/// Parses a `{1,3}` label back to its bitmask.
pub fn parse_subset_label(label: &str) -> Option<u64> {
    let inner = label.trim().strip_prefix('{')?.strip_suffix('}')?;
    if inner.trim().is_empty() {
        return Some(0);
    }
    inner.split(',').try_fold(0u64, |acc, part| {
        let e: u32 = part.trim().parse().ok()?;
        (1..=63).contains(&e).then(|| acc | 1 << (e - 1))
    })
}

/// Graph on the k-subsets of `1..=n` with `adjacent` deciding each pair.
/// Returns the graph and the subset of every vertex.
fn subset_graph(n: u32, k: u32, adjacent: impl Fn(u64, u64) -> bool) -> Result<(Graph, Vec<u64>)> {
    let count = binomial(n as u64, k as u64);
    if count > DEFAULT_FACE_CAP as u64 {
        return Err(Error::TooLarge { faces: count.min(usize::MAX as u64) as usize, cap: DEFAULT_FACE_CAP });
    }
    let subsets: Vec<u64> = subsets_colex(n, k).collect();
    let mut edges = Vec::new();
    for (a, &u) in subsets.iter().enumerate() {
        for (b, &v) in subsets.iter().enumerate().skip(a + 1) {
            if adjacent(u, v) {
                edges.push((a as VertexId, b as VertexId));
                if subsets.len() + edges.len() > DEFAULT_FACE_CAP {
                    return Err(Error::TooLarge { faces: subsets.len() + edges.len(), cap: DEFAULT_FACE_CAP });
                }
            }
        }
    }
    let labels = subsets.iter().map(|&s| Some(subset_label(s))).collect();
    Ok((Graph::new(subsets.len(), edges)?.with_labels(labels)?, subsets))
}

/// Generalized Kneser graph KG(n,k,l): k-subsets, adjacent when they share at most l elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KneserParams {
    pub n: i64,
    pub k: i64,
    pub l: i64,
}

impl KneserParams {
    pub fn new(n: i64, k: i64, l: i64) -> Self {
        KneserParams { n, k, l }
    }

    /// No vertices at all.
    pub fn is_empty_graph(&self) -> bool {
        self.k < 0 || self.n < self.k
    }

    /// Vertices but no edges.
    pub fn is_edgeless(&self) -> bool {
        !self.is_empty_graph() && (self.l < 0 || self.n < 2 * self.k - self.l)
    }

    /// Every pair of distinct k-subsets meets in at most k−1 elements.
    pub fn is_complete(&self) -> bool {
        self.l >= self.k - 1
    }

    pub fn vertex_count(&self) -> u64 {
        if self.is_empty_graph() {
            0
        } else {
            binomial(self.n as u64, self.k as u64)
        }
    }

    /// `⌈log₂(k−l)⌉`, defined when `l < k`.
    pub fn m(&self) -> Option<u32> {
        (self.l < self.k).then(|| ceil_log2((self.k - self.l) as u64))
    }

    /// `⌊n/2^m⌋`
    pub fn t(&self) -> Option<i64> {
        self.m().map(|m| self.n.div_euclid(1 << m))
    }

    /// `⌊k/2^m⌋`
    pub fn j(&self) -> Option<i64> {
        self.m().map(|m| self.k.div_euclid(1 << m))
    }

    /// The graph with the subset of each vertex.
    pub fn build(&self) -> Result<(Graph, Vec<u64>)> {
        if self.is_empty_graph() {
            return Ok((Graph::new(0, [])?, Vec::new()));
        }
        if self.n > 63 {
            return Err(Error::TooLarge { faces: usize::MAX, cap: DEFAULT_FACE_CAP });
        }
        let l = self.l;
        subset_graph(self.n as u32, self.k as u32, |u, v| ((u & v).count_ones() as i64) <= l)
    }
}

pub fn kneser_graph(p: &KneserParams) -> Result<Graph> {
    p.build().map(|(g, _)| g)
}

/// Johnson graph J(n,k): k-subsets, adjacent when they share exactly k−1 elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JohnsonParams {
    pub n: u32,
    pub k: u32,
}

impl JohnsonParams {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidParams(format!("johnson needs 0 <= k <= n, got n={n}, k={k}")));
        }
        if n > 63 {
            return Err(Error::InvalidParams(format!("ground set of {n} elements is too large")));
        }
        Ok(JohnsonParams { n, k })
    }

    pub fn build(&self) -> Result<(Graph, Vec<u64>)> {
        let k = self.k;
        subset_graph(self.n, self.k, |u, v| k >= 1 && (u & v).count_ones() == k - 1)
    }
}

pub fn johnson_graph(p: &JohnsonParams) -> Result<Graph> {
    p.build().map(|(g, _)| g)
}

/// Complete multipartite graph with the given part sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultipartiteSpec {
    pub parts: Vec<u32>,
}

impl MultipartiteSpec {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidParams("multipartite parts must be positive".into()));
        }
        Ok(MultipartiteSpec { parts })
    }

    /// Number of odd parts.
    pub fn odd_parts(&self) -> u64 {
        self.parts.iter().filter(|&&p| p % 2 == 1).count() as u64
    }
}

pub fn multipartite_graph(spec: &MultipartiteSpec) -> Result<Graph> {
    let total: u64 = spec.parts.iter().map(|&p| p as u64).sum();
    let sq: u64 = spec.parts.iter().map(|&p| p as u64 * p as u64).sum();
    let faces = total + (total * total - sq) / 2;
    if faces > DEFAULT_FACE_CAP as u64 {
        return Err(Error::TooLarge { faces: faces as usize, cap: DEFAULT_FACE_CAP });
    }
    let mut part_of = Vec::new();
    let mut labels = Vec::new();
    for (p, &size) in spec.parts.iter().enumerate() {
        for i in 0..size {
            part_of.push(p);
            labels.push(Some(format!("{}.{}", p + 1, i + 1)));
        }
    }
    let n = part_of.len();
    let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| part_of[a] != part_of[b]);
    Graph::new(n, edges.map(|(a, b)| (a as VertexId, b as VertexId)).collect::<Vec<_>>())?.with_labels(labels)
}

pub fn complete_graph(n: u32) -> Result<Graph> {
    let n_ = n as u64;
    if n_ + n_ * n_.saturating_sub(1) / 2 > DEFAULT_FACE_CAP as u64 {
        return Err(Error::TooLarge { faces: (n_ + n_ * n_.saturating_sub(1) / 2) as usize, cap: DEFAULT_FACE_CAP });
    }
    Graph::new(n as usize, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
}

/// Threshold graph K_n^{i_1,…,i_k}: a clique u_1..u_n plus vertices attached to prefixes of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub n: u32,
    pub attachments: Vec<u32>,
}

impl ThresholdSpec {
    pub fn new(n: u32, attachments: Vec<u32>) -> Result<Self> {
        if let Some(&i) = attachments.iter().find(|&&i| i > n) {
            return Err(Error::InvalidParams(format!("attachment {i} exceeds clique size {n}")));
        }
        Ok(ThresholdSpec { n, attachments })
    }

    /// Same graph with attachments in ascending order.
    pub fn sorted(&self) -> ThresholdSpec {
        let mut attachments = self.attachments.clone();
        attachments.sort_unstable();
        ThresholdSpec { n: self.n, attachments }
    }
}

/// Clique vertices come first (`u1..un`), then one vertex per attachment (`v<i>`).
pub fn threshold_graph(spec: &ThresholdSpec) -> Result<Graph> {
    let spec = ThresholdSpec::new(spec.n, spec.attachments.clone())?;
    let n = spec.n;
    let mut edges: Vec<(VertexId, VertexId)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut labels: Vec<Option<String>> = (1..=n).map(|i| Some(format!("u{i}"))).collect();
    for (j, &i) in spec.attachments.iter().enumerate() {
        let v = n + j as u32;
        edges.extend((0..i).map(|u| (u, v)));
        let seen = spec.attachments[..j].iter().filter(|&&x| x == i).count();
        labels.push(Some(if seen == 0 { format!("v{i}") } else { format!("v{i}'{seen}") }));
    }
    let count = n as usize + spec.attachments.len();
    if count + edges.len() > DEFAULT_FACE_CAP {
        return Err(Error::TooLarge { faces: count + edges.len(), cap: DEFAULT_FACE_CAP });
    }
    Graph::new(count, edges)?.with_labels(labels)
}

/// All cliques of `g` with at most `s` vertices.
pub fn clique_skeleton(g: &Graph, s: u32) -> Result<Complex> {
    clique_skeleton_with_cap(g, s, DEFAULT_FACE_CAP)
}

/// As [`clique_skeleton`], aborting as soon as more than `cap` cliques have been found.
pub fn clique_skeleton_with_cap(g: &Graph, s: u32, cap: usize) -> Result<Complex> {
    let n = g.vertex_count();
    let adj: Vec<Vec<bool>> = {
        let mut m = vec![vec![false; n]; n];
        for (u, v) in g.edges() {
            m[u as usize][v as usize] = true;
            m[v as usize][u as usize] = true;
        }
        m
    };
    let mut faces: Vec<Face> = Vec::new();
    // Depth-first over cliques, each extended only by larger common neighbours.
    let mut stack: Vec<(Vec<VertexId>, Vec<VertexId>)> = Vec::new();
    if s >= 1 {
        for v in (0..n as VertexId).rev() {
            let cands = (v + 1..n as VertexId).filter(|&w| adj[v as usize][w as usize]).collect();
            stack.push((vec![v], cands));
        }
    }
    while let Some((clique, cands)) = stack.pop() {
        faces.push(Face::new(clique.iter().copied())?);
        if faces.len() > cap {
            return Err(Error::TooLarge { faces: faces.len(), cap });
        }
        if clique.len() as u32 >= s {
            continue;
        }
        for (idx, &w) in cands.iter().enumerate().rev() {
            let mut next = clique.clone();
            next.push(w);
            let rest = cands[idx + 1..].iter().copied().filter(|&x| adj[w as usize][x as usize]).collect();
            stack.push((next, rest));
        }
    }
    Ok(Complex::from_parts_unchecked(g.as_complex().labels().to_vec(), faces.into_iter().collect()))
}

/// Largest clique size of `g`.
pub fn clique_number(g: &Graph) -> u32 {
    let n = g.vertex_count() as u32;
    clique_skeleton_with_cap(g, n, usize::MAX).map(|c| c.dimension_bound() as u32).unwrap_or(0)
}

/// Disjoint union of the two graphs plus every edge between them.
pub fn join_graph(g1: &Graph, g2: &Graph) -> Result<Graph> {
    let n1 = g1.vertex_count() as VertexId;
    let n2 = g2.vertex_count() as VertexId;
    let mut edges: Vec<(VertexId, VertexId)> = g1.edges().collect();
    edges.extend(g2.edges().map(|(a, b)| (a + n1, b + n1)));
    edges.extend((0..n1).flat_map(|a| (0..n2).map(move |b| (a, b + n1))));
    let total = (n1 + n2) as usize + edges.len();
    if total > DEFAULT_FACE_CAP {
        return Err(Error::TooLarge { faces: total, cap: DEFAULT_FACE_CAP });
    }
    let labels = g1.as_complex().labels().iter().chain(g2.as_complex().labels()).cloned().collect();
    Graph::new((n1 + n2) as usize, edges)?.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_order_of_two_subsets() {
        let labels: Vec<String> = subsets_colex(4, 2).map(subset_label).collect();
        assert_eq!(labels, ["{1,2}", "{1,3}", "{2,3}", "{1,4}", "{2,4}", "{3,4}"]);
        assert_eq!(subsets_colex(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(subsets_colex(2, 3).count(), 0);
        assert_eq!(parse_subset_label("{1,4}"), Some(0b1001));
        assert_eq!(parse_subset_label("{}"), Some(0));
    }

    #[test]
    fn binomials_and_logs() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(60, 30), 118264581564861424);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn petersen() {
        let g = kneser_graph(&KneserParams::new(5, 2, 0)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (10, 15));
        assert_eq!(g.label(0), "{1,2}");
        let p = KneserParams::new(5, 2, 0);
        assert_eq!((p.m(), p.t(), p.j()), (Some(1), Some(2), Some(1)));
    }

    #[test]
    fn kneser_small_cases() {
        let g = kneser_graph(&KneserParams::new(4, 2, 0)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 3));
        let g = kneser_graph(&KneserParams::new(4, 2, 1)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 15));
        assert_eq!(kneser_graph(&KneserParams::new(3, 5, 1)).unwrap().vertex_count(), 0);
        assert!(kneser_graph(&KneserParams::new(30, 15, 0)).unwrap_err().to_string().contains("face cap"));
    }

    #[test]
    fn johnson_small_cases() {
        let g = johnson_graph(&JohnsonParams::new(4, 2).unwrap()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 12));
        let g = johnson_graph(&JohnsonParams::new(2, 1).unwrap()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
        let g = johnson_graph(&JohnsonParams::new(0, 0).unwrap()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        assert!(JohnsonParams::new(2, 3).is_err());
    }

    #[test]
    fn multipartite_small_cases() {
        let g = multipartite_graph(&MultipartiteSpec::new(vec![3, 5]).unwrap()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (8, 15));
        let g = multipartite_graph(&MultipartiteSpec::new(vec![1, 1, 1]).unwrap()).unwrap();
        assert_eq!(g, complete_graph(3).unwrap().with_labels(g.as_complex().labels().to_vec()).unwrap());
        assert!(MultipartiteSpec::new(vec![2, 0]).is_err());
    }

    #[test]
    fn threshold_small_cases() {
        let g = threshold_graph(&ThresholdSpec::new(1, vec![0]).unwrap()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 0));
        let g = threshold_graph(&ThresholdSpec::new(2, vec![1, 1]).unwrap()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 3));
        assert!(g.has_edge(0, 2) && g.has_edge(0, 3) && !g.has_edge(1, 2));
        assert_eq!(g.label(3), "v1'1");
        let g = threshold_graph(&ThresholdSpec::new(3, vec![3]).unwrap()).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(ThresholdSpec::new(2, vec![3]).is_err());
    }

    #[test]
    fn skeletons() {
        let k3 = complete_graph(3).unwrap();
        assert_eq!(clique_skeleton(&k3, 3).unwrap().face_count(), 7);
        assert_eq!(clique_skeleton(&k3, 2).unwrap(), k3.as_complex().clone());
        assert_eq!(clique_skeleton(&k3, 0).unwrap().face_count(), 0);
        assert_eq!(clique_skeleton(&complete_graph(5).unwrap(), 5).unwrap().face_count(), 31);
        let petersen = kneser_graph(&KneserParams::new(5, 2, 0)).unwrap();
        assert_eq!(clique_skeleton(&petersen, 10).unwrap(), petersen.as_complex().clone());
        assert_eq!(clique_number(&petersen), 2);
        assert!(matches!(clique_skeleton(&complete_graph(20).unwrap(), 20), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn joins() {
        let k1 = complete_graph(1).unwrap();
        assert_eq!(join_graph(&k1, &k1).unwrap(), complete_graph(2).unwrap());
        assert_eq!(join_graph(&k1, &complete_graph(2).unwrap()).unwrap(), complete_graph(3).unwrap());
    }
}
