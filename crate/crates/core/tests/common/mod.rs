//! Helpers shared by the integration suites: a naive Grundy oracle over plain face
//! sets, random graph generators and an isomorphism test via canonical forms.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use chomp_core::engine::canon::SmallGraph;
use chomp_core::{Complex, EngineConfig, Face, GameState, Graph, VertexId};
use rand::rngs::StdRng;
use rand::Rng;

/// Grundy value by plain recursion on sorted face sets. Shares no code with the engine.
pub fn naive_grundy(faces: &BTreeSet<Face>) -> u32 {
    fn go(faces: &BTreeSet<Face>, memo: &mut HashMap<BTreeSet<Face>, u32>) -> u32 {
        if let Some(&v) = memo.get(faces) {
            return v;
        }
        let mut seen = BTreeSet::new();
        for f in faces {
            let rest: BTreeSet<Face> = faces.iter().filter(|g| !f.is_subset_of(g)).cloned().collect();
            seen.insert(go(&rest, memo));
        }
        let v = (0..).find(|x| !seen.contains(x)).unwrap();
        memo.insert(faces.clone(), v);
        v
    }
    go(faces, &mut HashMap::new())
}

pub fn naive_graph_grundy(g: &Graph) -> u32 {
    naive_grundy(g.as_complex().face_set())
}

pub fn state(c: &Complex) -> GameState {
    GameState::new(c).unwrap()
}

pub fn engine_grundy(c: &Complex) -> u32 {
    chomp_core::grundy(&state(c), &EngineConfig::default()).unwrap().0
}

pub fn random_graph(rng: &mut StdRng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n as VertexId {
        for b in a + 1..n as VertexId {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn small(g: &Graph) -> SmallGraph {
    SmallGraph::new(g.vertex_count(), g.edges().map(|(a, b)| (a as usize, b as usize))).unwrap()
}

pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && small(a).canonical_form() == small(b).canonical_form()
}
