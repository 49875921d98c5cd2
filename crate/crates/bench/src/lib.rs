//! Fixed positions shared by the benchmarks.

use chomp_core::engine::canon::SmallGraph;
use chomp_core::families::{clique_skeleton, complete_graph, johnson_graph, kneser_graph, JohnsonParams, KneserParams};
use chomp_core::{GameState, Graph};

pub fn graph_state(g: &Graph) -> GameState {
    GameState::new(g.as_complex()).expect("family graphs are valid complexes")
}

pub fn complete(n: u32) -> GameState {
    graph_state(&complete_graph(n).unwrap())
}

pub fn petersen() -> Graph {
    kneser_graph(&KneserParams::new(5, 2, 0)).unwrap()
}

pub fn johnson(n: u32, k: u32) -> GameState {
    graph_state(&johnson_graph(&JohnsonParams::new(n, k).unwrap()).unwrap())
}

/// Full clique complex of K_t.
pub fn simplex(t: u32) -> GameState {
    GameState::new(&clique_skeleton(&complete_graph(t).unwrap(), t).unwrap()).unwrap()
}

pub fn small(g: &Graph) -> SmallGraph {
    SmallGraph::new(g.vertex_count(), g.edges().map(|(a, b)| (a as usize, b as usize))).unwrap()
}
