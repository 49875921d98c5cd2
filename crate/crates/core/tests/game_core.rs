mod common;

use std::collections::BTreeSet;

use chomp_core::{Complex, Face, GameState, VertexId};
use proptest::prelude::*;

fn complex_strategy(max_vertices: usize) -> impl Strategy<Value = Complex> {
    (1..=max_vertices).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::btree_set(0..n as VertexId, 1..=n.min(4)), 0..8)
            .prop_map(move |sets| Complex::closure(n, sets.into_iter().map(|s| Face::new(s).unwrap())).unwrap().0)
    })
}

proptest! {
    #[test]
    fn moves_shrink_and_stay_down_closed(c in complex_strategy(6), pick in any::<prop::sample::Index>()) {
        let s = GameState::new(&c).unwrap();
        let moves = s.legal_moves();
        prop_assume!(!moves.is_empty());
        let m = &moves[pick.index(moves.len())];
        let next = s.apply_move(m).unwrap();
        let after = next.to_complex();
        prop_assert!(after.is_down_closed());
        prop_assert!(next.face_count() < s.face_count());
        let before: BTreeSet<&Face> = s.faces().collect();
        prop_assert!(next.faces().all(|f| before.contains(f)));
        prop_assert!(next.faces().all(|f| !m.face.is_subset_of(f)));
        prop_assert!(!next.contains(&m.face));
    }

    #[test]
    fn closure_is_idempotent(c in complex_strategy(6)) {
        let (again, added) = Complex::closure(c.vertex_count(), c.faces().cloned()).unwrap();
        prop_assert!(!added);
        prop_assert_eq!(again, c);
    }

    #[test]
    fn components_partition_the_state(c in complex_strategy(7)) {
        let s = GameState::new(&c).unwrap();
        let parts = s.connected_components();
        let total: usize = parts.iter().map(GameState::face_count).sum();
        prop_assert_eq!(total, s.face_count());
        let mut seen = BTreeSet::new();
        let mut vertices: Vec<BTreeSet<VertexId>> = Vec::new();
        for p in &parts {
            prop_assert!(!p.is_terminal());
            let vs: BTreeSet<VertexId> = p.faces().flat_map(|f| f.vertices().to_vec()).collect();
            for f in p.faces() {
                prop_assert!(seen.insert(f.clone()), "face {} in two components", f);
            }
            prop_assert!(vertices.iter().all(|other| other.is_disjoint(&vs)));
            vertices.push(vs);
        }
    }

    #[test]
    fn play_always_terminates(c in complex_strategy(6), seed in any::<u64>()) {
        let mut s = GameState::new(&c).unwrap();
        let mut k = seed;
        let mut steps = 0;
        while !s.is_terminal() {
            let moves = s.legal_moves();
            k = k.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            s = s.apply_move(&moves[(k >> 33) as usize % moves.len()]).unwrap();
            steps += 1;
        }
        prop_assert!(steps <= c.face_count());
    }
}

#[test]
fn component_examples() {
    let three_edges = chomp_core::Graph::new(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
    let parts = common::state(three_edges.as_complex()).connected_components();
    assert_eq!(parts.len(), 3);
    assert!(parts.iter().all(|p| p.face_count() == 3));
    let petersen = chomp_core::families::kneser_graph(&chomp_core::families::KneserParams::new(5, 2, 0)).unwrap();
    assert_eq!(common::state(petersen.as_complex()).connected_components().len(), 1);
    let two = chomp_core::Graph::new(2, []).unwrap();
    assert_eq!(common::state(two.as_complex()).connected_components().len(), 2);
}

#[test]
fn removed_faces_are_not_playable() {
    let g = chomp_core::Graph::new(2, [(0, 1)]).unwrap();
    let s = common::state(g.as_complex());
    let s = s.apply_move(&chomp_core::Move::new(Face::vertex(0))).unwrap();
    assert!(matches!(
        s.apply_move(&chomp_core::Move::new(Face::edge(0, 1))),
        Err(chomp_core::Error::FaceNotPresent(_))
    ));
}
