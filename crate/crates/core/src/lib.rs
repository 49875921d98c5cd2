//! Perfect play for chomp on graphs and simplicial complexes.
//!
//! A position is a down-closed family of faces; a move picks a face and removes
//! everything containing it. The player left without a move loses.

pub mod bits;
pub mod closed_forms;
pub mod complex;
pub mod engine;
pub mod error;
pub mod families;
pub mod state;
pub mod symmetry;

pub use bits::FaceSet;
pub use closed_forms::{closed_form, ClosedFormResult};
pub use complex::{Complex, ComplexJson, Face, Graph, LoadedComplex, Vertex, VertexId};
pub use engine::{
    best_move, grundy, mex, outcome, solve_auto, xor_sum, Engine, EngineConfig, Grundy, Outcome, SolveMethod, Solved,
    Solver,
};
pub use error::{Error, ResourceKind, Result};
pub use families::FamilySpec;
pub use state::{FaceTable, GameState, Move};
pub use symmetry::{
    fixed_subgraph, validate_involution, validate_poset_involution, GroundPermutation, Involution, MirrorStrategy,
    PosetInvolution,
};
