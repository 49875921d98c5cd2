use chomp_core::{EngineConfig, Face, GameState, Move, Solver};

use crate::error::CliResult;
use crate::input::Instance;

/// A winning move for the player to move, or `None` when the position is lost.
pub fn best_move(instance: &Instance, config: &EngineConfig) -> CliResult<Option<Move>> {
    let state = instance.state()?;
    Ok(Solver::for_state(&state, config).best_move(&state)?)
}

pub fn render_face(state: &GameState, face: &Face, as_labels: bool) -> String {
    if as_labels {
        let labels: Vec<String> = face.vertices().iter().map(|&v| state.label(v)).collect();
        format!("{{{}}}", labels.join(", "))
    } else {
        face.to_string()
    }
}

/// The line printed by `chomp best-move`.
pub fn describe(instance: &Instance, mv: Option<&Move>, as_labels: bool) -> CliResult<String> {
    Ok(match mv {
        None => "position is lost".to_string(),
        Some(m) => render_face(&instance.state()?, &m.face, as_labels),
    })
}
