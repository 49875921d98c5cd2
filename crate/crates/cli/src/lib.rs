//! Batch commands and the session service for the chomp engine.

pub mod error;
pub mod fuzz;
pub mod input;
pub mod moves;
pub mod nim;
pub mod service;
pub mod session;
pub mod verify;

pub use error::{CliError, CliResult};
pub use input::{resolve, Instance};
pub use session::SessionStore;
