//! Session-oriented HTTP API for a solved campaign: what-if value queries and stage-by-stage
//! play of one side against the equilibrium opponent.

pub mod api;
pub mod engine;

pub use api::{router, serve, AppState};
pub use engine::{Engine, EngineError, Session};
