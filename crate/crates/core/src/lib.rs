//! Two-player military campaigns modelled as discounted zero-sum stochastic games.
//!
//! A [`Campaign`] partitions objectives into ordered axes, each under one commander.
//! Players issue at most one attack or reinforce order per commander per stage, subject
//! to open lines of control, and battle outcomes are independent Bernoulli trials whose
//! probabilities come from a [`ProbabilityModel`].
//!
//! The crate provides:
//!
//! * the campaign structure, axis typing and the reduced (achievable) state space,
//! * transition probabilities and assumption validation,
//! * an exact matrix-game solver (pure saddle search, iterated weak-dominance elimination, LP),
//! * Shapley value iteration and its accelerated variant,
//! * post-hoc analysis: isotonicity audits, ε-MPE certification, policy evaluation, simulation,
//! * scenario and solution file formats plus text reports.

pub mod analysis;
pub mod campaign;
pub mod encoding;
pub mod error;
pub mod matrix_game;
pub mod report;
pub mod scenario;
pub mod solution;
pub mod solver;
pub mod space;
pub mod transitions;

pub use campaign::{
    ActionProfile, Axis, AxisType, Campaign, CampaignState, Commander, Infeasibility, Objective,
    Order, OrderKind, Player,
};
pub use error::{ModelError, ScenarioError, SolveError};
pub use matrix_game::{GameSolution, PayoffMatrix};
pub use scenario::Scenario;
pub use solver::{PolicyProfile, SolveOptions, SolveReport, Solution, ValueFunction};
pub use space::StateSpace;
pub use transitions::{ImprovementEntry, ProbabilityModel, ProbabilityOverride};

/// Schema identifier written into scenario and solution files.
pub const SCHEMA_VERSION: &str = "campaign-mpe/1";
