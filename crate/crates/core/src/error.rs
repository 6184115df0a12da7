use thiserror::Error;

/// Structural and state-level errors raised by the campaign model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("objective ids must be dense and 0-based: position {position} holds id {id}")]
    NonContiguousObjective { position: usize, id: usize },
    #[error("objective {id} has invalid loss {loss} (must be finite and non-negative)")]
    InvalidLoss { id: usize, loss: f64 },
    #[error("axis {axis} is empty")]
    EmptyAxis { axis: usize },
    #[error("axis ids must be dense and 0-based: position {position} holds id {id}")]
    NonContiguousAxis { position: usize, id: usize },
    #[error("axis {axis} references unknown objective {objective}")]
    UnknownObjective { axis: usize, objective: usize },
    #[error("objective {objective} appears in more than one axis (axes {first} and {second})")]
    ObjectiveInTwoAxes { objective: usize, first: usize, second: usize },
    #[error("objective {objective} belongs to no axis")]
    UnassignedObjective { objective: usize },
    #[error("commander ids must be dense and 0-based: position {position} holds id {id}")]
    NonContiguousCommander { position: usize, id: usize },
    #[error("commander {commander} references unknown axis {axis}")]
    UnknownAxis { commander: usize, axis: usize },
    #[error("axis {axis} is assigned to commanders {first} and {second}")]
    AxisSharedByCommanders { axis: usize, first: usize, second: usize },
    #[error("axis {axis} has no responsible commander")]
    UnassignedAxis { axis: usize },
    #[error("commander {commander} is responsible for no axis")]
    IdleCommander { commander: usize },
    #[error("discount factor {0} must lie strictly inside (0, 1)")]
    InvalidDiscount(f64),
    #[error("probability model: {0}")]
    InvalidProbability(String),
    #[error("state has {got} entries, campaign has {expected} objectives")]
    StateLength { expected: usize, got: usize },
    #[error("malformed state string {0:?}: expected characters '1' or '2'")]
    MalformedState(String),
    #[error("state {state} is not achievable: axis {axis} matches no axis type")]
    Unachievable { state: String, axis: usize },
    #[error("state index {index} out of range (state count {count})")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("state space too large to index")]
    StateSpaceOverflow,
}

/// Errors from the matrix-game solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("payoff matrix must have at least one row and one column")]
    Empty,
    #[error("payoff matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("LP duality gap {gap:e} exceeds certification tolerance")]
    DualityGap { gap: f64 },
    #[error("simplex failed to terminate after {0} pivots")]
    PivotLimit(usize),
}

/// Errors from value iteration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("value iteration did not converge within {iterations} iterations (last sup-norm delta {delta:e})")]
    NonConvergence { iterations: usize, delta: f64 },
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("matrix game at state {state}: {source}")]
    MatrixGame {
        state: usize,
        #[source]
        source: GameError,
    },
}

/// Errors raised while reading or validating scenario and solution files.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema_version {0:?}")]
    SchemaVersion(String),
    #[error("integrity violation at {location}: {message}")]
    Integrity { location: String, message: String },
    #[error("initial state violates the axis-type requirement: axis {axis} ({objectives}) is not of type c1, c2, pf or sf")]
    InitialState { axis: usize, objectives: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("solution digest {found} does not match scenario digest {expected}")]
    DigestMismatch { expected: String, found: String },
    #[error("solution axis-code table does not match the scenario: {0}")]
    AxisTableMismatch(String),
    #[error("solution strategy at state {state} is invalid: {message}")]
    InvalidStrategy { state: String, message: String },
}

impl ScenarioError {
    pub(crate) fn parse(err: serde_json::Error) -> Self {
        ScenarioError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }

    pub(crate) fn integrity(location: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Integrity {
            location: location.into(),
            message: message.into(),
        }
    }
}
