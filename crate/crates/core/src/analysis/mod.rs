//! Post-hoc checks on solved campaigns: isotonicity audits, exact policy evaluation,
//! best-response certification and Monte Carlo simulation.

mod certify;
mod isotonicity;
mod policy;
mod simulate;

pub use certify::{best_response, certify_epsilon_mpe, CertificationReport, BEST_RESPONSE_TOLERANCE};
pub use isotonicity::{check_isotonicity, IsotonicityViolation, ISOTONICITY_TOLERANCE, PAIRWISE_LIMIT};
pub use policy::{evaluate_policy, StatePolicy, EVALUATION_TOLERANCE};
pub use simulate::{default_horizon, monte_carlo, sample_action, simulate, MonteCarloEstimate, Trajectory};
