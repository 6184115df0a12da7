//! Solution files: value array, sparse equilibrium strategies and convergence metadata,
//! bound to a scenario by its digest and to the state index by the axis-code table.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::campaign::{ActionProfile, Campaign, Infeasibility, Order, OrderKind, Player};
use crate::error::ScenarioError;
use crate::scenario::Scenario;
use crate::solver::{Algorithm, PolicyProfile, Solution, SolveCounters, SolveReport, ValueFunction};
use crate::space::StateSpace;
use crate::SCHEMA_VERSION;

/// One commander's order as `(commander, kind, target)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSpec {
    pub commander: usize,
    pub kind: OrderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
}

/// Every commander's order, idle ones included.
pub fn action_to_specs(action: &ActionProfile) -> Vec<OrderSpec> {
    action
        .orders
        .iter()
        .enumerate()
        .map(|(commander, o)| OrderSpec { commander, kind: o.kind(), target: o.target() })
        .collect()
}

/// Build an action from order triples; unmentioned commanders stay idle.
pub fn specs_to_action(campaign: &Campaign, specs: &[OrderSpec]) -> Result<ActionProfile, Infeasibility> {
    let orders = specs
        .iter()
        .map(|s| {
            let order = match (s.kind, s.target) {
                (OrderKind::None, None) => Order::None,
                (OrderKind::Attack, Some(t)) => Order::Attack(t),
                (OrderKind::Reinforce, Some(t)) => Order::Reinforce(t),
                _ => return Err(Infeasibility::MalformedOrder { commander: s.commander }),
            };
            Ok((s.commander, order))
        })
        .collect::<Result<Vec<_>, _>>()?;
    campaign.action_from_orders(&orders)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisCode {
    pub axis: usize,
    pub objectives: Vec<usize>,
    /// `2|x|`: c1, c2, pf(1..|x|-1), sf(1..|x|-1).
    pub radix: usize,
    pub weight: usize,
}

pub fn axis_code_table(campaign: &Campaign) -> Result<Vec<AxisCode>, ScenarioError> {
    let weights = campaign.axis_weights()?;
    Ok(campaign
        .axes()
        .iter()
        .zip(weights)
        .map(|(a, weight)| AxisCode {
            axis: a.id,
            objectives: a.objectives.clone(),
            radix: 2 * a.len(),
            weight,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedAction {
    pub orders: Vec<OrderSpec>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateStrategies {
    pub state: String,
    pub player1: Vec<WeightedAction>,
    pub player2: Vec<WeightedAction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionStatistics {
    pub iteration_bound: usize,
    pub final_sup_delta: f64,
    pub state_count: usize,
    pub max_actions: [usize; 2],
    pub counters: SolveCounters,
    pub final_sweep: SolveCounters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub schema_version: String,
    pub scenario_digest: String,
    pub axis_codes: Vec<AxisCode>,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub gamma: f64,
    pub iterations: usize,
    pub statistics: SolutionStatistics,
    pub values: Vec<f64>,
    pub strategies: Vec<StateStrategies>,
}

fn weighted(space: &StateSpace, policy: &PolicyProfile, index: usize, player: Player) -> Vec<WeightedAction> {
    policy
        .support(space, index, player)
        .into_iter()
        .map(|(a, probability)| WeightedAction { orders: action_to_specs(&a), probability })
        .collect()
}

pub fn to_file(scenario: &Scenario, space: &StateSpace, solution: &Solution) -> Result<SolutionFile, ScenarioError> {
    let r = &solution.report;
    Ok(SolutionFile {
        schema_version: SCHEMA_VERSION.to_string(),
        scenario_digest: scenario.digest().to_string(),
        axis_codes: axis_code_table(space.campaign())?,
        algorithm: r.algorithm,
        epsilon: r.epsilon,
        gamma: space.discount(),
        iterations: r.iterations,
        statistics: SolutionStatistics {
            iteration_bound: r.iteration_bound,
            final_sup_delta: r.final_sup_delta,
            state_count: r.state_count,
            max_actions: r.max_actions,
            counters: r.counters,
            final_sweep: r.final_sweep,
        },
        values: solution.values.0.clone(),
        strategies: (0..space.len())
            .map(|i| StateStrategies {
                state: space.state(i).to_string(),
                player1: weighted(space, &solution.policy, i, Player::One),
                player2: weighted(space, &solution.policy, i, Player::Two),
            })
            .collect(),
    })
}

/// Pretty JSON; identical inputs give identical bytes.
pub fn solution_to_json(scenario: &Scenario, space: &StateSpace, solution: &Solution) -> Result<String, ScenarioError> {
    let mut text = serde_json::to_string_pretty(&to_file(scenario, space, solution)?).expect("solution serializes");
    text.push('\n');
    Ok(text)
}

pub fn save_solution(path: impl AsRef<Path>, scenario: &Scenario, space: &StateSpace, solution: &Solution) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    std::fs::write(path, solution_to_json(scenario, space, solution)?).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn dense(space: &StateSpace, index: usize, player: Player, listed: &[WeightedAction], state: &str) -> Result<Vec<f64>, ScenarioError> {
    let invalid = |message: String| ScenarioError::InvalidStrategy { state: state.to_string(), message };
    let actions = space.reduced_actions(index, player);
    let mut out = vec![0.0; actions.len()];
    for w in listed {
        let action = specs_to_action(space.campaign(), &w.orders).map_err(|e| invalid(format!("player {player}: {e}")))?;
        let k = actions
            .iter()
            .position(|a| *a == action)
            .ok_or_else(|| invalid(format!("player {player}: action {action} is not a front action at this state")))?;
        if !(w.probability >= 0.0 && w.probability <= 1.0) {
            return Err(invalid(format!("player {player}: probability {} outside [0, 1]", w.probability)));
        }
        if out[k] != 0.0 {
            return Err(invalid(format!("player {player}: action {action} listed twice")));
        }
        out[k] = w.probability;
    }
    let total: f64 = out.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("player {player}: probabilities sum to {total}")));
    }
    Ok(out)
}

/// Check digest, axis table and every strategy against the scenario, then rebuild the solution.
pub fn from_file(file: SolutionFile, scenario: &Scenario, space: &StateSpace) -> Result<Solution, ScenarioError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(ScenarioError::SchemaVersion(file.schema_version));
    }
    if file.scenario_digest != scenario.digest() {
        return Err(ScenarioError::DigestMismatch {
            expected: scenario.digest().to_string(),
            found: file.scenario_digest,
        });
    }
    let table = axis_code_table(space.campaign())?;
    if file.axis_codes != table {
        return Err(ScenarioError::AxisTableMismatch(format!(
            "file has {} axis entries, scenario layout differs",
            file.axis_codes.len()
        )));
    }
    if file.values.len() != space.len() || file.strategies.len() != space.len() {
        return Err(ScenarioError::AxisTableMismatch(format!(
            "{} values and {} strategy entries for {} states",
            file.values.len(),
            file.strategies.len(),
            space.len()
        )));
    }
    if let Some(i) = file.values.iter().position(|v| !v.is_finite()) {
        return Err(ScenarioError::integrity(format!("values[{i}]"), "value is not finite"));
    }
    let mut p1 = Vec::with_capacity(space.len());
    let mut p2 = Vec::with_capacity(space.len());
    for (i, entry) in file.strategies.iter().enumerate() {
        let expected = space.state(i).to_string();
        if entry.state != expected {
            return Err(ScenarioError::InvalidStrategy {
                state: entry.state.clone(),
                message: format!("entry {i} should describe state {expected}"),
            });
        }
        p1.push(dense(space, i, Player::One, &entry.player1, &entry.state)?);
        p2.push(dense(space, i, Player::Two, &entry.player2, &entry.state)?);
    }
    let stats = file.statistics;
    Ok(Solution {
        values: ValueFunction(file.values),
        policy: PolicyProfile::new(p1, p2),
        report: SolveReport {
            algorithm: file.algorithm,
            iterations: file.iterations,
            final_sup_delta: stats.final_sup_delta,
            epsilon: file.epsilon,
            iteration_bound: stats.iteration_bound,
            wallclock_secs: 0.0,
            state_count: stats.state_count,
            max_actions: stats.max_actions,
            counters: stats.counters,
            final_sweep: stats.final_sweep,
            isotonicity_violations: None,
        },
    })
}

pub fn solution_from_json(text: &str, scenario: &Scenario, space: &StateSpace) -> Result<Solution, ScenarioError> {
    let file: SolutionFile = serde_json::from_str(text).map_err(ScenarioError::parse)?;
    from_file(file, scenario, space)
}

pub fn load_solution(path: impl AsRef<Path>, scenario: &Scenario, space: &StateSpace) -> Result<Solution, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    solution_from_json(&text, scenario, space)
}
