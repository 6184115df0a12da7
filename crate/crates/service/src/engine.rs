//! Session logic independent of HTTP: what-if queries and stage-by-stage play against the
//! equilibrium opponent.

use campaign_core::analysis::{sample_action, StatePolicy};
use campaign_core::solution::{action_to_specs, specs_to_action, OrderSpec, WeightedAction};
use campaign_core::{ActionProfile, Axis, CampaignState, Commander, Infeasibility, Objective, Player, Scenario, Solution, StateSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("malformed state {0:?}: expected a string over {{1,2}} of length {1}")]
    MalformedState(String, usize),
    #[error("state {state} is not achievable (axis {axis})")]
    Unachievable { state: String, axis: usize },
    #[error("{0}")]
    Infeasible(#[from] Infeasibility),
    #[error("scenario {requested:?} does not match the loaded scenario {loaded}")]
    ScenarioMismatch { requested: String, loaded: String },
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("{0}")]
    BadRequest(String),
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::MalformedState(..) => "malformed_state",
            EngineError::Unachievable { .. } => "unachievable_state",
            EngineError::Infeasible(_) => "infeasible_action",
            EngineError::ScenarioMismatch { .. } => "scenario_mismatch",
            EngineError::UnknownSession(_) => "unknown_session",
            EngineError::BadRequest(_) => "bad_request",
        }
    }

    /// The violated feasibility constraint, for infeasible orders.
    pub fn constraint(&self) -> Option<&'static str> {
        match self {
            EngineError::Infeasible(e) => Some(e.constraint()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    pub scenario_digest: String,
    pub name: Option<String>,
    pub discount: f64,
    pub objectives: Vec<Objective>,
    pub axes: Vec<Axis>,
    pub commanders: Vec<Commander>,
    pub initial_state: String,
    pub state_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrategyView {
    /// Support of the equilibrium mixed strategy.
    pub strategy: Vec<WeightedAction>,
    pub reduced_actions: Vec<Vec<OrderSpec>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueView {
    pub scenario_digest: String,
    pub state: String,
    pub value: f64,
    pub stage_loss: f64,
    pub player1: StrategyView,
    pub player2: StrategyView,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BattleOutcome {
    /// The attack failed outright.
    Repelled,
    /// The attack succeeded but the reinforcement thwarted it.
    ReinforcedSave,
    Captured,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BattleResult {
    pub objective: usize,
    pub attacker: Player,
    pub reinforced: bool,
    pub capture_probability: f64,
    pub outcome: BattleOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub stage: usize,
    pub state: String,
    pub human_action: Vec<OrderSpec>,
    pub opponent_action: Vec<OrderSpec>,
    pub battles: Vec<BattleResult>,
    pub next_state: String,
    pub stage_loss: f64,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub human_player: Player,
    pub seed: u64,
    rng: ChaCha8Rng,
    state: usize,
    stage: usize,
    /// `γ^stage`.
    weight: f64,
    accumulated: f64,
    history: Vec<HistoryEntry>,
}

impl Session {
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn accumulated_discounted_loss(&self) -> f64 {
        self.accumulated
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionView {
    pub scenario_digest: String,
    pub id: String,
    pub human_player: Player,
    pub seed: u64,
    /// Words consumed from the session's random stream.
    pub stream_position: u128,
    pub stage: usize,
    pub current_state: String,
    pub accumulated_discounted_loss: f64,
    pub value: f64,
    /// Feasible orders per commander for the human side (any combination is a legal action).
    pub feasible_orders: Vec<Vec<OrderSpec>>,
    pub history: Vec<HistoryEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageView {
    pub scenario_digest: String,
    pub session_id: String,
    pub stage: usize,
    pub state: String,
    pub human_action: Vec<OrderSpec>,
    pub opponent_action: Vec<OrderSpec>,
    pub battles: Vec<BattleResult>,
    pub next_state: String,
    pub stage_loss: f64,
    pub accumulated_discounted_loss: f64,
    pub value_before: f64,
    pub value_after: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HintView {
    pub scenario_digest: String,
    pub session_id: String,
    pub player: Player,
    pub state: String,
    pub value: f64,
    pub strategy: Vec<WeightedAction>,
}

/// A loaded scenario with its solved equilibrium; immutable and shared by all sessions.
pub struct Engine {
    scenario: Scenario,
    space: StateSpace,
    solution: Solution,
    policies: [StatePolicy; 2],
    aliases: Vec<String>,
}

fn weighted(support: Vec<(ActionProfile, f64)>) -> Vec<WeightedAction> {
    support
        .into_iter()
        .map(|(a, probability)| WeightedAction { orders: action_to_specs(&a), probability })
        .collect()
}

impl Engine {
    pub fn new(scenario: Scenario, space: StateSpace, solution: Solution) -> Self {
        let policies = [
            StatePolicy::from_profile(&space, &solution.policy, Player::One),
            StatePolicy::from_profile(&space, &solution.policy, Player::Two),
        ];
        Engine { scenario, space, solution, policies, aliases: Vec::new() }
    }

    /// Another name clients may use for the scenario, such as the file stem.
    pub fn with_alias(mut self, alias: impl Into<String>) -> Self {
        self.aliases.push(alias.into());
        self
    }

    pub fn digest(&self) -> &str {
        self.scenario.digest()
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    /// Accept the digest, the scenario's own name or an alias.
    pub fn check_scenario(&self, requested: Option<&str>) -> Result<(), EngineError> {
        match requested {
            None => Ok(()),
            Some(r) if r == self.digest() || Some(r) == self.scenario.name() || self.aliases.iter().any(|a| a == r) => Ok(()),
            Some(r) => Err(EngineError::ScenarioMismatch { requested: r.to_string(), loaded: self.digest().to_string() }),
        }
    }

    pub fn summary(&self) -> ScenarioSummary {
        let c = self.scenario.campaign();
        ScenarioSummary {
            scenario_digest: self.digest().to_string(),
            name: self.scenario.name().map(str::to_string),
            discount: c.discount(),
            objectives: c.objectives().to_vec(),
            axes: c.axes().to_vec(),
            commanders: c.commanders().to_vec(),
            initial_state: self.scenario.initial_state().to_string(),
            state_count: self.space.len(),
        }
    }

    pub fn resolve_state(&self, text: &str) -> Result<usize, EngineError> {
        let n = self.space.campaign().objective_count();
        let state: CampaignState = text.parse().map_err(|_| EngineError::MalformedState(text.to_string(), n))?;
        if state.len() != n {
            return Err(EngineError::MalformedState(text.to_string(), n));
        }
        self.space.index_of(&state).map_err(|_| EngineError::Unachievable {
            state: text.to_string(),
            axis: self.space.campaign().unachievable_axis(&state).unwrap_or_default(),
        })
    }

    fn strategy_view(&self, index: usize, player: Player) -> StrategyView {
        StrategyView {
            strategy: weighted(self.solution.policy.support(&self.space, index, player)),
            reduced_actions: self.space.reduced_actions(index, player).iter().map(action_to_specs).collect(),
        }
    }

    pub fn value_view(&self, state: &str) -> Result<ValueView, EngineError> {
        let i = self.resolve_state(state)?;
        Ok(ValueView {
            scenario_digest: self.digest().to_string(),
            state: self.space.state(i).to_string(),
            value: self.solution.values.get(i),
            stage_loss: self.space.losses()[i],
            player1: self.strategy_view(i, Player::One),
            player2: self.strategy_view(i, Player::Two),
        })
    }

    pub fn start_session(&self, id: String, human_player: Player, state: Option<&str>, seed: Option<u64>) -> Result<Session, EngineError> {
        let start = match state {
            Some(s) => self.resolve_state(s)?,
            None => self.space.index_of(self.scenario.initial_state()).map_err(|e| EngineError::BadRequest(e.to_string()))?,
        };
        let seed = seed.unwrap_or_else(rand::random);
        Ok(Session {
            id,
            human_player,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            state: start,
            stage: 0,
            weight: 1.0,
            accumulated: 0.0,
            history: Vec::new(),
        })
    }

    pub fn session_view(&self, session: &Session) -> SessionView {
        let state = self.space.state(session.state);
        let feasible_orders = self
            .space
            .campaign()
            .full_order_options(state, session.human_player)
            .into_iter()
            .enumerate()
            .map(|(commander, options)| {
                options
                    .into_iter()
                    .map(|o| OrderSpec { commander, kind: o.kind(), target: o.target() })
                    .collect()
            })
            .collect();
        SessionView {
            scenario_digest: self.digest().to_string(),
            id: session.id.clone(),
            human_player: session.human_player,
            seed: session.seed,
            stream_position: session.rng.get_word_pos(),
            stage: session.stage,
            current_state: state.to_string(),
            accumulated_discounted_loss: session.accumulated,
            value: self.solution.values.get(session.state),
            feasible_orders,
            history: session.history.clone(),
        }
    }

    pub fn hint(&self, session: &Session) -> HintView {
        HintView {
            scenario_digest: self.digest().to_string(),
            session_id: session.id.clone(),
            player: session.human_player,
            state: self.space.state(session.state).to_string(),
            value: self.solution.values.get(session.state),
            strategy: weighted(self.solution.policy.support(&self.space, session.state, session.human_player)),
        }
    }

    /// Play one stage. The session is untouched when the orders are rejected.
    ///
    /// Random draws, in order: the opponent's action, then one uniform per contested
    /// objective in ascending objective order.
    pub fn play(&self, session: &mut Session, orders: &[OrderSpec]) -> Result<StageView, EngineError> {
        let campaign = self.space.campaign();
        let s = session.state;
        let state = self.space.state(s).clone();
        let human = specs_to_action(campaign, orders)?;
        campaign.check_action(&state, session.human_player, &human)?;

        let opponent_player = session.human_player.opponent();
        let opponent = sample_action(&mut session.rng, self.policies[opponent_player.index()].at(s)).clone();
        let (a1, a2) = match session.human_player {
            Player::One => (&human, &opponent),
            Player::Two => (&opponent, &human),
        };
        let model = campaign.model();
        let mut next = state.clone();
        let mut battles = Vec::new();
        for (o, capture) in self.space.battles(s, a1, a2) {
            let u: f64 = session.rng.random();
            let defender = state.controller(o);
            let attacker = defender.opponent();
            let defender_action = if defender == Player::One { a1 } else { a2 };
            let reinforced = defender_action.order_for(o) == campaign_core::OrderKind::Reinforce;
            let outcome = if u < capture {
                next = next.flipped(o);
                BattleOutcome::Captured
            } else if reinforced && u < model.attack_success_prob(attacker, o, &state) {
                BattleOutcome::ReinforcedSave
            } else {
                BattleOutcome::Repelled
            };
            battles.push(BattleResult { objective: o, attacker, reinforced, capture_probability: capture, outcome });
        }
        let next_index = self.space.index_of(&next).expect("feasible actions keep states achievable");

        let stage_loss = self.space.losses()[s];
        session.accumulated += session.weight * stage_loss;
        session.weight *= self.space.discount();
        let entry = HistoryEntry {
            stage: session.stage,
            state: state.to_string(),
            human_action: action_to_specs(&human),
            opponent_action: action_to_specs(&opponent),
            battles,
            next_state: next.to_string(),
            stage_loss,
        };
        session.stage += 1;
        session.state = next_index;
        session.history.push(entry.clone());
        Ok(StageView {
            scenario_digest: self.digest().to_string(),
            session_id: session.id.clone(),
            stage: entry.stage,
            state: entry.state,
            human_action: entry.human_action,
            opponent_action: entry.opponent_action,
            battles: entry.battles,
            next_state: entry.next_state,
            stage_loss,
            accumulated_discounted_loss: session.accumulated,
            value_before: self.solution.values.get(s),
            value_after: self.solution.values.get(next_index),
        })
    }
}
