//! Battle-outcome probabilities and successor distributions.
//!
//! Base attack and reinforce success probabilities are built multiplicatively: each
//! improvement entry whose condition set is fully controlled by the acting player closes
//! the remaining failure probability by its boost. Scenarios may also pin individual
//! values per state through overrides, which bypass that construction.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::campaign::{ActionProfile, Campaign, CampaignState, OrderKind, Player};
use crate::error::ModelError;

/// Comparisons in assumption validation use this tolerance.
pub const ASSUMPTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbabilityKind {
    #[serde(rename = "atk")]
    Attack,
    #[serde(rename = "rfc")]
    Reinforce,
}

/// Boost applied to a player's success probability on `target` while they control `condition`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementEntry {
    pub player: Player,
    pub target: usize,
    pub kind: ProbabilityKind,
    pub condition: Vec<usize>,
    pub boost: f64,
}

/// Tabulated α/ρ value for one (state, player, objective) triple.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityOverride {
    pub state: CampaignState,
    pub player: Player,
    pub objective: usize,
    pub alpha: Option<f64>,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityModel {
    initial_attack: [Vec<f64>; 2],
    initial_reinforce: [Vec<f64>; 2],
    improvements: Vec<ImprovementEntry>,
    overrides: Vec<ProbabilityOverride>,
    // (player, kind, target) -> entry indices
    by_target: HashMap<(Player, ProbabilityKind, usize), Vec<usize>>,
    override_index: HashMap<(CampaignState, Player, usize), usize>,
}

fn check_probability(what: &str, p: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ModelError::InvalidProbability(format!("{what} = {p} is outside [0, 1]")))
    }
}

impl ProbabilityModel {
    pub fn new(
        initial_attack: [Vec<f64>; 2],
        initial_reinforce: [Vec<f64>; 2],
        improvements: Vec<ImprovementEntry>,
        overrides: Vec<ProbabilityOverride>,
    ) -> Result<Self, ModelError> {
        for p in Player::BOTH {
            for (o, &q) in initial_attack[p.index()].iter().enumerate() {
                check_probability(&format!("initial attack probability of player {p} on objective {o}"), q)?;
            }
            for (o, &q) in initial_reinforce[p.index()].iter().enumerate() {
                check_probability(&format!("initial reinforce probability of player {p} on objective {o}"), q)?;
            }
        }
        let mut by_target: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, e) in improvements.iter().enumerate() {
            check_probability(&format!("improvement {i} boost"), e.boost)?;
            if e.condition.is_empty() {
                return Err(ModelError::InvalidProbability(format!("improvement {i} has an empty condition")));
            }
            if e.condition.contains(&e.target) {
                return Err(ModelError::InvalidProbability(format!(
                    "improvement {i} conditions on its own target {}",
                    e.target
                )));
            }
            by_target.entry((e.player, e.kind, e.target)).or_default().push(i);
        }
        let mut override_index = HashMap::new();
        for (i, ov) in overrides.iter().enumerate() {
            if let Some(a) = ov.alpha {
                check_probability(&format!("override {i} alpha"), a)?;
            }
            if let Some(r) = ov.rho {
                check_probability(&format!("override {i} rho"), r)?;
            }
            if override_index
                .insert((ov.state.clone(), ov.player, ov.objective), i)
                .is_some()
            {
                return Err(ModelError::InvalidProbability(format!(
                    "duplicate override for state {}, player {}, objective {}",
                    ov.state, ov.player, ov.objective
                )));
            }
        }
        Ok(ProbabilityModel {
            initial_attack,
            initial_reinforce,
            improvements,
            overrides,
            by_target,
            override_index,
        })
    }

    /// State-independent model with the same attack and reinforce probability everywhere.
    pub fn constant(objectives: usize, attack: f64, reinforce: f64) -> Self {
        let a = vec![attack; objectives];
        let r = vec![reinforce; objectives];
        ProbabilityModel::new([a.clone(), a], [r.clone(), r], Vec::new(), Vec::new())
            .expect("constant probabilities are valid")
    }

    pub fn initial_attack(&self, player: Player) -> &[f64] {
        &self.initial_attack[player.index()]
    }

    pub fn initial_reinforce(&self, player: Player) -> &[f64] {
        &self.initial_reinforce[player.index()]
    }

    pub fn improvements(&self) -> &[ImprovementEntry] {
        &self.improvements
    }

    pub fn overrides(&self) -> &[ProbabilityOverride] {
        &self.overrides
    }

    pub fn has_overrides(&self) -> bool {
        !self.overrides.is_empty()
    }

    pub(crate) fn check_dimensions(&self, objectives: usize) -> Result<(), ModelError> {
        for p in Player::BOTH {
            for (name, v) in [("initial_attack", &self.initial_attack[p.index()]), ("initial_reinforce", &self.initial_reinforce[p.index()])] {
                if v.len() != objectives {
                    return Err(ModelError::InvalidProbability(format!(
                        "{name} for player {p} has {} entries, expected {objectives}",
                        v.len()
                    )));
                }
            }
        }
        for (i, e) in self.improvements.iter().enumerate() {
            if let Some(&o) = std::iter::once(&e.target).chain(&e.condition).find(|&&o| o >= objectives) {
                return Err(ModelError::InvalidProbability(format!("improvement {i} references unknown objective {o}")));
            }
        }
        for (i, ov) in self.overrides.iter().enumerate() {
            if ov.state.len() != objectives || ov.objective >= objectives {
                return Err(ModelError::InvalidProbability(format!("override {i} does not fit the campaign")));
            }
        }
        Ok(())
    }

    fn constructed(&self, player: Player, kind: ProbabilityKind, objective: usize, state: &CampaignState) -> f64 {
        let base = match kind {
            ProbabilityKind::Attack => self.initial_attack[player.index()][objective],
            ProbabilityKind::Reinforce => self.initial_reinforce[player.index()][objective],
        };
        let mut failure = 1.0 - base;
        let mut boosted = false;
        if let Some(entries) = self.by_target.get(&(player, kind, objective)) {
            for &i in entries {
                let e = &self.improvements[i];
                if e.condition.iter().all(|&o| state.controller(o) == player) {
                    failure *= 1.0 - e.boost;
                    boosted = true;
                }
            }
        }
        // an empty product leaves the base probability untouched, bit for bit
        if boosted { 1.0 - failure } else { base }
    }

    fn overridden(&self, player: Player, objective: usize, state: &CampaignState) -> Option<&ProbabilityOverride> {
        if self.override_index.is_empty() {
            return None;
        }
        self.override_index
            .get(&(state.clone(), player, objective))
            .map(|&i| &self.overrides[i])
    }

    /// α: probability that an unreinforced attack by `player` on `objective` succeeds.
    /// Equals 1 when `player` already controls the objective.
    pub fn attack_success_prob(&self, player: Player, objective: usize, state: &CampaignState) -> f64 {
        if state.controller(objective) == player {
            return 1.0;
        }
        if let Some(a) = self.overridden(player, objective, state).and_then(|ov| ov.alpha) {
            return a;
        }
        self.constructed(player, ProbabilityKind::Attack, objective, state)
    }

    /// ρ: probability that a reinforcement by `player` thwarts an otherwise successful attack.
    /// Equals 0 when the opponent controls the objective.
    pub fn reinforce_success_prob(&self, player: Player, objective: usize, state: &CampaignState) -> f64 {
        if state.controller(objective) != player {
            return 0.0;
        }
        if let Some(r) = self.overridden(player, objective, state).and_then(|ov| ov.rho) {
            return r;
        }
        self.constructed(player, ProbabilityKind::Reinforce, objective, state)
    }

    /// Probability that the attacker takes `objective`, given both players' orders on it.
    pub fn capture_prob(&self, state: &CampaignState, objective: usize, order1: OrderKind, order2: OrderKind) -> f64 {
        let defender = state.controller(objective);
        let attacker = defender.opponent();
        let (att_order, def_order) = match attacker {
            Player::One => (order1, order2),
            Player::Two => (order2, order1),
        };
        if att_order != OrderKind::Attack {
            return 0.0;
        }
        let alpha = self.attack_success_prob(attacker, objective, state);
        let rho = if def_order == OrderKind::Reinforce {
            self.reinforce_success_prob(defender, objective, state)
        } else {
            0.0
        };
        alpha * (1.0 - rho)
    }

    /// Probability that Player 1 controls `objective` at the next stage.
    pub fn battle_outcome_prob(&self, state: &CampaignState, objective: usize, order1: OrderKind, order2: OrderKind) -> f64 {
        let capture = self.capture_prob(state, objective, order1, order2);
        match state.controller(objective) {
            Player::One => 1.0 - capture,
            Player::Two => capture,
        }
    }
}

/// Successor states with positive probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessorDistribution {
    pub outcomes: Vec<(CampaignState, f64)>,
}

impl SuccessorDistribution {
    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    pub fn prob_of(&self, state: &CampaignState) -> f64 {
        self.outcomes
            .iter()
            .filter(|(s, _)| s == state)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Objectives under attack by either player, with the capture probability of each, ascending.
pub fn contested_objectives(campaign: &Campaign, state: &CampaignState, a1: &ActionProfile, a2: &ActionProfile) -> Vec<(usize, f64)> {
    let mut contested: Vec<(usize, f64)> = a1
        .orders
        .iter()
        .chain(&a2.orders)
        .filter(|o| o.kind() == OrderKind::Attack)
        .filter_map(|o| o.target())
        .map(|o| (o, campaign.model().capture_prob(state, o, a1.order_for(o), a2.order_for(o))))
        .collect();
    contested.sort_by_key(|&(o, _)| o);
    contested.dedup_by_key(|&mut (o, _)| o);
    contested
}

/// Joint successor distribution: contested objectives flip independently, all others are retained.
pub fn successor_distribution(campaign: &Campaign, state: &CampaignState, a1: &ActionProfile, a2: &ActionProfile) -> SuccessorDistribution {
    let contested = contested_objectives(campaign, state, a1, a2);
    let mut outcomes = Vec::with_capacity(1 << contested.len());
    for mask in 0u64..(1u64 << contested.len()) {
        let mut next = state.clone();
        let mut prob = 1.0;
        for (j, &(o, capture)) in contested.iter().enumerate() {
            if mask >> j & 1 == 1 {
                prob *= capture;
                next = next.flipped(o);
            } else {
                prob *= 1.0 - capture;
            }
        }
        if prob > 0.0 {
            outcomes.push((next, prob));
        }
    }
    SuccessorDistribution { outcomes }
}

/// How many states `validate_assumptions` visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    /// Violated by no more than the comparison tolerance.
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionViolation {
    /// 1 (monotone success probabilities) or 2 (defence advantage).
    pub assumption: u8,
    pub severity: Severity,
    /// For assumption 1 the smaller state of the pair; for assumption 2 the state where the reinforcing player holds the objective.
    pub state: String,
    pub other: String,
    pub player: Player,
    pub objective: usize,
    pub quantity: &'static str,
    /// Signed amount by which the inequality fails (negative).
    pub slack: f64,
}

/// Whether the strictness conditions that make every equilibrium use only front actions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Strictness {
    pub positive_losses: bool,
    pub positive_attack: bool,
    pub interior_reinforce: bool,
}

impl Strictness {
    pub fn all(&self) -> bool {
        self.positive_losses && self.positive_attack && self.interior_reinforce
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub states_checked: usize,
    pub assumption1: Vec<AssumptionViolation>,
    pub assumption2: Vec<AssumptionViolation>,
    pub strictness: Strictness,
}

impl AssumptionReport {
    pub fn errors(&self) -> impl Iterator<Item = &AssumptionViolation> {
        self.assumption1
            .iter()
            .chain(&self.assumption2)
            .filter(|v| v.severity == Severity::Error)
    }

    pub fn passes(&self) -> bool {
        self.errors().next().is_none()
    }
}

const MAX_REPORTED: usize = 10_000;

fn classify_slack(slack: f64) -> Option<Severity> {
    if slack >= 0.0 {
        None
    } else if slack >= -ASSUMPTION_TOLERANCE {
        Some(Severity::Warning)
    } else {
        Some(Severity::Error)
    }
}

/// Check the monotonicity and defence-advantage assumptions on single-objective flips between
/// achievable states, plus the strictness conditions on the visited states.
pub fn validate_assumptions(campaign: &Campaign, mode: ValidationMode) -> Result<AssumptionReport, ModelError> {
    let count = campaign.achievable_state_count()?;
    let indices: Vec<usize> = match mode {
        ValidationMode::Exhaustive => (0..count).collect(),
        ValidationMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).map(|_| rng.random_range(0..count)).collect()
        }
    };
    let model = campaign.model();
    let mut report = AssumptionReport {
        states_checked: indices.len(),
        assumption1: Vec::new(),
        assumption2: Vec::new(),
        strictness: Strictness {
            positive_losses: campaign.objectives().iter().all(|o| o.loss > 0.0),
            positive_attack: true,
            interior_reinforce: true,
        },
    };
    let push = |list: &mut Vec<AssumptionViolation>, v: AssumptionViolation| {
        if list.len() < MAX_REPORTED {
            list.push(v);
        }
    };

    for index in indices {
        let s = campaign.decode_state(index)?;
        for i in Player::BOTH {
            for o in campaign.open_loc(&s, i) {
                if s.controller(o) == i {
                    let rho = model.reinforce_success_prob(i, o, &s);
                    if !(rho > 0.0 && rho < 1.0) {
                        report.strictness.interior_reinforce = false;
                    }
                } else if model.attack_success_prob(i, o, &s) <= 0.0 {
                    report.strictness.positive_attack = false;
                }
            }
        }

        for flip in 0..campaign.objective_count() {
            let partner = s.flipped(flip);
            if !campaign.is_achievable(&partner) {
                continue;
            }
            // Assumption 1 on the pair lower ⪯ upper differing at `flip`.
            if s.controller(flip) == Player::One {
                let (lower, upper) = (&s, &partner);
                for o in 0..campaign.objective_count() {
                    let checks = [
                        (Player::One, "alpha", model.attack_success_prob(Player::One, o, lower) - model.attack_success_prob(Player::One, o, upper)),
                        (Player::One, "rho", model.reinforce_success_prob(Player::One, o, lower) - model.reinforce_success_prob(Player::One, o, upper)),
                        (Player::Two, "alpha", model.attack_success_prob(Player::Two, o, upper) - model.attack_success_prob(Player::Two, o, lower)),
                        (Player::Two, "rho", model.reinforce_success_prob(Player::Two, o, upper) - model.reinforce_success_prob(Player::Two, o, lower)),
                    ];
                    for (player, quantity, slack) in checks {
                        if let Some(severity) = classify_slack(slack) {
                            push(&mut report.assumption1, AssumptionViolation {
                                assumption: 1,
                                severity,
                                state: lower.to_string(),
                                other: upper.to_string(),
                                player,
                                objective: o,
                                quantity,
                                slack,
                            });
                        }
                    }
                }
            }
            // Assumption 2: holder i keeps o at s with probability at least the chance i retakes o at the partner state.
            let i = s.controller(flip);
            let keep = 1.0 - model.attack_success_prob(i.opponent(), flip, &s) * (1.0 - model.reinforce_success_prob(i, flip, &s));
            let retake = model.attack_success_prob(i, flip, &partner) * (1.0 - model.reinforce_success_prob(i.opponent(), flip, &partner));
            if let Some(severity) = classify_slack(keep - retake) {
                push(&mut report.assumption2, AssumptionViolation {
                    assumption: 2,
                    severity,
                    state: s.to_string(),
                    other: partner.to_string(),
                    player: i,
                    objective: flip,
                    quantity: "keep-vs-retake",
                    slack: keep - retake,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::{Axis, Commander, Objective, Order};

    fn st(s: &str) -> CampaignState {
        s.parse().unwrap()
    }

    fn entry(player: Player, target: usize, kind: ProbabilityKind, condition: &[usize], boost: f64) -> ImprovementEntry {
        ImprovementEntry { player, target, kind, condition: condition.to_vec(), boost }
    }

    fn line_campaign(n: usize, model: ProbabilityModel) -> Campaign {
        let objectives = (0..n).map(|id| Objective { id, label: String::new(), loss: 1.0 }).collect();
        let axes = (0..n).map(|id| Axis { id, objectives: vec![id] }).collect();
        let commanders = (0..n).map(|id| Commander { id, axes: vec![id] }).collect();
        Campaign::new(objectives, axes, commanders, 0.9, model).unwrap()
    }

    #[test]
    fn worked_example_attack_probability() {
        // 22 objectives, objective 9 (index 8); conditions use 1-based ids shifted to 0-based
        let n = 22;
        let mut attack = vec![0.0; n];
        attack[8] = 0.20;
        let improvements = vec![
            entry(Player::One, 8, ProbabilityKind::Attack, &[11], 0.20),
            entry(Player::One, 8, ProbabilityKind::Attack, &[16], 0.10),
            entry(Player::One, 8, ProbabilityKind::Attack, &[7, 10, 11], 0.15),
            entry(Player::One, 8, ProbabilityKind::Attack, &[6, 10, 15, 19], 0.05),
        ];
        let model = ProbabilityModel::new([attack.clone(), attack], [vec![0.0; n], vec![0.0; n]], improvements, vec![]).unwrap();
        let s = st("1122111121112211121112");
        let alpha = model.attack_success_prob(Player::One, 8, &s);
        let exact = 1.0 - (1.0 - 0.20) * (1.0 - 0.20) * (1.0 - 0.10) * (1.0 - 0.15) * (1.0 - 0.05);
        assert!((alpha - exact).abs() < 1e-12);
        assert_eq!(format!("{alpha:.3}"), "0.535");
        // losing objective 17 (index 16) deactivates the 0.10 boost
        let weaker = model.attack_success_prob(Player::One, 8, &s.flipped(16));
        assert!(weaker < alpha);
    }

    #[test]
    fn empty_product_and_certain_base() {
        let model = ProbabilityModel::new([vec![0.3, 1.0], vec![0.3, 1.0]], [vec![0.4; 2], vec![0.4; 2]], vec![
            entry(Player::Two, 1, ProbabilityKind::Attack, &[0], 0.5),
        ], vec![]).unwrap();
        assert_eq!(model.attack_success_prob(Player::Two, 0, &st("11")), 0.3);
        assert_eq!(model.attack_success_prob(Player::Two, 1, &st("21")), 1.0);
        // controlled objective: α = 1 by convention
        assert_eq!(model.attack_success_prob(Player::One, 0, &st("11")), 1.0);
    }

    #[test]
    fn reinforce_probability_cases() {
        let model = ProbabilityModel::new(
            [vec![0.3; 2], vec![0.3; 2]],
            [vec![0.4; 2], vec![0.4; 2]],
            vec![entry(Player::One, 0, ProbabilityKind::Reinforce, &[1], 0.5)],
            vec![],
        )
        .unwrap();
        assert_eq!(model.reinforce_success_prob(Player::One, 0, &st("12")), 0.4);
        assert!((model.reinforce_success_prob(Player::One, 0, &st("11")) - 0.7).abs() < 1e-15);
        assert_eq!(model.reinforce_success_prob(Player::One, 0, &st("21")), 0.0);
    }

    #[test]
    fn battle_chain() {
        let mut alpha = vec![0.0; 1];
        alpha[0] = 0.7;
        let model = ProbabilityModel::new([alpha.clone(), alpha], [vec![0.4], vec![0.4]], vec![], vec![]).unwrap();
        // Player 1 defends, Player 2 attacks
        let s = st("1");
        assert_eq!(1.0 - model.battle_outcome_prob(&s, 0, OrderKind::None, OrderKind::Attack), 0.7);
        assert_eq!(model.capture_prob(&s, 0, OrderKind::Reinforce, OrderKind::Attack), 0.42);
        assert_eq!(model.battle_outcome_prob(&s, 0, OrderKind::Reinforce, OrderKind::None), 1.0);
        // Player 2 defends
        let s = st("2");
        assert_eq!(model.battle_outcome_prob(&s, 0, OrderKind::Attack, OrderKind::Reinforce), 0.42);
        assert_eq!(model.battle_outcome_prob(&s, 0, OrderKind::None, OrderKind::Reinforce), 0.0);
    }

    #[test]
    fn successor_examples() {
        let model = ProbabilityModel::new([vec![0.7, 0.7], vec![0.7, 0.7]], [vec![0.4; 2], vec![0.4; 2]], vec![], vec![]).unwrap();
        let c = line_campaign(2, model);
        let s = st("12");
        let idle = ActionProfile::idle(2);
        let d = successor_distribution(&c, &s, &idle, &idle);
        assert_eq!(d.outcomes, vec![(s.clone(), 1.0)]);

        // Player 1 attacks o2 unopposed (0.7); Player 2 attacks o1 which Player 1 reinforces (0.42)
        let a1 = ActionProfile { orders: vec![Order::Reinforce(0), Order::Attack(1)] };
        let a2 = ActionProfile { orders: vec![Order::Attack(0), Order::None] };
        let d = successor_distribution(&c, &s, &a1, &a2);
        assert_eq!(d.outcomes.len(), 4);
        let expect = [("12", 0.58 * 0.3), ("22", 0.42 * 0.3), ("11", 0.58 * 0.7), ("21", 0.42 * 0.7)];
        for (state, p) in expect {
            assert!((d.prob_of(&st(state)) - p).abs() < 1e-12, "{state}");
        }
        let probs: Vec<f64> = ["21", "11", "22", "12"].iter().map(|x| d.prob_of(&st(x))).collect();
        for (got, want) in probs.iter().zip([0.294, 0.406, 0.126, 0.174]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn successor_single_battle() {
        let model = ProbabilityModel::new([vec![0.7], vec![0.7]], [vec![0.4], vec![0.4]], vec![], vec![]).unwrap();
        let c = line_campaign(1, model);
        let d = successor_distribution(
            &c,
            &st("1"),
            &ActionProfile { orders: vec![Order::Reinforce(0)] },
            &ActionProfile { orders: vec![Order::Attack(0)] },
        );
        assert!((d.prob_of(&st("1")) - 0.58).abs() < 1e-15);
        assert_eq!(d.prob_of(&st("2")), 0.42);
    }

    #[test]
    fn constant_model_passes_assumption_one() {
        let c = line_campaign(3, ProbabilityModel::constant(3, 0.3, 0.5));
        let report = validate_assumptions(&c, ValidationMode::Exhaustive).unwrap();
        assert!(report.assumption1.is_empty());
        assert!(report.passes());
        assert!(report.strictness.all());
    }

    #[test]
    fn opponent_conditioned_boost_breaks_assumption_one() {
        // Player 1's attack on o0 improves when Player 1 controls o1: fine. A Player 2 boost
        // conditioned on Player 2 control is also fine. Overriding α to grow with opponent control is not.
        let ov = ProbabilityOverride { state: st("22"), player: Player::One, objective: 0, alpha: Some(0.9), rho: None };
        let model = ProbabilityModel::new([vec![0.2; 2], vec![0.2; 2]], [vec![0.5; 2], vec![0.5; 2]], vec![], vec![ov]).unwrap();
        let c = line_campaign(2, model);
        let report = validate_assumptions(&c, ValidationMode::Exhaustive).unwrap();
        assert!(report.assumption1.iter().any(|v| v.state == "21" && v.other == "22" && v.objective == 0));
        assert!(!report.passes());
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let c = line_campaign(4, ProbabilityModel::constant(4, 0.6, 0.1));
        let a = validate_assumptions(&c, ValidationMode::Sampled { samples: 5, seed: 7 }).unwrap();
        let b = validate_assumptions(&c, ValidationMode::Sampled { samples: 5, seed: 7 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.states_checked, 5);
        // 1 - 0.6*0.9 = 0.46 < 0.6*0.9 = 0.54: defence advantage fails everywhere
        assert!(!a.assumption2.is_empty());
    }

    #[test]
    fn rejects_bad_entries() {
        let bad = ProbabilityModel::new([vec![1.2], vec![0.1]], [vec![0.0], vec![0.0]], vec![], vec![]);
        assert!(bad.is_err());
        let bad = ProbabilityModel::new(
            [vec![0.1; 2], vec![0.1; 2]],
            [vec![0.0; 2], vec![0.0; 2]],
            vec![entry(Player::One, 0, ProbabilityKind::Attack, &[0], 0.1)],
            vec![],
        );
        assert!(bad.is_err());
    }
}
