//! Campaign structure: objectives, axes, commanders, lines of control, axis types and
//! action enumeration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::transitions::ProbabilityModel;

/// One of the two players. Player 1 minimizes the discounted loss, Player 2 maximizes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// 0 for Player 1, 1 for Player 2.
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }
}

impl TryFrom<u8> for Player {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        Player::from_number(n).ok_or_else(|| format!("player must be 1 or 2, got {n}"))
    }
}

impl From<Player> for u8 {
    fn from(p: Player) -> u8 {
        p.number()
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub id: usize,
    pub label: String,
    /// Loss incurred by Player 1 at every stage Player 2 controls this objective.
    pub loss: f64,
}

/// A totally ordered chain of objectives, front (Player 1's base side) first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub id: usize,
    pub objectives: Vec<usize>,
}

impl Axis {
    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }
}

/// A commander record shared by both players; responsibilities are symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commander {
    pub id: usize,
    pub axes: Vec<usize>,
}

/// Control vector: entry `o` is the player controlling objective `o`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CampaignState {
    control: Vec<Player>,
}

impl CampaignState {
    pub fn new(control: Vec<Player>) -> Self {
        CampaignState { control }
    }

    pub fn uniform(len: usize, player: Player) -> Self {
        CampaignState {
            control: vec![player; len],
        }
    }

    pub fn control(&self) -> &[Player] {
        &self.control
    }

    pub fn controller(&self, objective: usize) -> Player {
        self.control[objective]
    }

    pub fn len(&self) -> usize {
        self.control.len()
    }

    pub fn is_empty(&self) -> bool {
        self.control.is_empty()
    }

    pub fn set(&mut self, objective: usize, player: Player) {
        self.control[objective] = player;
    }

    /// Copy of the state with control of `objective` handed to the other player.
    pub fn flipped(&self, objective: usize) -> CampaignState {
        let mut next = self.clone();
        next.control[objective] = next.control[objective].opponent();
        next
    }

    /// Componentwise order `self ⪯ other` with Player 1 < Player 2.
    pub fn precedes(&self, other: &CampaignState) -> bool {
        self.control.len() == other.control.len()
            && self
                .control
                .iter()
                .zip(&other.control)
                .all(|(a, b)| a <= b)
    }

    /// Objectives controlled by `player`, ascending.
    pub fn controlled_by(&self, player: Player) -> impl Iterator<Item = usize> + '_ {
        self.control
            .iter()
            .enumerate()
            .filter(move |(_, &p)| p == player)
            .map(|(o, _)| o)
    }
}

impl fmt::Display for CampaignState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.control {
            write!(f, "{}", p.number())?;
        }
        Ok(())
    }
}

impl FromStr for CampaignState {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let control = s
            .chars()
            .map(|c| match c {
                '1' => Some(Player::One),
                '2' => Some(Player::Two),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .filter(|v| !v.is_empty())
            .ok_or_else(|| ModelError::MalformedState(s.to_string()))?;
        Ok(CampaignState { control })
    }
}

/// Classification of one axis at one state. Split indices are 1-based positions along the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisType {
    /// Entire axis held by Player 1.
    C1,
    /// Entire axis held by Player 2.
    C2,
    /// Pure front: positions `1..=k` held by Player 1, `k+1..=n` by Player 2.
    Pf(usize),
    /// Split front: `1..k` Player 1, `k` Player 2, `k+1` Player 1, `k+2..=n` Player 2.
    Sf(usize),
    Unachievable,
}

impl AxisType {
    pub fn is_achievable(self) -> bool {
        self != AxisType::Unachievable
    }

    /// Per-axis code used by the state index: 0=C1, 1=C2, 1+k=PF(k), n+k=SF(k).
    pub fn code(self, n: usize) -> Option<usize> {
        match self {
            AxisType::C1 => Some(0),
            AxisType::C2 => Some(1),
            AxisType::Pf(k) => Some(1 + k),
            AxisType::Sf(k) => Some(n + k),
            AxisType::Unachievable => None,
        }
    }

    pub fn from_code(code: usize, n: usize) -> Option<AxisType> {
        match code {
            0 => Some(AxisType::C1),
            1 => Some(AxisType::C2),
            c if c <= n => Some(AxisType::Pf(c - 1)),
            c if c < 2 * n => Some(AxisType::Sf(c - n)),
            _ => None,
        }
    }

    /// Control pattern along an axis of length `n`.
    pub fn pattern(self, n: usize) -> Option<Vec<Player>> {
        use Player::{One, Two};
        let v = match self {
            AxisType::C1 => vec![One; n],
            AxisType::C2 => vec![Two; n],
            AxisType::Pf(k) if k >= 1 && k < n => (0..n).map(|j| if j < k { One } else { Two }).collect(),
            AxisType::Sf(k) if k >= 1 && k < n => (0..n)
                .map(|j| match j + 1 {
                    p if p < k => One,
                    p if p == k => Two,
                    p if p == k + 1 => One,
                    _ => Two,
                })
                .collect(),
            _ => return None,
        };
        Some(v)
    }
}

impl fmt::Display for AxisType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisType::C1 => write!(f, "c1"),
            AxisType::C2 => write!(f, "c2"),
            AxisType::Pf(k) => write!(f, "pf({k})"),
            AxisType::Sf(k) => write!(f, "sf({k})"),
            AxisType::Unachievable => write!(f, "unachievable"),
        }
    }
}

/// Classify a control pattern read along an axis, front first.
pub fn classify_pattern(control: &[Player]) -> AxisType {
    let n = control.len();
    let all_two = |from: usize| control[from.min(n)..].iter().all(|&p| p == Player::Two);
    let Some(first) = control.iter().position(|&p| p == Player::Two) else {
        return AxisType::C1;
    };
    if all_two(first + 1) {
        return if first == 0 { AxisType::C2 } else { AxisType::Pf(first) };
    }
    if control[first + 1] == Player::One && all_two(first + 2) {
        return AxisType::Sf(first + 1);
    }
    AxisType::Unachievable
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderKind {
    #[serde(rename = "atk")]
    Attack,
    #[serde(rename = "rfc")]
    Reinforce,
    #[serde(rename = "none")]
    None,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Attack => "atk",
            OrderKind::Reinforce => "rfc",
            OrderKind::None => "none",
        })
    }
}

/// A single commander's order for one stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    None,
    Attack(usize),
    Reinforce(usize),
}

impl Order {
    pub fn kind(self) -> OrderKind {
        match self {
            Order::None => OrderKind::None,
            Order::Attack(_) => OrderKind::Attack,
            Order::Reinforce(_) => OrderKind::Reinforce,
        }
    }

    pub fn target(self) -> Option<usize> {
        match self {
            Order::None => None,
            Order::Attack(o) | Order::Reinforce(o) => Some(o),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::None => write!(f, "none"),
            Order::Attack(o) => write!(f, "atk {o}"),
            Order::Reinforce(o) => write!(f, "rfc {o}"),
        }
    }
}

/// One order per commander, indexed by commander id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionProfile {
    pub orders: Vec<Order>,
}

impl ActionProfile {
    pub fn idle(commanders: usize) -> Self {
        ActionProfile {
            orders: vec![Order::None; commanders],
        }
    }

    /// The order this profile gives for `objective`, if any commander targets it.
    pub fn order_for(&self, objective: usize) -> OrderKind {
        self.orders
            .iter()
            .find(|o| o.target() == Some(objective))
            .map_or(OrderKind::None, |o| o.kind())
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|o| o.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Why a submitted action is not a member of the feasible set.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Infeasibility {
    #[error("action has {got} orders, campaign has {expected} commanders")]
    CommanderCount { expected: usize, got: usize },
    #[error("commander {commander} gave more than one order")]
    DuplicateCommander { commander: usize },
    #[error("unknown commander {commander}")]
    UnknownCommander { commander: usize },
    #[error("unknown objective {objective}")]
    UnknownObjective { objective: usize },
    #[error("commander {commander} is not responsible for objective {objective}")]
    NotResponsible { commander: usize, objective: usize },
    #[error("no open line of control to objective {objective}")]
    NoOpenLoc { objective: usize },
    #[error("cannot attack objective {objective}: it is already controlled by the attacker")]
    AttackOwnObjective { objective: usize },
    #[error("cannot reinforce objective {objective}: it is controlled by the opponent")]
    ReinforceOpponentObjective { objective: usize },
    #[error("order of commander {commander} must give a target for atk/rfc and none for none")]
    MalformedOrder { commander: usize },
}

impl Infeasibility {
    /// Short machine-readable name of the violated constraint.
    pub fn constraint(&self) -> &'static str {
        match self {
            Infeasibility::CommanderCount { .. } | Infeasibility::UnknownCommander { .. } => {
                "commander"
            }
            Infeasibility::DuplicateCommander { .. } => "one-order-per-commander",
            Infeasibility::UnknownObjective { .. } => "objective",
            Infeasibility::NotResponsible { .. } => "responsibility",
            Infeasibility::NoOpenLoc { .. } => "open-loc",
            Infeasibility::AttackOwnObjective { .. } => "attack-requires-opponent-control",
            Infeasibility::ReinforceOpponentObjective { .. } => "reinforce-requires-own-control",
            Infeasibility::MalformedOrder { .. } => "order-format",
        }
    }
}

/// Static campaign structure plus the probability model and discount factor.
#[derive(Debug, Clone)]
pub struct Campaign {
    objectives: Vec<Objective>,
    axes: Vec<Axis>,
    commanders: Vec<Commander>,
    discount: f64,
    model: ProbabilityModel,
    // objective -> (axis, 0-based position)
    position: Vec<(usize, usize)>,
    axis_commander: Vec<usize>,
    // O_c in axis order, then objective order
    commander_objectives: Vec<Vec<usize>>,
}

impl Campaign {
    pub fn new(
        objectives: Vec<Objective>,
        axes: Vec<Axis>,
        commanders: Vec<Commander>,
        discount: f64,
        model: ProbabilityModel,
    ) -> Result<Self, ModelError> {
        for (position, obj) in objectives.iter().enumerate() {
            if obj.id != position {
                return Err(ModelError::NonContiguousObjective { position, id: obj.id });
            }
            if !obj.loss.is_finite() || obj.loss < 0.0 {
                return Err(ModelError::InvalidLoss { id: obj.id, loss: obj.loss });
            }
        }
        let mut position: Vec<Option<(usize, usize)>> = vec![None; objectives.len()];
        for (p, axis) in axes.iter().enumerate() {
            if axis.id != p {
                return Err(ModelError::NonContiguousAxis { position: p, id: axis.id });
            }
            if axis.objectives.is_empty() {
                return Err(ModelError::EmptyAxis { axis: axis.id });
            }
            for (k, &o) in axis.objectives.iter().enumerate() {
                let slot = position.get_mut(o).ok_or(ModelError::UnknownObjective {
                    axis: axis.id,
                    objective: o,
                })?;
                if let Some((first, _)) = *slot {
                    return Err(ModelError::ObjectiveInTwoAxes { objective: o, first, second: axis.id });
                }
                *slot = Some((axis.id, k));
            }
        }
        let position = position
            .into_iter()
            .enumerate()
            .map(|(o, slot)| slot.ok_or(ModelError::UnassignedObjective { objective: o }))
            .collect::<Result<Vec<_>, _>>()?;

        let mut axis_commander: Vec<Option<usize>> = vec![None; axes.len()];
        for (p, cmd) in commanders.iter().enumerate() {
            if cmd.id != p {
                return Err(ModelError::NonContiguousCommander { position: p, id: cmd.id });
            }
            if cmd.axes.is_empty() {
                return Err(ModelError::IdleCommander { commander: cmd.id });
            }
            for &x in &cmd.axes {
                let slot = axis_commander
                    .get_mut(x)
                    .ok_or(ModelError::UnknownAxis { commander: cmd.id, axis: x })?;
                if let Some(first) = *slot {
                    return Err(ModelError::AxisSharedByCommanders { axis: x, first, second: cmd.id });
                }
                *slot = Some(cmd.id);
            }
        }
        let axis_commander = axis_commander
            .into_iter()
            .enumerate()
            .map(|(x, c)| c.ok_or(ModelError::UnassignedAxis { axis: x }))
            .collect::<Result<Vec<_>, _>>()?;

        if !(discount > 0.0 && discount < 1.0) {
            return Err(ModelError::InvalidDiscount(discount));
        }
        model.check_dimensions(objectives.len())?;

        let commander_objectives = commanders
            .iter()
            .map(|c| {
                c.axes
                    .iter()
                    .flat_map(|&x| axes[x].objectives.iter().copied())
                    .collect()
            })
            .collect();

        Ok(Campaign {
            objectives,
            axes,
            commanders,
            discount,
            model,
            position,
            axis_commander,
            commander_objectives,
        })
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn commanders(&self) -> &[Commander] {
        &self.commanders
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn model(&self) -> &ProbabilityModel {
        &self.model
    }

    pub fn objective_count(&self) -> usize {
        self.objectives.len()
    }

    /// Axis holding `objective` and its 0-based position along it.
    pub fn locate(&self, objective: usize) -> (usize, usize) {
        self.position[objective]
    }

    pub fn commander_of_axis(&self, axis: usize) -> usize {
        self.axis_commander[axis]
    }

    pub fn commander_of_objective(&self, objective: usize) -> usize {
        self.axis_commander[self.position[objective].0]
    }

    /// Objectives under a commander's responsibility.
    pub fn commander_objectives(&self, commander: usize) -> &[usize] {
        &self.commander_objectives[commander]
    }

    pub fn total_loss(&self) -> f64 {
        self.objectives.iter().map(|o| o.loss).sum()
    }

    fn check_len(&self, state: &CampaignState) -> Result<(), ModelError> {
        if state.len() != self.objectives.len() {
            return Err(ModelError::StateLength {
                expected: self.objectives.len(),
                got: state.len(),
            });
        }
        Ok(())
    }

    /// Control pattern of one axis, front first.
    pub fn axis_control(&self, axis: usize, state: &CampaignState) -> Vec<Player> {
        self.axes[axis]
            .objectives
            .iter()
            .map(|&o| state.controller(o))
            .collect()
    }

    pub fn classify_axis(&self, axis: usize, state: &CampaignState) -> AxisType {
        classify_pattern(&self.axis_control(axis, state))
    }

    /// First axis whose type is unachievable, if any.
    pub fn unachievable_axis(&self, state: &CampaignState) -> Option<usize> {
        (0..self.axes.len()).find(|&x| !self.classify_axis(x, state).is_achievable())
    }

    pub fn is_achievable(&self, state: &CampaignState) -> bool {
        state.len() == self.objectives.len() && self.unachievable_axis(state).is_none()
    }

    /// Every axis must be of type c1, c2, pf or sf.
    pub fn validate_initial_state(&self, state: &CampaignState) -> Result<(), ModelError> {
        self.check_len(state)?;
        match self.unachievable_axis(state) {
            Some(axis) => Err(ModelError::Unachievable { state: state.to_string(), axis }),
            None => Ok(()),
        }
    }

    /// Battle-front objectives of an axis for `player`, in axis order.
    pub fn fronts(&self, axis: usize, state: &CampaignState, player: Player) -> Result<Vec<usize>, ModelError> {
        let objs = &self.axes[axis].objectives;
        let n = objs.len();
        let positions: Vec<usize> = match self.classify_axis(axis, state) {
            AxisType::C1 => vec![n - 1],
            AxisType::C2 => vec![0],
            AxisType::Pf(k) => vec![k - 1, k],
            AxisType::Sf(k) => match player {
                Player::One => vec![k - 1],
                Player::Two => vec![k],
            },
            AxisType::Unachievable => {
                return Err(ModelError::Unachievable { state: state.to_string(), axis })
            }
        };
        Ok(positions.into_iter().map(|k| objs[k]).collect())
    }

    /// Whether `player` has an open line of control from their base to `objective`.
    pub fn has_open_loc(&self, state: &CampaignState, player: Player, objective: usize) -> bool {
        let (axis, k) = self.position[objective];
        let objs = &self.axes[axis].objectives;
        match player {
            Player::One => objs[..k].iter().all(|&o| state.controller(o) == Player::One),
            Player::Two => objs[k + 1..].iter().all(|&o| state.controller(o) == Player::Two),
        }
    }

    /// Objectives reachable through an open line of control, ascending.
    pub fn open_loc(&self, state: &CampaignState, player: Player) -> Vec<usize> {
        (0..self.objectives.len())
            .filter(|&o| self.has_open_loc(state, player, o))
            .collect()
    }

    pub fn stage_loss(&self, state: &CampaignState) -> f64 {
        state
            .controlled_by(Player::Two)
            .map(|o| self.objectives[o].loss)
            .sum()
    }

    fn order_for_target(state: &CampaignState, player: Player, objective: usize) -> Order {
        if state.controller(objective) == player {
            Order::Reinforce(objective)
        } else {
            Order::Attack(objective)
        }
    }

    /// Per-commander options of the full feasible action set: idle, or any order through an open line of control.
    pub fn full_order_options(&self, state: &CampaignState, player: Player) -> Vec<Vec<Order>> {
        self.commander_objectives
            .iter()
            .map(|objs| {
                std::iter::once(Order::None)
                    .chain(
                        objs.iter()
                            .filter(|&&o| self.has_open_loc(state, player, o))
                            .map(|&o| Self::order_for_target(state, player, o)),
                    )
                    .collect()
            })
            .collect()
    }

    /// Every feasible action profile, commander 0 varying slowest.
    pub fn feasible_actions_full(&self, state: &CampaignState, player: Player) -> Vec<ActionProfile> {
        cartesian(&self.full_order_options(state, player))
    }

    /// Per-commander options of the reduced action set: exactly one order at a battle front.
    pub fn reduced_order_options(&self, state: &CampaignState, player: Player) -> Result<Vec<Vec<Order>>, ModelError> {
        self.commanders
            .iter()
            .map(|c| {
                let mut options = Vec::new();
                for &x in &c.axes {
                    for o in self.fronts(x, state, player)? {
                        options.push(Self::order_for_target(state, player, o));
                    }
                }
                Ok(options)
            })
            .collect()
    }

    /// Reduced action profiles in canonical order (commander 0 varying slowest).
    pub fn reduced_actions(&self, state: &CampaignState, player: Player) -> Result<Vec<ActionProfile>, ModelError> {
        Ok(cartesian(&self.reduced_order_options(state, player)?))
    }

    /// Check membership of `action` in the full feasible set, naming the violated constraint.
    pub fn check_action(&self, state: &CampaignState, player: Player, action: &ActionProfile) -> Result<(), Infeasibility> {
        if action.orders.len() != self.commanders.len() {
            return Err(Infeasibility::CommanderCount {
                expected: self.commanders.len(),
                got: action.orders.len(),
            });
        }
        for (commander, order) in action.orders.iter().enumerate() {
            let Some(o) = order.target() else { continue };
            if o >= self.objectives.len() {
                return Err(Infeasibility::UnknownObjective { objective: o });
            }
            if self.commander_of_objective(o) != commander {
                return Err(Infeasibility::NotResponsible { commander, objective: o });
            }
            if !self.has_open_loc(state, player, o) {
                return Err(Infeasibility::NoOpenLoc { objective: o });
            }
            match order {
                Order::Attack(_) if state.controller(o) == player => {
                    return Err(Infeasibility::AttackOwnObjective { objective: o })
                }
                Order::Reinforce(_) if state.controller(o) != player => {
                    return Err(Infeasibility::ReinforceOpponentObjective { objective: o })
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Build an action profile from (commander, order) pairs; unmentioned commanders idle.
    pub fn action_from_orders(&self, orders: &[(usize, Order)]) -> Result<ActionProfile, Infeasibility> {
        let mut profile = ActionProfile::idle(self.commanders.len());
        let mut seen = vec![false; self.commanders.len()];
        for &(commander, order) in orders {
            if commander >= self.commanders.len() {
                return Err(Infeasibility::UnknownCommander { commander });
            }
            if std::mem::replace(&mut seen[commander], true) {
                return Err(Infeasibility::DuplicateCommander { commander });
            }
            profile.orders[commander] = order;
        }
        Ok(profile)
    }
}

pub(crate) fn cartesian(options: &[Vec<Order>]) -> Vec<ActionProfile> {
    let total: usize = options.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut digits = vec![0usize; options.len()];
    loop {
        out.push(ActionProfile {
            orders: digits.iter().zip(options).map(|(&d, opts)| opts[d]).collect(),
        });
        let mut j = options.len();
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < options[j].len() {
                break;
            }
            digits[j] = 0;
        }
    }
}
