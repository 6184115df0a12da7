//! Indexed view of the achievable state space used by the solvers.
//!
//! Holds every achievable state in index order with its stage loss and tabulated α/ρ
//! values. Battles on different axes are independent and only change their own axis code,
//! so a successor distribution is the product of at most four outcomes per contested axis.

use crate::campaign::{classify_pattern, ActionProfile, Campaign, CampaignState, Order, Player};
use crate::error::ModelError;

#[derive(Debug, Clone)]
pub struct StateSpace {
    campaign: Campaign,
    states: Vec<CampaignState>,
    losses: Vec<f64>,
    weights: Vec<usize>,
    radices: Vec<usize>,
    // [state][player][objective]: α for opponent-held objectives, ρ for own ones
    probs: Vec<f64>,
}

/// Outcomes of the battles on one axis: index shift and probability.
#[derive(Debug, Clone, Copy)]
struct AxisBranch {
    shift: [isize; 4],
    prob: [f64; 4],
    len: usize,
}

impl StateSpace {
    pub fn new(campaign: Campaign) -> Result<Self, ModelError> {
        let states = campaign.enumerate_achievable_states()?;
        let n = campaign.objective_count();
        let losses = states.iter().map(|s| campaign.stage_loss(s)).collect();
        let model = campaign.model();
        let mut probs = Vec::with_capacity(states.len() * 2 * n);
        for s in &states {
            for p in Player::BOTH {
                for o in 0..n {
                    probs.push(if s.controller(o) == p {
                        model.reinforce_success_prob(p, o, s)
                    } else {
                        model.attack_success_prob(p, o, s)
                    });
                }
            }
        }
        let weights = campaign.axis_weights()?;
        let radices = campaign.radices();
        Ok(StateSpace { campaign, states, losses, weights, radices, probs })
    }

    pub fn campaign(&self) -> &Campaign {
        &self.campaign
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[CampaignState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &CampaignState {
        &self.states[index]
    }

    pub fn index_of(&self, state: &CampaignState) -> Result<usize, ModelError> {
        self.campaign.encode_state(state)
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn discount(&self) -> f64 {
        self.campaign.discount()
    }

    pub fn reduced_actions(&self, index: usize, player: Player) -> Vec<ActionProfile> {
        self.campaign
            .reduced_actions(&self.states[index], player)
            .expect("indexed states are achievable")
    }

    pub fn full_actions(&self, index: usize, player: Player) -> Vec<ActionProfile> {
        self.campaign.feasible_actions_full(&self.states[index], player)
    }

    fn prob(&self, index: usize, player: Player, objective: usize) -> f64 {
        let n = self.campaign.objective_count();
        self.probs[(index * 2 + player.index()) * n + objective]
    }

    fn capture(&self, index: usize, objective: usize, a1: &ActionProfile, a2: &ActionProfile) -> f64 {
        let defender = self.states[index].controller(objective);
        let attacker = defender.opponent();
        let (def_action, _) = match defender {
            Player::One => (a1, a2),
            Player::Two => (a2, a1),
        };
        let reinforced = def_action.orders.contains(&Order::Reinforce(objective));
        let alpha = self.prob(index, attacker, objective);
        if reinforced {
            alpha * (1.0 - self.prob(index, defender, objective))
        } else {
            alpha
        }
    }

    fn attacked(&self, index: usize, a1: &ActionProfile, a2: &ActionProfile) -> Vec<usize> {
        let state = &self.states[index];
        // attacks are only meaningful against opponent-held objectives
        a1.orders
            .iter()
            .filter_map(|o| match o {
                Order::Attack(t) if state.controller(*t) == Player::Two => Some(*t),
                _ => None,
            })
            .chain(a2.orders.iter().filter_map(|o| match o {
                Order::Attack(t) if state.controller(*t) == Player::One => Some(*t),
                _ => None,
            }))
            .collect()
    }

    /// Contested objectives in ascending order with the attacker's capture probability.
    pub fn battles(&self, index: usize, a1: &ActionProfile, a2: &ActionProfile) -> Vec<(usize, f64)> {
        let mut targets = self.attacked(index, a1, a2);
        targets.sort_unstable();
        targets.dedup();
        targets.into_iter().map(|t| (t, self.capture(index, t, a1, a2))).collect()
    }

    fn branches(&self, index: usize, a1: &ActionProfile, a2: &ActionProfile) -> Vec<AxisBranch> {
        let state = &self.states[index];
        let mut targets = self.attacked(index, a1, a2);
        targets.sort_unstable_by_key(|&t| self.campaign.locate(t));
        targets.dedup();

        let mut out = Vec::new();
        let mut start = 0;
        while start < targets.len() {
            let axis = self.campaign.locate(targets[start]).0;
            let mut end = start + 1;
            while end < targets.len() && self.campaign.locate(targets[end]).0 == axis {
                end += 1;
            }
            let group = &targets[start..end];
            let objs = &self.campaign.axes()[axis].objectives;
            let n = objs.len();
            let base = self.campaign.axis_control(axis, state);
            let old_code = (index / self.weights[axis]) % self.radices[axis];
            let captures: Vec<f64> = group.iter().map(|&t| self.capture(index, t, a1, a2)).collect();
            let mut branch = AxisBranch { shift: [0; 4], prob: [0.0; 4], len: 0 };
            for mask in 0..(1usize << group.len()) {
                let mut p = 1.0;
                let mut pattern = base.clone();
                for (j, &t) in group.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        p *= captures[j];
                        let k = self.campaign.locate(t).1;
                        pattern[k] = pattern[k].opponent();
                    } else {
                        p *= 1.0 - captures[j];
                    }
                }
                if p <= 0.0 {
                    continue;
                }
                let code = classify_pattern(&pattern)
                    .code(n)
                    .expect("feasible actions keep every axis achievable");
                branch.shift[branch.len] = (code as isize - old_code as isize) * self.weights[axis] as isize;
                branch.prob[branch.len] = p;
                branch.len += 1;
            }
            out.push(branch);
            start = end;
        }
        out
    }

    /// Visit every successor index with positive probability.
    pub fn for_each_successor(&self, index: usize, a1: &ActionProfile, a2: &ActionProfile, mut f: impl FnMut(usize, f64)) {
        let branches = self.branches(index, a1, a2);
        if branches.is_empty() {
            f(index, 1.0);
            return;
        }
        let mut digits = vec![0usize; branches.len()];
        loop {
            let mut shift = 0isize;
            let mut p = 1.0;
            for (b, &d) in branches.iter().zip(&digits) {
                shift += b.shift[d];
                p *= b.prob[d];
            }
            f((index as isize + shift) as usize, p);
            let mut j = branches.len();
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                digits[j] += 1;
                if digits[j] < branches[j].len {
                    break;
                }
                digits[j] = 0;
            }
        }
    }

    pub fn successors(&self, index: usize, a1: &ActionProfile, a2: &ActionProfile) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        self.for_each_successor(index, a1, a2, |j, p| out.push((j, p)));
        out
    }

    /// Σ_{s'} P(s'|s,a¹,a²)·V(s').
    pub fn expected_value(&self, index: usize, a1: &ActionProfile, a2: &ActionProfile, values: &[f64]) -> f64 {
        let mut total = 0.0;
        self.for_each_successor(index, a1, a2, |j, p| total += p * values[j]);
        total
    }

    /// Immediate loss plus discounted expected continuation value.
    pub fn q_value(&self, index: usize, a1: &ActionProfile, a2: &ActionProfile, values: &[f64]) -> f64 {
        self.losses[index] + self.discount() * self.expected_value(index, a1, a2, values)
    }
}
