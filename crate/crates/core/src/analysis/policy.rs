use rayon::prelude::*;

use crate::campaign::{ActionProfile, Player};
use crate::solver::{sup_distance, PolicyProfile, ValueFunction};
use crate::space::StateSpace;

/// Sup-norm error target when evaluating a fixed policy profile.
pub const EVALUATION_TOLERANCE: f64 = 1e-10;

/// A stationary mixed policy for one player: per state, actions with positive probability.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePolicy {
    pub actions: Vec<Vec<(ActionProfile, f64)>>,
}

impl StatePolicy {
    pub fn from_profile(space: &StateSpace, profile: &PolicyProfile, player: Player) -> Self {
        StatePolicy {
            actions: (0..space.len()).map(|i| profile.support(space, i, player)).collect(),
        }
    }

    /// The same action with probability 1 at every state.
    pub fn deterministic(actions: Vec<ActionProfile>) -> Self {
        StatePolicy {
            actions: actions.into_iter().map(|a| vec![(a, 1.0)]).collect(),
        }
    }

    pub fn at(&self, index: usize) -> &[(ActionProfile, f64)] {
        &self.actions[index]
    }
}

/// Sparse transition rows `(successor, probability)`, merged by successor index.
pub(crate) fn merge(mut entries: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    entries.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
    for (j, p) in entries {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += p,
            _ => out.push((j, p)),
        }
    }
    out
}

pub(crate) fn expected_row(space: &StateSpace, index: usize, mine: &[(ActionProfile, f64)], theirs: &[(ActionProfile, f64)], me: Player) -> Vec<(usize, f64)> {
    let mut entries = Vec::new();
    for (a, pa) in mine {
        for (b, pb) in theirs {
            let (a1, a2) = match me {
                Player::One => (a, b),
                Player::Two => (b, a),
            };
            space.for_each_successor(index, a1, a2, |j, p| entries.push((j, pa * pb * p)));
        }
    }
    merge(entries)
}

/// Iterate `V = L + γ P_π V` to a fixed point within `tolerance` in sup norm.
pub(crate) fn evaluate_chain(space: &StateSpace, rows: &[Vec<(usize, f64)>], start: Vec<f64>, tolerance: f64) -> Vec<f64> {
    let gamma = space.discount();
    // ‖V^t − V*‖ ≤ γ/(1−γ)·‖V^t − V^{t−1}‖
    let threshold = tolerance * (1.0 - gamma) / gamma;
    let losses = space.losses();
    let mut v = start;
    loop {
        let next: Vec<f64> = rows
            .par_iter()
            .enumerate()
            .map(|(i, row)| losses[i] + gamma * row.iter().map(|&(j, p)| p * v[j]).sum::<f64>())
            .collect();
        let delta = sup_distance(&next, &v);
        v = next;
        if delta <= threshold {
            return v;
        }
    }
}

/// Discounted loss of every state when both players follow the given policies.
pub fn evaluate_policy(space: &StateSpace, pi1: &StatePolicy, pi2: &StatePolicy) -> ValueFunction {
    let rows: Vec<Vec<(usize, f64)>> = (0..space.len())
        .into_par_iter()
        .map(|i| expected_row(space, i, pi1.at(i), pi2.at(i), Player::One))
        .collect();
    ValueFunction(evaluate_chain(space, &rows, space.losses().to_vec(), EVALUATION_TOLERANCE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::{Axis, Campaign, Commander, Objective};
    use crate::transitions::ProbabilityModel;

    #[test]
    fn absorbing_board_value_is_loss_over_one_minus_gamma() {
        let objectives = (0..2).map(|id| Objective { id, label: String::new(), loss: 1.5 }).collect();
        let c = Campaign::new(
            objectives,
            vec![Axis { id: 0, objectives: vec![0, 1] }],
            vec![Commander { id: 0, axes: vec![0] }],
            0.9,
            ProbabilityModel::constant(2, 0.0, 0.5),
        )
        .unwrap();
        let space = StateSpace::new(c).unwrap();
        let pick = |p| StatePolicy::deterministic((0..space.len()).map(|i| space.reduced_actions(i, p)[0].clone()).collect());
        let v = evaluate_policy(&space, &pick(Player::One), &pick(Player::Two));
        for i in 0..space.len() {
            assert!((v.get(i) - space.losses()[i] / 0.1).abs() < 1e-8);
        }
    }

    #[test]
    fn merge_adds_duplicates() {
        assert_eq!(merge(vec![(3, 0.25), (1, 0.5), (3, 0.25)]), vec![(1, 0.5), (3, 0.5)]);
    }
}
