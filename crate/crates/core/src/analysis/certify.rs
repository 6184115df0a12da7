use rayon::prelude::*;
use serde::Serialize;

use super::policy::{evaluate_policy, expected_row, StatePolicy};
use crate::campaign::Player;
use crate::solver::{sup_distance, PolicyProfile, ValueFunction};
use crate::space::StateSpace;

/// Sup-norm error target for best-response value iteration.
pub const BEST_RESPONSE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub epsilon_claimed: f64,
    /// `max_s V_profile(s) − V_br1(s)`: what Player 1 gains by deviating.
    pub max_deviation_gain_p1: f64,
    /// `max_s V_br2(s) − V_profile(s)`: what Player 2 gains by deviating.
    pub max_deviation_gain_p2: f64,
    /// State index where the larger of the two gains is attained.
    pub worst_state: usize,
    /// `‖V_profile − V‖∞` against the value function the profile was solved with.
    pub profile_value_gap: f64,
    pub certified: bool,
}

/// Optimal value of `responder` against a fixed opponent policy, over the full feasible action set.
pub fn best_response(space: &StateSpace, responder: Player, opponent: &StatePolicy, start: Option<&[f64]>) -> ValueFunction {
    // one merged successor row per (state, own action)
    let rows: Vec<Vec<Vec<(usize, f64)>>> = (0..space.len())
        .into_par_iter()
        .map(|i| {
            space
                .full_actions(i, responder)
                .into_iter()
                .map(|a| expected_row(space, i, &[(a, 1.0)], opponent.at(i), responder))
                .collect()
        })
        .collect();
    let gamma = space.discount();
    let threshold = BEST_RESPONSE_TOLERANCE * (1.0 - gamma) / gamma;
    let losses = space.losses();
    let mut v = start.map_or_else(|| losses.to_vec(), <[f64]>::to_vec);
    loop {
        let next: Vec<f64> = rows
            .par_iter()
            .enumerate()
            .map(|(i, actions)| {
                let q = actions.iter().map(|row| row.iter().map(|&(j, p)| p * v[j]).sum::<f64>());
                let best = match responder {
                    Player::One => q.fold(f64::INFINITY, f64::min),
                    Player::Two => q.fold(f64::NEG_INFINITY, f64::max),
                };
                losses[i] + gamma * best
            })
            .collect();
        let delta = sup_distance(&next, &v);
        v = next;
        if delta <= threshold {
            return ValueFunction(v);
        }
    }
}

/// Measure how much either player gains by a unilateral deviation from `profile`.
pub fn certify_epsilon_mpe(space: &StateSpace, profile: &PolicyProfile, values: &ValueFunction, epsilon: f64) -> CertificationReport {
    let pi1 = StatePolicy::from_profile(space, profile, Player::One);
    let pi2 = StatePolicy::from_profile(space, profile, Player::Two);
    let own = evaluate_policy(space, &pi1, &pi2);
    let br1 = best_response(space, Player::One, &pi2, Some(own.as_slice()));
    let br2 = best_response(space, Player::Two, &pi1, Some(own.as_slice()));
    let mut gain1 = f64::NEG_INFINITY;
    let mut gain2 = f64::NEG_INFINITY;
    let mut worst = (0, f64::NEG_INFINITY);
    for i in 0..space.len() {
        let g1 = own.get(i) - br1.get(i);
        let g2 = br2.get(i) - own.get(i);
        gain1 = gain1.max(g1);
        gain2 = gain2.max(g2);
        if g1.max(g2) > worst.1 {
            worst = (i, g1.max(g2));
        }
    }
    CertificationReport {
        epsilon_claimed: epsilon,
        max_deviation_gain_p1: gain1,
        max_deviation_gain_p2: gain2,
        worst_state: worst.0,
        profile_value_gap: own.sup_distance(values),
        certified: gain1 <= epsilon && gain2 <= epsilon,
    }
}
