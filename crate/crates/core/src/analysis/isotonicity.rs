use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::campaign::Player;
use crate::space::StateSpace;

pub const ISOTONICITY_TOLERANCE: f64 = 1e-7;
/// Above this many states only single flips and sampled chains are audited.
pub const PAIRWISE_LIMIT: usize = 20_000;
const CHAIN_SAMPLES: usize = 20_000;
const CHAIN_SEED: u64 = 0x1507_0c17;

/// A comparable pair `lower ⪯ upper` with `V(upper) − V(lower) < Σ_o ℓ_o·[upper_o = 2, lower_o = 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotonicityViolation {
    pub lower: usize,
    pub upper: usize,
    /// Negative amount by which the required gap is missed.
    pub slack: f64,
}

fn mask(space: &StateSpace, index: usize) -> u128 {
    space
        .state(index)
        .controlled_by(Player::Two)
        .fold(0u128, |m, o| m | 1u128 << o)
}

/// Audit `V(s') − V(s) ≥ L(s') − L(s)` for comparable achievable `s ⪯ s'`.
///
/// The right-hand side equals the summed loss of objectives held by Player 2 at `s'` but not
/// at `s`, so the check reduces to `(V − L)` being isotone.
pub fn check_isotonicity(space: &StateSpace, values: &[f64], tolerance: f64) -> Vec<IsotonicityViolation> {
    let excess: Vec<f64> = values.iter().zip(space.losses()).map(|(v, l)| v - l).collect();
    let masks: Vec<u128> = (0..space.len()).map(|i| mask(space, i)).collect();
    let mut out = Vec::new();
    let check = |lower: usize, upper: usize, out: &mut Vec<IsotonicityViolation>| {
        let slack = excess[upper] - excess[lower];
        if slack < -tolerance {
            out.push(IsotonicityViolation { lower, upper, slack });
        }
    };

    if space.len() <= PAIRWISE_LIMIT {
        for i in 0..masks.len() {
            for j in 0..masks.len() {
                if i != j && masks[i] & !masks[j] == 0 {
                    check(i, j, &mut out);
                }
            }
        }
        return out;
    }

    let campaign = space.campaign();
    let up_neighbours = |i: usize| -> Vec<usize> {
        let s = space.state(i);
        s.controlled_by(Player::One)
            .map(|o| s.flipped(o))
            .filter(|n| campaign.is_achievable(n))
            .map(|n| campaign.encode_state(&n).expect("achievable"))
            .collect()
    };
    for i in 0..space.len() {
        for j in up_neighbours(i) {
            check(i, j, &mut out);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CHAIN_SEED);
    for _ in 0..CHAIN_SAMPLES {
        let start = rng.random_range(0..space.len());
        let mut current = start;
        loop {
            let next = up_neighbours(current);
            if next.is_empty() || rng.random_bool(0.2) {
                break;
            }
            current = next[rng.random_range(0..next.len())];
        }
        if current != start {
            check(start, current, &mut out);
        }
    }
    out
}
