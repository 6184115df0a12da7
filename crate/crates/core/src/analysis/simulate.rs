use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::policy::StatePolicy;
use crate::campaign::{ActionProfile, CampaignState};
use crate::space::StateSpace;

const HORIZON_TAIL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `s_0 … s_H`.
    pub states: Vec<CampaignState>,
    /// Action pair played at each of the first `H` states.
    pub actions: Vec<(ActionProfile, ActionProfile)>,
    /// `Σ_{t<H} γ^t L(s_t)`.
    pub discounted_loss: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub episodes: usize,
    pub mean: f64,
    pub std_error: f64,
}

/// Smallest `H` with `γ^H·Σℓ/(1−γ) ≤ 1e−6`.
pub fn default_horizon(space: &StateSpace) -> usize {
    let gamma = space.discount();
    let scale = space.campaign().total_loss() / (1.0 - gamma);
    if scale <= HORIZON_TAIL {
        return 1;
    }
    ((HORIZON_TAIL / scale).ln() / gamma.ln()).ceil() as usize
}

/// Draw one action from a sparse mixed strategy with a single uniform.
pub fn sample_action<'a, R: Rng>(rng: &mut R, options: &'a [(ActionProfile, f64)]) -> &'a ActionProfile {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, p) in options {
        acc += p;
        if u < acc {
            return a;
        }
    }
    &options.last().expect("policy support is nonempty").0
}

/// One stage: sample both actions, then each contested battle in ascending objective order.
pub(crate) fn step<R: Rng>(space: &StateSpace, index: usize, a1: &ActionProfile, a2: &ActionProfile, rng: &mut R) -> usize {
    let mut next = space.state(index).clone();
    for (o, capture) in space.battles(index, a1, a2) {
        if rng.random::<f64>() < capture {
            next = next.flipped(o);
        }
    }
    space.index_of(&next).expect("feasible actions keep states achievable")
}

fn run(space: &StateSpace, pi1: &StatePolicy, pi2: &StatePolicy, start: usize, horizon: usize, seed: u64, record: bool) -> (f64, Vec<usize>, Vec<(ActionProfile, ActionProfile)>) {
    let gamma = space.discount();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut index = start;
    let mut weight = 1.0;
    let mut loss = 0.0;
    let mut states = vec![start];
    let mut actions = Vec::new();
    for _ in 0..horizon {
        loss += weight * space.losses()[index];
        weight *= gamma;
        let a1 = sample_action(&mut rng, pi1.at(index));
        let a2 = sample_action(&mut rng, pi2.at(index));
        let next = step(space, index, a1, a2, &mut rng);
        if record {
            actions.push((a1.clone(), a2.clone()));
            states.push(next);
        }
        index = next;
    }
    (loss, states, actions)
}

pub fn simulate(space: &StateSpace, pi1: &StatePolicy, pi2: &StatePolicy, start: &CampaignState, horizon: usize, seed: u64) -> Result<Trajectory, crate::ModelError> {
    let s0 = space.index_of(start)?;
    let (discounted_loss, states, actions) = run(space, pi1, pi2, s0, horizon, seed, true);
    Ok(Trajectory {
        states: states.into_iter().map(|i| space.state(i).clone()).collect(),
        actions,
        discounted_loss,
        seed,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mean discounted loss over `episodes` independent runs; episode `k` uses seed `splitmix64(seed + k)`.
pub fn monte_carlo(space: &StateSpace, pi1: &StatePolicy, pi2: &StatePolicy, start: &CampaignState, episodes: usize, horizon: usize, seed: u64) -> Result<MonteCarloEstimate, crate::ModelError> {
    let s0 = space.index_of(start)?;
    let losses: Vec<f64> = (0..episodes as u64)
        .into_par_iter()
        .map(|k| run(space, pi1, pi2, s0, horizon, splitmix64(seed.wrapping_add(k)), false).0)
        .collect();
    let n = losses.len() as f64;
    let mean = losses.iter().sum::<f64>() / n;
    let var = if losses.len() > 1 {
        losses.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        episodes,
        mean,
        std_error: (var / n).sqrt(),
    })
}
