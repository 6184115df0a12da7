use campaign_core::transitions::ProbabilityKind;
use campaign_core::{Axis, Campaign, Commander, ImprovementEntry, Objective, Player, ProbabilityModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Small campaign with random layout, probabilities and boosts.
pub fn random_campaign(rng: &mut ChaCha8Rng, single_commander: bool) -> Campaign {
    let axis_count = rng.random_range(1..=3);
    let sizes: Vec<usize> = (0..axis_count).map(|_| rng.random_range(1..=4)).collect();
    let n: usize = sizes.iter().sum();
    let objectives = (0..n).map(|id| Objective { id, label: String::new(), loss: rng.random_range(0.5..3.0) }).collect();
    let mut next = 0;
    let axes = sizes
        .iter()
        .enumerate()
        .map(|(id, &len)| {
            next += len;
            Axis { id, objectives: (next - len..next).collect() }
        })
        .collect();
    let commander_count = if single_commander { 1 } else { rng.random_range(1..=axis_count) };
    let mut members: Vec<Vec<usize>> = (0..commander_count).map(|c| vec![c]).collect();
    for x in commander_count..axis_count {
        members[rng.random_range(0..commander_count)].push(x);
    }
    let commanders = members.into_iter().enumerate().map(|(id, axes)| Commander { id, axes }).collect();
    let mut draw = |lo: f64, hi: f64| -> [Vec<f64>; 2] { [(0..n).map(|_| rng.random_range(lo..hi)).collect(), (0..n).map(|_| rng.random_range(lo..hi)).collect()] };
    let attack = draw(0.1, 0.4);
    let reinforce = draw(0.2, 0.6);
    let mut improvements = Vec::new();
    if n > 1 {
        for _ in 0..rng.random_range(0..=n) {
            let target = rng.random_range(0..n);
            let mut condition: Vec<usize> = (0..rng.random_range(1..=2)).map(|_| rng.random_range(0..n)).filter(|&o| o != target).collect();
            condition.sort_unstable();
            condition.dedup();
            if condition.is_empty() {
                continue;
            }
            improvements.push(ImprovementEntry {
                player: if rng.random_bool(0.5) { Player::One } else { Player::Two },
                target,
                kind: if rng.random_bool(0.5) { ProbabilityKind::Attack } else { ProbabilityKind::Reinforce },
                condition,
                boost: rng.random_range(0.02..0.15),
            });
        }
    }
    let gamma = rng.random_range(0.5..0.95);
    let model = ProbabilityModel::new(attack, reinforce, improvements, Vec::new()).unwrap();
    Campaign::new(objectives, axes, commanders, gamma, model).unwrap()
}
