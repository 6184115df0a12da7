//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use campaign_core::analysis::{certify_epsilon_mpe, check_isotonicity, default_horizon, evaluate_policy, monte_carlo, StatePolicy, ISOTONICITY_TOLERANCE};
use campaign_core::report::max_reduced_actions;
use campaign_core::solver::{apply_bellman, iteration_bound, iteration_bound_for, solve, Algorithm};
use campaign_core::transitions::{validate_assumptions, ValidationMode};
use campaign_core::{Axis, Campaign, CampaignState, Commander, Objective, OrderKind, Player, ProbabilityModel, Scenario, SolveOptions, StateSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPSILON: f64 = 0.001;
const BINARY64_EXACT: f64 = 0.0;
const WORKED_EXAMPLE_TOLERANCE: f64 = 1e-12;
const VI_AVI_TOLERANCE: f64 = 1e-8;
const CONTRACTION_SLACK: f64 = 1e-12;
const MC_EPISODES: usize = 100_000;
const MC_SEED: u64 = 20_240_601;
const MC_STANDARD_ERRORS: f64 = 3.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn bundled(name: &str) -> Scenario {
    Scenario::bundled(name).expect("bundled scenario exists").expect("bundled scenario is valid")
}

fn space_of(name: &str) -> StateSpace {
    StateSpace::new(bundled(name).into_campaign()).unwrap()
}

fn st(s: &str) -> CampaignState {
    s.parse().unwrap()
}

fn layout(sizes: &[usize]) -> Campaign {
    let total: usize = sizes.iter().sum();
    let objectives = (0..total).map(|id| Objective { id, label: String::new(), loss: 1.0 }).collect();
    let mut next = 0;
    let axes = sizes
        .iter()
        .enumerate()
        .map(|(id, &n)| {
            next += n;
            Axis { id, objectives: (next - n..next).collect() }
        })
        .collect();
    let commanders = vec![Commander { id: 0, axes: (0..sizes.len()).collect() }];
    Campaign::new(objectives, axes, commanders, 0.9, ProbabilityModel::constant(total, 0.3, 0.4)).unwrap()
}

fn battle_chain() -> Outcome {
    let start = Instant::now();
    let model = ProbabilityModel::constant(1, 0.7, 0.4);
    let s = st("2");
    let unreinforced = model.capture_prob(&s, 0, OrderKind::Attack, OrderKind::None);
    let reinforced = model.capture_prob(&s, 0, OrderKind::Attack, OrderKind::Reinforce);
    let elapsed = start.elapsed();
    let passed = (unreinforced - 0.7).abs() <= BINARY64_EXACT && (reinforced - 0.42).abs() <= BINARY64_EXACT && elapsed < Duration::from_millis(1);
    outcome(passed, format!("unreinforced {unreinforced}, reinforced {reinforced}, {elapsed:?}"))
}

fn worked_example() -> Outcome {
    let scenario = bundled("obj22");
    let s = st("1122111121112211121112");
    let alpha = scenario.campaign().model().attack_success_prob(Player::One, 8, &s);
    // independent scalar product of the four active boosts
    let oracle = 1.0 - (1.0 - 0.20) * (1.0 - 0.20) * (1.0 - 0.10) * (1.0 - 0.15) * (1.0 - 0.05);
    let gap_to_oracle = (alpha - oracle).abs();
    let rounded = format!("{alpha:.3}");
    let passed = gap_to_oracle <= WORKED_EXAMPLE_TOLERANCE && rounded == "0.535";
    outcome(
        passed,
        format!("alpha {alpha} vs product {oracle} (gap {gap_to_oracle:.1e}), printed to 3 places {rounded}; |alpha - 0.535| = {:.3e}", (alpha - 0.535).abs()),
    )
}

fn state_space_reduction() -> Outcome {
    let cases: [(&[usize], usize); 5] = [
        (&[5, 5, 5, 5, 5], 100_000),
        (&[4, 4, 4, 5, 5], 51_200),
        (&[4, 4, 5, 5], 6_400),
        (&[3, 3, 4, 4], 2_304),
        (&[2, 4, 4], 256),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    let mut slowest = Duration::ZERO;
    for (sizes, expected) in cases {
        let c = layout(sizes);
        let start = Instant::now();
        let states = c.enumerate_achievable_states().unwrap();
        slowest = slowest.max(start.elapsed());
        let distinct = states.iter().collect::<std::collections::BTreeSet<_>>().len();
        let all_achievable = states.iter().all(|s| c.is_achievable(s));
        let ok = states.len() == expected && distinct == expected && all_achievable && c.achievable_state_count().unwrap() == expected;
        passed &= ok;
        parts.push(format!("{sizes:?}→{}", states.len()));
    }
    let reduction = 1.0 - 100_000.0 / 33_554_432.0;
    passed &= reduction >= 0.997 && slowest < Duration::from_secs(5);
    outcome(passed, format!("{}; reduction {:.4}; slowest enumeration {slowest:?}", parts.join(", "), reduction))
}

fn reduced_action_count() -> Outcome {
    let space = space_of("obj22");
    let campaign = space.campaign();
    let i = space.index_of(&st("1122111121112211121112")).unwrap();
    let all_pf = (0..campaign.axes().len()).all(|x| matches!(campaign.classify_axis(x, space.state(i)), campaign_core::AxisType::Pf(_)));
    // a pure front offers one attack and one reinforce target per player
    let oracle: usize = campaign.commanders().iter().map(|c| 2 * c.axes.len()).product();
    let at_state = [space.reduced_actions(i, Player::One).len(), space.reduced_actions(i, Player::Two).len()];
    let max = max_reduced_actions(&space).unwrap();
    let passed = all_pf && oracle == 32 && at_state == [32, 32] && max == [32, 32];
    outcome(passed, format!("all-PF {all_pf}, at state {at_state:?}, max over states {max:?}, formula {oracle}"))
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let space = space_of("counterexample");
    let solution = solve(&space, &SolveOptions::new(EPSILON, Algorithm::Avi)).unwrap();
    let v112 = solution.values.get(space.index_of(&st("112")).unwrap());
    let v212 = solution.values.get(space.index_of(&st("212")).unwrap());
    let violations = check_isotonicity(&space, solution.values.as_slice(), ISOTONICITY_TOLERANCE).len();
    let elapsed = start.elapsed();

    let mut file = bundled("counterexample").file().clone();
    file.discount = 0.4;
    let low = StateSpace::new(Scenario::from_file(file).unwrap().into_campaign()).unwrap();
    let low_solution = solve(&low, &SolveOptions::new(EPSILON, Algorithm::Avi)).unwrap();
    let low_violations = check_isotonicity(&low, low_solution.values.as_slice(), ISOTONICITY_TOLERANCE).len();

    let passed = v112 >= 19.0 - EPSILON && v212 <= 11.0 + EPSILON && violations >= 1 && elapsed < Duration::from_secs(1);
    outcome(passed, format!("V(112) {v112:.6}, V(212) {v212:.6}, {violations} violations, {elapsed:?}; at gamma 0.4: {low_violations} violations"))
}

fn isotonicity_audit() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e0_0001);
    let mut accepted = 0;
    let mut drawn = 0;
    let mut violations = 0;
    let mut largest = 0;
    while accepted < 20 && drawn < 1_000 {
        drawn += 1;
        let campaign = common::random_campaign(&mut rng, false);
        if !validate_assumptions(&campaign, ValidationMode::Exhaustive).unwrap().passes() {
            continue;
        }
        accepted += 1;
        let space = StateSpace::new(campaign).unwrap();
        largest = largest.max(space.len());
        let solution = solve(&space, &SolveOptions::new(EPSILON, Algorithm::Avi)).unwrap();
        violations += check_isotonicity(&space, solution.values.as_slice(), ISOTONICITY_TOLERANCE).len();
    }
    let elapsed = start.elapsed();
    let passed = accepted == 20 && violations == 0 && elapsed < Duration::from_secs(600);
    outcome(passed, format!("{accepted} campaigns ({drawn} drawn, up to {largest} states), {violations} violations, {elapsed:?}"))
}

fn vi_equals_avi() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in ["obj06", "obj10"] {
        let space = space_of(name);
        let vi = solve(&space, &SolveOptions::new(EPSILON, Algorithm::Vi)).unwrap();
        let avi = solve(&space, &SolveOptions::new(EPSILON, Algorithm::Avi)).unwrap();
        let gap = vi.values.sup_distance(&avi.values);
        passed &= gap <= VI_AVI_TOLERANCE && vi.report.iterations == avi.report.iterations;
        parts.push(format!(
            "{name}: gap {gap:.1e}, iterations {}/{}, AVI {} saddles {} LPs",
            vi.report.iterations, avi.report.iterations, avi.report.counters.pure_saddles, avi.report.counters.lp_solves
        ));
    }
    outcome(passed, parts.join("; "))
}

fn pure_equilibrium() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for n in 1..=6 {
        let space = StateSpace::new(layout(&[n])).unwrap();
        let solution = solve(&space, &SolveOptions::new(EPSILON, Algorithm::Avi)).unwrap();
        let c = solution.report.counters;
        passed &= c.lp_solves == 0 && c.pure_saddles == space.len() * solution.report.iterations;
        parts.push(format!("n={n}: {} LP", c.lp_solves));
    }
    outcome(passed, parts.join(", "))
}

fn certification() -> Outcome {
    let start = Instant::now();
    let mut passed = true;
    let mut parts = Vec::new();
    for name in ["obj06", "obj10", "obj14"] {
        let space = space_of(name);
        let solution = solve(&space, &SolveOptions::new(EPSILON, Algorithm::Avi)).unwrap();
        let report = certify_epsilon_mpe(&space, &solution.policy, &solution.values, EPSILON);
        passed &= report.certified && report.max_deviation_gain_p1 <= EPSILON && report.max_deviation_gain_p2 <= EPSILON;
        parts.push(format!("{name}: gains {:.2e}/{:.2e}", report.max_deviation_gain_p1, report.max_deviation_gain_p2));
    }
    let elapsed = start.elapsed();
    passed &= elapsed < Duration::from_secs(300);
    outcome(passed, format!("{}; {elapsed:?}", parts.join(", ")))
}

fn absorbing_values() -> Outcome {
    let space = space_of("absorbing");
    let solution = solve(&space, &SolveOptions::new(EPSILON, Algorithm::Avi)).unwrap();
    let total = space.campaign().total_loss();
    let v = solution.values.get(space.index_of(&st("222")).unwrap());
    let passed = total == 3.0 && space.discount() == 0.9 && (v - 30.0).abs() <= EPSILON / 2.0;
    outcome(passed, format!("V(222) = {v:.6}, |V - 30| = {:.1e}", (v - 30.0).abs()))
}

fn iteration_bounds() -> Outcome {
    // independent scalar form of the bound
    let scalar = ((0.001f64 * 0.1 * 0.1).ln() - (20.0f64).ln()) / 0.9f64.ln();
    let mut passed = iteration_bound_for(10.0, 0.9, 0.001) == 138 && scalar.ceil() as usize == 138;
    let mut parts = vec![format!("arithmetic {}", iteration_bound_for(10.0, 0.9, 0.001))];
    for name in Scenario::bundled_names() {
        let space = space_of(name);
        let bound = iteration_bound(space.campaign(), EPSILON);
        let solution = solve(&space, &SolveOptions::new(EPSILON, Algorithm::Vi)).unwrap();
        passed &= solution.report.iterations <= bound.max(1);
        parts.push(format!("{name} {}≤{bound}", solution.report.iterations));
    }
    outcome(passed, parts.join(", "))
}

fn contraction() -> Outcome {
    let space = space_of("obj06");
    let gamma = space.discount();
    let scale = space.campaign().total_loss() / (1.0 - gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_47ac7);
    let mut worst_ratio: f64 = 0.0;
    let mut passed = true;
    for _ in 0..100 {
        let v: Vec<f64> = (0..space.len()).map(|_| rng.random_range(-scale..scale)).collect();
        let w: Vec<f64> = (0..space.len()).map(|_| rng.random_range(-scale..scale)).collect();
        let tv = apply_bellman(&space, &v, Algorithm::Avi).unwrap();
        let tw = apply_bellman(&space, &w, Algorithm::Avi).unwrap();
        let before = sup(&v, &w);
        let after = sup(&tv, &tw);
        passed &= after <= gamma * before + CONTRACTION_SLACK;
        worst_ratio = worst_ratio.max(after / before);
    }
    outcome(passed, format!("largest ratio {worst_ratio:.6} over 100 pairs"))
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn monte_carlo_consistency() -> Outcome {
    let scenario = bundled("obj10");
    let start_state = scenario.initial_state().clone();
    let space = StateSpace::new(scenario.into_campaign()).unwrap();
    let solution = solve(&space, &SolveOptions::new(EPSILON, Algorithm::Avi)).unwrap();
    let pi1 = StatePolicy::from_profile(&space, &solution.policy, Player::One);
    let pi2 = StatePolicy::from_profile(&space, &solution.policy, Player::Two);
    let exact = evaluate_policy(&space, &pi1, &pi2).get(space.index_of(&start_state).unwrap());
    let estimate = monte_carlo(&space, &pi1, &pi2, &start_state, MC_EPISODES, default_horizon(&space), MC_SEED).unwrap();
    let z = (estimate.mean - exact) / estimate.std_error;
    let passed = z.abs() <= MC_STANDARD_ERRORS;
    outcome(passed, format!("mean {:.5} ± {:.5}, evaluated {exact:.5}, z = {z:.2}", estimate.mean, estimate.std_error))
}

type Criterion = (u8, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "battle chain", battle_chain),
        (2, "improvement worked example", worked_example),
        (3, "state-space reduction", state_space_reduction),
        (4, "reduced action count", reduced_action_count),
        (5, "isotonicity counterexample", counterexample),
        (6, "isotonicity on random campaigns", isotonicity_audit),
        (7, "VI and AVI agree", vi_equals_avi),
        (8, "single-axis pure equilibria", pure_equilibrium),
        (9, "epsilon-MPE certification", certification),
        (10, "absorbing values", absorbing_values),
        (11, "iteration bound", iteration_bounds),
        (12, "Bellman contraction", contraction),
        (13, "Monte Carlo consistency", monte_carlo_consistency),
    ];
    let filter: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, run) in criteria {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.passed {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {} {name}: {} [{:.2?}]",
            if result.passed { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
