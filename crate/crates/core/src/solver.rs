//! Shapley value iteration and its accelerated variant over the achievable state space.
//!
//! Both start from `V⁰ = L`, apply synchronous sweeps `V^t = T(V^{t-1})` and stop once
//! `‖V^t − V^{t−1}‖∞ ≤ ε(1−γ)/(2γ)`. The reported policies are the equilibrium strategies of
//! the matrix games solved in the final sweep, i.e. the games built on `V^{t−1}`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::check_isotonicity;
use crate::campaign::{ActionProfile, Campaign, Player};
use crate::error::SolveError;
use crate::matrix_game::{self, AzsBranch, GameSolution, PayoffMatrix};
use crate::space::StateSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Every state game solved by LP.
    Vi,
    /// Saddle search and dominance elimination before the LP.
    Avi,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Vi => "vi",
            Algorithm::Avi => "avi",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vi" => Ok(Algorithm::Vi),
            "avi" => Ok(Algorithm::Avi),
            other => Err(format!("unknown algorithm {other:?} (expected vi or avi)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub epsilon: f64,
    pub algorithm: Algorithm,
    /// Saddle and dominance tolerance for the accelerated solver.
    pub tolerance: f64,
    /// Extra sweeps allowed beyond the theoretical iteration bound before giving up.
    pub iteration_margin: usize,
    /// Audit the value function for isotonicity after every sweep.
    pub audit_isotonicity: bool,
    /// Hard cap on sweeps, replacing the bound-plus-margin default.
    pub max_iterations: Option<usize>,
}

impl SolveOptions {
    pub fn new(epsilon: f64, algorithm: Algorithm) -> Self {
        SolveOptions {
            epsilon,
            algorithm,
            tolerance: matrix_game::DEFAULT_TOLERANCE,
            iteration_margin: 10,
            audit_isotonicity: false,
            max_iterations: None,
        }
    }
}

/// Values indexed by reduced state index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueFunction(pub Vec<f64>);

impl ValueFunction {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sup_distance(&self, other: &ValueFunction) -> f64 {
        sup_distance(&self.0, &other.0)
    }
}

pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Mixed strategies per state and player, dense over the reduced actions in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyProfile {
    strategies: [Vec<Vec<f64>>; 2],
}

impl PolicyProfile {
    pub fn new(player_one: Vec<Vec<f64>>, player_two: Vec<Vec<f64>>) -> Self {
        PolicyProfile { strategies: [player_one, player_two] }
    }

    pub fn strategy(&self, index: usize, player: Player) -> &[f64] {
        &self.strategies[player.index()][index]
    }

    pub fn strategies(&self, player: Player) -> &[Vec<f64>] {
        &self.strategies[player.index()]
    }

    pub fn len(&self) -> usize {
        self.strategies[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies[0].is_empty()
    }

    /// Actions with positive probability at one state.
    pub fn support(&self, space: &StateSpace, index: usize, player: Player) -> Vec<(ActionProfile, f64)> {
        space
            .reduced_actions(index, player)
            .into_iter()
            .zip(self.strategy(index, player))
            .filter(|(_, &p)| p > 0.0)
            .map(|(a, &p)| (a, p))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveCounters {
    pub pure_saddles: usize,
    pub lp_solves: usize,
    pub rows_eliminated: usize,
    pub cols_eliminated: usize,
}

impl SolveCounters {
    fn add(&mut self, other: &SolveCounters) {
        self.pure_saddles += other.pure_saddles;
        self.lp_solves += other.lp_solves;
        self.rows_eliminated += other.rows_eliminated;
        self.cols_eliminated += other.cols_eliminated;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub final_sup_delta: f64,
    pub epsilon: f64,
    pub iteration_bound: usize,
    pub wallclock_secs: f64,
    pub state_count: usize,
    /// Largest reduced action count per player over all states.
    pub max_actions: [usize; 2],
    /// Totals over every state solve of every sweep.
    pub counters: SolveCounters,
    /// Counters of the final sweep alone.
    pub final_sweep: SolveCounters,
    /// Largest number of isotonicity violations seen after any sweep, when audited.
    pub isotonicity_violations: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub values: ValueFunction,
    pub policy: PolicyProfile,
    pub report: SolveReport,
}

/// `⌈(ln(ε(1−γ)²) − ln(2Σℓ)) / ln γ⌉`, or 0 when all losses vanish.
pub fn iteration_bound(campaign: &Campaign, epsilon: f64) -> usize {
    iteration_bound_for(campaign.total_loss(), campaign.discount(), epsilon)
}

pub fn iteration_bound_for(total_loss: f64, discount: f64, epsilon: f64) -> usize {
    if total_loss <= 0.0 {
        return 0;
    }
    let t = ((epsilon * (1.0 - discount).powi(2)).ln() - (2.0 * total_loss).ln()) / discount.ln();
    t.ceil().max(0.0) as usize
}

/// Stopping threshold on the sup-norm change between sweeps.
pub fn stopping_threshold(epsilon: f64, discount: f64) -> f64 {
    epsilon * (1.0 - discount) / (2.0 * discount)
}

/// `R(V,s,a¹,a²) = L(s) + γ Σ P(s'|s,a¹,a²) V(s')` over the reduced actions at `index`.
pub fn payoff_matrix(space: &StateSpace, values: &[f64], index: usize) -> (PayoffMatrix, Vec<ActionProfile>, Vec<ActionProfile>) {
    let rows = space.reduced_actions(index, Player::One);
    let cols = space.reduced_actions(index, Player::Two);
    let mut entries = Vec::with_capacity(rows.len() * cols.len());
    for a1 in &rows {
        for a2 in &cols {
            entries.push(space.q_value(index, a1, a2, values));
        }
    }
    let matrix = PayoffMatrix::new(rows.len(), cols.len(), entries).expect("reduced action sets are nonempty and payoffs finite");
    (matrix, rows, cols)
}

struct StateSolve {
    solution: GameSolution,
    counters: SolveCounters,
}

fn solve_state(space: &StateSpace, values: &[f64], index: usize, options: &SolveOptions) -> Result<StateSolve, SolveError> {
    let (matrix, _, _) = payoff_matrix(space, values, index);
    let wrap = |source| SolveError::MatrixGame { state: index, source };
    let mut counters = SolveCounters::default();
    let solution = match options.algorithm {
        Algorithm::Vi => {
            counters.lp_solves = 1;
            matrix_game::solve_lp_full(&matrix).map_err(wrap)?
        }
        Algorithm::Avi => {
            let (solution, branch) = matrix_game::azs_with_branch(&matrix, options.tolerance).map_err(wrap)?;
            match branch {
                AzsBranch::PureSaddle => counters.pure_saddles = 1,
                AzsBranch::Lp { rows_removed, cols_removed } => {
                    counters.lp_solves = 1;
                    counters.rows_eliminated = rows_removed;
                    counters.cols_eliminated = cols_removed;
                }
            }
            solution
        }
    };
    Ok(StateSolve { solution, counters })
}

fn sweep(space: &StateSpace, values: &[f64], options: &SolveOptions) -> Result<Vec<StateSolve>, SolveError> {
    (0..space.len())
        .into_par_iter()
        .map(|i| solve_state(space, values, i, options))
        .collect()
}

/// One application of the minimax Bellman operator.
pub fn apply_bellman(space: &StateSpace, values: &[f64], algorithm: Algorithm) -> Result<Vec<f64>, SolveError> {
    let options = SolveOptions::new(1.0, algorithm);
    Ok(sweep(space, values, &options)?.into_iter().map(|s| s.solution.value).collect())
}

pub fn solve(space: &StateSpace, options: &SolveOptions) -> Result<Solution, SolveError> {
    if !(options.epsilon > 0.0 && options.epsilon.is_finite()) {
        return Err(SolveError::InvalidEpsilon(options.epsilon));
    }
    let start = Instant::now();
    let gamma = space.discount();
    let threshold = stopping_threshold(options.epsilon, gamma);
    let bound = iteration_bound(space.campaign(), options.epsilon);
    let cap = options.max_iterations.unwrap_or(bound + options.iteration_margin).max(1);

    let mut values = space.losses().to_vec();
    let mut counters = SolveCounters::default();
    let mut audit: Option<usize> = options.audit_isotonicity.then_some(0);
    let mut iterations = 0;
    loop {
        let solves = sweep(space, &values, options)?;
        iterations += 1;
        let next: Vec<f64> = solves.iter().map(|s| s.solution.value).collect();
        let delta = sup_distance(&next, &values);
        values = next;
        let mut final_sweep = SolveCounters::default();
        for s in &solves {
            final_sweep.add(&s.counters);
        }
        counters.add(&final_sweep);
        if let Some(worst) = audit.as_mut() {
            let found = check_isotonicity(space, &values, crate::analysis::ISOTONICITY_TOLERANCE).len();
            *worst = (*worst).max(found);
        }
        if delta <= threshold {
            let mut p1 = Vec::with_capacity(solves.len());
            let mut p2 = Vec::with_capacity(solves.len());
            for s in solves {
                p1.push(s.solution.row_strategy);
                p2.push(s.solution.col_strategy);
            }
            let max_actions = [
                p1.iter().map(Vec::len).max().unwrap_or(0),
                p2.iter().map(Vec::len).max().unwrap_or(0),
            ];
            let report = SolveReport {
                algorithm: options.algorithm,
                iterations,
                final_sup_delta: delta,
                epsilon: options.epsilon,
                iteration_bound: bound,
                wallclock_secs: start.elapsed().as_secs_f64(),
                state_count: space.len(),
                max_actions,
                counters,
                final_sweep,
                isotonicity_violations: audit,
            };
            return Ok(Solution {
                values: ValueFunction(values),
                policy: PolicyProfile::new(p1, p2),
                report,
            });
        }
        if iterations >= cap {
            return Err(SolveError::NonConvergence { iterations, delta });
        }
    }
}

pub fn shapley_vi(space: &StateSpace, epsilon: f64) -> Result<Solution, SolveError> {
    solve(space, &SolveOptions::new(epsilon, Algorithm::Vi))
}

pub fn accelerated_vi(space: &StateSpace, epsilon: f64) -> Result<Solution, SolveError> {
    solve(space, &SolveOptions::new(epsilon, Algorithm::Avi))
}
