//! Plain-text tables: values at chosen states, sparse mixed strategies and solve statistics.

use std::fmt::Write;

use crate::campaign::{CampaignState, Player};
use crate::error::ModelError;
use crate::solver::Solution;
use crate::space::StateSpace;

/// Largest reduced action count per player, `max_s ∏_c Σ_{x∈X_c} |F^i(x,s)|`.
pub fn max_reduced_actions(space: &StateSpace) -> Result<[usize; 2], ModelError> {
    let campaign = space.campaign();
    let mut best = [0usize; 2];
    for s in space.states() {
        for p in Player::BOTH {
            let mut count = 1usize;
            for c in campaign.commanders() {
                let mut fronts = 0;
                for &x in &c.axes {
                    fronts += campaign.fronts(x, s, p)?.len();
                }
                count *= fronts;
            }
            best[p.index()] = best[p.index()].max(count);
        }
    }
    Ok(best)
}

pub fn value_table(space: &StateSpace, solution: &Solution, states: &[CampaignState]) -> Result<String, ModelError> {
    let width = space.campaign().objective_count().max(5);
    let mut out = String::new();
    writeln!(out, "{:<width$}  {:>14}  {:>10}", "state", "value", "loss").unwrap();
    for s in states {
        let i = space.index_of(s)?;
        writeln!(out, "{:<width$}  {:>14.6}  {:>10.3}", s.to_string(), solution.values.get(i), space.losses()[i]).unwrap();
    }
    Ok(out)
}

/// One row per action with positive probability; columns are commanders.
pub fn strategy_table(space: &StateSpace, solution: &Solution, state: &CampaignState) -> Result<String, ModelError> {
    let i = space.index_of(state)?;
    let commanders = space.campaign().commanders().len();
    let mut out = String::new();
    writeln!(out, "mixed strategies at {state} (value {:.6})", solution.values.get(i)).unwrap();
    for p in Player::BOTH {
        writeln!(out, "player {p}").unwrap();
        let mut header = format!("  {:>9}", "prob");
        for c in 0..commanders {
            write!(header, "  {:<12}", format!("commander {c}")).unwrap();
        }
        writeln!(out, "{}", header.trim_end()).unwrap();
        for (action, prob) in solution.policy.support(space, i, p) {
            let mut row = format!("  {prob:>9.4}");
            for order in &action.orders {
                write!(row, "  {:<12}", order.to_string()).unwrap();
            }
            writeln!(out, "{}", row.trim_end()).unwrap();
        }
    }
    Ok(out)
}

pub fn statistics_table(space: &StateSpace, solution: &Solution) -> Result<String, ModelError> {
    let r = &solution.report;
    let radices: Vec<String> = space.campaign().radices().iter().map(usize::to_string).collect();
    let max_actions = max_reduced_actions(space)?;
    let mut out = String::new();
    writeln!(out, "{:<28}{}", "algorithm", r.algorithm).unwrap();
    writeln!(out, "{:<28}{} ({})", "states", space.len(), radices.join("·")).unwrap();
    writeln!(out, "{:<28}{} / {}", "max actions (P1 / P2)", max_actions[0], max_actions[1]).unwrap();
    writeln!(out, "{:<28}{} (bound {})", "iterations", r.iterations, r.iteration_bound).unwrap();
    writeln!(out, "{:<28}{:.3e}", "final sup-norm change", r.final_sup_delta).unwrap();
    writeln!(out, "{:<28}{}", "epsilon", r.epsilon).unwrap();
    writeln!(out, "{:<28}{:.3}", "runtime [s]", r.wallclock_secs).unwrap();
    writeln!(out, "{:<28}{}", "pure saddles", r.counters.pure_saddles).unwrap();
    writeln!(out, "{:<28}{}", "LP solves", r.counters.lp_solves).unwrap();
    writeln!(out, "{:<28}{} / {}", "eliminated rows / cols", r.counters.rows_eliminated, r.counters.cols_eliminated).unwrap();
    Ok(out)
}

/// Values, strategies at each requested state, then statistics.
pub fn render(space: &StateSpace, solution: &Solution, states: &[CampaignState]) -> Result<String, ModelError> {
    let mut out = value_table(space, solution, states)?;
    for s in states {
        out.push('\n');
        out.push_str(&strategy_table(space, solution, s)?);
    }
    out.push('\n');
    out.push_str(&statistics_table(space, solution)?);
    Ok(out)
}
