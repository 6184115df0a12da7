//! Dense tableau simplex for the row player's LP of a positive payoff matrix.
//!
//! For a matrix `A` with all entries ≥ 1 the game value is positive, and
//! `max Σx s.t. Aᵀx ≤ 1, x ≥ 0` has optimum `1/v` with `π = x·v`. The reduced costs of the
//! slack columns at the optimum are the dual variables `y`, giving the column strategy `σ = y·v`.

use crate::error::GameError;

/// Reduced costs above `-OPTIMALITY_EPS` count as non-improving.
const OPTIMALITY_EPS: f64 = 1e-12;
/// Smaller pivot coefficients are treated as zero; pivoting on them after a degenerate step
/// blows up round-off and breaks the tableau.
const PIVOT_EPS: f64 = 1e-9;
const RATIO_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub objective: f64,
}

/// `a` is row-major with `m` rows (row player's actions) and `n` columns.
pub(crate) fn solve(a: &[f64], m: usize, n: usize) -> Result<LpSolution, GameError> {
    let width = m + n + 1;
    let rhs = m + n;
    // constraint rows 0..n (one per column of A), objective row n
    let mut t = vec![0.0; (n + 1) * width];
    for c in 0..n {
        let row = &mut t[c * width..(c + 1) * width];
        for r in 0..m {
            row[r] = a[r * n + c];
        }
        row[m + c] = 1.0;
        row[rhs] = 1.0;
    }
    for r in 0..m {
        t[n * width + r] = -1.0;
    }
    let mut basis: Vec<usize> = (m..m + n).collect();

    let mut pivots = 0;
    let mut degenerate_run = 0;
    loop {
        // Dantzig pricing with the largest pivot among ratio ties; Bland once degenerate pivots pile up
        let bland = degenerate_run >= DEGENERATE_LIMIT;
        let obj = &t[n * width..];
        let enter = if bland {
            (0..m + n).find(|&j| obj[j] < -OPTIMALITY_EPS)
        } else {
            (0..m + n)
                .filter(|&j| obj[j] < -OPTIMALITY_EPS)
                .min_by(|&i, &j| obj[i].total_cmp(&obj[j]))
        };
        let Some(enter) = enter else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..n {
            let coef = t[i * width + enter];
            if coef > PIVOT_EPS {
                let ratio = t[i * width + rhs] / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((best, r)) => {
                        let better_tie = if bland {
                            basis[i] < basis[best]
                        } else {
                            coef > t[best * width + enter]
                        };
                        if ratio < r - RATIO_EPS || (ratio <= r + RATIO_EPS && better_tie) {
                            Some((i, ratio))
                        } else {
                            Some((best, r))
                        }
                    }
                };
            }
        }
        // the feasible region is bounded because every entry of A is positive
        let (leave, ratio) = leave.expect("bounded LP always has a leaving row");
        degenerate_run = if ratio <= RATIO_EPS { degenerate_run + 1 } else { 0 };
        pivot(&mut t, width, n + 1, leave, enter);
        basis[leave] = enter;
        for i in 0..n {
            let b = &mut t[i * width + rhs];
            if *b < 0.0 {
                *b = 0.0;
            }
        }
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(GameError::PivotLimit(pivots));
        }
    }

    let mut x = vec![0.0; m];
    for (i, &b) in basis.iter().enumerate() {
        if b < m {
            x[b] = t[i * width + rhs].max(0.0);
        }
    }
    let y = (0..n).map(|c| t[n * width + m + c].max(0.0)).collect();
    Ok(LpSolution {
        x,
        y,
        objective: t[n * width + rhs],
    })
}

fn pivot(t: &mut [f64], width: usize, rows: usize, pr: usize, pc: usize) {
    let p = t[pr * width + pc];
    for j in 0..width {
        t[pr * width + j] /= p;
    }
    t[pr * width + pc] = 1.0;
    for i in 0..rows {
        if i == pr {
            continue;
        }
        let f = t[i * width + pc];
        if f == 0.0 {
            continue;
        }
        for j in 0..width {
            let v = t[pr * width + j];
            if v != 0.0 {
                t[i * width + j] -= f * v;
            }
        }
        t[i * width + pc] = 0.0;
    }
}
