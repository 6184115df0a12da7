//! Finite zero-sum matrix games. The row player minimizes, the column player maximizes.
//!
//! [`azs`] first looks for a pure saddle point, then removes weakly dominated actions
//! until a fixed point, and only then solves the LP on the surviving actions.

mod simplex;

use serde::Serialize;

use crate::error::GameError;

/// Saddle and dominance comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Maximum disagreement between the LP value and each player's guaranteed payoff.
pub const DUALITY_TOLERANCE: f64 = 1e-8;
/// Strategy weights below this are dropped before renormalizing.
pub const TRUNCATION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self, GameError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(GameError::Empty);
        }
        if let Some(k) = entries.iter().position(|v| !v.is_finite()) {
            return Err(GameError::NonFinite { row: k / cols, col: k % cols });
        }
        Ok(PayoffMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(GameError::Empty);
        }
        PayoffMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `scale·R + shift` entrywise.
    pub fn affine(&self, scale: f64, shift: f64) -> PayoffMatrix {
        PayoffMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| scale * v + shift).collect(),
        }
    }

    /// Expected payoff of each column against a row mixture.
    pub fn column_payoffs(&self, row_strategy: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| row_strategy[r] * self.get(r, c)).sum())
            .collect()
    }

    /// Expected payoff of each row against a column mixture.
    pub fn row_payoffs(&self, col_strategy: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| col_strategy[c] * self.get(r, c)).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameSolution {
    pub value: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
    pub pure: bool,
}

impl GameSolution {
    /// Largest gain either player obtains from a pure deviation.
    pub fn exploitability(&self, r: &PayoffMatrix) -> f64 {
        let worst_col = r.column_payoffs(&self.row_strategy).into_iter().fold(f64::NEG_INFINITY, f64::max);
        let best_row = r.row_payoffs(&self.col_strategy).into_iter().fold(f64::INFINITY, f64::min);
        (worst_col - self.value).max(self.value - best_row).max(0.0)
    }
}

/// Which branch of [`azs`] produced the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AzsBranch {
    PureSaddle,
    Lp { rows_removed: usize, cols_removed: usize },
}

fn pure_strategy(len: usize, at: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[at] = 1.0;
    v
}

/// Drop weights below [`TRUNCATION`] and renormalize.
pub fn clean_strategy(strategy: &mut [f64]) {
    for p in strategy.iter_mut() {
        if *p < TRUNCATION {
            *p = 0.0;
        }
    }
    let total: f64 = strategy.iter().sum();
    if total > 0.0 {
        for p in strategy.iter_mut() {
            *p /= total;
        }
    }
}

/// `Some((row, col, value))` when `min_r max_c R` and `max_c min_r R` agree within `tol`.
pub fn find_pure_saddle(r: &PayoffMatrix, tol: f64) -> Option<(usize, usize, f64)> {
    let mut best_row = (0, f64::INFINITY);
    for row in 0..r.rows {
        let worst = (0..r.cols).map(|c| r.get(row, c)).fold(f64::NEG_INFINITY, f64::max);
        if worst < best_row.1 {
            best_row = (row, worst);
        }
    }
    let mut best_col = (0, f64::NEG_INFINITY);
    for col in 0..r.cols {
        let worst = (0..r.rows).map(|row| r.get(row, col)).fold(f64::INFINITY, f64::min);
        if worst > best_col.1 {
            best_col = (col, worst);
        }
    }
    (best_row.1 - best_col.1 <= tol).then_some((best_row.0, best_col.0, best_row.1))
}

/// Iterated weak-dominance elimination, alternating row and column passes until nothing changes.
///
/// Pairs are scanned in index order; of a mutually dominating pair the lower index survives.
/// The last remaining row or column is never removed.
pub fn eliminate_weakly_dominated(r: &PayoffMatrix, rows: &[usize], cols: &[usize], tol: f64) -> (Vec<usize>, Vec<usize>) {
    let mut rows = rows.to_vec();
    let mut cols = cols.to_vec();
    // row a dominates row b for the minimizer
    let row_dom = |a: usize, b: usize, cols: &[usize]| cols.iter().all(|&c| r.get(a, c) <= r.get(b, c) + tol);
    let col_dom = |a: usize, b: usize, rows: &[usize]| rows.iter().all(|&row| r.get(row, a) >= r.get(row, b) - tol);
    loop {
        let before = (rows.len(), cols.len());
        rows = eliminate_pass(&rows, |a, b| row_dom(a, b, &cols));
        cols = eliminate_pass(&cols, |a, b| col_dom(a, b, &rows));
        if (rows.len(), cols.len()) == before {
            return (rows, cols);
        }
    }
}

fn eliminate_pass(set: &[usize], dominates: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut alive = vec![true; set.len()];
    let mut remaining = set.len();
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            if remaining == 1 {
                break;
            }
            if !alive[i] {
                break;
            }
            if !alive[j] {
                continue;
            }
            if dominates(set[i], set[j]) {
                alive[j] = false;
                remaining -= 1;
            } else if dominates(set[j], set[i]) {
                alive[i] = false;
                remaining -= 1;
            }
        }
    }
    set.iter().zip(alive).filter(|(_, a)| *a).map(|(&s, _)| s).collect()
}

/// Solve the LP restricted to `rows × cols`; strategies are returned over the full index space.
pub fn solve_lp(r: &PayoffMatrix, rows: &[usize], cols: &[usize]) -> Result<GameSolution, GameError> {
    if rows.is_empty() || cols.is_empty() {
        return Err(GameError::Empty);
    }
    let (m, n) = (rows.len(), cols.len());
    let min = rows
        .iter()
        .flat_map(|&row| cols.iter().map(move |&c| r.get(row, c)))
        .fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;
    let mut a = Vec::with_capacity(m * n);
    for &row in rows {
        for &c in cols {
            a.push(r.get(row, c) + shift);
        }
    }
    let lp = simplex::solve(&a, m, n)?;
    let sum_x: f64 = lp.x.iter().sum();
    let sum_y: f64 = lp.y.iter().sum();
    let mut row_strategy = vec![0.0; r.rows];
    for (k, &row) in rows.iter().enumerate() {
        row_strategy[row] = lp.x[k] / sum_x;
    }
    let mut col_strategy = vec![0.0; r.cols];
    for (k, &c) in cols.iter().enumerate() {
        col_strategy[c] = lp.y[k] / sum_y;
    }
    clean_strategy(&mut row_strategy);
    clean_strategy(&mut col_strategy);
    let value = 1.0 / lp.objective - shift;

    let upper = cols
        .iter()
        .map(|&c| rows.iter().map(|&row| row_strategy[row] * r.get(row, c)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let lower = rows
        .iter()
        .map(|&row| cols.iter().map(|&c| col_strategy[c] * r.get(row, c)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let scale = 1.0f64.max(value.abs());
    let gap = (upper - value).max(value - lower);
    if gap > DUALITY_TOLERANCE * scale {
        return Err(GameError::DualityGap { gap });
    }
    let pure = row_strategy.iter().filter(|&&p| p > 0.0).count() == 1 && col_strategy.iter().filter(|&&p| p > 0.0).count() == 1;
    Ok(GameSolution { value, row_strategy, col_strategy, pure })
}

/// Solve the whole matrix by LP.
pub fn solve_lp_full(r: &PayoffMatrix) -> Result<GameSolution, GameError> {
    let rows: Vec<usize> = (0..r.rows).collect();
    let cols: Vec<usize> = (0..r.cols).collect();
    solve_lp(r, &rows, &cols)
}

/// Saddle search, then weak-dominance elimination, then LP on what survives.
pub fn azs(r: &PayoffMatrix, tol: f64) -> Result<GameSolution, GameError> {
    azs_with_branch(r, tol).map(|(s, _)| s)
}

pub fn azs_with_branch(r: &PayoffMatrix, tol: f64) -> Result<(GameSolution, AzsBranch), GameError> {
    if let Some((row, col, value)) = find_pure_saddle(r, tol) {
        let solution = GameSolution {
            value,
            row_strategy: pure_strategy(r.rows, row),
            col_strategy: pure_strategy(r.cols, col),
            pure: true,
        };
        return Ok((solution, AzsBranch::PureSaddle));
    }
    let all_rows: Vec<usize> = (0..r.rows).collect();
    let all_cols: Vec<usize> = (0..r.cols).collect();
    let (rows, cols) = eliminate_weakly_dominated(r, &all_rows, &all_cols, tol);
    let solution = solve_lp(r, &rows, &cols)?;
    Ok((
        solution,
        AzsBranch::Lp {
            rows_removed: r.rows - rows.len(),
            cols_removed: r.cols - cols.len(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[f64]]) -> PayoffMatrix {
        PayoffMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn degenerate_sweep_matrices_certify() {
        // payoff matrices from value-iteration sweeps on the larger bundled scenarios
        for text in [include_str!("testdata/degenerate_16x16.json"), include_str!("testdata/degenerate_12x12.json")] {
            let rows: Vec<Vec<f64>> = serde_json::from_str(text).unwrap();
            let r = PayoffMatrix::from_rows(rows).unwrap();
            let lp = solve_lp_full(&r).unwrap();
            let azs = azs(&r, DEFAULT_TOLERANCE).unwrap();
            assert!((lp.value - azs.value).abs() <= 1e-9, "{} vs {}", lp.value, azs.value);
            assert!(lp.exploitability(&r) <= 1e-8);
        }
    }

    // value of a 2x2 game without saddle: (ad - bc) / (a + d - b - c)
    fn closed_form_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
        (a * d - b * c) / (a + d - b - c)
    }

    #[test]
    fn saddle_examples() {
        assert_eq!(find_pure_saddle(&m(&[&[1.0, 2.0], &[3.0, 4.0]]), 0.0), Some((0, 1, 2.0)));
        assert_eq!(find_pure_saddle(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), 0.0), None);
        assert_eq!(find_pure_saddle(&m(&[&[7.5]]), 0.0), Some((0, 0, 7.5)));
    }

    #[test]
    fn dominance_examples() {
        let r = m(&[&[1.0, 1.0], &[2.0, 2.0]]);
        assert_eq!(eliminate_weakly_dominated(&r, &[0, 1], &[0, 1], 0.0), (vec![0], vec![0]));
        let pennies = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(eliminate_weakly_dominated(&pennies, &[0, 1], &[0, 1], 0.0), (vec![0, 1], vec![0, 1]));
        let dup = m(&[&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]]);
        let (rows, _) = eliminate_weakly_dominated(&dup, &[0, 1, 2], &[0, 1], 0.0);
        assert_eq!(rows, vec![0, 2]);
    }

    #[test]
    fn lp_examples() {
        let s = solve_lp_full(&m(&[&[1.0, -1.0], &[-1.0, 1.0]])).unwrap();
        assert!(s.value.abs() < 1e-12);
        assert!((s.row_strategy[0] - 0.5).abs() < 1e-12 && (s.col_strategy[0] - 0.5).abs() < 1e-12);

        let r = m(&[&[0.0, 2.0], &[3.0, 1.0]]);
        let s = solve_lp_full(&r).unwrap();
        assert!((s.value - closed_form_2x2(0.0, 2.0, 3.0, 1.0)).abs() < 1e-12);
        assert!((s.value - 1.5).abs() < 1e-12);
        assert!((s.row_strategy[0] - 0.5).abs() < 1e-12);
        assert!((s.col_strategy[0] - 0.25).abs() < 1e-12);
        assert!((s.col_strategy[1] - 0.75).abs() < 1e-12);

        let saddle = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!((solve_lp_full(&saddle).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn azs_branches() {
        let (s, b) = azs_with_branch(&m(&[&[1.0, 2.0], &[3.0, 4.0]]), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(b, AzsBranch::PureSaddle);
        assert!(s.pure);
        assert_eq!(s.value, 2.0);
        let pennies = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let (s, b) = azs_with_branch(&pennies, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(b, AzsBranch::Lp { rows_removed: 0, cols_removed: 0 });
        assert_eq!(s, solve_lp_full(&pennies).unwrap());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert_eq!(PayoffMatrix::new(0, 1, vec![]), Err(GameError::Empty));
        assert_eq!(PayoffMatrix::new(1, 2, vec![0.0, f64::NAN]), Err(GameError::NonFinite { row: 0, col: 1 }));
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, integer: bool) -> PayoffMatrix {
        let entries = (0..rows * cols)
            .map(|_| if integer { rng.random_range(-3..=3) as f64 } else { rng.random_range(-10.0..10.0) })
            .collect();
        PayoffMatrix::new(rows, cols, entries).unwrap()
    }

    #[test]
    fn azs_matches_lp_on_seeded_random_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for k in 0..1000 {
            // alternate continuous and small-integer entries to exercise ties and dominance
            let r = random_matrix(&mut rng, 6, 6, k % 2 == 1);
            let lp = solve_lp_full(&r).unwrap();
            let fast = azs(&r, DEFAULT_TOLERANCE).unwrap();
            assert!((lp.value - fast.value).abs() <= 1e-8, "matrix {k}: {} vs {}", lp.value, fast.value);
            assert!(lp.exploitability(&r) <= 1e-8);
            assert!(fast.exploitability(&r) <= 1e-8, "matrix {k}");
        }
    }

    proptest! {
        #[test]
        fn strategies_are_distributions(rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = random_matrix(&mut rng, rows, cols, seed % 2 == 0);
            let s = azs(&r, DEFAULT_TOLERANCE).unwrap();
            prop_assert!((s.row_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!((s.col_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(s.row_strategy.iter().chain(&s.col_strategy).all(|&p| p >= 0.0));
            prop_assert!(s.exploitability(&r) <= 1e-8);
        }

        #[test]
        fn saddle_and_elimination_are_affine_invariant(seed in any::<u64>(), scale in 0.1f64..20.0, shift in -50.0f64..50.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = random_matrix(&mut rng, 5, 5, true);
            let t = r.affine(scale, shift);
            let tol = 1e-9;
            let a = find_pure_saddle(&r, tol).map(|(i, j, _)| (i, j));
            let b = find_pure_saddle(&t, tol * scale).map(|(i, j, _)| (i, j));
            prop_assert_eq!(a, b);
            let all: Vec<usize> = (0..5).collect();
            prop_assert_eq!(
                eliminate_weakly_dominated(&r, &all, &all, tol),
                eliminate_weakly_dominated(&t, &all, &all, tol * scale)
            );
        }

        #[test]
        fn integer_saddle_is_exact(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = random_matrix(&mut rng, 4, 3, true);
            let minimax = (0..4).map(|i| (0..3).map(|j| r.get(i, j)).fold(f64::MIN, f64::max)).fold(f64::MAX, f64::min);
            let maximin = (0..3).map(|j| (0..4).map(|i| r.get(i, j)).fold(f64::MAX, f64::min)).fold(f64::MIN, f64::max);
            prop_assert_eq!(find_pure_saddle(&r, 0.0).is_some(), minimax == maximin);
        }
    }
}
