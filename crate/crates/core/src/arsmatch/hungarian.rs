//! Minimum-cost rectangular assignment.
//!
//! The matrix is padded to square with zero-cost dummies and solved with the
//! shortest-augmenting-path Hungarian method (O(n³)). Among optimal
//! assignments the lexicographically smallest pair list is then selected by
//! walking rows in order over the tight edges of the final dual solution:
//! every perfect matching on tight edges is optimal, so each row greedily
//! takes its smallest tight column that still admits a perfect matching.

use serde::Serialize;

use super::CostMatrix;

/// Bijective prediction to ground-truth matching.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    /// `(pred_index, gt_index)` sorted by prediction index.
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

pub fn hungarian(matrix: &CostMatrix) -> Assignment {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    if rows == 0 || cols == 0 {
        return Assignment { pairs: Vec::new(), total_cost: 0.0 };
    }
    let n = rows.max(cols);
    let cost = |i: usize, j: usize| if i < rows && j < cols { matrix.get(i, j) } else { 0.0 };

    let (row_to_col, u, v) = solve_square(n, &cost);

    let scale = matrix.entries().iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-9 * scale;
    let tight: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| cost(i, j) - u[i + 1] - v[j + 1] <= tol).collect()).collect();
    let row_to_col = lex_min_matching(&tight, row_to_col).unwrap_or_else(|fallback| fallback);

    let pairs: Vec<(usize, usize)> =
        row_to_col.iter().enumerate().filter(|&(i, &j)| i < rows && j < cols).map(|(i, &j)| (i, j)).collect();
    let total_cost = pairs.iter().map(|&(i, j)| matrix.get(i, j)).sum();
    Assignment { pairs, total_cost }
}

/// Returns `(row_to_col, u, v)` with 1-based potentials `u[1..=n]`, `v[1..=n]`.
fn solve_square(n: usize, cost: &dyn Fn(usize, usize) -> f64) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // col_owner[j] = row (1-based) matched to column j; 0 = free.
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        col_owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[col_owner[j] - 1] = j - 1;
    }
    (row_to_col, u, v)
}

/// Lexicographically smallest perfect matching restricted to `tight` edges,
/// starting from the feasible matching `start`. Returns `Err(start)` if
/// `start` itself is not supported by the tight graph (numerical trouble).
fn lex_min_matching(tight: &[Vec<usize>], start: Vec<usize>) -> Result<Vec<usize>, Vec<usize>> {
    let n = tight.len();
    if (0..n).any(|i| !tight[i].contains(&start[i])) {
        return Err(start);
    }
    let mut row_to_col = start;
    let mut col_to_row = vec![0usize; n];
    for (i, &j) in row_to_col.iter().enumerate() {
        col_to_row[j] = i;
    }
    let mut col_fixed = vec![false; n];
    for i in 0..n {
        for &j in &tight[i] {
            if col_fixed[j] {
                continue;
            }
            if row_to_col[i] == j {
                break;
            }
            // Give column j to row i; its owner r must re-route through
            // unfixed rows (> i) to the column row i releases.
            let r = col_to_row[j];
            let freed = row_to_col[i];
            let mut blocked = col_fixed.clone();
            blocked[j] = true;
            let mut visited = vec![false; n];
            let mut path_next = vec![usize::MAX; n];
            if augment(r, freed, tight, &col_to_row, &blocked, &mut visited, &mut path_next) {
                // Apply the alternating path found from r.
                let mut row = r;
                loop {
                    let col = path_next[row];
                    let prev_owner = col_to_row[col];
                    row_to_col[row] = col;
                    col_to_row[col] = row;
                    if col == freed {
                        break;
                    }
                    row = prev_owner;
                }
                row_to_col[i] = j;
                col_to_row[j] = i;
                break;
            }
        }
        col_fixed[row_to_col[i]] = true;
    }
    Ok(row_to_col)
}

/// DFS for an alternating path from `row` ending at column `target`.
fn augment(
    row: usize,
    target: usize,
    tight: &[Vec<usize>],
    col_to_row: &[usize],
    blocked: &[bool],
    visited: &mut [bool],
    path_next: &mut [usize],
) -> bool {
    for &c in &tight[row] {
        if blocked[c] || visited[c] {
            continue;
        }
        visited[c] = true;
        if c == target {
            path_next[row] = c;
            return true;
        }
        let owner = col_to_row[c];
        if augment(owner, target, tight, col_to_row, blocked, visited, path_next) {
            path_next[row] = c;
            return true;
        }
    }
    false
}
