//! Shared helpers for the integration suites.

use eberlein::blockmat::Complex64;

/// Minimal-cost assignment (Hungarian algorithm with potentials, O(n^3)).
/// Returns `assign` with row i matched to column `assign[i]`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    assert!(cost.iter().all(|row| row.len() == n));
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // matched_row[j]: row in column j
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assign = vec![usize::MAX; n];
    for j in 1..=n {
        assign[matched_row[j] - 1] = j - 1;
    }
    assign
}

/// Pairs computed eigenvalues against the expected multiset with minimal
/// total distance; returns the worst relative error over the pairing.
pub fn worst_relative_pairing_error(computed: &[Complex64], expected: &[Complex64]) -> f64 {
    assert_eq!(computed.len(), expected.len());
    let n = computed.len();
    let cost: Vec<Vec<f64>> = computed
        .iter()
        .map(|c| expected.iter().map(|e| (c - e).norm()).collect())
        .collect();
    let assign = min_cost_assignment(&cost);
    let mut worst = 0.0f64;
    for (i, &j) in assign.iter().enumerate() {
        let denom = expected[j].norm().max(1e-300);
        worst = worst.max((computed[i] - expected[j]).norm() / denom);
    }
    worst
}

#[allow(dead_code)]
pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: {actual} vs {expected} (tol {tol})"
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignment_picks_the_cheap_diagonal() {
        let cost = vec![
            vec![1.0, 100.0, 100.0],
            vec![100.0, 1.0, 100.0],
            vec![100.0, 100.0, 1.0],
        ];
        assert_eq!(min_cost_assignment(&cost), vec![0, 1, 2]);
    }

    #[test]
    fn assignment_beats_greedy() {
        // greedy row-by-row picks (0,0) then is forced into 10 + 10;
        // the optimum is 1 + 2 + 2 = 5 via the off-diagonal
        let cost = vec![vec![1.0, 2.0], vec![1.0, 10.0]];
        let assign = min_cost_assignment(&cost);
        assert_eq!(assign, vec![1, 0]);
    }

    #[test]
    fn pairing_handles_repeated_values() {
        let a = Complex64::new(1.0, 1.0);
        let b = Complex64::new(-2.0, 0.5);
        let computed = vec![b, a, a];
        let expected = vec![a, a, b];
        assert!(worst_relative_pairing_error(&computed, &expected) < 1e-15);
    }
}
