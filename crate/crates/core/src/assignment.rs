//! Optimal one-to-one assignment (Hungarian algorithm with potentials).

use alloc::vec;
use alloc::vec::Vec;

/// Maximum-weight assignment on a `rows x cols` matrix given row-major.
/// Returns, for every row, the matched column (`None` when rows outnumber
/// columns), and the total weight.
pub fn max_weight_assignment(weights: &[f64], rows: usize, cols: usize) -> (Vec<Option<usize>>, f64) {
    assert_eq!(weights.len(), rows * cols, "matrix is not {rows}x{cols}");
    if rows == 0 || cols == 0 {
        return (vec![None; rows], 0.0);
    }
    // Square the problem; padding cells cost nothing.
    let n = rows.max(cols);
    let cost = |i: usize, j: usize| if i < rows && j < cols { -weights[i * cols + j] } else { 0.0 };

    // 1-based potentials formulation; column 0 is a sentinel.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
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
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut matched = vec![None; rows];
    let mut total = 0.0;
    for j in 1..=n {
        let i = owner[j];
        if i >= 1 && i <= rows && j <= cols {
            matched[i - 1] = Some(j - 1);
            total += weights[(i - 1) * cols + (j - 1)];
        }
    }
    (matched, total)
}
