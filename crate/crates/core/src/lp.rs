//! Phase-1 simplex for feasibility of `A x = b, x >= 0`.
//!
//! Dense tableau with Bland's rule; sized for the tiny systems produced by
//! the degradation check.

const PIVOT_EPS: f64 = 1e-12;

/// Returns some `x >= 0` with `A x = b` when the phase-1 optimum (total
/// artificial mass) is at most `tol`, else `None`.
pub(crate) fn find_feasible(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let rhs = n + m;
    let mut t = vec![vec![0.0; n + m + 1]; m];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][rhs] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // reduced costs of the phase-1 objective (sum of artificials)
    let mut cost = vec![0.0; n + m + 1];
    for row in &t {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[rhs] -= row[rhs];
    }

    let max_pivots = 50 * (n + m + 1);
    for _ in 0..max_pivots {
        let Some(enter) = (0..n + m).find(|&j| cost[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if t[i][enter] > PIVOT_EPS {
                let ratio = t[i][rhs] / t[i][enter];
                leave = match leave {
                    None => Some(i),
                    Some(l) => {
                        let best = t[l][rhs] / t[l][enter];
                        if ratio < best - PIVOT_EPS
                            || ((ratio - best).abs() <= PIVOT_EPS && basis[i] < basis[l])
                        {
                            Some(i)
                        } else {
                            Some(l)
                        }
                    }
                };
            }
        }
        // phase 1 is bounded below, so a missing leaving row only means a zero column
        let Some(l) = leave else { break };
        pivot(&mut t, &mut cost, l, enter);
        basis[l] = enter;
    }

    if -cost[rhs] > tol {
        return None;
    }
    let mut x = vec![0.0; n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][rhs].max(0.0);
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<f64>], cost: &mut [f64], row: usize, col: usize) {
    let p = t[row][col];
    t[row].iter_mut().for_each(|v| *v /= p);
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            r.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
        }
    }
    let f = cost[col];
    if f != 0.0 {
        cost.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
    }
}
