//! Dense tableau simplex for the check-function linear program.
//!
//! min tau * sum(u) + (1-tau) * sum(v)
//! s.t. W(eta+ - eta-) + u - v = b, all variables >= 0.
//!
//! The initial basis {u_i or v_i per row} is feasible by construction,
//! and Bland's smallest-index rule guarantees finite termination, so the
//! returned vertex minimizes the objective exactly up to floating-point
//! pivoting error. Intended for the moderate problem sizes of the test
//! and experiment pipelines, not as a general-purpose LP solver.

use crate::error::{Error, Result};

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;

/// Solves the check-function LP; `w` is row-major n x p, returns eta.
pub(crate) fn solve_check_lp(w: &[f64], n: usize, p: usize, b: &[f64], tau: f64) -> Result<Vec<f64>> {
    assert_eq!(w.len(), n * p);
    assert_eq!(b.len(), n);
    let cols = 2 * p + 2 * n; // eta+, eta-, u, v
    let width = cols + 1; // + rhs
    let mut t = vec![0.0f64; n * width];
    let mut basis = vec![0usize; n];
    for i in 0..n {
        // sign flip rows with negative rhs so the initial basis column is +e_i
        let sign = if b[i] >= 0.0 { 1.0 } else { -1.0 };
        for j in 0..p {
            t[i * width + j] = sign * w[i * p + j];
            t[i * width + p + j] = -sign * w[i * p + j];
        }
        t[i * width + 2 * p + i] = sign; // u_i
        t[i * width + 2 * p + n + i] = -sign; // v_i
        t[i * width + cols] = sign * b[i];
        basis[i] = if b[i] >= 0.0 { 2 * p + i } else { 2 * p + n + i };
    }
    let cost = |j: usize| -> f64 {
        if j < 2 * p {
            0.0
        } else if j < 2 * p + n {
            tau
        } else {
            1.0 - tau
        }
    };
    // reduced-cost row: r_j = c_j - sum_i c_{basis(i)} T[i][j]
    let mut r = vec![0.0f64; width];
    for j in 0..width {
        let cj = if j < cols { cost(j) } else { 0.0 };
        let mut acc = cj;
        for i in 0..n {
            acc -= cost(basis[i]) * t[i * width + j];
        }
        r[j] = acc;
    }
    let max_pivots = 50 * (n + cols) + 1000;
    for _ in 0..max_pivots {
        // Bland: entering = smallest index with negative reduced cost
        let Some(enter) = (0..cols).find(|&j| r[j] < -COST_TOL) else {
            // optimal: read eta = eta+ - eta-
            let mut eta = vec![0.0f64; p];
            for i in 0..n {
                let bj = basis[i];
                if bj < p {
                    eta[bj] += t[i * width + cols];
                } else if bj < 2 * p {
                    eta[bj - p] -= t[i * width + cols];
                }
            }
            return Ok(eta);
        };
        // ratio test, ties broken by smallest basis variable (Bland)
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = t[i * width + enter];
            if a > PIVOT_TOL {
                let ratio = t[i * width + cols] / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            return Err(Error::Unsupported(
                "check-function LP is unbounded; this indicates corrupt input".into(),
            ));
        };
        // pivot
        let piv = t[row * width + enter];
        for j in 0..width {
            t[row * width + j] /= piv;
        }
        for i in 0..n {
            if i != row {
                let f = t[i * width + enter];
                if f != 0.0 {
                    for j in 0..width {
                        t[i * width + j] -= f * t[row * width + j];
                    }
                }
            }
        }
        let f = r[enter];
        if f != 0.0 {
            for j in 0..width {
                r[j] -= f * t[row * width + j];
            }
        }
        basis[row] = enter;
    }
    Err(Error::Unsupported(
        "check-function LP failed to converge within the pivot budget".into(),
    ))
}
