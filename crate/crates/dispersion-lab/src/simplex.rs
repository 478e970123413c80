//! A small dense two-phase simplex solver for equality-constrained linear
//! programs in standard form:
//!
//! minimize c·x  subject to  A x = b,  x ≥ 0.
//!
//! Pivoting uses Bland's rule throughout, which makes the solver
//! deterministic and cycle-free. Problem sizes here are tiny (at most a few
//! dozen rows and columns), so a dense tableau is the simplest correct tool.

use crate::error::{Error, Result};

/// Optimal point and objective value of a solved program.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

const EPS: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-8;

/// Minimizes `c·x` over `{x ≥ 0 : a x = b}`.
///
/// Errors with [`Error::InfeasiblePolytope`] when phase 1 cannot drive the
/// artificial objective to zero, and [`Error::Domain`] on shape mismatches
/// or an unbounded objective (which cannot occur for problems over a
/// probability polytope).
pub fn minimize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    if m == 0 || b.len() != m {
        return Err(Error::Domain("LP constraint shape mismatch".into()));
    }
    let n = c.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::Domain("LP constraint shape mismatch".into()));
    }

    // Tableau: m rows over n structural + m artificial columns, rhs last.
    // Rows are sign-flipped so every rhs is nonnegative.
    let mut t = vec![vec![0.0; n + m + 1]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][n + m] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the sum of artificials.
    let phase1_cost: Vec<f64> = (0..n + m).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    let obj1 = run_phase(&mut t, &mut basis, &phase1_cost, n + m)?;
    if obj1 > FEAS_TOL {
        return Err(Error::InfeasiblePolytope);
    }

    // Drive remaining artificials out of the basis; a row with no structural
    // pivot candidate is redundant and gets dropped.
    let mut keep = vec![true; t.len()];
    for i in 0..t.len() {
        if basis[i] >= n {
            match (0..n).find(|&j| t[i][j].abs() > EPS) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => keep[i] = false,
            }
        }
    }
    let mut t: Vec<Vec<f64>> = t
        .into_iter()
        .zip(keep.iter())
        .filter(|(_, &k)| k)
        .map(|(row, _)| row)
        .collect();
    let mut basis: Vec<usize> = basis
        .into_iter()
        .zip(keep.iter())
        .filter(|(_, &k)| k)
        .map(|(v, _)| v)
        .collect();

    // Phase 2 over the structural columns only.
    let phase2_cost: Vec<f64> = c.iter().cloned().chain(std::iter::repeat_n(f64::INFINITY, m)).collect();
    let value = run_phase2(&mut t, &mut basis, &phase2_cost, n)?;

    let rhs_col = n + m;
    let mut x = vec![0.0; n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = t[i][rhs_col].max(0.0);
        }
    }
    Ok(LpSolution { x, value })
}

/// Maximizes `c·x` over the same feasible set.
pub fn maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let neg: Vec<f64> = c.iter().map(|v| -v).collect();
    let mut sol = minimize(a, b, &neg)?;
    sol.value = -sol.value;
    Ok(sol)
}

/// Runs Bland-rule pivoting with the given cost vector over columns
/// `0..ncols`; returns the final objective value.
fn run_phase(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    ncols: usize,
) -> Result<f64> {
    let rhs_col = t[0].len() - 1;
    loop {
        // Reduced costs recomputed each iteration: sizes are tiny and this
        // sidesteps drift in an incrementally-updated cost row.
        let mut entering = None;
        for j in 0..ncols {
            if basis.contains(&j) {
                continue;
            }
            let mut r = cost[j];
            for (i, &bi) in basis.iter().enumerate() {
                r -= cost[bi] * t[i][j];
            }
            if r < -EPS {
                entering = Some(j);
                break; // Bland: smallest eligible index.
            }
        }
        let Some(j) = entering else {
            let mut obj = 0.0;
            for (i, &bi) in basis.iter().enumerate() {
                obj += cost[bi] * t[i][rhs_col];
            }
            return Ok(obj);
        };
        // Ratio test; ties broken by smallest basis variable index (Bland).
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..t.len() {
            if t[i][j] > EPS {
                let ratio = t[i][rhs_col] / t[i][j];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - EPS
                            || (ratio < lr + EPS && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return Err(Error::Domain("LP objective unbounded".into()));
        };
        pivot(t, basis, i, j);
    }
}

/// Phase 2: same loop but restricted to structural columns.
fn run_phase2(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    ncols: usize,
) -> Result<f64> {
    // All basic variables are structural after the artificial sweep, so the
    // infinite costs on artificial columns are never touched.
    debug_assert!(basis.iter().all(|&b| b < ncols));
    run_phase(t, basis, cost, ncols)
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let rhs_col = t[0].len() - 1;
    let piv = t[row][col];
    for j in 0..=rhs_col {
        t[row][j] /= piv;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i != row && r[col].abs() > 0.0 {
            let f = r[col];
            for j in 0..=rhs_col {
                r[j] -= f * pivot_row[j];
            }
            r[col] = 0.0;
        }
    }
    basis[row] = col;
}
