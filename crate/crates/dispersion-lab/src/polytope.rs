//! The capacity-achieving input polytope and the linear programs for the
//! dispersion extremes, plus an independent brute-force vertex enumerator
//! used as a correctness oracle for small alphabets.

use crate::channel::{divergence_row, Dmc, InputDistribution};
use crate::error::{Error, Result};
use crate::simplex;

/// The set of capacity-achieving input distributions, encoded as equality
/// constraints over the eligible support:
///
/// - P(x) = 0 off `support`;
/// - Σ_x P(x) W(y|x) = q*(y) for every output y;
/// - Σ_x P(x) = 1, P ≥ 0.
///
/// Any P satisfying these attains I(P; W) = C, because every supported input
/// has divergence C against q* and the output marginal is pinned to q*.
#[derive(Debug, Clone)]
pub struct CapacityPolytope {
    /// Input symbols eligible for capacity-achieving support (the set X*).
    pub support: Vec<usize>,
    /// Equality constraint matrix over the support coordinates: one row per
    /// output symbol plus the total-mass row.
    pub a: Vec<Vec<f64>>,
    /// Right-hand sides: q* entries followed by 1.
    pub b: Vec<f64>,
    /// Total number of input symbols (to re-embed support vectors).
    pub input_size: usize,
}

/// Computes X* = {x : D(W(·|x) ‖ q*) ≥ C − tol} and assembles the polytope
/// constraints.
pub fn capacity_achieving_set(
    ch: &Dmc,
    c: f64,
    q_star: &[f64],
    tol: f64,
) -> Result<CapacityPolytope> {
    let mut support = Vec::new();
    for x in 0..ch.input_size() {
        if divergence_row(ch, q_star, x)? >= c - tol {
            support.push(x);
        }
    }
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let ny = ch.output_size();
    let mut a = Vec::with_capacity(ny + 1);
    let mut b = Vec::with_capacity(ny + 1);
    for y in 0..ny {
        a.push(support.iter().map(|&x| ch.w(x, y)).collect());
        b.push(q_star[y]);
    }
    a.push(vec![1.0; support.len()]);
    b.push(1.0);
    Ok(CapacityPolytope { support, a, b, input_size: ch.input_size() })
}

/// Rebuilds the output law as the exact image of the support-restricted,
/// renormalized input iterate.
///
/// The iterative capacity solver keeps vanishing mass on inputs outside the
/// capacity-achieving support, so its raw output marginal can sit slightly
/// outside the image of the support columns and make the polytope constraints
/// infeasible at the solver's feasibility tolerance. Dropping that mass and
/// renormalizing produces a right-hand side that the restricted columns
/// attain exactly. Returns `None` when the restriction loses all mass or
/// zeroes an output symbol, in which case the caller should keep the raw law.
pub fn repaired_output_law(ch: &Dmc, support: &[usize], p: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = support.iter().map(|&x| p[x]).sum();
    if !(total > 0.0) {
        return None;
    }
    let mut q = vec![0.0; ch.output_size()];
    for &x in support {
        let px = p[x] / total;
        for (y, qy) in q.iter_mut().enumerate() {
            *qy += px * ch.w(x, y);
        }
    }
    if q.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    Some(q)
}

/// Dispersion extremes over the polytope together with their optimizers.
#[derive(Debug, Clone)]
pub struct DispersionExtremes {
    pub v_min: f64,
    pub v_max: f64,
    /// Minimizing input distribution (over the full input alphabet).
    pub p_min: InputDistribution,
    /// Maximizing input distribution.
    pub p_max: InputDistribution,
}

/// Minimizes and maximizes Σ_x P(x) ν_x over the polytope by linear
/// programming.
pub fn dispersion_extremes(poly: &CapacityPolytope, nu: &[f64]) -> Result<DispersionExtremes> {
    let cost: Vec<f64> = poly.support.iter().map(|&x| nu[x]).collect();
    let lo = simplex::minimize(&poly.a, &poly.b, &cost)?;
    let hi = simplex::maximize(&poly.a, &poly.b, &cost)?;
    Ok(DispersionExtremes {
        v_min: lo.value,
        v_max: hi.value,
        p_min: embed(poly, &lo.x)?,
        p_max: embed(poly, &hi.x)?,
    })
}

fn embed(poly: &CapacityPolytope, support_probs: &[f64]) -> Result<InputDistribution> {
    let mut p = vec![0.0; poly.input_size];
    for (&x, &v) in poly.support.iter().zip(support_probs) {
        p[x] = v.max(0.0);
    }
    InputDistribution::new(p)
}

/// Enumerates all vertices of the polytope by brute force: every vertex is a
/// basic feasible solution, so it suffices to try each support subset of
/// size at most the number of constraint rows, solve the restricted equality
/// system by Gaussian elimination, and keep nonnegative solutions that
/// satisfy every row.
///
/// Deliberately shares no code with the simplex solver — this is the
/// independent oracle for small alphabets (intended for |support| ≤ 8).
pub fn enumerate_vertices(poly: &CapacityPolytope) -> Vec<Vec<f64>> {
    let ncols = poly.support.len();
    let nrows = poly.a.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let max_size = ncols.min(nrows);
    for mask in 1u32..(1 << ncols) {
        let cols: Vec<usize> = (0..ncols).filter(|&j| mask & (1 << j) != 0).collect();
        if cols.len() > max_size {
            continue;
        }
        if let Some(z) = solve_restricted(&poly.a, &poly.b, &cols) {
            if z.iter().all(|&v| v >= -1e-9) {
                let mut full = vec![0.0; ncols];
                for (&j, &v) in cols.iter().zip(&z) {
                    full[j] = v.max(0.0);
                }
                // Deduplicate: different supports can describe one vertex.
                if !out.iter().any(|p| {
                    p.iter().zip(&full).all(|(a, b)| (a - b).abs() < 1e-7)
                }) {
                    out.push(full);
                }
            }
        }
    }
    out
}

/// Solves the overdetermined system `a[:, cols] z = b` exactly if it has a
/// unique solution consistent with every row; returns None otherwise.
fn solve_restricted(a: &[Vec<f64>], b: &[f64], cols: &[usize]) -> Option<Vec<f64>> {
    let k = cols.len();
    let m = a.len();
    // Augmented copy restricted to the chosen columns.
    let mut mat: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = cols.iter().map(|&j| a[i][j]).collect();
            row.push(b[i]);
            row
        })
        .collect();
    // Gaussian elimination with partial pivoting down the column list.
    let mut pivot_rows = Vec::with_capacity(k);
    let mut r = 0;
    for c in 0..k {
        let (best, mag) = (r..m)
            .map(|i| (i, mat[i][c].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if mag < 1e-10 {
            return None; // rank-deficient: this support has no unique point
        }
        mat.swap(r, best);
        let prow = mat[r].clone();
        for (i, row) in mat.iter_mut().enumerate() {
            if i != r {
                let f = row[c] / prow[c];
                if f != 0.0 {
                    for j in c..=k {
                        row[j] -= f * prow[j];
                    }
                }
            }
        }
        pivot_rows.push(r);
        r += 1;
        if r == m {
            break;
        }
    }
    if pivot_rows.len() < k {
        return None;
    }
    // Remaining rows must be consistent (0 = 0) for the point to be feasible.
    for i in r..m {
        if mat[i][k].abs() > 1e-8 {
            return None;
        }
    }
    let mut z = vec![0.0; k];
    for (c, &pr) in pivot_rows.iter().enumerate() {
        z[c] = mat[pr][k] / mat[pr][c];
    }
    Some(z)
}

/// Re-embeds a support-coordinate vertex into the full input alphabet.
pub fn vertex_to_distribution(poly: &CapacityPolytope, vertex: &[f64]) -> Result<InputDistribution> {
    embed(poly, vertex)
}
