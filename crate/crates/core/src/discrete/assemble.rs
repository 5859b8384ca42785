//! Assembly of the time-global block systems.
//!
//! Unknowns are ordered level by level, `(y_l, lambda_l)` interleaved, so one
//! time level occupies `2n` consecutive columns. A window `[j_lo, j_hi]` of
//! the grid produces, per interior step, `n` state rows and `n` adjoint rows
//! (the one-step scheme scaled by `dt`), closed by one boundary row block at
//! each end. The same assembler serves the monolithic solve (initial row +
//! final adjoint row) and every subdomain solve (one end replaced by the
//! algorithm's transmission row).

use nalgebra::DVector;

use super::banded::Banded;
use super::{DiscreteProblem, Scheme};

/// Boundary row imposed at one end of a window. All derivative-type
/// transmission data are transferred algebraically through the differential
/// equations, so only value rows and first-order algebraic rows appear:
/// `StateDeriv` encodes `y' = (1/nu) lambda - A y` and `AdjointDeriv` encodes
/// `lambda' = y + A lambda - yhat` (the `yhat` shift is the caller's
/// responsibility, it cancels in matched rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryRow {
    /// `y = rhs`
    ValueY,
    /// `lambda = rhs`
    ValueLambda,
    /// `(1/nu) lambda - A y = rhs`
    StateDeriv,
    /// `y + A lambda = rhs`
    AdjointDeriv,
    /// `lambda + gamma y = rhs`
    FinalAdjoint,
}

/// (state weights, adjoint weights) of the one-step scheme; each pair weighs
/// the old and new level of the non-derivative terms. The implicit Euler
/// variant is implicit in each equation's own marching direction.
fn weights(scheme: Scheme) -> ((f64, f64), (f64, f64)) {
    match scheme {
        Scheme::Trapezoidal => ((0.5, 0.5), (0.5, 0.5)),
        Scheme::ImplicitEuler => ((0.0, 1.0), (1.0, 0.0)),
    }
}

pub fn band_widths(n: usize) -> (usize, usize) {
    (3 * n - 1, 3 * n - 1)
}

fn boundary_rows(
    matrix: &mut Banded,
    problem: &DiscreteProblem,
    row_base: usize,
    level_col: usize,
    row: BoundaryRow,
) {
    let n = problem.model.n;
    let a = &problem.model.a;
    let nu_inv = problem.params.nu_inv();
    for c in 0..n {
        let r = row_base + c;
        match row {
            BoundaryRow::ValueY => matrix.add(r, level_col + c, 1.0),
            BoundaryRow::ValueLambda => matrix.add(r, level_col + n + c, 1.0),
            BoundaryRow::StateDeriv => {
                matrix.add(r, level_col + n + c, nu_inv);
                for k in 0..n {
                    matrix.add(r, level_col + k, -a[(c, k)]);
                }
            }
            BoundaryRow::AdjointDeriv => {
                matrix.add(r, level_col + c, 1.0);
                for k in 0..n {
                    matrix.add(r, level_col + n + k, a[(c, k)]);
                }
            }
            BoundaryRow::FinalAdjoint => {
                matrix.add(r, level_col + n + c, 1.0);
                matrix.add(r, level_col + c, problem.params.gamma);
            }
        }
    }
}

/// Builds the window system matrix for levels `j_lo..=j_hi` with the given
/// boundary rows at the two ends.
pub fn assemble_matrix(
    problem: &DiscreteProblem,
    j_lo: usize,
    j_hi: usize,
    lo: BoundaryRow,
    hi: BoundaryRow,
) -> Banded {
    let n = problem.model.n;
    let a = &problem.model.a;
    let levels = j_hi - j_lo + 1;
    let size = 2 * n * levels;
    let (kl, ku) = band_widths(n);
    let mut matrix = Banded::zeros(size, kl, ku);
    let dt = problem.grid.dt;
    let nu_inv = problem.params.nu_inv();
    let ((sw1, sw2), (aw1, aw2)) = weights(problem.scheme);

    boundary_rows(&mut matrix, problem, 0, 0, lo);
    for l in 0..levels - 1 {
        let col_old = 2 * n * l;
        let col_new = 2 * n * (l + 1);
        let state_base = n + 2 * n * l;
        let adjoint_base = state_base + n;
        for c in 0..n {
            // y_new - y_old + dt (A y_avg - (1/nu) lambda_avg) = 0
            let r = state_base + c;
            matrix.add(r, col_old + c, -1.0);
            matrix.add(r, col_new + c, 1.0);
            matrix.add(r, col_old + n + c, -dt * sw1 * nu_inv);
            matrix.add(r, col_new + n + c, -dt * sw2 * nu_inv);
            for k in 0..n {
                matrix.add(r, col_old + k, dt * sw1 * a[(c, k)]);
                matrix.add(r, col_new + k, dt * sw2 * a[(c, k)]);
            }
            // lambda_new - lambda_old - dt (y_avg + A lambda_avg) = -dt yhat_avg
            let r = adjoint_base + c;
            matrix.add(r, col_old + n + c, -1.0);
            matrix.add(r, col_new + n + c, 1.0);
            matrix.add(r, col_old + c, -dt * aw1);
            matrix.add(r, col_new + c, -dt * aw2);
            for k in 0..n {
                matrix.add(r, col_old + n + k, -dt * aw1 * a[(c, k)]);
                matrix.add(r, col_new + n + k, -dt * aw2 * a[(c, k)]);
            }
        }
    }
    boundary_rows(
        &mut matrix,
        problem,
        n + 2 * n * (levels - 1),
        2 * n * (levels - 1),
        hi,
    );
    matrix
}

/// Right-hand side matching [`assemble_matrix`]. `lo_rhs`/`hi_rhs` are the
/// boundary row data; step rows carry the target forcing.
pub fn assemble_rhs(
    problem: &DiscreteProblem,
    j_lo: usize,
    j_hi: usize,
    lo_rhs: &DVector<f64>,
    hi_rhs: &DVector<f64>,
) -> Vec<f64> {
    let n = problem.model.n;
    let levels = j_hi - j_lo + 1;
    let mut rhs = vec![0.0; 2 * n * levels];
    let dt = problem.grid.dt;
    let (_, (aw1, aw2)) = weights(problem.scheme);
    rhs[..n].copy_from_slice(lo_rhs.as_slice());
    for l in 0..levels - 1 {
        let j = j_lo + l;
        let adjoint_base = n + 2 * n * l + n;
        for c in 0..n {
            rhs[adjoint_base + c] = -dt * (aw1 * problem.yhat[j][c] + aw2 * problem.yhat[j + 1][c]);
        }
    }
    let hi_base = n + 2 * n * (levels - 1);
    rhs[hi_base..hi_base + n].copy_from_slice(hi_rhs.as_slice());
    rhs
}

/// Splits a solution vector back into per-level state/adjoint pairs.
pub fn unpack(n: usize, levels: usize, x: &[f64]) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let mut y = Vec::with_capacity(levels);
    let mut lambda = Vec::with_capacity(levels);
    for l in 0..levels {
        let base = 2 * n * l;
        y.push(DVector::from_column_slice(&x[base..base + n]));
        lambda.push(DVector::from_column_slice(&x[base + n..base + 2 * n]));
    }
    (y, lambda)
}
