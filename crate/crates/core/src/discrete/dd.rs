//! The discrete two-subdomain interface iteration.
//!
//! Side one owns levels `0..=m`, side two owns `m..=nt`; the interface level
//! is duplicated in both windows and synchronized through the transmission
//! rows. Derivative data are never differenced: `y'` is transferred as
//! `(1/nu) lambda - A y` and `lambda'` as `y + A lambda - yhat`, so the
//! discrete iteration carries exactly the algebra of the semi-discrete one.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::modal::{RunStatus, Side};
use crate::rho::AlgorithmId;
use crate::spectral::SpectralModel;

use super::assemble::{assemble_matrix, assemble_rhs, unpack, BoundaryRow};
use super::banded::BandedLu;
use super::{l2_distance, DiscreteProblem, IterationHistory, TrajectoryPair};

/// Growth factor over the first residual beyond which a run is abandoned.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Transmission rows of each algorithm: what side one imposes at the
/// interface (carrying the iterate f) and what side two receives from side
/// one. ND1 is the mirrored case: side two carries f and side one receives.
fn side_rows(alg: AlgorithmId) -> (BoundaryRow, BoundaryRow) {
    match alg {
        // (side-one interface row, side-two interface row)
        AlgorithmId::Dn1 => (BoundaryRow::ValueLambda, BoundaryRow::StateDeriv),
        AlgorithmId::Nd1 => (BoundaryRow::AdjointDeriv, BoundaryRow::ValueY),
        AlgorithmId::Dn2 => (BoundaryRow::ValueY, BoundaryRow::StateDeriv),
        AlgorithmId::Nd2 => (BoundaryRow::StateDeriv, BoundaryRow::ValueY),
        AlgorithmId::Dn3 => (BoundaryRow::ValueLambda, BoundaryRow::AdjointDeriv),
        AlgorithmId::Nd3 => (BoundaryRow::AdjointDeriv, BoundaryRow::ValueLambda),
    }
}

/// Factored solver for one time subdomain of one algorithm. The matrix
/// depends only on the window and the row kinds, so it is factored once and
/// reused across all iterations.
pub struct SubdomainSolver {
    side: Side,
    j_lo: usize,
    j_hi: usize,
    lu: BandedLu,
}

impl SubdomainSolver {
    pub fn new(problem: &DiscreteProblem, alg: AlgorithmId, side: Side) -> Result<Self> {
        let m = problem.grid.interface_index;
        let nt = problem.grid.nt;
        let (row1, row2) = side_rows(alg);
        let (j_lo, j_hi, lo, hi) = match side {
            Side::One => (0, m, BoundaryRow::ValueY, row1),
            Side::Two => (m, nt, row2, BoundaryRow::FinalAdjoint),
        };
        let lu = assemble_matrix(problem, j_lo, j_hi, lo, hi).factorize()?;
        Ok(Self {
            side,
            j_lo,
            j_hi,
            lu,
        })
    }

    /// Solves the window for the given raw interface row data and returns the
    /// window trajectory (levels `j_lo..=j_hi`).
    pub fn solve(&self, problem: &DiscreteProblem, interface_rhs: &DVector<f64>) -> TrajectoryPair {
        let n = problem.n();
        assert_eq!(interface_rhs.len(), n, "interface data length mismatch");
        let (lo_rhs, hi_rhs) = match self.side {
            Side::One => (problem.y0.clone(), interface_rhs.clone()),
            Side::Two => (
                interface_rhs.clone(),
                problem.params.gamma * &problem.yhat[self.j_hi],
            ),
        };
        let mut rhs = assemble_rhs(problem, self.j_lo, self.j_hi, &lo_rhs, &hi_rhs);
        self.lu.solve_in_place(&mut rhs);
        let (y, lambda) = unpack(n, self.j_hi - self.j_lo + 1, &rhs);
        TrajectoryPair { y, lambda }
    }
}

/// One-shot subdomain solve (factorization not reused).
pub fn subdomain_solve_discrete(
    problem: &DiscreteProblem,
    side: Side,
    alg: AlgorithmId,
    interface_data: &DVector<f64>,
) -> Result<TrajectoryPair> {
    if interface_data.len() != problem.n() {
        return Err(CoreError::DimensionMismatch(format!(
            "interface data has length {}, expected {}",
            interface_data.len(),
            problem.n()
        )));
    }
    Ok(SubdomainSolver::new(problem, alg, side)?.solve(problem, interface_data))
}

/// `(1/nu) lambda - A y` at one level: the algebraic value of `y'` there.
fn state_deriv(problem: &DiscreteProblem, y: &DVector<f64>, lambda: &DVector<f64>) -> DVector<f64> {
    problem.params.nu_inv() * lambda - &problem.model.a * y
}

/// `y + A lambda` at one level: the algebraic value of `lambda' + yhat`.
fn adjoint_deriv_raw(
    problem: &DiscreteProblem,
    y: &DVector<f64>,
    lambda: &DVector<f64>,
) -> DVector<f64> {
    y + &problem.model.a * lambda
}

/// The transmitted quantity each algorithm carries, read off a trajectory at
/// the interface level (used for seeding and fixed-point checks).
pub fn interface_trace(
    problem: &DiscreteProblem,
    alg: AlgorithmId,
    traj: &TrajectoryPair,
) -> DVector<f64> {
    let m = problem.grid.interface_index;
    let (y, lambda) = (&traj.y[m], &traj.lambda[m]);
    match alg {
        AlgorithmId::Dn1 | AlgorithmId::Dn3 => lambda.clone(),
        AlgorithmId::Nd1 | AlgorithmId::Dn2 => y.clone(),
        AlgorithmId::Nd2 => state_deriv(problem, y, lambda),
        AlgorithmId::Nd3 => adjoint_deriv_raw(problem, y, lambda) - &problem.yhat[m],
    }
}

struct Sweep {
    side_one: SubdomainSolver,
    side_two: SubdomainSolver,
}

impl Sweep {
    fn new(problem: &DiscreteProblem, alg: AlgorithmId) -> Result<Self> {
        Ok(Self {
            side_one: SubdomainSolver::new(problem, alg, Side::One)?,
            side_two: SubdomainSolver::new(problem, alg, Side::Two)?,
        })
    }

    /// One full sweep from iterate `f`: both subdomain solves plus the trace
    /// the relaxed update blends with `f`.
    fn run(
        &self,
        problem: &DiscreteProblem,
        alg: AlgorithmId,
        f: &DVector<f64>,
    ) -> (TrajectoryPair, TrajectoryPair, DVector<f64>) {
        let m = problem.grid.interface_index;
        let yhat_m = &problem.yhat[m];
        match alg {
            AlgorithmId::Nd1 => {
                // side two holds the Dirichlet value, side one matches lambda'
                let t2 = self.side_two.solve(problem, f);
                let g = adjoint_deriv_raw(problem, &t2.y[0], &t2.lambda[0]);
                let t1 = self.side_one.solve(problem, &g);
                let trace = t1.y[m].clone();
                (t1, t2, trace)
            }
            _ => {
                let f_row = match alg {
                    // lambda'(alpha) = f becomes y + A lambda = f + yhat
                    AlgorithmId::Nd3 => f + yhat_m,
                    _ => f.clone(),
                };
                let t1 = self.side_one.solve(problem, &f_row);
                let (ym, lm) = (&t1.y[m], &t1.lambda[m]);
                let g = match alg {
                    AlgorithmId::Dn1 | AlgorithmId::Dn2 => state_deriv(problem, ym, lm),
                    AlgorithmId::Dn3 => adjoint_deriv_raw(problem, ym, lm),
                    AlgorithmId::Nd2 => ym.clone(),
                    AlgorithmId::Nd3 => lm.clone(),
                    AlgorithmId::Nd1 => unreachable!(),
                };
                let t2 = self.side_two.solve(problem, &g);
                let trace = match alg {
                    AlgorithmId::Dn1 | AlgorithmId::Dn3 => t2.lambda[0].clone(),
                    AlgorithmId::Dn2 => t2.y[0].clone(),
                    AlgorithmId::Nd2 => state_deriv(problem, &t2.y[0], &t2.lambda[0]),
                    AlgorithmId::Nd3 => {
                        adjoint_deriv_raw(problem, &t2.y[0], &t2.lambda[0]) - yhat_m
                    }
                    AlgorithmId::Nd1 => unreachable!(),
                };
                (t1, t2, trace)
            }
        }
    }
}

/// Glues side-one levels `0..m` with side-two levels `m..=nt`.
fn glue(problem: &DiscreteProblem, t1: &TrajectoryPair, t2: &TrajectoryPair) -> TrajectoryPair {
    let m = problem.grid.interface_index;
    let mut y = Vec::with_capacity(problem.grid.nt + 1);
    let mut lambda = Vec::with_capacity(problem.grid.nt + 1);
    y.extend_from_slice(&t1.y[..m]);
    lambda.extend_from_slice(&t1.lambda[..m]);
    y.extend_from_slice(&t2.y);
    lambda.extend_from_slice(&t2.lambda);
    TrajectoryPair { y, lambda }
}

/// Runs the relaxed interface iteration of `alg` on the coupled system.
///
/// Stops when the interface residual drops to `tol`, diverges past
/// [`DIVERGENCE_GUARD`] times the first residual, or after `k_max` sweeps.
/// When `reference` is given, the per-iteration glued-trajectory error is
/// recorded alongside the residuals.
pub fn dd_solve(
    problem: &DiscreteProblem,
    alg: AlgorithmId,
    theta: f64,
    f0: &DVector<f64>,
    k_max: usize,
    tol: f64,
    reference: Option<&TrajectoryPair>,
) -> Result<(TrajectoryPair, IterationHistory)> {
    if f0.len() != problem.n() {
        return Err(CoreError::DimensionMismatch(format!(
            "initial guess has length {}, expected {}",
            f0.len(),
            problem.n()
        )));
    }
    if k_max == 0 {
        return Err(CoreError::InvalidInput("k_max must be positive".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(CoreError::InvalidInput(format!(
            "tol must be > 0, got {tol}"
        )));
    }
    let sweep = Sweep::new(problem, alg)?;
    let mut f = f0.clone();
    let mut history = IterationHistory {
        interface_values: vec![f.clone()],
        residual_norms: Vec::new(),
        error_norms: Vec::new(),
        status: RunStatus::MaxIterations,
    };
    let mut glued = None;
    let mut first_residual = None;
    for _ in 0..k_max {
        let (t1, t2, trace) = sweep.run(problem, alg, &f);
        let f_new = (1.0 - theta) * &f + theta * trace;
        let residual = (&f_new - &f).norm();
        history.residual_norms.push(residual);
        history.interface_values.push(f_new.clone());
        let g = glue(problem, &t1, &t2);
        if let Some(reference) = reference {
            history
                .error_norms
                .push(l2_distance(&problem.grid, &g, reference));
        }
        glued = Some(g);
        f = f_new;
        let first = *first_residual.get_or_insert(residual);
        if residual <= tol {
            history.status = RunStatus::Converged;
            break;
        }
        if residual > DIVERGENCE_GUARD * first.max(f64::MIN_POSITIVE) {
            history.status = RunStatus::Diverged;
            break;
        }
    }
    Ok((glued.expect("at least one sweep ran"), history))
}

/// Diagonalized variant: transforms to modal coordinates, runs `n`
/// independent scalar interface iterations in lockstep (in parallel across
/// modes), and transforms back. Agrees with [`dd_solve`] to roundoff.
pub fn dd_solve_per_mode(
    problem: &DiscreteProblem,
    alg: AlgorithmId,
    theta: f64,
    f0: &DVector<f64>,
    k_max: usize,
    tol: f64,
    reference: Option<&TrajectoryPair>,
) -> Result<(TrajectoryPair, IterationHistory)> {
    if f0.len() != problem.n() {
        return Err(CoreError::DimensionMismatch(format!(
            "initial guess has length {}, expected {}",
            f0.len(),
            problem.n()
        )));
    }
    if k_max == 0 {
        return Err(CoreError::InvalidInput("k_max must be positive".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(CoreError::InvalidInput(format!(
            "tol must be > 0, got {tol}"
        )));
    }
    let n = problem.n();
    let nt = problem.grid.nt;
    let p_mat = &problem.model.p;
    let pt = p_mat.transpose();

    // modal scalar problems, one per eigenvalue
    let mut mode_problems = Vec::with_capacity(n);
    let z0 = &pt * &problem.y0;
    let zhat: Vec<DVector<f64>> = problem.yhat.iter().map(|v| &pt * v).collect();
    for (i, &d) in problem.model.eigenvalues.iter().enumerate() {
        let model = SpectralModel::from_eigenvalues(vec![d])?;
        let yhat_i: Vec<DVector<f64>> = (0..=nt)
            .map(|j| DVector::from_element(1, zhat[j][i]))
            .collect();
        mode_problems.push(DiscreteProblem::new(
            model,
            problem.params,
            nt,
            DVector::from_element(1, z0[i]),
            yhat_i,
            problem.scheme,
        )?);
    }
    let sweeps: Vec<Sweep> = mode_problems
        .iter()
        .map(|mp| Sweep::new(mp, alg))
        .collect::<Result<_>>()?;

    let reference_modal = reference.map(|r| TrajectoryPair {
        y: r.y.iter().map(|v| &pt * v).collect(),
        lambda: r.lambda.iter().map(|v| &pt * v).collect(),
    });

    let mut f = &pt * f0;
    let mut history = IterationHistory {
        interface_values: vec![p_mat * &f],
        residual_norms: Vec::new(),
        error_norms: Vec::new(),
        status: RunStatus::MaxIterations,
    };
    let mut per_mode: Option<Vec<(TrajectoryPair, TrajectoryPair)>> = None;
    let mut first_residual = None;
    for _ in 0..k_max {
        let results: Vec<(TrajectoryPair, TrajectoryPair, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (t1, t2, trace) =
                    sweeps[i].run(&mode_problems[i], alg, &DVector::from_element(1, f[i]));
                (t1, t2, trace[0])
            })
            .collect();
        let mut f_new = DVector::zeros(n);
        for (i, (_, _, trace)) in results.iter().enumerate() {
            f_new[i] = (1.0 - theta) * f[i] + theta * trace;
        }
        let residual = (&f_new - &f).norm();
        history.residual_norms.push(residual);
        history.interface_values.push(p_mat * &f_new);
        if let Some(reference_modal) = &reference_modal {
            let g = glue_modes(&mode_problems, &results);
            history
                .error_norms
                .push(l2_distance(&problem.grid, &g, reference_modal));
        }
        per_mode = Some(results.into_iter().map(|(t1, t2, _)| (t1, t2)).collect());
        f = f_new;
        let first = *first_residual.get_or_insert(residual);
        if residual <= tol {
            history.status = RunStatus::Converged;
            break;
        }
        if residual > DIVERGENCE_GUARD * first.max(f64::MIN_POSITIVE) {
            history.status = RunStatus::Diverged;
            break;
        }
    }

    // glue per mode, then leave modal coordinates
    let per_mode = per_mode.expect("at least one sweep ran");
    let glued_modal = glue_modes(
        &mode_problems,
        &per_mode
            .into_iter()
            .map(|(t1, t2)| (t1, t2, 0.0))
            .collect::<Vec<_>>(),
    );
    let y = glued_modal.y.iter().map(|z| p_mat * z).collect();
    let lambda = glued_modal.lambda.iter().map(|mu| p_mat * mu).collect();
    Ok((TrajectoryPair { y, lambda }, history))
}

/// Stacks per-mode glued windows into one modal trajectory pair.
fn glue_modes(
    mode_problems: &[DiscreteProblem],
    results: &[(TrajectoryPair, TrajectoryPair, f64)],
) -> TrajectoryPair {
    let n = mode_problems.len();
    let nt = mode_problems[0].grid.nt;
    let m = mode_problems[0].grid.interface_index;
    let mut y = vec![DVector::zeros(n); nt + 1];
    let mut lambda = vec![DVector::zeros(n); nt + 1];
    for (i, (t1, t2, _)) in results.iter().enumerate() {
        for j in 0..m {
            y[j][i] = t1.y[j][0];
            lambda[j][i] = t1.lambda[j][0];
        }
        for j in m..=nt {
            y[j][i] = t2.y[j - m][0];
            lambda[j][i] = t2.lambda[j - m][0];
        }
    }
    TrajectoryPair { y, lambda }
}
