//! Fully discrete two-subdomain solver on the coupled state/adjoint system.
//!
//! The coupled first-order system is advanced by a one-step scheme on a
//! uniform grid and solved as one banded space-time system — monolithically
//! as the reference, or per time subdomain inside the interface iteration.
//! No diagonalization is involved in the coupled path; the per-mode variant
//! diagonalizes once and runs the same scalar machinery in parallel, which
//! must agree with the coupled run to roundoff.

mod assemble;
mod banded;
mod dd;

pub use assemble::BoundaryRow;
pub use banded::{Banded, BandedLu};
pub use dd::{
    dd_solve, dd_solve_per_mode, interface_trace, subdomain_solve_discrete, SubdomainSolver,
};

use nalgebra::DVector;

use crate::error::{CoreError, Result};
pub use crate::modal::RunStatus;
use crate::params::ProblemParams;
use crate::spectral::SpectralModel;

/// One-step time integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Second order; the default.
    Trapezoidal,
    /// First order, implicit in each equation's own marching direction.
    ImplicitEuler,
}

impl std::str::FromStr for Scheme {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trapezoidal" => Ok(Scheme::Trapezoidal),
            "implicit-euler" => Ok(Scheme::ImplicitEuler),
            other => Err(CoreError::InvalidInput(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Uniform time grid with the interface snapped onto it.
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    /// Number of time steps.
    pub nt: usize,
    pub dt: f64,
    /// Index `m` with `m * dt = snapped_alpha`, `1 <= m <= nt - 1`.
    pub interface_index: usize,
    /// The interface position actually used.
    pub snapped_alpha: f64,
}

impl TimeGrid {
    pub fn new(t_final: f64, nt: usize, alpha: f64) -> Result<Self> {
        if nt < 2 {
            return Err(CoreError::InvalidInput(format!("need nt >= 2, got {nt}")));
        }
        if t_final.is_nan() || t_final <= 0.0 || alpha.is_nan() || alpha <= 0.0 || alpha >= t_final
        {
            return Err(CoreError::InvalidInput(format!(
                "need 0 < alpha < T, got alpha = {alpha}, T = {t_final}"
            )));
        }
        let dt = t_final / nt as f64;
        let m = ((alpha / dt).round() as usize).clamp(1, nt - 1);
        Ok(Self {
            nt,
            dt,
            interface_index: m,
            snapped_alpha: m as f64 * dt,
        })
    }

    /// True when the requested interface did not coincide with a grid point.
    pub fn snapped(&self, requested_alpha: f64) -> bool {
        (self.snapped_alpha - requested_alpha).abs() > 1e-12 * self.dt.max(requested_alpha)
    }
}

/// State and adjoint trajectories over some window of time levels.
#[derive(Debug, Clone)]
pub struct TrajectoryPair {
    pub y: Vec<DVector<f64>>,
    pub lambda: Vec<DVector<f64>>,
}

impl TrajectoryPair {
    pub fn levels(&self) -> usize {
        self.y.len()
    }
}

/// The fully discrete problem data.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub model: SpectralModel,
    pub params: ProblemParams,
    pub grid: TimeGrid,
    /// Initial state.
    pub y0: DVector<f64>,
    /// Target trajectory, one vector per level.
    pub yhat: Vec<DVector<f64>>,
    pub scheme: Scheme,
}

impl DiscreteProblem {
    /// Builds the problem; the interface of `params` is snapped to the grid.
    pub fn new(
        model: SpectralModel,
        params: ProblemParams,
        nt: usize,
        y0: DVector<f64>,
        yhat: Vec<DVector<f64>>,
        scheme: Scheme,
    ) -> Result<Self> {
        let grid = TimeGrid::new(params.t_final, nt, params.alpha)?;
        if y0.len() != model.n {
            return Err(CoreError::DimensionMismatch(format!(
                "y0 has length {}, expected {}",
                y0.len(),
                model.n
            )));
        }
        if yhat.len() != nt + 1 || yhat.iter().any(|v| v.len() != model.n) {
            return Err(CoreError::DimensionMismatch(format!(
                "target trajectory must hold {} vectors of length {}",
                nt + 1,
                model.n
            )));
        }
        let params = ProblemParams::new(
            params.nu,
            params.gamma,
            params.t_final,
            grid.snapped_alpha,
            params.theta,
        )?;
        Ok(Self {
            model,
            params,
            grid,
            y0,
            yhat,
            scheme,
        })
    }

    /// Zero-data variant: all published rates concern this error iteration.
    pub fn error_mode(
        model: SpectralModel,
        params: ProblemParams,
        nt: usize,
        scheme: Scheme,
    ) -> Result<Self> {
        let n = model.n;
        let y0 = DVector::zeros(n);
        let yhat = vec![DVector::zeros(n); nt + 1];
        Self::new(model, params, nt, y0, yhat, scheme)
    }

    pub fn n(&self) -> usize {
        self.model.n
    }
}

/// Direct solve of the whole space-time system: one banded factorization
/// coupling every level of both trajectories.
pub fn monolithic_solve(problem: &DiscreteProblem) -> Result<TrajectoryPair> {
    let nt = problem.grid.nt;
    let matrix = assemble::assemble_matrix(
        problem,
        0,
        nt,
        BoundaryRow::ValueY,
        BoundaryRow::FinalAdjoint,
    );
    let mut rhs = assemble::assemble_rhs(
        problem,
        0,
        nt,
        &problem.y0,
        &(problem.params.gamma * &problem.yhat[nt]),
    );
    let lu = matrix.factorize()?;
    lu.solve_in_place(&mut rhs);
    let (y, lambda) = assemble::unpack(problem.n(), nt + 1, &rhs);
    Ok(TrajectoryPair { y, lambda })
}

/// Maximum scaled residual of the monolithic equations at a trajectory pair.
pub fn discrete_residual(problem: &DiscreteProblem, traj: &TrajectoryPair) -> f64 {
    residual_over_window(problem, traj, 0, problem.grid.nt)
}

/// Maximum scaled residual of the step equations (plus initial/final rows)
/// restricted to `j_lo..=j_hi`, with `traj` holding that window.
pub(crate) fn residual_over_window(
    problem: &DiscreteProblem,
    traj: &TrajectoryPair,
    j_lo: usize,
    j_hi: usize,
) -> f64 {
    let n = problem.n();
    let levels = j_hi - j_lo + 1;
    assert_eq!(traj.levels(), levels);
    let mut x = Vec::with_capacity(2 * n * levels);
    for l in 0..levels {
        x.extend_from_slice(traj.y[l].as_slice());
        x.extend_from_slice(traj.lambda[l].as_slice());
    }
    let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (lo, lo_rhs, hi, hi_rhs) = (
        BoundaryRow::ValueY,
        problem.y0.clone(),
        BoundaryRow::FinalAdjoint,
        problem.params.gamma * &problem.yhat[j_hi],
    );
    let matrix_rows = row_residuals(problem, j_lo, j_hi, lo, hi, &lo_rhs, &hi_rhs, &x);
    let mut worst = 0.0f64;
    // skip the boundary blocks when the window is a strict subdomain: those
    // rows belong to the transmission conditions, not the step equations
    let full = j_lo == 0 && j_hi == problem.grid.nt;
    for (r, res) in matrix_rows.iter().enumerate() {
        let boundary = r < n || r >= 2 * n * levels - n;
        if full || !boundary {
            worst = worst.max(res.abs());
        }
    }
    worst / scale
}

#[allow(clippy::too_many_arguments)]
fn row_residuals(
    problem: &DiscreteProblem,
    j_lo: usize,
    j_hi: usize,
    lo: BoundaryRow,
    hi: BoundaryRow,
    lo_rhs: &DVector<f64>,
    hi_rhs: &DVector<f64>,
    x: &[f64],
) -> Vec<f64> {
    // dense mat-vec through the banded assembler would be wasteful; rebuild
    // the rows and apply them directly
    let matrix = assemble::assemble_matrix(problem, j_lo, j_hi, lo, hi);
    let rhs = assemble::assemble_rhs(problem, j_lo, j_hi, lo_rhs, hi_rhs);
    matrix.residual(x, &rhs)
}

/// Discrete L2(0, T) distance between two trajectory pairs on the same grid
/// (trapezoidal quadrature in time, Euclidean in space, state and adjoint
/// combined).
pub fn l2_distance(grid: &TimeGrid, a: &TrajectoryPair, b: &TrajectoryPair) -> f64 {
    assert_eq!(a.levels(), b.levels());
    let levels = a.levels();
    let mut acc = 0.0;
    for l in 0..levels {
        let w = if l == 0 || l == levels - 1 { 0.5 } else { 1.0 };
        acc +=
            w * ((&a.y[l] - &b.y[l]).norm_squared() + (&a.lambda[l] - &b.lambda[l]).norm_squared());
    }
    (grid.dt * acc).sqrt()
}

/// Interface-iteration record of a discrete run.
#[derive(Debug, Clone)]
pub struct IterationHistory {
    /// Transmitted vector after each update; `[0]` is the initial guess.
    pub interface_values: Vec<DVector<f64>>,
    /// Euclidean norms of successive interface differences.
    pub residual_norms: Vec<f64>,
    /// Discrete L2 error of the glued trajectory against a reference, when
    /// one was supplied.
    pub error_norms: Vec<f64>,
    pub status: RunStatus,
}

/// Geometric tail rate of a residual history: `exp` of the least-squares
/// slope of `log r_k` over the last `max(4, k/2)` recorded iterations.
pub fn observed_rate(history: &IterationHistory) -> Result<f64> {
    let r = &history.residual_norms;
    let k = r.len();
    if k < 4 {
        return Err(CoreError::TooFewIterations { needed: 4, have: k });
    }
    let window = (k / 2).max(4);
    let tail: Vec<f64> = r[k - window..]
        .iter()
        .copied()
        .filter(|v| *v > 0.0)
        .collect();
    if tail.len() < 4 {
        return Err(CoreError::TooFewIterations {
            needed: 4,
            have: tail.len(),
        });
    }
    let m = tail.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, v) in tail.iter().enumerate() {
        let x = i as f64;
        let y = v.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    Ok(slope.exp())
}
