//! Two-subdomain time domain decomposition for linear-quadratic parabolic
//! optimal control.
//!
//! A spatial semi-discretization of the controlled heat equation leads to a
//! coupled forward-backward system for the state `y` and the adjoint `lambda`,
//!
//! ```text
//! y'      + A y - (1/nu) lambda = 0,            y(0) = y0,
//! lambda' - y   - A   lambda    = -yhat,        lambda(T) + gamma y(T) = gamma yhat(T),
//! ```
//!
//! with `A` symmetric positive semi-definite. Splitting the time window at an
//! interface `alpha` and exchanging Dirichlet/Neumann data between the two
//! subwindows yields six distinct iterations (`DN1`/`ND1` on the pair,
//! `DN2`/`ND2` on the state, `DN3`/`ND3` on the adjoint), each with a relaxed
//! trace update `f <- (1-theta) f + theta * trace`.
//!
//! The crate provides:
//!
//! * [`spectral`]: the built-in 1D Laplacian, eigendecomposition of
//!   user-supplied symmetric operators and exact modal solutions;
//! * [`rho`]: closed-form per-eigenvalue convergence factors for all six
//!   iterations, their zero/infinity limits, published bounds and both
//!   closed-form and numerical minimax relaxation parameters;
//! * [`modal`]: exact single-mode runs of each iteration, used as the
//!   brute-force oracle for the closed forms;
//! * [`discrete`]: a fully discrete two-subdomain solver on the coupled
//!   system (no diagonalization), a monolithic space-time reference solve and
//!   observed-rate estimation;
//! * [`verify`]: an end-to-end self-check suite used by the command line.
//!
//! All types are immutable after construction and safe to share across
//! threads; parameter sweeps parallelize over `(algorithm, d, theta)` cells.

pub mod discrete;
pub mod error;
pub mod hyperbolic;
pub mod modal;
pub mod params;
pub mod rho;
pub mod spectral;
pub mod verify;

pub use error::{CoreError, Result};
pub use params::{modal_coefficients, ModalTriple, ProblemParams};
pub use rho::{AlgorithmId, Category, ConvergenceReport};
pub use spectral::{build_laplacian_1d, SpectralModel};
