//! Exact single-mode runs of the six interface iterations.
//!
//! For one eigenvalue `d` the error equations reduce to `f'' = sigma^2 f` on
//! each time subdomain, with one closed-form basis function per side that
//! already satisfies the outer (initial- or final-time) row:
//!
//! * state, inner side:    `sinh(sigma t)`
//! * state, outer side:    `sigma cosh(sigma (T-t)) + omega sinh(sigma (T-t))`
//! * adjoint, inner side:  `sigma cosh(sigma t) + d sinh(sigma t)`
//! * adjoint, outer side:  `gamma sigma cosh(sigma (T-t)) + beta sinh(sigma (T-t))`
//!
//! The interface row then fixes a single coefficient per side, and one sweep
//! of the iteration is coefficient arithmetic. This module is the brute-force
//! oracle the closed-form convergence factors are tested against: running one
//! sweep from `f = 1` must reproduce `rho` to near machine accuracy.
//!
//! Coefficients are stored against exponentially scaled bases (the true
//! coefficient is `scaled * exp(log_scale)`), so stiff modes with
//! `sigma T` in the thousands stay finite end to end.

use crate::error::{CoreError, Result};
use crate::hyperbolic::{cosh_scaled, sinh_scaled};
use crate::params::{ModalTriple, ProblemParams};
use crate::rho::AlgorithmId;

/// Time subdomain: `One` covers (0, alpha), `Two` covers (alpha, T).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    One,
    Two,
}

/// Which trajectory carries the iteration scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// The state `z`: DN1, DN2, ND2.
    State,
    /// The adjoint `mu`: ND1, DN3, ND3.
    Adjoint,
}

impl AlgorithmId {
    /// The trajectory on which the iteration scalar lives.
    pub fn formulation(&self) -> Formulation {
        match self {
            AlgorithmId::Dn1 | AlgorithmId::Dn2 | AlgorithmId::Nd2 => Formulation::State,
            AlgorithmId::Nd1 | AlgorithmId::Dn3 | AlgorithmId::Nd3 => Formulation::Adjoint,
        }
    }
}

/// The four closed-form side bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BasisKind {
    StateInner,
    StateOuter,
    AdjointInner,
    AdjointOuter,
}

/// `coef` times one side basis, evaluated through scaled exponentials.
#[derive(Debug, Clone, Copy)]
pub struct ModeFunction {
    kind: BasisKind,
    /// Scaled coefficient; the true basis coefficient is `coef * exp(log_scale)`.
    coef: f64,
    log_scale: f64,
    m: ModalTriple,
    gamma: f64,
    t_final: f64,
}

impl ModeFunction {
    fn new(kind: BasisKind, coef: f64, m: ModalTriple, p: &ProblemParams) -> Self {
        let log_scale = match kind {
            BasisKind::StateInner | BasisKind::AdjointInner => -m.a,
            BasisKind::StateOuter | BasisKind::AdjointOuter => -m.b,
        };
        Self {
            kind,
            coef,
            log_scale,
            m,
            gamma: p.gamma,
            t_final: p.t_final,
        }
    }

    /// (scaled shape value, scaled shape derivative, exp factor) at time t.
    fn parts(&self, t: f64) -> (f64, f64, f64) {
        let m = &self.m;
        match self.kind {
            BasisKind::StateInner => {
                let u = m.sigma * t;
                let (ch, sh) = (cosh_scaled(u), sinh_scaled(u));
                (sh, m.sigma * ch, (u + self.log_scale).exp())
            }
            BasisKind::AdjointInner => {
                let u = m.sigma * t;
                let (ch, sh) = (cosh_scaled(u), sinh_scaled(u));
                (
                    m.sigma * ch + m.d * sh,
                    m.sigma * (m.sigma * sh + m.d * ch),
                    (u + self.log_scale).exp(),
                )
            }
            BasisKind::StateOuter => {
                let v = m.sigma * (self.t_final - t);
                let (ch, sh) = (cosh_scaled(v), sinh_scaled(v));
                (
                    m.sigma * ch + m.omega * sh,
                    -m.sigma * (m.sigma * sh + m.omega * ch),
                    (v + self.log_scale).exp(),
                )
            }
            BasisKind::AdjointOuter => {
                let v = m.sigma * (self.t_final - t);
                let (ch, sh) = (cosh_scaled(v), sinh_scaled(v));
                (
                    self.gamma * m.sigma * ch + m.beta * sh,
                    -m.sigma * (self.gamma * m.sigma * sh + m.beta * ch),
                    (v + self.log_scale).exp(),
                )
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let (shape, _, e) = self.parts(t);
        self.coef * shape * e
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let (_, dshape, e) = self.parts(t);
        self.coef * dshape * e
    }
}

/// One subdomain solution: a single scaled coefficient against the side basis
/// that already satisfies the subdomain's outer row.
#[derive(Debug, Clone, Copy)]
pub struct ModalSubdomainSolution {
    pub side: Side,
    pub formulation: Formulation,
    eval: ModeFunction,
}

impl ModalSubdomainSolution {
    /// Carried-trajectory value at time t.
    pub fn value(&self, t: f64) -> f64 {
        self.eval.value(t)
    }

    /// Carried-trajectory derivative at time t.
    pub fn deriv(&self, t: f64) -> f64 {
        self.eval.deriv(t)
    }

    /// The two free coefficients of the general solution
    /// `A cosh(sigma s) + B sinh(sigma s)` in this side's frame
    /// (`s = t` on side one, `s = T - t` on side two). Underflows to zero for
    /// extremely stiff modes; evaluation goes through the scaled path instead.
    pub fn frame_coefficients(&self) -> (f64, f64) {
        let c = self.eval.coef * self.eval.log_scale.exp();
        let m = &self.eval.m;
        match self.eval.kind {
            BasisKind::StateInner => (0.0, c),
            BasisKind::AdjointInner => (c * m.sigma, c * m.d),
            BasisKind::StateOuter => (c * m.sigma, c * m.omega),
            BasisKind::AdjointOuter => (c * self.eval.gamma * m.sigma, c * m.beta),
        }
    }
}

/// Both trajectories reconstructed from a carried solution through the
/// first-order identities `mu = nu (z' + d z)`, `z = mu' - d mu`. The
/// identities map each side basis onto its counterpart exactly, so no
/// cancellation-prone derivative differences are formed.
#[derive(Debug, Clone, Copy)]
pub struct ModalPair {
    pub z: ModeFunction,
    pub mu: ModeFunction,
}

pub fn reconstruct_pair(sol: &ModalSubdomainSolution, p: &ProblemParams) -> ModalPair {
    let e = &sol.eval;
    let m = e.m;
    let (z, mu) = match (sol.formulation, sol.side) {
        (Formulation::State, Side::One) => (
            ModeFunction::new(BasisKind::StateInner, e.coef, m, p),
            ModeFunction::new(BasisKind::AdjointInner, p.nu * e.coef, m, p),
        ),
        (Formulation::State, Side::Two) => (
            ModeFunction::new(BasisKind::StateOuter, e.coef, m, p),
            ModeFunction::new(BasisKind::AdjointOuter, -e.coef, m, p),
        ),
        (Formulation::Adjoint, Side::One) => (
            ModeFunction::new(BasisKind::StateInner, p.nu_inv() * e.coef, m, p),
            ModeFunction::new(BasisKind::AdjointInner, e.coef, m, p),
        ),
        (Formulation::Adjoint, Side::Two) => (
            ModeFunction::new(BasisKind::StateOuter, -e.coef, m, p),
            ModeFunction::new(BasisKind::AdjointOuter, e.coef, m, p),
        ),
    };
    ModalPair { z, mu }
}

/// Scaled side-basis coefficient fixed by the interface row of `alg` on
/// `side`, for interface datum `datum`.
fn solve_coef(alg: AlgorithmId, side: Side, m: &ModalTriple, p: &ProblemParams, datum: f64) -> f64 {
    let s = m.sigma;
    let (cha, sha) = (cosh_scaled(m.a), sinh_scaled(m.a));
    let (chb, shb) = (cosh_scaled(m.b), sinh_scaled(m.b));
    match (alg, side) {
        // inner Robin row z' + d z = datum
        (AlgorithmId::Dn1, Side::One) => datum / (s * cha + m.d * sha),
        // outer Neumann row z' matched to datum
        (AlgorithmId::Dn1, Side::Two) => -datum / (s * (s * shb + m.omega * chb)),
        // outer Robin row mu' - d mu = datum
        (AlgorithmId::Nd1, Side::Two) => -datum / (m.omega * shb + s * chb),
        // inner Neumann row mu' matched to datum
        (AlgorithmId::Nd1, Side::One) => datum / (s * (s * sha + m.d * cha)),
        // inner Dirichlet row z = datum
        (AlgorithmId::Dn2, Side::One) => datum / sha,
        (AlgorithmId::Dn2, Side::Two) => -datum / (s * (s * shb + m.omega * chb)),
        // inner Neumann row z' = datum
        (AlgorithmId::Nd2, Side::One) => datum / (s * cha),
        // outer Dirichlet row z matched to datum
        (AlgorithmId::Nd2, Side::Two) => datum / (s * chb + m.omega * shb),
        // inner Dirichlet row mu = datum
        (AlgorithmId::Dn3, Side::One) => datum / (s * cha + m.d * sha),
        // outer Neumann row mu' matched to datum
        (AlgorithmId::Dn3, Side::Two) => -datum / (s * (p.gamma * s * shb + m.beta * chb)),
        // inner Neumann row mu' = datum
        (AlgorithmId::Nd3, Side::One) => datum / (s * (s * sha + m.d * cha)),
        // outer Dirichlet row mu matched to datum
        (AlgorithmId::Nd3, Side::Two) => datum / (p.gamma * s * chb + m.beta * shb),
    }
}

fn basis_kind(alg: AlgorithmId, side: Side) -> BasisKind {
    match (alg.formulation(), side) {
        (Formulation::State, Side::One) => BasisKind::StateInner,
        (Formulation::State, Side::Two) => BasisKind::StateOuter,
        (Formulation::Adjoint, Side::One) => BasisKind::AdjointInner,
        (Formulation::Adjoint, Side::Two) => BasisKind::AdjointOuter,
    }
}

/// Solves one error-equation subdomain problem of `alg` for the given
/// interface datum (either the carried scalar or the trace matched from the
/// other side, depending on which row the algorithm imposes there).
pub fn subdomain_solve(
    alg: AlgorithmId,
    side: Side,
    d: f64,
    p: &ProblemParams,
    datum: f64,
) -> Result<ModalSubdomainSolution> {
    if !datum.is_finite() {
        return Err(CoreError::InvalidInput(format!(
            "interface datum must be finite, got {datum}"
        )));
    }
    let m = ModalTriple::new(d, p)?;
    let coef = solve_coef(alg, side, &m, p, datum);
    Ok(ModalSubdomainSolution {
        side,
        formulation: alg.formulation(),
        eval: ModeFunction::new(basis_kind(alg, side), coef, m, p),
    })
}

/// Iterate state of a single-mode run.
#[derive(Debug, Clone)]
pub struct ModalIterateState {
    /// Current interface transmission value.
    pub f_alpha: f64,
    /// Iteration counter.
    pub k: usize,
    /// All interface values, `history[0]` is the initial guess.
    pub history: Vec<f64>,
}

impl ModalIterateState {
    pub fn new(f0: f64) -> Self {
        Self {
            f_alpha: f0,
            k: 0,
            history: vec![f0],
        }
    }
}

/// Unrelaxed trace produced by one sweep (both subdomain solves) from
/// interface value `f`.
fn sweep_trace(alg: AlgorithmId, d: f64, p: &ProblemParams, f: f64) -> f64 {
    let alpha = p.alpha;
    match alg {
        AlgorithmId::Dn1 => {
            let s1 = subdomain_solve(alg, Side::One, d, p, f).expect("valid mode");
            let s2 = subdomain_solve(alg, Side::Two, d, p, s1.deriv(alpha)).expect("valid mode");
            // updated datum is the Robin trace z' + d z = mu / nu
            p.nu_inv() * reconstruct_pair(&s2, p).mu.value(alpha)
        }
        AlgorithmId::Nd1 => {
            let s2 = subdomain_solve(alg, Side::Two, d, p, f).expect("valid mode");
            let s1 = subdomain_solve(alg, Side::One, d, p, s2.deriv(alpha)).expect("valid mode");
            // updated datum is the Robin trace mu' - d mu = z
            reconstruct_pair(&s1, p).z.value(alpha)
        }
        AlgorithmId::Dn2 => {
            let s1 = subdomain_solve(alg, Side::One, d, p, f).expect("valid mode");
            let s2 = subdomain_solve(alg, Side::Two, d, p, s1.deriv(alpha)).expect("valid mode");
            s2.value(alpha)
        }
        AlgorithmId::Nd2 => {
            let s1 = subdomain_solve(alg, Side::One, d, p, f).expect("valid mode");
            let s2 = subdomain_solve(alg, Side::Two, d, p, s1.value(alpha)).expect("valid mode");
            s2.deriv(alpha)
        }
        AlgorithmId::Dn3 => {
            let s1 = subdomain_solve(alg, Side::One, d, p, f).expect("valid mode");
            let s2 = subdomain_solve(alg, Side::Two, d, p, s1.deriv(alpha)).expect("valid mode");
            s2.value(alpha)
        }
        AlgorithmId::Nd3 => {
            let s1 = subdomain_solve(alg, Side::One, d, p, f).expect("valid mode");
            let s2 = subdomain_solve(alg, Side::Two, d, p, s1.value(alpha)).expect("valid mode");
            s2.deriv(alpha)
        }
    }
}

/// One relaxed interface update: `f <- (1-theta) f + theta * trace`.
pub fn dd_step(
    alg: AlgorithmId,
    d: f64,
    p: &ProblemParams,
    state: &ModalIterateState,
) -> ModalIterateState {
    let trace = sweep_trace(alg, d, p, state.f_alpha);
    let f_next = (1.0 - p.theta) * state.f_alpha + p.theta * trace;
    let mut history = state.history.clone();
    history.push(f_next);
    ModalIterateState {
        f_alpha: f_next,
        k: state.k + 1,
        history,
    }
}

/// Per-mode contraction magnitude: `|f|` after one relaxed update from
/// `f = 1`. Equals the closed-form convergence factor of `alg` at `d`.
pub fn iteration_ratio(alg: AlgorithmId, d: f64, p: &ProblemParams) -> f64 {
    dd_step(alg, d, p, &ModalIterateState::new(1.0))
        .f_alpha
        .abs()
}

/// Outcome of an iterated run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIterations,
    Diverged,
}

/// Growth factor beyond which a run is reported divergent.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Runs the single-mode iteration until `|f| <= tol * |f0|`, divergence, or
/// `k_max` sweeps.
pub fn run_modal_dd(
    alg: AlgorithmId,
    d: f64,
    p: &ProblemParams,
    f0: f64,
    k_max: usize,
    tol: f64,
) -> Result<(ModalIterateState, RunStatus)> {
    if k_max == 0 {
        return Err(CoreError::InvalidInput("k_max must be positive".into()));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(CoreError::InvalidInput(format!(
            "tol must be >= 0, got {tol}"
        )));
    }
    let mut state = ModalIterateState::new(f0);
    let floor = tol * f0.abs();
    let guard = DIVERGENCE_GUARD * f0.abs();
    if state.f_alpha.abs() <= floor {
        return Ok((state, RunStatus::Converged));
    }
    for _ in 0..k_max {
        state = dd_step(alg, d, p, &state);
        if state.f_alpha.abs() <= floor {
            return Ok((state, RunStatus::Converged));
        }
        if state.f_alpha.abs() > guard {
            return Ok((state, RunStatus::Diverged));
        }
    }
    Ok((state, RunStatus::MaxIterations))
}
