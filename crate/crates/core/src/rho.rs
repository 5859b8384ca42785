//! Closed-form convergence factors of the six interface iterations, their
//! zero/infinity limits, upper bounds and optimal relaxation parameters.
//!
//! Each algorithm updates a scalar interface datum per eigenvalue `d` by
//! `f <- (1-theta) f + theta g(d) f`, where `g` is the unrelaxed interface map
//! gain. The per-eigenvalue contraction magnitude is
//! `rho(d) = |(1-theta) + theta g(d)|` and the overall factor is the maximum
//! over the spectrum of the spatial operator.
//!
//! Category I (DN1, ND1) iterates on the state/adjoint pair and has
//! `g = +K` with `0 < K < 1` away from the spectrum ends; Categories II and
//! III iterate on a single trajectory and have `g = -G` with `G > 0`, so the
//! relaxed factor approaches `|1 - 2 theta|` for stiff eigenvalues.

use crate::error::{CoreError, Result};
use crate::hyperbolic::coth;
use crate::hyperbolic::{cosh_scaled, sinh_scaled};
use crate::params::{ModalTriple, ProblemParams};

/// Tag of one of the six interface iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    Dn1,
    Nd1,
    Dn2,
    Nd2,
    Dn3,
    Nd3,
}

/// Which pair of trajectories the iteration runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// State/adjoint pair.
    One,
    /// State only.
    Two,
    /// Adjoint only.
    Three,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 6] = [
        AlgorithmId::Dn1,
        AlgorithmId::Nd1,
        AlgorithmId::Dn2,
        AlgorithmId::Nd2,
        AlgorithmId::Dn3,
        AlgorithmId::Nd3,
    ];

    pub fn category(&self) -> Category {
        match self {
            AlgorithmId::Dn1 | AlgorithmId::Nd1 => Category::One,
            AlgorithmId::Dn2 | AlgorithmId::Nd2 => Category::Two,
            AlgorithmId::Dn3 | AlgorithmId::Nd3 => Category::Three,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmId::Dn1 => "DN1",
            AlgorithmId::Nd1 => "ND1",
            AlgorithmId::Dn2 => "DN2",
            AlgorithmId::Nd2 => "ND2",
            AlgorithmId::Dn3 => "DN3",
            AlgorithmId::Nd3 => "ND3",
        }
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DN1" => Ok(AlgorithmId::Dn1),
            "ND1" => Ok(AlgorithmId::Nd1),
            "DN2" => Ok(AlgorithmId::Dn2),
            "ND2" => Ok(AlgorithmId::Nd2),
            "DN3" => Ok(AlgorithmId::Dn3),
            "ND3" => Ok(AlgorithmId::Nd3),
            other => Err(CoreError::InvalidInput(format!(
                "unknown algorithm `{other}`"
            ))),
        }
    }
}

fn triple(d: f64, p: &ProblemParams) -> ModalTriple {
    ModalTriple::new(d, p).expect("eigenvalue must be finite and >= 0")
}

/// Unrelaxed interface map gain `g(d)` (the update factor at theta = 1).
pub fn update_gain(alg: AlgorithmId, d: f64, p: &ProblemParams) -> f64 {
    let m = triple(d, p);
    match alg {
        AlgorithmId::Dn1 => {
            let (ta, tb) = (m.a.tanh(), m.b.tanh());
            p.nu_inv() * (m.sigma * p.gamma + m.beta * tb)
                / ((m.sigma + m.d * ta) * (m.omega + m.sigma * tb))
        }
        AlgorithmId::Nd1 => {
            let (ca, cb) = (coth(m.a), coth(m.b));
            p.nu_inv() * (m.sigma * p.gamma + m.beta * cb)
                / ((m.sigma + m.d * ca) * (m.omega + m.sigma * cb))
        }
        AlgorithmId::Dn2 => {
            let (ca, cb) = (coth(m.a), coth(m.b));
            -(ca * (m.sigma * cb + m.omega) / (m.sigma + m.omega * cb))
        }
        AlgorithmId::Nd2 => {
            let (ta, tb) = (m.a.tanh(), m.b.tanh());
            -(ta * (m.sigma * tb + m.omega) / (m.sigma + m.omega * tb))
        }
        AlgorithmId::Dn3 => {
            let (ca, cb) = (coth(m.a), coth(m.b));
            -((m.sigma + m.d * ca) / (m.sigma * ca + m.d) * (p.gamma * m.sigma * cb + m.beta)
                / (p.gamma * m.sigma + m.beta * cb))
        }
        AlgorithmId::Nd3 => {
            let (ta, tb) = (m.a.tanh(), m.b.tanh());
            -((m.sigma + m.d * ta) / (m.sigma * ta + m.d) * (p.gamma * m.sigma * tb + m.beta)
                / (p.gamma * m.sigma + m.beta * tb))
        }
    }
}

/// Per-eigenvalue contraction magnitude `|(1-theta) + theta g(d)|`.
pub fn rho(alg: AlgorithmId, d: f64, p: &ProblemParams) -> f64 {
    ((1.0 - p.theta) + p.theta * update_gain(alg, d, p)).abs()
}

pub fn rho_dn1(d: f64, p: &ProblemParams) -> f64 {
    rho(AlgorithmId::Dn1, d, p)
}

pub fn rho_nd1(d: f64, p: &ProblemParams) -> f64 {
    rho(AlgorithmId::Nd1, d, p)
}

pub fn rho_dn2(d: f64, p: &ProblemParams) -> f64 {
    rho(AlgorithmId::Dn2, d, p)
}

pub fn rho_nd2(d: f64, p: &ProblemParams) -> f64 {
    rho(AlgorithmId::Nd2, d, p)
}

pub fn rho_dn3(d: f64, p: &ProblemParams) -> f64 {
    rho(AlgorithmId::Dn3, d, p)
}

pub fn rho_nd3(d: f64, p: &ProblemParams) -> f64 {
    rho(AlgorithmId::Nd3, d, p)
}

/// Positive-signed gain `G0 = -g(0)` of the zero-eigenvalue interface map for
/// the single-trajectory iterations. DN2/ND3 share the coth form, ND2/DN3 the
/// tanh form.
fn zero_frequency_gain(alg: AlgorithmId, p: &ProblemParams) -> f64 {
    let s = p.sigma_zero();
    let a0 = s * p.alpha;
    let b0 = s * (p.t_final - p.alpha);
    let gs = p.gamma * s;
    match alg {
        AlgorithmId::Dn2 | AlgorithmId::Nd3 => {
            1.0 + coth(a0) * (coth(b0) + gs) / (1.0 + gs * coth(b0))
        }
        AlgorithmId::Nd2 | AlgorithmId::Dn3 => {
            1.0 + a0.tanh() * (b0.tanh() + gs) / (1.0 + gs * b0.tanh())
        }
        AlgorithmId::Dn1 | AlgorithmId::Nd1 => unreachable!("pinned at 1 for the pair iteration"),
    }
}

/// Exact limit of `rho` as `d -> 0`. The pair iterations are pinned at 1
/// independently of theta and alpha; the others follow their closed forms.
pub fn rho_at_zero(alg: AlgorithmId, p: &ProblemParams) -> f64 {
    match alg.category() {
        Category::One => 1.0,
        _ => (1.0 - p.theta * zero_frequency_gain(alg, p)).abs(),
    }
}

/// Exact limit of `rho` as `d -> inf`: `|1-theta|` for Category I,
/// `|1-2 theta|` otherwise. Independent of alpha.
pub fn rho_at_infinity(alg: AlgorithmId, theta: f64) -> f64 {
    match alg.category() {
        Category::One => (1.0 - theta).abs(),
        _ => (1.0 - 2.0 * theta).abs(),
    }
}

/// Mesh-independent upper bound for the DN pair iteration at theta = 1:
/// `(1 + gamma*sigma_min) / (nu d_min^2)`.
pub fn bound_dn1(p: &ProblemParams, d_min: f64) -> Result<f64> {
    if d_min.is_nan() || d_min <= 0.0 {
        return Err(CoreError::BoundUndefined(d_min));
    }
    let sigma_min = (d_min * d_min + p.nu_inv()).sqrt();
    Ok((1.0 + p.gamma * sigma_min) / (p.nu * d_min * d_min))
}

/// Upper bound for the ND pair iteration at theta = 1 (requires gamma = 0):
/// `coth(sigma_min (T - alpha)) / (nu (sigma_min + d_min)^2)`.
pub fn bound_nd1(p: &ProblemParams, d_min: f64) -> Result<f64> {
    if p.gamma != 0.0 {
        return Err(CoreError::BoundNotApplicable(p.gamma));
    }
    if d_min < 0.0 {
        return Err(CoreError::BoundUndefined(d_min));
    }
    let sigma_min = (d_min * d_min + p.nu_inv()).sqrt();
    Ok(
        coth(sigma_min * (p.t_final - p.alpha))
            / (p.nu * (sigma_min + d_min) * (sigma_min + d_min)),
    )
}

/// Equioscillation relaxation parameter `2 / (2 + G0)` balancing the zero-
/// and infinite-eigenvalue limits. Provably optimal for gamma = 0; for
/// gamma > 0 it is a heuristic (see [`theta_star_numeric`] for the minimax
/// value). DN3 shares ND2's expression and ND3 shares DN2's.
pub fn theta_star_closed_form(alg: AlgorithmId, p: &ProblemParams) -> Result<f64> {
    match alg {
        AlgorithmId::Dn1 | AlgorithmId::Nd1 => Err(CoreError::NoClosedForm(alg.name().into())),
        AlgorithmId::Dn2 | AlgorithmId::Nd3 => {
            Ok(2.0 / (2.0 + zero_frequency_gain(AlgorithmId::Dn2, p)))
        }
        AlgorithmId::Nd2 | AlgorithmId::Dn3 => {
            Ok(2.0 / (2.0 + zero_frequency_gain(AlgorithmId::Nd2, p)))
        }
    }
}

/// Default stand-in for the infinite-eigenvalue end of the minimax objective.
pub const DEFAULT_D_INF_PROXY: f64 = 1e8;

/// Grid resolution of the coarse theta scan.
const THETA_GRID_STEP: f64 = 1e-3;
/// Width tolerance of the golden-section refinement.
const THETA_REFINE_TOL: f64 = 1e-9;

/// Numerical minimax relaxation parameter over theta in (0, 1]:
/// a 1e-3 grid scan followed by golden-section refinement, deterministic with
/// smallest-theta tie-breaking. Returns `(theta_star, rho_star)`.
///
/// The objective maximizes `rho` over the supplied eigenvalues plus a large
/// proxy for the `d -> inf` end; for the single-trajectory categories the
/// exact `d = 0` limit is also included. For the pair iterations that limit
/// is pinned at 1 for every theta and carries no information, so it is left
/// out of the objective.
pub fn theta_star_numeric(
    alg: AlgorithmId,
    p: &ProblemParams,
    eigenvalues: &[f64],
) -> Result<(f64, f64)> {
    theta_star_numeric_with_proxy(alg, p, eigenvalues, DEFAULT_D_INF_PROXY)
}

/// [`theta_star_numeric`] with an explicit large-eigenvalue proxy.
pub fn theta_star_numeric_with_proxy(
    alg: AlgorithmId,
    p: &ProblemParams,
    eigenvalues: &[f64],
    d_inf_proxy: f64,
) -> Result<(f64, f64)> {
    if eigenvalues.is_empty() {
        return Err(CoreError::InvalidInput("empty eigenvalue list".into()));
    }
    for &d in eigenvalues {
        if !d.is_finite() || d < 0.0 {
            return Err(CoreError::UnsupportedSpectrum(d));
        }
    }
    let include_zero = alg.category() != Category::One;
    let objective = |theta: f64| -> f64 {
        let pt = ProblemParams { theta, ..*p };
        let mut worst = rho(alg, d_inf_proxy, &pt);
        if include_zero {
            worst = worst.max(rho_at_zero(alg, &pt));
        }
        for &d in eigenvalues {
            worst = worst.max(rho(alg, d, &pt));
        }
        worst
    };

    let cells = (1.0 / THETA_GRID_STEP).round() as usize;
    let mut best_theta = THETA_GRID_STEP;
    let mut best_value = objective(best_theta);
    for k in 2..=cells {
        let theta = k as f64 * THETA_GRID_STEP;
        let value = objective(theta);
        if value < best_value {
            best_value = value;
            best_theta = theta;
        }
    }

    let mut lo = (best_theta - THETA_GRID_STEP).max(THETA_GRID_STEP * 1e-3);
    let mut hi = (best_theta + THETA_GRID_STEP).min(1.0);
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while hi - lo > THETA_REFINE_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    let theta_star = 0.5 * (lo + hi);
    let value = objective(theta_star);
    if value <= best_value {
        Ok((theta_star, value))
    } else {
        Ok((best_theta, best_value))
    }
}

/// Dual-route evaluation of the DN pair contraction via the adjoint-only
/// formulation: the same interface map assembled from the scaled adjoint
/// basis coefficients instead of the tanh quotient form.
pub fn rho_dn1_via_mu(d: f64, p: &ProblemParams) -> f64 {
    let m = triple(d, p);
    let (cha, sha) = (cosh_scaled(m.a), sinh_scaled(m.a));
    let (chb, shb) = (cosh_scaled(m.b), sinh_scaled(m.b));
    // Dirichlet row at the interface fixes the scaled inner coefficient.
    let inner = 1.0 / (m.sigma * cha + m.d * sha);
    // Transferring the second-derivative matching row onto the outer
    // subdomain and reading the interface value back yields the gain.
    let gain = inner * p.nu_inv() * cha * (p.gamma * m.sigma * chb + m.beta * shb)
        / (m.omega * chb + m.sigma * shb);
    ((1.0 - p.theta) + p.theta * gain).abs()
}

/// Theoretical per-spectrum summary for one algorithm.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub algorithm: AlgorithmId,
    /// `(d, rho(d))` in the input eigenvalue order.
    pub per_eigenvalue: Vec<(f64, f64)>,
    /// Maximum of the per-eigenvalue factors.
    pub spectral_max: f64,
    /// Limit value at d = 0.
    pub rho_at_zero: f64,
    /// Limit value as d -> inf.
    pub rho_at_infinity: f64,
    pub theta_used: f64,
    /// Upper bound at theta = 1 where one is published (pair iterations only).
    pub bound: Option<f64>,
}

/// Folds the per-eigenvalue factors of `alg` into a spectrum-level report.
pub fn spectral_report(
    alg: AlgorithmId,
    p: &ProblemParams,
    eigenvalues: &[f64],
) -> Result<ConvergenceReport> {
    if eigenvalues.is_empty() {
        return Err(CoreError::InvalidInput("empty eigenvalue list".into()));
    }
    let mut per_eigenvalue = Vec::with_capacity(eigenvalues.len());
    let mut spectral_max = 0.0f64;
    let mut d_min = f64::INFINITY;
    for &d in eigenvalues {
        let r = rho(alg, d, p);
        spectral_max = spectral_max.max(r);
        d_min = d_min.min(d);
        per_eigenvalue.push((d, r));
    }
    let bound = match alg {
        AlgorithmId::Dn1 => bound_dn1(p, d_min).ok(),
        AlgorithmId::Nd1 => bound_nd1(p, d_min).ok(),
        _ => None,
    };
    Ok(ConvergenceReport {
        algorithm: alg,
        per_eigenvalue,
        spectral_max,
        rho_at_zero: rho_at_zero(alg, p),
        rho_at_infinity: rho_at_infinity(alg, p.theta),
        theta_used: p.theta,
        bound,
    })
}
