//! Scalar problem data and the per-eigenvalue coefficients derived from it.

use crate::error::{CoreError, Result};

/// Default relative guard keeping the interface time away from 0 and T, so
/// that coth arguments stay bounded away from zero.
pub const DEFAULT_ALPHA_GUARD: f64 = 1e-8;

/// The scalar data of the control problem: cost weights, time horizon,
/// interface position and relaxation parameter.
///
/// `theta` is accepted on (0, 2); values outside the canonical range (0, 1]
/// are legal but flagged by [`ProblemParams::theta_is_canonical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    /// Control regularization weight, > 0.
    pub nu: f64,
    /// Final-target weight, >= 0.
    pub gamma: f64,
    /// Final time, > 0.
    pub t_final: f64,
    /// Interface time, strictly inside (0, t_final).
    pub alpha: f64,
    /// Relaxation parameter of the interface update, in (0, 2).
    pub theta: f64,
}

impl ProblemParams {
    pub fn new(nu: f64, gamma: f64, t_final: f64, alpha: f64, theta: f64) -> Result<Self> {
        Self::with_guard(nu, gamma, t_final, alpha, theta, DEFAULT_ALPHA_GUARD)
    }

    /// Like [`ProblemParams::new`] with an explicit relative guard for the
    /// admissible interface window `(guard*T, (1-guard)*T)`.
    pub fn with_guard(
        nu: f64,
        gamma: f64,
        t_final: f64,
        alpha: f64,
        theta: f64,
        guard: f64,
    ) -> Result<Self> {
        fn bad(name: &'static str, message: String) -> CoreError {
            CoreError::InvalidParam { name, message }
        }
        if !nu.is_finite() || nu <= 0.0 {
            return Err(bad("nu", format!("must be finite and > 0, got {nu}")));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(bad(
                "gamma",
                format!("must be finite and >= 0, got {gamma}"),
            ));
        }
        if !t_final.is_finite() || t_final <= 0.0 {
            return Err(bad("T", format!("must be finite and > 0, got {t_final}")));
        }
        if !(0.0..0.5).contains(&guard) {
            return Err(bad(
                "alpha_guard",
                format!("must lie in [0, 0.5), got {guard}"),
            ));
        }
        let lo = guard * t_final;
        let hi = (1.0 - guard) * t_final;
        if !alpha.is_finite() || alpha <= lo || alpha >= hi {
            return Err(bad(
                "alpha",
                format!("must lie strictly inside ({lo:e}, {hi:e}), got {alpha}"),
            ));
        }
        if !theta.is_finite() || theta <= 0.0 || theta >= 2.0 {
            return Err(bad("theta", format!("must lie in (0, 2), got {theta}")));
        }
        Ok(Self {
            nu,
            gamma,
            t_final,
            alpha,
            theta,
        })
    }

    /// Same data with a different relaxation parameter.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.nu, self.gamma, self.t_final, self.alpha, theta)
    }

    pub fn nu_inv(&self) -> f64 {
        1.0 / self.nu
    }

    /// sqrt(1/nu), the interface frequency of the zero eigenvalue.
    pub fn sigma_zero(&self) -> f64 {
        self.nu_inv().sqrt()
    }

    /// True when theta lies in the canonical range (0, 1].
    pub fn theta_is_canonical(&self) -> bool {
        self.theta > 0.0 && self.theta <= 1.0
    }
}

/// Per-eigenvalue derived coefficients:
/// `sigma = sqrt(d^2 + 1/nu)`, `omega = gamma/nu + d`, `beta = 1 - gamma*d`,
/// and the interface arguments `a = sigma*alpha`, `b = sigma*(T - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalTriple {
    pub d: f64,
    pub sigma: f64,
    pub omega: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

impl ModalTriple {
    pub fn new(d: f64, params: &ProblemParams) -> Result<Self> {
        if !d.is_finite() {
            return Err(CoreError::InvalidInput(format!(
                "eigenvalue must be finite, got {d}"
            )));
        }
        if d < 0.0 {
            return Err(CoreError::UnsupportedSpectrum(d));
        }
        let sigma = (d * d + params.nu_inv()).sqrt();
        Ok(Self {
            d,
            sigma,
            omega: params.gamma * params.nu_inv() + d,
            beta: 1.0 - params.gamma * d,
            a: sigma * params.alpha,
            b: sigma * (params.t_final - params.alpha),
        })
    }
}

/// Derived coefficients for one eigenvalue of the spatial operator.
pub fn modal_coefficients(d: f64, params: &ProblemParams) -> Result<ModalTriple> {
    ModalTriple::new(d, params)
}
