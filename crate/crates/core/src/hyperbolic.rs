//! Overflow-safe hyperbolic primitives.
//!
//! Every interface-map formula in this crate is evaluated either through
//! tanh/coth or through the exponentially scaled pair
//! `cosh(x)*exp(-x)`, `sinh(x)*exp(-x)`. Raw cosh/sinh of large arguments is
//! never formed in library code, so eigenvalues up to ~1e12 stay finite.

/// Smallest admissible coth argument. The interface guard of
/// [`crate::ProblemParams`] keeps all analysis arguments above this.
pub const MIN_COTH_ARG: f64 = 1e-12;

/// Hyperbolic cotangent. Arguments below [`MIN_COTH_ARG`] are a contract
/// violation of the caller.
pub fn coth(x: f64) -> f64 {
    assert!(
        x >= MIN_COTH_ARG,
        "coth argument {x:e} below {MIN_COTH_ARG:e}"
    );
    1.0 / x.tanh()
}

/// `cosh(x) * exp(-x)` for x >= 0, in (1/2, 1].
pub fn cosh_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    1.0 + 0.5 * (-2.0 * x).exp_m1()
}

/// `sinh(x) * exp(-x)` for x >= 0, in [0, 1/2). Uses `exp_m1` so small
/// arguments keep full relative accuracy.
pub fn sinh_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    -0.5 * (-2.0 * x).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scaled_pair_matches_naive_in_safe_range() {
        for &x in &[1e-9, 1e-3, 0.5, 1.0, 10.0, 300.0] {
            assert_relative_eq!(cosh_scaled(x), x.cosh() * (-x).exp(), max_relative = 1e-14);
            assert_relative_eq!(sinh_scaled(x), x.sinh() * (-x).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn scaled_pair_saturates_for_large_arguments() {
        assert_eq!(cosh_scaled(1e9), 0.5);
        assert_eq!(sinh_scaled(1e9), 0.5);
    }

    #[test]
    fn coth_consistent_with_scaled_ratio() {
        for &x in &[1e-6, 0.3, 2.0, 40.0] {
            assert_relative_eq!(
                coth(x),
                cosh_scaled(x) / sinh_scaled(x),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    #[should_panic]
    fn coth_rejects_vanishing_argument() {
        coth(1e-13);
    }
}
