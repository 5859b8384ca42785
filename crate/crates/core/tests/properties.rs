//! Contraction, divergence, monotonicity and symmetry properties of the six
//! convergence factors, quantified over parameter grids.
//!
//! At theta = 1 the single-trajectory factors straddle 1 by margins of order
//! `exp(-2 sigma min(alpha, T-alpha))`; once an interface argument saturates
//! tanh in double precision the margin collapses onto 1 exactly, so strict
//! comparisons are asserted below saturation and a 1e-12 slack above.

use tdd_core::rho::{self, AlgorithmId};
use tdd_core::spectral::build_laplacian_1d;
use tdd_core::verify;
use tdd_core::{modal_coefficients, ProblemParams};

const SAT: f64 = 15.0;

fn d_grid() -> Vec<f64> {
    (0..57)
        .map(|k| 10f64.powf(-6.0 + 14.0 * k as f64 / 56.0))
        .collect()
}

fn nu_grid() -> [f64; 4] {
    [1e-4, 1e-2, 1.0, 1e2]
}

fn alpha_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// Smallest interface argument of the mode: controls how much of the strict
/// margin survives in double precision.
fn min_arg(d: f64, p: &ProblemParams) -> f64 {
    let m = modal_coefficients(d, p).unwrap();
    m.a.min(m.b)
}

/// Leading-order distance of the single-trajectory factors from 1 at
/// theta = 1, gamma = 0; strictness is only asserted while this stays
/// representable in double precision.
fn split_margin(d: f64, p: &ProblemParams, adjoint_family: bool) -> f64 {
    let m = modal_coefficients(d, p).unwrap();
    let r = (m.sigma - m.d) / (m.sigma + m.d);
    let (x, y) = ((-2.0 * m.a).exp(), (-2.0 * m.b).exp());
    if adjoint_family {
        2.0 * (y + x * r)
    } else {
        2.0 * (x + y * r)
    }
}

const MARGIN_FLOOR: f64 = 1e-13;

fn assert_above_one(r: f64, strict: bool, context: &str) {
    if strict {
        assert!(r > 1.0, "{context}: {r}");
    } else {
        assert!(r >= 1.0 - 1e-12, "{context}: {r}");
    }
}

fn assert_below_one(r: f64, strict: bool, context: &str) {
    if strict {
        assert!(r < 1.0, "{context}: {r}");
    } else {
        assert!(r <= 1.0 + 1e-12, "{context}: {r}");
    }
}

#[test]
fn dn_pair_contracts_for_positive_eigenvalues() {
    for nu in nu_grid() {
        for gamma in [0.0, 1.0, 10.0] {
            for alpha in alpha_grid() {
                let p = ProblemParams::new(nu, gamma, 1.0, alpha, 1.0).unwrap();
                for d in d_grid() {
                    let r = rho::rho_dn1(d, &p);
                    assert!(
                        r > 0.0 && r < 1.0,
                        "rho_dn1({d:.2e}) = {r} at nu={nu}, gamma={gamma}, alpha={alpha}"
                    );
                }
            }
        }
    }
}

#[test]
fn dn_pair_factor_decreases_in_theta() {
    for nu in [1e-2, 0.1, 1.0] {
        for gamma in [0.0, 10.0] {
            for d in [1e-3, 1.0, 50.0] {
                let thetas: Vec<f64> = (1..=19).map(|k| k as f64 / 20.0).collect();
                let mut prev = f64::INFINITY;
                for theta in thetas {
                    let p = ProblemParams::new(nu, gamma, 1.0, 0.4, theta).unwrap();
                    let r = rho::rho_dn1(d, &p);
                    assert!(r < prev, "not strictly decreasing at theta={theta}, d={d}");
                    prev = r;
                }
            }
        }
    }
}

#[test]
fn nd_pair_contracts_without_final_weight() {
    for nu in nu_grid() {
        for alpha in alpha_grid() {
            let p = ProblemParams::new(nu, 0.0, 1.0, alpha, 1.0).unwrap();
            for d in d_grid() {
                let r = rho::rho_nd1(d, &p);
                assert!(
                    r > 0.0 && r < 1.0,
                    "rho_nd1({d:.2e}) = {r} at nu={nu}, alpha={alpha}"
                );
            }
        }
    }
}

#[test]
fn state_dn_diverges_for_early_interface_and_without_final_weight() {
    // alpha <= T/2, any gamma
    for nu in nu_grid() {
        for gamma in [0.0, 1.0, 10.0] {
            for alpha in [0.1, 0.3, 0.5] {
                let p = ProblemParams::new(nu, gamma, 1.0, alpha, 1.0).unwrap();
                assert_above_one(
                    rho::rho_at_zero(AlgorithmId::Dn2, &p),
                    split_margin(0.0, &p, false) >= MARGIN_FLOOR,
                    "zero-mode dn2",
                );
                for d in d_grid() {
                    let r = rho::rho_dn2(d, &p);
                    let ctx = format!("rho_dn2({d:.2e}) at nu={nu}, gamma={gamma}, alpha={alpha}");
                    assert_above_one(r, split_margin(d, &p, false) >= MARGIN_FLOOR, &ctx);
                }
            }
        }
    }
    // gamma = 0, any alpha
    for nu in nu_grid() {
        for alpha in alpha_grid() {
            let p = ProblemParams::new(nu, 0.0, 1.0, alpha, 1.0).unwrap();
            for d in d_grid() {
                let r = rho::rho_dn2(d, &p);
                let ctx = format!("rho_dn2({d:.2e}) at nu={nu}, alpha={alpha}");
                assert_above_one(r, split_margin(d, &p, false) >= MARGIN_FLOOR, &ctx);
            }
        }
    }
}

#[test]
fn state_nd_contracts_for_early_interface_and_without_final_weight() {
    for nu in nu_grid() {
        for gamma in [0.0, 1.0, 10.0] {
            for alpha in [0.1, 0.3, 0.5] {
                let p = ProblemParams::new(nu, gamma, 1.0, alpha, 1.0).unwrap();
                assert_below_one(
                    rho::rho_at_zero(AlgorithmId::Nd2, &p),
                    split_margin(0.0, &p, false) >= MARGIN_FLOOR,
                    "zero-mode nd2",
                );
                for d in d_grid() {
                    let r = rho::rho_nd2(d, &p);
                    let ctx = format!("rho_nd2({d:.2e}) at nu={nu}, gamma={gamma}, alpha={alpha}");
                    assert_below_one(r, split_margin(d, &p, false) >= MARGIN_FLOOR, &ctx);
                }
            }
        }
    }
    for nu in nu_grid() {
        for alpha in alpha_grid() {
            let p = ProblemParams::new(nu, 0.0, 1.0, alpha, 1.0).unwrap();
            for d in d_grid() {
                let r = rho::rho_nd2(d, &p);
                let ctx = format!("rho_nd2({d:.2e}) at nu={nu}, alpha={alpha}");
                assert_below_one(r, split_margin(d, &p, false) >= MARGIN_FLOOR, &ctx);
            }
        }
    }
}

#[test]
fn adjoint_pairs_split_without_final_weight() {
    for nu in nu_grid() {
        for alpha in alpha_grid() {
            let p = ProblemParams::new(nu, 0.0, 1.0, alpha, 1.0).unwrap();
            for d in d_grid() {
                let strict = split_margin(d, &p, true) >= MARGIN_FLOOR;
                let ctx = format!("d={d:.2e} at nu={nu}, alpha={alpha}");
                assert_below_one(rho::rho_dn3(d, &p), strict, &format!("rho_dn3 {ctx}"));
                assert_above_one(rho::rho_nd3(d, &p), strict, &format!("rho_nd3 {ctx}"));
            }
        }
    }
}

#[test]
fn pair_bounds_dominate_laplacian_spectra() {
    for n in [8usize, 16, 32] {
        let model = build_laplacian_1d(n, 1.0).unwrap();
        for nu in [0.1, 1.0] {
            for gamma in [0.0, 10.0] {
                let p = ProblemParams::new(nu, gamma, 1.0, 0.4, 1.0).unwrap();
                let bound = rho::bound_dn1(&p, model.d_min()).unwrap();
                for &d in &model.eigenvalues {
                    assert!(
                        rho::rho_dn1(d, &p) <= bound,
                        "n={n}, nu={nu}, gamma={gamma}, d={d}"
                    );
                }
            }
            let p = ProblemParams::new(nu, 0.0, 1.0, 0.4, 1.0).unwrap();
            let bound = rho::bound_nd1(&p, model.d_min()).unwrap();
            for &d in &model.eigenvalues {
                assert!(rho::rho_nd1(d, &p) <= bound, "n={n}, nu={nu}, d={d}");
            }
        }
    }
}

#[test]
fn state_factors_are_monotone_in_the_eigenvalue_without_final_weight() {
    for nu in [1e-2, 0.1, 1.0] {
        for alpha in [0.2, 0.5, 0.7] {
            let p = ProblemParams::new(nu, 0.0, 1.0, alpha, 1.0).unwrap();
            let mut prev_dn2 = f64::INFINITY;
            let mut prev_nd2 = 0.0f64;
            for d in d_grid() {
                if min_arg(d, &p) > SAT {
                    break;
                }
                let dn2 = rho::rho_dn2(d, &p);
                let nd2 = rho::rho_nd2(d, &p);
                assert!(
                    dn2 <= prev_dn2 * (1.0 + 1e-13),
                    "dn2 not non-increasing at d={d}"
                );
                assert!(
                    nd2 >= prev_nd2 * (1.0 - 1e-13),
                    "nd2 not non-decreasing at d={d}"
                );
                prev_dn2 = dn2;
                prev_nd2 = nd2;
            }
        }
    }
}

#[test]
fn exchange_and_coincidence_symmetries() {
    let r = verify::symmetry_check(1e-12);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn limits_are_consistent() {
    let r = verify::limit_consistency_check(1e-5);
    assert!(r.passed, "{}", r.detail);
}

#[test]
fn adjoint_route_reproduces_the_state_route() {
    let r = verify::adjoint_route_check(1, 400, 1e-12);
    assert!(r.passed, "{}", r.detail);
    // and across the deterministic grid
    for nu in nu_grid() {
        for gamma in [0.0, 1.0, 10.0] {
            for alpha in [0.1, 0.5, 0.9] {
                let p = ProblemParams::new(nu, gamma, 1.0, alpha, 0.8).unwrap();
                for d in d_grid() {
                    let a = rho::rho_dn1_via_mu(d, &p);
                    let b = rho::rho_dn1(d, &p);
                    assert!(
                        (a - b).abs() <= 1e-12 * b.abs().max(1e-300),
                        "mismatch at d={d:.2e}, nu={nu}, gamma={gamma}, alpha={alpha}: {a} vs {b}"
                    );
                }
            }
        }
    }
}

#[test]
fn relaxation_brackets_hold() {
    let r = verify::relaxation_bracket_check();
    assert!(r.passed, "{}", r.detail);
}
