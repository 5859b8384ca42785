//! End-to-end self checks: quoted-value reproduction, oracle equivalence of
//! the closed forms against exact single-mode runs, structural identities and
//! a discrete fixed-point test. The command line's `verify` subcommand and
//! the acceptance suite both drive these.

use nalgebra::DVector;

use crate::discrete::{self, DiscreteProblem, Scheme};
use crate::modal;
use crate::params::ProblemParams;
use crate::rho::{self, AlgorithmId};
use crate::spectral;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

/// Deterministic 64-bit generator (splitmix) so the randomized suites are
/// reproducible without external dependencies.
#[derive(Debug, Clone)]
pub struct DeterministicRng {
    state: u64,
}

impl DeterministicRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

/// A random admissible parameter tuple for the oracle-equivalence suite.
pub fn random_tuple(rng: &mut DeterministicRng) -> (f64, ProblemParams) {
    let d = if rng.unit() < 0.05 {
        0.0
    } else {
        10f64.powf(rng.range(-6.0, 6.0))
    };
    let nu = 10f64.powf(rng.range(-4.0, 2.0));
    let gamma = [0.0, 1.0, 10.0][(rng.next_u64() % 3) as usize];
    let alpha = rng.range(0.1, 0.9);
    let theta = 1e-3 + (1.0 - 1e-3) * rng.unit();
    (d, ProblemParams::new(nu, gamma, 1.0, alpha, theta).unwrap())
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Quoted zero-frequency convergence-factor values at theta = 1, nu = 0.1,
/// T = 1: `(gamma, alpha, DN2/ND3 value, ND2/DN3 value)`.
pub const QUOTED_ZERO_MODE_VALUES: [(f64, f64, f64, f64); 4] = [
    (0.0, 0.5, 1.185, 0.844),
    (10.0, 0.5, 1.005, 0.995),
    (0.0, 0.3, 1.386, 0.722),
    (10.0, 0.7, 0.771, 1.296),
];

/// Reproduction of the quoted zero-frequency values.
pub fn figure_value_check(tolerance: f64) -> CheckResult {
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for &(gamma, alpha, coth_pair, tanh_pair) in &QUOTED_ZERO_MODE_VALUES {
        let p = ProblemParams::new(0.1, gamma, 1.0, alpha, 1.0).unwrap();
        for (alg, quoted) in [
            (AlgorithmId::Dn2, coth_pair),
            (AlgorithmId::Nd3, coth_pair),
            (AlgorithmId::Nd2, tanh_pair),
            (AlgorithmId::Dn3, tanh_pair),
        ] {
            let got = rho::rho_at_zero(alg, &p);
            let err = (got - quoted).abs();
            worst = worst.max(err);
            if err > tolerance {
                detail.push_str(&format!(
                    "{alg} at gamma={gamma}, alpha={alpha}: {got:.6} vs quoted {quoted}; "
                ));
            }
        }
    }
    CheckResult::new(
        "figure-values",
        worst <= tolerance,
        if detail.is_empty() {
            format!("worst deviation {worst:.2e} (tolerance {tolerance:.1e})")
        } else {
            detail
        },
    )
}

/// Exact single-mode runs reproduce every closed-form factor to `tolerance`
/// relative over `count` seeded tuples per algorithm.
pub fn oracle_equivalence_check(seed: u64, count: usize, tolerance: f64) -> CheckResult {
    let mut rng = DeterministicRng::new(seed);
    let mut worst = 0.0f64;
    let mut worst_case = String::new();
    for alg in AlgorithmId::ALL {
        for _ in 0..count {
            let (d, p) = random_tuple(&mut rng);
            let predicted = rho::rho(alg, d, &p);
            let observed = modal::iteration_ratio(alg, d, &p);
            let err = rel_err(observed, predicted);
            if err > worst {
                worst = err;
                worst_case = format!(
                    "{alg} d={d:.3e} nu={:.3e} gamma={} alpha={:.3} theta={:.3}",
                    p.nu, p.gamma, p.alpha, p.theta
                );
            }
        }
    }
    CheckResult::new(
        "oracle-equivalence",
        worst <= tolerance,
        format!("worst relative deviation {worst:.2e} at {worst_case}"),
    )
}

/// The adjoint-route evaluation of the DN pair factor agrees with the state
/// route to `tolerance` relative.
pub fn adjoint_route_check(seed: u64, count: usize, tolerance: f64) -> CheckResult {
    let mut rng = DeterministicRng::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let (d, p) = random_tuple(&mut rng);
        worst = worst.max(rel_err(rho::rho_dn1_via_mu(d, &p), rho::rho_dn1(d, &p)));
    }
    CheckResult::new(
        "adjoint-route-equivalence",
        worst <= tolerance,
        format!("worst relative deviation {worst:.2e}"),
    )
}

/// Closed-form factors approach their analytic limits at d = 1e-9 and d = 1e8.
/// Deviations are measured against `max(1, |limit|)`: at extreme corners the
/// zero-mode factor itself reaches ~1e3 and its exact variation over
/// [0, 1e-9] already exceeds any absolute 1e-5 budget.
pub fn limit_consistency_check(tolerance: f64) -> CheckResult {
    let mut worst = 0.0f64;
    for &nu in &[1e-4, 1e-2, 1.0, 1e2] {
        for &gamma in &[0.0, 1.0, 10.0] {
            for &alpha in &[0.1, 0.5, 0.9] {
                for &theta in &[0.3, 1.0] {
                    let p = ProblemParams::new(nu, gamma, 1.0, alpha, theta).unwrap();
                    for alg in AlgorithmId::ALL {
                        let zero = rho::rho_at_zero(alg, &p);
                        let inf = rho::rho_at_infinity(alg, theta);
                        worst =
                            worst.max((rho::rho(alg, 1e-9, &p) - zero).abs() / zero.abs().max(1.0));
                        worst =
                            worst.max((rho::rho(alg, 1e8, &p) - inf).abs() / inf.abs().max(1.0));
                    }
                }
            }
        }
    }
    CheckResult::new(
        "limit-consistency",
        worst <= tolerance,
        format!("worst scaled deviation {worst:.2e} (tolerance {tolerance:.1e})"),
    )
}

/// Interface-exchange symmetries at gamma = 0 and the coincidences of the
/// symmetric decomposition.
pub fn symmetry_check(tolerance: f64) -> CheckResult {
    let mut worst = 0.0f64;
    let ds: Vec<f64> = (0..40)
        .map(|k| 10f64.powf(-3.0 + 7.0 * k as f64 / 39.0))
        .collect();
    for &nu in &[1e-2, 0.1, 1.0] {
        for &alpha in &[0.2, 0.35, 0.5, 0.65] {
            for &theta in &[0.4, 1.0] {
                let p = ProblemParams::new(nu, 0.0, 1.0, alpha, theta).unwrap();
                let q = ProblemParams::new(nu, 0.0, 1.0, 1.0 - alpha, theta).unwrap();
                for &d in &ds {
                    worst = worst.max(rel_err(rho::rho_nd3(d, &q), rho::rho_dn2(d, &p)));
                    worst = worst.max(rel_err(rho::rho_dn3(d, &q), rho::rho_nd2(d, &p)));
                }
            }
        }
    }
    let p = ProblemParams::new(0.1, 0.0, 1.0, 0.5, 0.7).unwrap();
    for &d in &ds {
        worst = worst.max(rel_err(rho::rho_nd1(d, &p), rho::rho_dn1(d, &p)));
        worst = worst.max(rel_err(rho::rho_nd3(d, &p), rho::rho_dn2(d, &p)));
        worst = worst.max(rel_err(rho::rho_dn3(d, &p), rho::rho_nd2(d, &p)));
    }
    CheckResult::new(
        "exchange-symmetry",
        worst <= tolerance,
        format!("worst relative deviation {worst:.2e}"),
    )
}

/// Closed-form relaxation optima stay in their proven brackets and the
/// numerical minimax reproduces them when no final-target weight is present.
pub fn relaxation_bracket_check() -> CheckResult {
    let grid: Vec<f64> = (0..60)
        .map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 59.0))
        .collect();
    let mut failures = String::new();
    for &nu in &[1e-2, 1e-1, 1.0, 10.0] {
        for k in 1..=9usize {
            let alpha = k as f64 / 10.0;
            let p = ProblemParams::new(nu, 0.0, 1.0, alpha, 1.0).unwrap();
            let dn2 = rho::theta_star_closed_form(AlgorithmId::Dn2, &p).unwrap();
            let nd2 = rho::theta_star_closed_form(AlgorithmId::Nd2, &p).unwrap();
            if dn2 >= 0.5 || dn2.is_nan() {
                failures.push_str(&format!("DN2 bracket at nu={nu}, alpha={alpha}; "));
            }
            if !(nd2 > 0.5 && nd2 < 2.0 / 3.0) {
                failures.push_str(&format!("ND2 bracket at nu={nu}, alpha={alpha}; "));
            }
            for (alg, closed) in [(AlgorithmId::Dn2, dn2), (AlgorithmId::Nd2, nd2)] {
                let (numeric, _) = rho::theta_star_numeric(alg, &p, &grid).unwrap();
                if (numeric - closed).abs() > 1e-3 {
                    failures.push_str(&format!(
                        "{alg} numeric {numeric:.5} vs closed {closed:.5} at nu={nu}, alpha={alpha}; "
                    ));
                }
            }
        }
    }
    CheckResult::new(
        "relaxation-brackets",
        failures.is_empty(),
        if failures.is_empty() {
            "all brackets hold".into()
        } else {
            failures
        },
    )
}

/// The monolithic interface trace is a fixed point of the discrete iteration.
pub fn discrete_fixed_point_check() -> CheckResult {
    let model = spectral::build_laplacian_1d(6, 1.0).unwrap();
    let params = ProblemParams::new(0.1, 2.0, 1.0, 0.5, 1.0).unwrap();
    let nt = 64;
    let n = model.n;
    let y0 = DVector::from_fn(n, |i, _| (1.0 + i as f64).sin());
    let yhat: Vec<DVector<f64>> = (0..=nt)
        .map(|j| DVector::from_element(n, (j as f64 / nt as f64).cos()))
        .collect();
    let problem = DiscreteProblem::new(model, params, nt, y0, yhat, Scheme::Trapezoidal).unwrap();
    let reference = match discrete::monolithic_solve(&problem) {
        Ok(r) => r,
        Err(e) => return CheckResult::new("discrete-fixed-point", false, format!("{e}")),
    };
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for alg in AlgorithmId::ALL {
        let f0 = discrete::interface_trace(&problem, alg, &reference);
        match discrete::dd_solve(&problem, alg, 1.0, &f0, 1, 1e-9, Some(&reference)) {
            Ok((_, history)) => {
                let r = history.residual_norms[0];
                worst = worst.max(r);
                if r > 1e-9 {
                    detail.push_str(&format!("{alg}: residual {r:.2e}; "));
                }
            }
            Err(e) => return CheckResult::new("discrete-fixed-point", false, format!("{e}")),
        }
    }
    CheckResult::new(
        "discrete-fixed-point",
        worst <= 1e-9,
        if detail.is_empty() {
            format!("worst one-sweep residual {worst:.2e}")
        } else {
            detail
        },
    )
}

/// Convergence/divergence classification of the configured setting by the
/// proven special cases, confirmed against the exact single-mode ratio.
pub fn regime_check(p: &ProblemParams, algorithms: &[AlgorithmId]) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let symmetric_or_earlier = p.alpha <= 0.5 * p.t_final;
    // stop before tanh saturation, where ratios straddling 1 collapse onto it
    let ds: Vec<f64> = (0..30)
        .map(|k| 10f64.powf(-3.0 + 4.0 * k as f64 / 29.0))
        .collect();
    for &alg in algorithms {
        if p.theta != 1.0 {
            continue;
        }
        let expectation = match alg {
            AlgorithmId::Dn2 if symmetric_or_earlier || p.gamma == 0.0 => Some(false),
            AlgorithmId::Nd2 if symmetric_or_earlier || p.gamma == 0.0 => Some(true),
            AlgorithmId::Dn3 if p.gamma == 0.0 => Some(true),
            AlgorithmId::Nd3 if p.gamma == 0.0 => Some(false),
            AlgorithmId::Dn1 => Some(true),
            AlgorithmId::Nd1 if p.gamma == 0.0 => Some(true),
            _ => None,
        };
        let Some(expect_contract) = expectation else {
            continue;
        };
        let mut max_ratio = 0.0f64;
        for &d in &ds {
            max_ratio = max_ratio.max(modal::iteration_ratio(alg, d, p));
        }
        let contracts = max_ratio < 1.0;
        let passed = contracts == expect_contract;
        out.push(CheckResult::new(
            &format!("regime-{alg}"),
            passed,
            format!(
                "expected {} for d > 0, observed max single-mode ratio {max_ratio:.4}{}",
                if expect_contract {
                    "contraction"
                } else {
                    "divergence"
                },
                if passed {
                    " (expected and confirmed)"
                } else {
                    ""
                },
            ),
        ));
    }
    out
}

/// The default verification battery.
pub fn run_standard_checks(seed: u64) -> Vec<CheckResult> {
    vec![
        figure_value_check(5e-4),
        oracle_equivalence_check(seed, 200, 1e-10),
        adjoint_route_check(seed.wrapping_add(1), 400, 1e-12),
        limit_consistency_check(1e-5),
        symmetry_check(1e-12),
        relaxation_bracket_check(),
        discrete_fixed_point_check(),
    ]
}
