//! Fully discrete solver checks: monolithic accuracy against closed-form
//! modal solutions, fixed-point behavior of the interface iteration,
//! agreement of the coupled and diagonalized paths, and observed-rate
//! consistency with the theory.

use approx::{assert_abs_diff_eq, assert_relative_eq};
use nalgebra::DVector;
use tdd_core::discrete::{
    self, dd_solve, dd_solve_per_mode, interface_trace, monolithic_solve, observed_rate,
    subdomain_solve_discrete, DiscreteProblem, IterationHistory, RunStatus, Scheme,
};
use tdd_core::modal::{self, Side};
use tdd_core::rho::{self, AlgorithmId};
use tdd_core::spectral::{build_laplacian_1d, SpectralModel};
use tdd_core::ProblemParams;

fn single_mode_problem(d: f64, p: ProblemParams, nt: usize, scheme: Scheme) -> DiscreteProblem {
    let model = SpectralModel::from_eigenvalues(vec![d]).unwrap();
    DiscreteProblem::error_mode(model, p, nt, scheme).unwrap()
}

/// Closed-form solution of the scalar coupled system with y0 = 1, yhat = 0:
/// `z(t) = cosh(sigma t) + c sinh(sigma t)` with the final row fixing `c`.
fn scalar_closed_form(d: f64, p: &ProblemParams) -> impl Fn(f64) -> (f64, f64) + use<'_> {
    let sigma = (d * d + p.nu_inv()).sqrt();
    let omega = p.gamma * p.nu_inv() + d;
    let st = sigma * p.t_final;
    let c = -(sigma * st.sinh() + omega * st.cosh()) / (sigma * st.cosh() + omega * st.sinh());
    move |t: f64| {
        let z = (sigma * t).cosh() + c * (sigma * t).sinh();
        let zdot = sigma * ((sigma * t).sinh() + c * (sigma * t).cosh());
        (z, p.nu * (zdot + d * z))
    }
}

#[test]
fn monolithic_zero_data_gives_zero() {
    let model = build_laplacian_1d(4, 1.0).unwrap();
    let p = ProblemParams::new(0.1, 1.0, 1.0, 0.5, 1.0).unwrap();
    let problem = DiscreteProblem::error_mode(model, p, 20, Scheme::Trapezoidal).unwrap();
    let traj = monolithic_solve(&problem).unwrap();
    for j in 0..=20 {
        assert_abs_diff_eq!(traj.y[j].norm(), 0.0);
        assert_abs_diff_eq!(traj.lambda[j].norm(), 0.0);
    }
}

#[test]
fn monolithic_matches_closed_form_with_scheme_order() {
    let p = ProblemParams::new(1.0, 0.0, 1.0, 0.5, 1.0).unwrap();
    let d = 2.0;
    let exact = scalar_closed_form(d, &p);
    for (scheme, lo, hi) in [
        (Scheme::Trapezoidal, 1.8, 2.3),
        (Scheme::ImplicitEuler, 0.8, 1.3),
    ] {
        let mut errs = Vec::new();
        let nts = [50usize, 100, 200];
        for &nt in &nts {
            let model = SpectralModel::from_eigenvalues(vec![d]).unwrap();
            let y0 = DVector::from_element(1, 1.0);
            let yhat = vec![DVector::zeros(1); nt + 1];
            let problem = DiscreteProblem::new(model, p, nt, y0, yhat, scheme).unwrap();
            let traj = monolithic_solve(&problem).unwrap();
            let mut err = 0.0f64;
            for j in 0..=nt {
                let t = j as f64 * problem.grid.dt;
                let (z, mu) = exact(t);
                err = err.max((traj.y[j][0] - z).abs().max((traj.lambda[j][0] - mu).abs()));
            }
            errs.push(err);
            assert!(discrete::discrete_residual(&problem, &traj) <= 1e-9);
        }
        let order01 = (errs[0] / errs[1]).log2();
        let order12 = (errs[1] / errs[2]).log2();
        for order in [order01, order12] {
            assert!(
                order >= lo && order <= hi,
                "{scheme:?}: observed order {order:.3} outside [{lo}, {hi}] (errors {errs:?})"
            );
        }
    }
}

#[test]
fn final_adjoint_row_is_imposed_exactly() {
    let model = build_laplacian_1d(3, 1.0).unwrap();
    let p = ProblemParams::new(0.2, 3.0, 1.0, 0.5, 1.0).unwrap();
    let nt = 16;
    let y0 = DVector::from_vec(vec![1.0, -0.5, 0.25]);
    let yhat: Vec<DVector<f64>> = (0..=nt)
        .map(|j| DVector::from_element(3, (j as f64).sin()))
        .collect();
    let problem = DiscreteProblem::new(model, p, nt, y0, yhat, Scheme::Trapezoidal).unwrap();
    let traj = monolithic_solve(&problem).unwrap();
    let row = &traj.lambda[nt] + p.gamma * &traj.y[nt] - p.gamma * &problem.yhat[nt];
    assert!(row.norm() <= 1e-10 * (1.0 + traj.lambda[nt].norm()));
}

#[test]
fn subdomain_zero_data_and_imposed_rows() {
    let model = build_laplacian_1d(4, 1.0).unwrap();
    let p = ProblemParams::new(0.1, 0.0, 1.0, 0.5, 1.0).unwrap();
    let problem = DiscreteProblem::error_mode(model, p, 40, Scheme::Trapezoidal).unwrap();
    let zero = DVector::zeros(4);
    let t = subdomain_solve_discrete(&problem, Side::One, AlgorithmId::Dn1, &zero).unwrap();
    for level in &t.y {
        assert_abs_diff_eq!(level.norm(), 0.0);
    }
    // the Dirichlet-type row holds exactly: lambda at the interface equals f
    let f = DVector::from_vec(vec![1.0, 2.0, -1.0, 0.5]);
    let t = subdomain_solve_discrete(&problem, Side::One, AlgorithmId::Dn1, &f).unwrap();
    let m = problem.grid.interface_index;
    assert!((&t.lambda[m] - &f).norm() <= 1e-11 * f.norm());
}

#[test]
fn subdomain_trace_converges_to_the_modal_trace() {
    // Neumann-in, value-out on the inner window: impose y'(alpha) = 1 and
    // read y(alpha); the exact value is tanh(a)/sigma.
    let d = 5.0;
    let p = ProblemParams::new(0.1, 0.0, 1.0, 0.5, 1.0).unwrap();
    let exact = modal::subdomain_solve(AlgorithmId::Nd2, Side::One, d, &p, 1.0)
        .unwrap()
        .value(p.alpha);
    let mut errs = Vec::new();
    let nts = [100usize, 200, 400];
    for &nt in &nts {
        let problem = single_mode_problem(d, p, nt, Scheme::Trapezoidal);
        let f = DVector::from_element(1, 1.0);
        let t = subdomain_solve_discrete(&problem, Side::One, AlgorithmId::Nd2, &f).unwrap();
        let m = problem.grid.interface_index;
        errs.push((t.y[m][0] - exact).abs());
    }
    let order = ((errs[0] / errs[2]).ln() / (4f64).ln()).abs();
    assert!(order >= 1.9, "observed order {order:.3} (errors {errs:?})");
}

#[test]
fn monolithic_trace_is_a_fixed_point_for_every_algorithm() {
    let model = build_laplacian_1d(6, 1.0).unwrap();
    let p = ProblemParams::new(0.1, 2.0, 1.0, 0.5, 1.0).unwrap();
    let nt = 80;
    let n = model.n;
    let y0 = DVector::from_fn(n, |i, _| ((i + 1) as f64 * 0.9).sin());
    let yhat: Vec<DVector<f64>> = (0..=nt)
        .map(|j| DVector::from_element(n, 0.3 * (j as f64 / nt as f64)))
        .collect();
    let problem = DiscreteProblem::new(model, p, nt, y0, yhat, Scheme::Trapezoidal).unwrap();
    let reference = monolithic_solve(&problem).unwrap();
    for alg in AlgorithmId::ALL {
        let f0 = interface_trace(&problem, alg, &reference);
        let (glued, history) =
            dd_solve(&problem, alg, 1.0, &f0, 1, 1e-9, Some(&reference)).unwrap();
        assert_eq!(history.status, RunStatus::Converged, "{alg}");
        assert!(
            history.residual_norms[0] <= 1e-9,
            "{alg}: {}",
            history.residual_norms[0]
        );
        assert!(
            discrete::l2_distance(&problem.grid, &glued, &reference) <= 1e-8,
            "{alg}"
        );
    }
}

#[test]
fn converged_iterations_glue_to_the_monolithic_solution() {
    let model = build_laplacian_1d(8, 1.0).unwrap();
    let p = ProblemParams::new(0.1, 0.0, 1.0, 0.5, 1.0).unwrap();
    let nt = 100;
    let n = model.n;
    let y0 = DVector::from_fn(n, |i, _| 1.0 / (1.0 + i as f64));
    let yhat: Vec<DVector<f64>> = (0..=nt)
        .map(|j| DVector::from_fn(n, |i, _| ((i + j) as f64 * 0.1).cos()))
        .collect();
    let problem = DiscreteProblem::new(model, p, nt, y0, yhat, Scheme::Trapezoidal).unwrap();
    let reference = monolithic_solve(&problem).unwrap();
    let tol = 1e-11;
    let runs = [
        (AlgorithmId::Dn1, 1.0),
        (AlgorithmId::Nd1, 1.0),
        (
            AlgorithmId::Nd2,
            rho::theta_star_closed_form(AlgorithmId::Nd2, &p).unwrap(),
        ),
    ];
    for (alg, theta) in runs {
        let f0 = DVector::zeros(n);
        let (glued, history) =
            dd_solve(&problem, alg, theta, &f0, 500, tol, Some(&reference)).unwrap();
        assert_eq!(history.status, RunStatus::Converged, "{alg}");
        let err = discrete::l2_distance(&problem.grid, &glued, &reference);
        assert!(err <= 10.0 * tol, "{alg}: glued error {err:.3e}");
        // every step/boundary row of the glued trajectory is satisfied too;
        // only the rows straddling the interface see the leftover mismatch
        let row_residual = discrete::discrete_residual(&problem, &glued);
        assert!(
            row_residual <= 10.0 * tol,
            "{alg}: row residual {row_residual:.3e}"
        );
        // error norms shrink monotonically over the tail
        let e = &history.error_norms;
        assert!(e.last().unwrap() < &e[0]);
    }
}

#[test]
fn divergent_setting_is_detected() {
    // growth is driven by the small end of the spectrum, so include one
    let model = SpectralModel::from_eigenvalues(vec![0.01, 1.0, 9.0]).unwrap();
    let p = ProblemParams::new(0.1, 0.0, 1.0, 0.5, 1.0).unwrap();
    let problem = DiscreteProblem::error_mode(model, p, 64, Scheme::Trapezoidal).unwrap();
    let f0 = DVector::from_element(3, 1.0);
    let (_, history) = dd_solve(&problem, AlgorithmId::Dn2, 1.0, &f0, 500, 1e-12, None).unwrap();
    assert_eq!(history.status, RunStatus::Diverged);
    assert!(observed_rate(&history).unwrap() > 1.0);
}

#[test]
fn single_mode_discrete_rate_matches_modal_ratio() {
    let d = 5.0;
    let p = ProblemParams::new(0.1, 0.0, 1.0, 0.5, 1.0).unwrap();
    let exact = modal::iteration_ratio(AlgorithmId::Dn1, d, &p);
    let problem = single_mode_problem(d, p, 400, Scheme::Trapezoidal);
    let f0 = DVector::from_element(1, 1.0);
    let (_, history) = dd_solve(&problem, AlgorithmId::Dn1, 1.0, &f0, 8, 1e-300, None).unwrap();
    let rate = observed_rate(&history).unwrap();
    assert_relative_eq!(rate, exact, max_relative = 1e-6);
}

#[test]
fn coupled_and_diagonalized_runs_agree() {
    let model = build_laplacian_1d(8, 1.0).unwrap();
    let p = ProblemParams::new(0.1, 1.0, 1.0, 0.5, 1.0).unwrap();
    let nt = 64;
    let n = model.n;
    let y0 = DVector::from_fn(n, |i, _| (i as f64 + 0.5).cos());
    let yhat: Vec<DVector<f64>> = (0..=nt)
        .map(|j| DVector::from_fn(n, |i, _| ((2 * i + j) as f64 * 0.05).sin()))
        .collect();
    let problem = DiscreteProblem::new(model, p, nt, y0, yhat, Scheme::Trapezoidal).unwrap();
    let f0 = DVector::from_fn(n, |i, _| 1.0 + i as f64 * 0.1);
    let k = 6;
    let (coupled, hc) = dd_solve(&problem, AlgorithmId::Dn1, 1.0, &f0, k, 1e-300, None).unwrap();
    let (diag, hd) =
        dd_solve_per_mode(&problem, AlgorithmId::Dn1, 1.0, &f0, k, 1e-300, None).unwrap();
    let mut worst = 0.0f64;
    for j in 0..=nt {
        worst = worst.max((&coupled.y[j] - &diag.y[j]).amax());
        worst = worst.max((&coupled.lambda[j] - &diag.lambda[j]).amax());
    }
    assert!(worst <= 1e-8, "trajectory difference {worst:.3e}");
    for (a, b) in hc.residual_norms.iter().zip(hd.residual_norms.iter()) {
        assert_relative_eq!(a, b, max_relative = 1e-8, epsilon = 1e-13);
    }
    // n = 1 degenerates to the coupled path exactly
    let problem1 = single_mode_problem(3.0, p, 40, Scheme::Trapezoidal);
    let f1 = DVector::from_element(1, 1.0);
    let (c1, _) = dd_solve(&problem1, AlgorithmId::Nd2, 0.6, &f1, 4, 1e-300, None).unwrap();
    let (d1, _) =
        dd_solve_per_mode(&problem1, AlgorithmId::Nd2, 0.6, &f1, 4, 1e-300, None).unwrap();
    for j in 0..=40 {
        assert_abs_diff_eq!(c1.y[j][0], d1.y[j][0], epsilon = 1e-12);
    }
}

#[test]
fn per_mode_rates_match_the_per_eigenvalue_factors() {
    let model = build_laplacian_1d(8, 1.0).unwrap();
    let eigenvalues = model.eigenvalues.clone();
    let p_mat = model.p.clone();
    let p = ProblemParams::new(0.1, 0.0, 1.0, 0.5, 1.0).unwrap();
    let problem = DiscreteProblem::error_mode(model, p, 1000, Scheme::Trapezoidal).unwrap();
    // probe with unit weight in every mode (a plain ones vector is orthogonal
    // to half the sine eigenvectors)
    let f0 = &p_mat * DVector::from_element(8, 1.0);
    let (_, history) =
        dd_solve_per_mode(&problem, AlgorithmId::Dn1, 1.0, &f0, 1, 1e-300, None).unwrap();
    let before = p_mat.transpose() * &history.interface_values[0];
    let after = p_mat.transpose() * &history.interface_values[1];
    for (i, &d) in eigenvalues.iter().enumerate() {
        let observed = (after[i] / before[i]).abs();
        let predicted = rho::rho_dn1(d, &p);
        assert!(
            (observed - predicted).abs() <= 0.05 * predicted,
            "mode {i} (d = {d:.3}): observed {observed:.5e}, predicted {predicted:.5e}"
        );
    }
}

#[test]
fn observed_rate_requires_enough_points() {
    let history = IterationHistory {
        interface_values: vec![],
        residual_norms: vec![1.0, 0.1],
        error_norms: vec![],
        status: RunStatus::MaxIterations,
    };
    assert!(observed_rate(&history).is_err());
}
