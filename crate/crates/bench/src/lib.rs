//! Shared fixtures for the kernel benchmarks.

use nalgebra::DVector;
use tdd_core::discrete::{DiscreteProblem, Scheme};
use tdd_core::spectral::build_laplacian_1d;
use tdd_core::ProblemParams;

pub fn reference_params() -> ProblemParams {
    ProblemParams::new(0.1, 0.0, 1.0, 0.5, 1.0).unwrap()
}

pub fn sweep_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / (count - 1) as f64))
        .collect()
}

pub fn laplacian_problem(n: usize, nt: usize) -> (DiscreteProblem, DVector<f64>) {
    let model = build_laplacian_1d(n, 1.0).unwrap();
    let f0 = &model.p * DVector::from_element(n, 1.0);
    let problem =
        DiscreteProblem::error_mode(model, reference_params(), nt, Scheme::Trapezoidal).unwrap();
    (problem, f0)
}
