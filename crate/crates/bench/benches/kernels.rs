use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use tdd_bench::{laplacian_problem, reference_params, sweep_grid};
use tdd_core::discrete::{dd_solve, monolithic_solve};
use tdd_core::modal;
use tdd_core::rho::{self, AlgorithmId};

fn factor_sweep(c: &mut Criterion) {
    let p = reference_params();
    let grid = sweep_grid(400);
    c.bench_function("rho_sweep_400x6", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for alg in AlgorithmId::ALL {
                for &d in &grid {
                    acc += rho::rho(alg, black_box(d), &p);
                }
            }
            acc
        })
    });
    c.bench_function("modal_ratio_sweep_400x6", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for alg in AlgorithmId::ALL {
                for &d in &grid {
                    acc += modal::iteration_ratio(alg, black_box(d), &p);
                }
            }
            acc
        })
    });
}

fn relaxation_search(c: &mut Criterion) {
    let p = reference_params();
    let grid = sweep_grid(100);
    c.bench_function("theta_star_numeric_dn2", |b| {
        b.iter(|| rho::theta_star_numeric(AlgorithmId::Dn2, &p, black_box(&grid)).unwrap())
    });
}

fn discrete_solvers(c: &mut Criterion) {
    let (problem, f0) = laplacian_problem(8, 200);
    c.bench_function("monolithic_n8_nt200", |b| {
        b.iter(|| monolithic_solve(black_box(&problem)).unwrap())
    });
    c.bench_function("dd_solve_dn1_n8_nt200", |b| {
        b.iter(|| {
            dd_solve(
                black_box(&problem),
                AlgorithmId::Dn1,
                1.0,
                &f0,
                8,
                1e-300,
                None,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, factor_sweep, relaxation_search, discrete_solvers);
criterion_main!(benches);
