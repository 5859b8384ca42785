//! `solve`: discrete two-subdomain runs against the monolithic reference,
//! with per-iteration logs and the final glued trajectory.

use std::path::Path;

use anyhow::{anyhow, Result};
use nalgebra::DVector;
use rand::{RngExt, SeedableRng};
use tdd_core::discrete::{dd_solve, monolithic_solve, observed_rate, DiscreteProblem, RunStatus};
use tdd_core::rho;

use crate::config::{InitialGuess, RunConfig};
use crate::csv::{Cell, CsvTable};
use crate::report::Results;

pub fn run(cfg: &RunConfig, out_dir: &Path, seed: u64) -> Result<()> {
    let model = cfg.build_model()?;
    let n = model.n;
    let (y0, yhat) = if cfg.solver.error_mode {
        (
            DVector::zeros(n),
            vec![DVector::zeros(n); cfg.solver.nt + 1],
        )
    } else {
        (
            DVector::from_element(n, 1.0),
            vec![DVector::zeros(n); cfg.solver.nt + 1],
        )
    };
    let problem = DiscreteProblem::new(
        model,
        cfg.params,
        cfg.solver.nt,
        y0,
        yhat,
        cfg.solver.scheme,
    )
    .map_err(|e| anyhow!("{e}"))?;
    if problem.grid.snapped(cfg.params.alpha) {
        log::warn!(
            "interface alpha = {} snapped to the grid point {} (index {})",
            cfg.params.alpha,
            problem.grid.snapped_alpha,
            problem.grid.interface_index
        );
    }

    let f0 = match cfg.solver.f0 {
        InitialGuess::Zero => {
            if cfg.solver.error_mode {
                log::warn!("error mode with a zero initial guess is identically zero; set f0 = random for rate studies");
            }
            DVector::zeros(n)
        }
        InitialGuess::Random => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
        }
    };

    let reference = monolithic_solve(&problem).map_err(|e| anyhow!("{e}"))?;
    let mut results = Results::new("Discrete interface iterations");
    let mut summary = String::from(
        "|algorithm|status|iterations|observed rate|predicted spectral max|\n|---|---|---|---|---|\n",
    );
    for &alg in &cfg.algorithms {
        let (glued, history) = dd_solve(
            &problem,
            alg,
            cfg.params.theta,
            &f0,
            cfg.solver.k_max,
            cfg.solver.tol,
            Some(&reference),
        )
        .map_err(|e| anyhow!("{e}"))?;

        let rate = observed_rate(&history).ok();
        let status = match history.status {
            RunStatus::Converged => "converged",
            RunStatus::Diverged => "diverged",
            // geometric growth past the iteration budget is divergence too
            RunStatus::MaxIterations if rate.is_some_and(|r| r > 1.0) => "diverged",
            RunStatus::MaxIterations => "max-iterations",
        };
        let prediction = rho::spectral_report(alg, &cfg.params, &problem.model.eigenvalues)
            .map_err(|e| anyhow!("{e}"))?
            .spectral_max;

        let mut table = CsvTable::new(&["iteration", "residual", "error"]);
        for (k, residual) in history.residual_norms.iter().enumerate() {
            table.push(vec![
                Cell::Num((k + 1) as f64),
                Cell::Num(*residual),
                history
                    .error_norms
                    .get(k)
                    .map_or(Cell::text("n/a"), |e| Cell::Num(*e)),
            ]);
        }
        table.annotate("status", status);
        match rate {
            Some(r) if status == "diverged" => table.annotate("growth_rate", r),
            Some(r) => table.annotate("observed_rate", r),
            None => table.annotate("observed_rate", "n/a"),
        }
        table.annotate("predicted_spectral_max", prediction);
        table.annotate("theta", cfg.params.theta);
        table.annotate("alpha", problem.grid.snapped_alpha);
        let file = format!("solve_{alg}.csv");
        table.write(&out_dir.join(&file))?;

        let mut traj_header = vec!["t".to_string()];
        traj_header.extend((0..n).map(|i| format!("y_{i}")));
        traj_header.extend((0..n).map(|i| format!("lambda_{i}")));
        let refs: Vec<&str> = traj_header.iter().map(|s| s.as_str()).collect();
        let mut traj = CsvTable::new(&refs);
        for j in 0..=cfg.solver.nt {
            let mut row = vec![Cell::Num(j as f64 * problem.grid.dt)];
            row.extend(glued.y[j].iter().map(|v| Cell::Num(*v)));
            row.extend(glued.lambda[j].iter().map(|v| Cell::Num(*v)));
            traj.push(row);
        }
        traj.write(&out_dir.join(format!("solve_{alg}_trajectory.csv")))?;

        log::info!(
            "{alg}: {status} after {} sweeps",
            history.residual_norms.len()
        );
        summary.push_str(&format!(
            "|{alg}|{status}|{}|{}|{prediction}|\n",
            history.residual_norms.len(),
            rate.map_or_else(|| "n/a".to_string(), |r| r.to_string()),
        ));
    }
    results.section("Runs", summary);
    results.section(
        "Setup",
        format!(
            "n = {}, nt = {}, scheme = {:?}, theta = {}, tol = {:e}, error mode = {}, seed = {seed}.",
            n,
            cfg.solver.nt,
            cfg.solver.scheme,
            cfg.params.theta,
            cfg.solver.tol,
            cfg.solver.error_mode,
        ),
    );
    results.write(out_dir)
}
