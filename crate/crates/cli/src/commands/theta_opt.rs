//! `theta-opt`: closed-form and numerical minimax relaxation parameters per
//! algorithm, with their discrepancy.

use std::path::Path;

use anyhow::Result;
use rayon::prelude::*;
use tdd_core::rho::{self, AlgorithmId, Category};

use crate::config::RunConfig;
use crate::csv::{Cell, CsvTable};
use crate::report::Results;

pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    // minimax over the sweep grid plus the configured spectrum
    let mut eigenvalues = cfg.d_grid();
    if let Ok(model) = cfg.build_model() {
        eigenvalues.extend_from_slice(&model.eigenvalues);
    }

    let rows: Vec<(AlgorithmId, Option<f64>, &'static str, f64, f64)> = cfg
        .algorithms
        .par_iter()
        .map(|&alg| {
            let closed = rho::theta_star_closed_form(alg, &cfg.params).ok();
            let status = match (alg.category(), cfg.params.gamma == 0.0) {
                (Category::One, _) => "n/a",
                (_, true) => "exact",
                (_, false) => "heuristic",
            };
            let (theta_numeric, rho_minimax) = rho::theta_star_numeric_with_proxy(
                alg,
                &cfg.params,
                &eigenvalues,
                cfg.sweep.d_inf_proxy,
            )
            .expect("nonempty eigenvalue list");
            (alg, closed, status, theta_numeric, rho_minimax)
        })
        .collect();

    let mut table = CsvTable::new(&[
        "algorithm",
        "theta_closed_form",
        "closed_form_status",
        "theta_numeric",
        "rho_minimax",
        "discrepancy",
    ]);
    let mut body = String::from(
        "|algorithm|closed form|status|numeric|rho minimax|discrepancy|\n|---|---|---|---|---|---|\n",
    );
    for (alg, closed, status, theta_numeric, rho_minimax) in rows {
        let closed_cell = closed.map_or(Cell::text("n/a"), Cell::Num);
        let disc_cell = closed.map_or(Cell::text("n/a"), |c| Cell::Num((c - theta_numeric).abs()));
        body.push_str(&format!(
            "|{alg}|{closed_cell}|{status}|{theta_numeric}|{rho_minimax}|{disc_cell}|\n"
        ));
        table.push(vec![
            Cell::text(alg.name()),
            closed_cell,
            Cell::text(status),
            Cell::Num(theta_numeric),
            Cell::Num(rho_minimax),
            disc_cell,
        ]);
    }
    table.annotate("d_inf_proxy", cfg.sweep.d_inf_proxy);
    table.write(&out_dir.join("theta_opt.csv"))?;
    log::info!("wrote theta_opt.csv");

    let mut results = Results::new("Optimal relaxation parameters");
    results.section("Summary", body);
    results.section(
        "Method",
        format!(
            "Numeric values minimize the spectral maximum over {} grid eigenvalues plus \
             the d = 0 and d = {} ends (grid scan at 1e-3 then golden-section to 1e-9). \
             Closed forms marked `heuristic` equioscillate the spectrum ends but are only \
             proven optimal without a final-target weight.",
            eigenvalues.len(),
            cfg.sweep.d_inf_proxy
        ),
    );
    results.write(out_dir)
}
