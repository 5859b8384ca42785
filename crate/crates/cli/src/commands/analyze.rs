//! `analyze`: convergence-factor sweep over a log-spaced eigenvalue grid,
//! one column per algorithm, with the d = 0 and d = inf limit rows appended.

use std::path::Path;

use anyhow::Result;
use rayon::prelude::*;
use tdd_core::rho;
use tdd_core::ProblemParams;

use crate::config::RunConfig;
use crate::csv::{Cell, CsvTable};
use crate::report::{write_gnuplot_script, Results};

pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let grid = cfg.d_grid();
    let mut header = vec!["d".to_string()];
    header.extend(cfg.algorithms.iter().map(|a| format!("rho_{a}")));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();

    let mut results = Results::new("Convergence-factor sweep");
    let mut files = Vec::new();
    for &theta in &cfg.sweep.thetas {
        let params = ProblemParams {
            theta,
            ..cfg.params
        };
        let mut table = CsvTable::new(&header_refs);
        let rows: Vec<Vec<Cell>> = grid
            .par_iter()
            .map(|&d| {
                let mut row = vec![Cell::Num(d)];
                row.extend(
                    cfg.algorithms
                        .iter()
                        .map(|&a| Cell::Num(rho::rho(a, d, &params))),
                );
                row
            })
            .collect();
        for row in rows {
            table.push(row);
        }
        // exact limits at the spectrum ends
        let mut zero_row = vec![Cell::Num(0.0)];
        zero_row.extend(
            cfg.algorithms
                .iter()
                .map(|&a| Cell::Num(rho::rho_at_zero(a, &params))),
        );
        table.push(zero_row);
        let mut inf_row = vec![Cell::Num(f64::INFINITY)];
        inf_row.extend(
            cfg.algorithms
                .iter()
                .map(|&a| Cell::Num(rho::rho_at_infinity(a, theta))),
        );
        table.push(inf_row);
        table.annotate("theta", theta);

        let file = if cfg.sweep.thetas.len() == 1 {
            "analyze.csv".to_string()
        } else {
            format!("analyze_theta_{theta}.csv")
        };
        table.write(&out_dir.join(&file))?;
        log::info!("wrote {file} ({} rows)", grid.len() + 2);

        let mut body = format!(
            "File `{file}`, theta = {theta}.\n\n|algorithm|rho(d->0)|rho(d->inf)|\n|---|---|---|\n"
        );
        for &a in &cfg.algorithms {
            body.push_str(&format!(
                "|{a}|{}|{}|\n",
                rho::rho_at_zero(a, &params),
                rho::rho_at_infinity(a, theta)
            ));
        }
        results.section(&format!("theta = {theta}"), body);
        files.push(file);
    }
    let columns: Vec<String> = cfg.algorithms.iter().map(|a| format!("rho_{a}")).collect();
    write_gnuplot_script(out_dir, "analyze.gp", &files, &columns)?;
    results.section(
        "Reproduction",
        format!(
            "{} grid points on [{}, {}]; plot with `gnuplot analyze.gp`.",
            cfg.sweep.d_count, cfg.sweep.d_min, cfg.sweep.d_max
        ),
    );
    results.write(out_dir)
}
