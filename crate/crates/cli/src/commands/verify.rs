//! `verify`: the end-to-end self-check battery plus regime confirmation for
//! the configured setting. Exit code 0 only when every check passes.

use std::path::Path;

use anyhow::Result;
use tdd_core::verify::{regime_check, run_standard_checks, CheckResult};

use crate::config::RunConfig;
use crate::report::Results;

pub fn run(cfg: &RunConfig, out_dir: &Path, seed: u64) -> Result<bool> {
    // exercise the configured spectrum source so broken inputs surface here
    let model = cfg.build_model()?;
    log::info!(
        "spectrum: {} eigenvalues in [{}, {}]",
        model.n,
        model.d_min(),
        model.d_max()
    );

    let mut checks: Vec<CheckResult> = run_standard_checks(seed);
    checks.extend(regime_check(&cfg.params, &cfg.algorithms));

    let mut all_passed = true;
    let mut body = String::from("|check|result|detail|\n|---|---|---|\n");
    for check in &checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        println!("[{verdict}] {}: {}", check.name, check.detail);
        body.push_str(&format!("|{}|{verdict}|{}|\n", check.name, check.detail));
        all_passed &= check.passed;
    }
    println!(
        "verify: {}",
        if all_passed {
            "all checks passed"
        } else {
            "FAILURES present"
        }
    );

    let mut results = Results::new("Verification report");
    results.section("Checks", body);
    results.write(out_dir)?;
    Ok(all_passed)
}
