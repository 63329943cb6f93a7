//! Release acceptance suite: runs every validation criterion at its pinned
//! tolerance and prints one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! on success as well.

use rischan::validation::{run_all, ValidationConfig};

#[test]
fn acceptance_criteria() {
    let report = run_all(&ValidationConfig::default());
    for line in report.summary_lines() {
        println!("{line}");
    }
    for criterion in &report.criteria {
        for check in &criterion.checks {
            println!(
                "    [{}] criterion {:2} / {}: measured {:.6e} vs {:.6e}",
                if check.passed { "ok" } else { "FAIL" },
                criterion.id,
                check.name,
                check.measured,
                check.threshold,
            );
        }
        for diag in &criterion.diagnostics {
            println!(
                "    [diag] criterion {:2} / {}: {:.6e} ({})",
                criterion.id, diag.name, diag.value, diag.note
            );
        }
    }
    let failed: Vec<String> = report
        .criteria
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("criterion {}: {}", c.id, c.title))
        .collect();
    assert!(
        report.passed,
        "acceptance criteria failed: {}",
        failed.join("; ")
    );
}
