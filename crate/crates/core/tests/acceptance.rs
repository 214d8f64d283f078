//! The acceptance gate: every criterion runs at its stated tolerance and
//! prints one pass/fail line.

use kripke_blend::acceptance::{run_all, CriterionResult};
use kripke_blend::config::RunConfig;

#[test]
fn acceptance_criteria() {
    let config = RunConfig::default();
    let results: Vec<CriterionResult> = run_all(&config);
    for r in &results {
        println!("{}", r.line());
    }
    // runtime targets: upset counting < 30 s, correspondence < 60 s, IZF < 5 min
    let seconds = |id: usize| results.iter().find(|r| r.id == id).map(|r| r.seconds).unwrap();
    assert!(seconds(1) < 30.0, "criterion 1 overran: {:.1}s", seconds(1));
    assert!(seconds(4) < 60.0, "criterion 4 overran: {:.1}s", seconds(4));
    assert!(seconds(8) < 300.0, "criterion 8 overran: {:.1}s", seconds(8));
    let failed: Vec<String> =
        results.iter().filter(|r| !r.passed).map(|r| r.line()).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
