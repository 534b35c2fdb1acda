//! Acceptance gate: one test per verification criterion, each printing its
//! pass/fail line. Run with `--nocapture` to see every line even on success.

use curvphase_cli::verify::{self, CriterionOutcome};

fn check(outcome: CriterionOutcome) {
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_1_unitarity() {
    check(verify::criterion_1());
}

#[test]
fn criterion_2_holonomy() {
    check(verify::criterion_2());
}

#[test]
fn criterion_3_phase_pipeline() {
    check(verify::criterion_3());
}

#[test]
fn criterion_4_thermo_oracle() {
    check(verify::criterion_4());
}

#[test]
fn criterion_5_einstein_trace() {
    check(verify::criterion_5());
}

#[test]
fn criterion_6_cosmological_term() {
    check(verify::criterion_6());
}

#[test]
fn criterion_7_reduction_rule() {
    check(verify::criterion_7());
}

#[test]
fn criterion_8_reproducibility() {
    check(verify::criterion_8());
}
