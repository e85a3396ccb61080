//! One test per acceptance criterion; each runs the matching named suite
//! and prints a single pass/fail line.

use mpdist::suite::run_suite;

const SEED: u64 = 42;

fn check(criterion: usize, suite: &str) {
    let report = run_suite(suite, SEED).expect("suite must run");
    let status = if report.passed { "pass" } else { "FAIL" };
    println!("criterion {:>2} [{}]: {}", criterion, suite, status);
    for a in &report.assertions {
        println!(
            "    [{}] {} — {}",
            if a.passed { "ok" } else { "FAIL" },
            a.label,
            a.detail
        );
    }
    assert!(report.passed, "criterion {} ({}) failed", criterion, suite);
}

#[test]
fn criterion_01_alpha_tables() {
    check(1, "alpha-tables");
}

#[test]
fn criterion_02_fitch_vs_brute() {
    check(2, "fitch-vs-brute");
}

#[test]
fn criterion_03_ps_lower_bound() {
    check(3, "ps-lower-bound");
}

#[test]
fn criterion_04_metric_axioms() {
    check(4, "metric-axioms");
}

#[test]
fn criterion_05_reduction_invariance() {
    check(5, "reduction-invariance");
}

#[test]
fn criterion_06_lifting() {
    check(6, "lifting");
}

#[test]
fn criterion_07_glued_quartets() {
    check(7, "glued-quartets");
}

#[test]
fn criterion_08_big_partition() {
    check(8, "big-partition");
}

#[test]
fn criterion_09_tree_degrees() {
    check(9, "tree-degrees");
}

#[test]
fn criterion_10_kernel_witness_large() {
    check(10, "kernel-witness-large");
}

#[test]
fn criterion_11_approx_guarantee() {
    check(11, "approx-guarantee");
}

#[test]
fn criterion_12_ratio_tw_sweep() {
    check(12, "ratio-tw-sweep");
}

#[test]
fn criterion_13_small_degree_bound() {
    check(13, "small-degree-bound");
}
