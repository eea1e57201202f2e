//! Runs every acceptance criterion at its stated tolerance. Each criterion is
//! its own test, so the harness reports one pass/fail line per criterion; with
//! `--nocapture` the criterion summaries are printed as well.

use opspace::verify::{run_criterion, Suite, VerifyConfig};

fn check(id: usize) {
    let start = std::time::Instant::now();
    let result = run_criterion(id, &VerifyConfig::default()).expect("criterion runs");
    println!("{result} [{:.1} s]", start.elapsed().as_secs_f64());
    assert!(result.passed(), "{result}");
}

#[test]
fn suite_covers_all_ten() {
    assert_eq!(Suite::All.criteria(), (1..=10).collect::<Vec<_>>().as_slice());
}

#[test]
fn criterion_01_min_table() {
    check(1);
}

#[test]
fn criterion_02_sign_matrices() {
    check(2);
}

#[test]
fn criterion_03_max_table() {
    check(3);
}

#[test]
fn criterion_04_interpolation_table() {
    check(4);
}

#[test]
fn criterion_05_square_witness() {
    check(5);
}

#[test]
fn criterion_06_pairings() {
    check(6);
}

#[test]
fn criterion_07_derived_sandwich() {
    check(7);
}

#[test]
fn criterion_08_oh_products() {
    check(8);
}

#[test]
fn criterion_09_property_suites() {
    check(9);
}

#[test]
fn criterion_10_kalton_peck() {
    check(10);
}
