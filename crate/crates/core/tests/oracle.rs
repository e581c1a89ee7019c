//! Decision kernels against the independent brute-force evaluator.

mod common;

use femtoho::Algorithm;

#[test]
fn ten_thousand_point_grid_agrees() {
    let (checked, mismatch) = common::run_oracle_grid(10_000, 2024);
    assert_eq!(mismatch, None);
    assert_eq!(checked, 10_000 * Algorithm::ALL.len());
}

#[test]
fn grid_agrees_on_other_seeds() {
    for seed in [1, 7, 99] {
        let (_, mismatch) = common::run_oracle_grid(2_000, seed);
        assert_eq!(mismatch, None, "seed {seed}");
    }
}
