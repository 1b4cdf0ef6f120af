#![allow(dead_code)]

use std::path::PathBuf;

use frobcat::category::{SkeletalCategory, DEFAULT_TOLERANCE};
use frobcat::io::{load_algebra, AlgebraFile};

/// Shipped algebra files that are expected to pass the axioms.
pub const ALGEBRA_FILES: [&str; 12] = [
    "trivial_cardy.toml",
    "semion_cardy.toml",
    "z3_cardy.toml",
    "fibonacci_cardy.toml",
    "ising_cardy.toml",
    "toric_code_cardy.toml",
    "su2_4_cardy.toml",
    "toric_code_1e.toml",
    "toric_code_1m.toml",
    "su2_4_d.toml",
    "z3_full.toml",
    "ising_1psi.toml",
];

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn load(file: &str) -> (SkeletalCategory, AlgebraFile) {
    load_algebra(&data_dir().join(file), None, DEFAULT_TOLERANCE).unwrap_or_else(|e| panic!("{file}: {e}"))
}

pub fn bundled() -> Vec<(String, SkeletalCategory, AlgebraFile)> {
    ALGEBRA_FILES
        .iter()
        .map(|f| {
            let (c, a) = load(f);
            (f.to_string(), c, a)
        })
        .collect()
}

/// Prints the one-line verdict and fails the test when it is negative.
pub fn verdict(criterion: u32, ok: bool, summary: &str) {
    println!("criterion {criterion}: {} - {summary}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {summary}");
}
