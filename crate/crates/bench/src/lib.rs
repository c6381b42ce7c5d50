//! Shared inputs for the benchmarks.

use twistss_core::library::bundled_model;
use twistss_core::linalg::int;
use twistss_core::{parse_twist, CdgaModel, Mat, TwistForm};

pub fn bundled_case(name: &str, twist: &str) -> (CdgaModel, TwistForm) {
    let model = bundled_model(name).expect("bundled model");
    let h = parse_twist(&model, twist).expect("bundled twist");
    (model, h)
}

/// A deterministic dense integer matrix of rank close to `min(rows, cols)`.
pub fn dense_matrix(rows: usize, cols: usize) -> Mat {
    let data = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| int(((i * 7 + j * 13 + i * j) % 11) as i64 - 5))
                .collect()
        })
        .collect();
    Mat::from_rows(data)
}
