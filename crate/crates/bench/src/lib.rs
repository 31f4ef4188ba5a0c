//! Fixtures shared by the benchmarks.

use dunkl_bloch::{CoefficientSeries, Complex64, DiskPoint, LambdaParam};

/// `n` points on a spiral inside the disk of radius `max_r`.
pub fn spiral_points(n: usize, max_r: f64) -> Vec<DiskPoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let r = max_r * ((i as f64 + 0.5) / n as f64).sqrt();
            let theta = (golden * i as f64).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
            DiskPoint::polar(r, theta).expect("inside the disk")
        })
        .collect()
}

/// A fixed dense polynomial of the given degree.
pub fn test_polynomial(lam: LambdaParam, degree: usize) -> CoefficientSeries {
    let coeffs = (0..=degree)
        .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()) / (k as f64 + 1.0))
        .collect();
    CoefficientSeries::polynomial(lam, coeffs)
}
