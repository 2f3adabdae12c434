//! Importance-sampling estimates against exact tail probabilities.

use ldproj_core::directions::generate_many;
use ldproj_core::{estimate_tail, generate, rate_scan, DirectionMode, DistributionSpec};
use statrs::distribution::{ContinuousCDF, Normal};

/// `P(Bin(n, 1/2) ≥ k)` summed exactly in integers.
fn binomial_upper_tail(n: u32, k: u32) -> f64 {
    let mut c: u128 = 1;
    let mut total: u128 = 0;
    for j in 0..=n {
        if j >= k {
            total += c;
        }
        c = c * u128::from(n - j) / u128::from(j + 1);
    }
    total as f64 / 2f64.powi(n as i32)
}

#[test]
fn binomial_oracle_sanity() {
    assert_eq!(binomial_upper_tail(4, 0), 1.0);
    assert_eq!(binomial_upper_tail(4, 4), 1.0 / 16.0);
    assert_eq!(binomial_upper_tail(4, 2), 11.0 / 16.0);
}

#[test]
fn rademacher_constant_direction_matches_binomial() {
    // S/80 ≥ 0.3 with S = 2K − 80 means K ≥ 52
    let exact = binomial_upper_tail(80, 52);
    let iota = generate(DirectionMode::CramerIota, 80, 0, true).unwrap();
    let r = estimate_tail(DistributionSpec::rademacher(), &iota, 0.3, 100_000, 2024).unwrap();
    assert!((r.p_hat - exact).abs() <= 3.0 * r.stderr, "{} vs {exact} (stderr {})", r.p_hat, r.stderr);
    assert!(r.stderr < 0.05 * exact);
}

#[test]
fn gaussian_tail_matches_normal_cdf() {
    // Λ(t) = α²t²/4, so W ~ N(0, α²/(2n)) for any normalized row
    let alpha = 1.3;
    let g = DistributionSpec::gaussian_alpha(alpha).unwrap();
    let std = Normal::new(0.0, 1.0).unwrap();
    for mode in [DirectionMode::CramerIota, DirectionMode::GaussianIndependent, DirectionMode::GaussianColumnConstant] {
        let n = 60;
        let w = 0.5;
        let arr = generate(mode, n, 5, true).unwrap();
        let exact = std.sf(w * (2.0 * n as f64).sqrt() / alpha);
        let r = estimate_tail(g, &arr, w, 50_000, 17).unwrap();
        assert!((r.p_hat - exact).abs() <= 3.0 * r.stderr, "{mode}: {} vs {exact}", r.p_hat);
        assert!((r.tilt - 2.0 * w / (alpha * alpha)).abs() < 1e-10);
    }
}

#[test]
fn raw_row_equals_normalized_row_at_rescaled_threshold() {
    // Σ z_i X_i ≥ n w  ⇔  Σ (√n z_i/‖z‖) X_i ≥ n w √n/‖z‖
    let dist = DistributionSpec::generalized_normal(1.0, 1.5).unwrap();
    let n = 40;
    let raw = generate(DirectionMode::GaussianIndependent, n, 3, false).unwrap();
    let unit = generate(DirectionMode::GaussianIndependent, n, 3, true).unwrap();
    let k = (n as f64).sqrt() / raw.euclidean_norm();
    let w = 0.4;
    let a = estimate_tail(dist, &raw, w, 20_000, 8).unwrap();
    let b = estimate_tail(dist, &unit, w * k, 20_000, 8).unwrap();
    assert!((a.tilt - b.tilt * k).abs() < 1e-8 * a.tilt.abs());
    assert!((a.p_hat - b.p_hat).abs() < 1e-6 * a.p_hat, "{} vs {}", a.p_hat, b.p_hat);
}

#[test]
fn rate_scan_uses_shared_rows() {
    let r = DistributionSpec::rademacher();
    let n_set = [20, 40];
    let scan = rate_scan(r, DirectionMode::GaussianColumnConstant, 0.2, &n_set, 5_000, 11).unwrap();
    let rows = generate_many(DirectionMode::GaussianColumnConstant, &n_set, 11, true).unwrap();
    for (rep, arr) in scan.iter().zip(&rows) {
        assert_eq!(rep.n, arr.n);
        assert_eq!(*rep, estimate_tail(r, arr, 0.2, 5_000, 11).unwrap());
        assert!(rep.rate_hat > 0.0 && rep.rate_hat.is_finite());
    }
}
