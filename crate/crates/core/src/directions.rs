//! Direction rows `θ ∈ S^{n−1}` and raw Gaussian rows `z ∈ ℝ^n`.
//!
//! A uniformly distributed point on the sphere is a normalized standard
//! Gaussian vector, so every direction sequence is produced from a triangular
//! Gaussian array. Two array shapes are offered: fresh rows for every `n`, and
//! rows that share columns across `n` (the row of length `n` is a prefix of the
//! row of length `m ≥ n`).

use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::rng::{stream, Domain};

const MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionMode {
    /// `ι = n^{−1/2}(1, …, 1)`.
    CramerIota,
    /// `e₁ = (1, 0, …, 0)`.
    BasisE1,
    /// Independent Gaussian rows, one per `n`.
    GaussianIndependent,
    /// One Gaussian sequence cut to length `n`.
    GaussianColumnConstant,
}

impl DirectionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DirectionMode::CramerIota => "CramerIota",
            DirectionMode::BasisE1 => "BasisE1",
            DirectionMode::GaussianIndependent => "GaussianIndependent",
            DirectionMode::GaussianColumnConstant => "GaussianColumnConstant",
        }
    }

    pub fn is_gaussian(self) -> bool {
        matches!(self, DirectionMode::GaussianIndependent | DirectionMode::GaussianColumnConstant)
    }
}

impl core::fmt::Display for DirectionMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of a triangular array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionArray {
    pub mode: DirectionMode,
    pub n: usize,
    pub row: Vec<f64>,
    pub seed: u64,
    /// `true`: `row ∈ S^{n−1}`; `false`: raw row `z`.
    pub normalized: bool,
    /// Substream actually used; non-zero only after a zero-norm retry.
    pub attempt: u32,
}

impl DirectionArray {
    /// Weights `c_i` with `W = (1/n) Σ c_i X_i`: the raw row itself, or
    /// `√n θ` for a normalized row. The constant direction gets exact ones.
    pub fn effective_weights(&self) -> Vec<f64> {
        if !self.normalized {
            return self.row.clone();
        }
        match self.mode {
            DirectionMode::CramerIota => alloc::vec![1.0; self.n],
            _ => {
                let s = sqrt(self.n as f64);
                self.row.iter().map(|&x| s * x).collect()
            }
        }
    }

    pub fn euclidean_norm(&self) -> f64 {
        norm(&self.row)
    }
}

fn norm(row: &[f64]) -> f64 {
    // scaled to avoid overflow for huge entries
    let m = row.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * sqrt(row.iter().map(|&x| (x / m) * (x / m)).sum::<f64>())
}

/// Builds the row of length `n` for `(mode, seed)`.
pub fn generate(mode: DirectionMode, n: usize, seed: u64, normalized: bool) -> Result<DirectionArray> {
    if n == 0 {
        return Err(Error::InvalidArgument("row length must be at least 1".into()));
    }
    let (row, attempt) = match mode {
        DirectionMode::CramerIota => {
            let v = if normalized { 1.0 / sqrt(n as f64) } else { 1.0 };
            (alloc::vec![v; n], 0)
        }
        DirectionMode::BasisE1 => {
            let mut r = alloc::vec![0.0; n];
            r[0] = 1.0;
            (r, 0)
        }
        DirectionMode::GaussianIndependent | DirectionMode::GaussianColumnConstant => {
            let mut found = None;
            for attempt in 0..MAX_ATTEMPTS {
                let mut rng = match mode {
                    DirectionMode::GaussianIndependent => {
                        stream(seed, Domain::RowIndependent, n as u64, attempt as u64)
                    }
                    _ => stream(seed, Domain::RowColumnConstant, attempt as u64, 0),
                };
                let mut row: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let r = norm(&row);
                if r > 0.0 {
                    if normalized {
                        row.iter_mut().for_each(|x| *x /= r);
                    }
                    found = Some((row, attempt));
                    break;
                }
            }
            found.ok_or(Error::ZeroNorm { attempts: MAX_ATTEMPTS })?
        }
    };
    Ok(DirectionArray { mode, n, row, seed, normalized, attempt })
}

/// Rows for every `n` in `n_set`. Column-constant rows are cut from the
/// longest raw row before any normalization, so they share one realization.
pub fn generate_many(mode: DirectionMode, n_set: &[usize], seed: u64, normalized: bool) -> Result<Vec<DirectionArray>> {
    if mode != DirectionMode::GaussianColumnConstant {
        return n_set.iter().map(|&n| generate(mode, n, seed, normalized)).collect();
    }
    let longest = n_set.iter().copied().max().unwrap_or(0);
    if longest == 0 {
        return n_set.iter().map(|&n| generate(mode, n, seed, normalized)).collect();
    }
    let full = generate(mode, longest, seed, false)?;
    n_set
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::InvalidArgument("row length must be at least 1".into()));
            }
            let mut row = full.row[..n].to_vec();
            if normalized {
                let r = norm(&row);
                if r == 0.0 {
                    return Err(Error::ZeroNorm { attempts: full.attempt + 1 });
                }
                row.iter_mut().for_each(|x| *x /= r);
            }
            Ok(DirectionArray { n, row, normalized, ..full.clone() })
        })
        .collect()
}

/// `√n / ‖z‖` for a raw row.
pub fn norm_factor(arr: &DirectionArray) -> Result<f64> {
    if arr.normalized {
        return Err(Error::InvalidArgument("norm factor needs a raw row".into()));
    }
    let r = arr.euclidean_norm();
    if r == 0.0 {
        return Err(Error::ZeroNorm { attempts: 0 });
    }
    Ok(sqrt(arr.n as f64) / r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    #[test]
    fn fixed_modes() {
        let iota = generate(DirectionMode::CramerIota, 4, 0, true).unwrap();
        assert_eq!(iota.row, vec![0.5; 4]);
        assert_eq!(iota.effective_weights(), vec![1.0; 4]);
        let raw = generate(DirectionMode::CramerIota, 9, 0, false).unwrap();
        assert_eq!(norm_factor(&raw).unwrap(), 1.0);
        let e1 = generate(DirectionMode::BasisE1, 3, 0, true).unwrap();
        assert_eq!(e1.row, vec![1.0, 0.0, 0.0]);
        assert!(generate(DirectionMode::BasisE1, 0, 0, true).is_err());
    }

    #[test]
    fn normalized_rows_are_unit() {
        for n in [1, 2, 17, 1000] {
            let a = generate(DirectionMode::GaussianIndependent, n, 3, true).unwrap();
            assert!((a.euclidean_norm() - 1.0).abs() <= 1e-12);
        }
        assert!(norm_factor(&generate(DirectionMode::GaussianIndependent, 5, 3, true).unwrap()).is_err());
    }

    #[test]
    fn gaussian_row_norm_concentrates() {
        let a = generate(DirectionMode::GaussianIndependent, 10_000, 11, false).unwrap();
        assert!((a.euclidean_norm() / 100.0 - 1.0).abs() <= 0.05);
        let big = generate(DirectionMode::GaussianIndependent, 1_000_000, 11, false).unwrap();
        assert!((norm_factor(&big).unwrap() - 1.0).abs() < 0.005);
        let f = norm_factor(&a).unwrap();
        assert!((f * a.euclidean_norm() - 100.0).abs() < 1e-12 * 100.0);
    }

    #[test]
    fn column_constant_prefix() {
        for (n, m) in [(10, 100), (1, 7), (100, 1000), (64, 65)] {
            let a = generate(DirectionMode::GaussianColumnConstant, n, 5, false).unwrap();
            let b = generate(DirectionMode::GaussianColumnConstant, m, 5, false).unwrap();
            assert_eq!(a.row[..], b.row[..n]);
        }
        let a = generate(DirectionMode::GaussianIndependent, 10, 5, false).unwrap();
        let b = generate(DirectionMode::GaussianIndependent, 100, 5, false).unwrap();
        assert_ne!(a.row[..], b.row[..10]);
    }

    #[test]
    fn generate_many_matches_single_rows() {
        let many = generate_many(DirectionMode::GaussianColumnConstant, &[5, 50, 20], 8, true).unwrap();
        for a in &many {
            assert_eq!(*a, generate(DirectionMode::GaussianColumnConstant, a.n, 8, true).unwrap());
        }
        let ind = generate_many(DirectionMode::GaussianIndependent, &[3, 4], 8, false).unwrap();
        assert_eq!(ind[1], generate(DirectionMode::GaussianIndependent, 4, 8, false).unwrap());
    }

    #[test]
    fn deterministic() {
        let a = generate(DirectionMode::GaussianIndependent, 50, 9, true).unwrap();
        let b = generate(DirectionMode::GaussianIndependent, 50, 9, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sphere_uniformity_n3() {
        let rows = 100_000;
        let mut mean = [0.0f64; 3];
        let mut sq = 0.0;
        let mut sq2 = 0.0;
        for s in 0..rows {
            let a = generate(DirectionMode::GaussianIndependent, 3, s, true).unwrap();
            for (m, x) in mean.iter_mut().zip(&a.row) {
                *m += x;
            }
            let x = a.row[0] * a.row[0];
            sq += x;
            sq2 += x * x;
        }
        let r = rows as f64;
        for m in mean {
            assert!((m / r).abs() < 4.0 / r.sqrt());
        }
        let m = sq / r;
        let se = ((sq2 / r - m * m) / r).sqrt();
        assert!((m - 1.0 / 3.0).abs() < 4.0 * se);
    }

    #[test]
    fn norm_factor_median_shrinks() {
        let med = |n: usize| {
            let d: Vec<f64> = (0..100)
                .map(|s| {
                    (norm_factor(&generate(DirectionMode::GaussianIndependent, n, s, false).unwrap()).unwrap() - 1.0)
                        .abs()
                })
                .collect();
            crate::math::median(&d)
        };
        let (a, b, c) = (med(100), med(1000), med(10_000));
        assert!(a > b && b > c, "{a} {b} {c}");
    }
}
