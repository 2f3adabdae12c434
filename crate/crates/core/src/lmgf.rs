//! Finite-n log-mgf curves `Λ_{n,z}(t) = (1/n) Σ Λ(t z_i)` of the scaled
//! projection `(1/n) Σ X_i z_i`, their convergence to `Ψ`, and the curve
//! `Λ(t√n)/n` of the basis direction.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::directions::{generate_many, DirectionArray, DirectionMode};
use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::legendre::ConvexOracle;
use crate::math::{abs, median, sqrt};
use crate::quad::PsiOracle;

/// `t ↦ (1/n) Σ Λ(t c_i)` for fixed weights `c`.
#[derive(Debug, Clone)]
pub struct WeightedLogMgf {
    dist: DistributionSpec,
    weights: Vec<f64>,
}

impl WeightedLogMgf {
    pub fn new(dist: DistributionSpec, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("empty weight vector".into()));
        }
        if let Some(&c) = weights.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(c));
        }
        Ok(Self { dist, weights })
    }

    pub fn from_array(dist: DistributionSpec, arr: &DirectionArray) -> Result<Self> {
        Self::new(dist, arr.effective_weights())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl ConvexOracle for WeightedLogMgf {
    fn value(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::Domain(t));
        }
        let mut s = 0.0;
        for &c in &self.weights {
            s += self.dist.log_mgf(t * c)?;
        }
        Ok(s / self.weights.len() as f64)
    }

    fn derivative(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::Domain(t));
        }
        let mut s = 0.0;
        for &c in &self.weights {
            if c != 0.0 {
                s += c * self.dist.evaluate(t * c)?.d1;
            }
        }
        Ok(s / self.weights.len() as f64)
    }

    fn derivative_range(&self) -> (f64, f64) {
        let (lo, hi) = self.dist.derivative_range();
        let (mut a, mut b) = (0.0, 0.0);
        for &c in &self.weights {
            if c > 0.0 {
                a += c * lo;
                b += c * hi;
            } else if c < 0.0 {
                a += c * hi;
                b += c * lo;
            }
        }
        let n = self.weights.len() as f64;
        (a / n, b / n)
    }
}

/// `Λ_{n,z}(t)`. Normalized rows are rescaled to `√n θ` first.
pub fn finite_lmgf(dist: DistributionSpec, arr: &DirectionArray, t: f64) -> Result<f64> {
    WeightedLogMgf::from_array(dist, arr)?.value(t)
}

/// `Λ(t√n)/n`.
pub fn e1_lmgf(dist: DistributionSpec, n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let nf = n as f64;
    Ok(dist.log_mgf(t * sqrt(nf))? / nf)
}

/// `Λ_{n,z}` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteLogMgfCurve {
    pub dist: DistributionSpec,
    pub arr: DirectionArray,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl FiniteLogMgfCurve {
    pub fn new(dist: DistributionSpec, arr: DirectionArray, t_grid: Vec<f64>) -> Result<Self> {
        let f = WeightedLogMgf::from_array(dist, &arr)?;
        let values = t_grid.iter().map(|&t| f.value(t)).collect::<Result<Vec<_>>>()?;
        Ok(Self { dist, arr, t_grid, values })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub n: usize,
    pub t: f64,
    /// `|Λ_{n,z}(t) − Ψ(t)|`.
    pub gap: f64,
    pub seed: u64,
}

/// Gap table for one array realization against a fresh `Ψ` oracle.
pub fn convergence_profile(
    dist: DistributionSpec,
    mode: DirectionMode,
    seed: u64,
    t_set: &[f64],
    n_set: &[usize],
) -> Result<Vec<ProfileRow>> {
    let psi = psi_values(dist, t_set)?;
    profile_rows(dist, mode, seed, t_set, &psi, n_set)
}

/// `Ψ(t)` for every `t` in the set.
pub fn psi_values(dist: DistributionSpec, t_set: &[f64]) -> Result<Vec<f64>> {
    let oracle = PsiOracle::new(dist);
    t_set.iter().map(|&t| oracle.psi(t)).collect()
}

/// [`convergence_profile`] with `Ψ(t_set)` supplied. Column-constant rows are
/// prefixes of the longest row, so all `n` share one array realization.
pub fn profile_rows(
    dist: DistributionSpec,
    mode: DirectionMode,
    seed: u64,
    t_set: &[f64],
    psi: &[f64],
    n_set: &[usize],
) -> Result<Vec<ProfileRow>> {
    if !mode.is_gaussian() {
        return Err(Error::InvalidArgument(alloc::format!("profile needs a Gaussian array mode, got {mode}")));
    }
    if psi.len() != t_set.len() {
        return Err(Error::InvalidArgument("one Ψ value per t required".into()));
    }
    let arrays = generate_many(mode, n_set, seed, false)?;
    let mut rows = Vec::with_capacity(n_set.len() * t_set.len());
    for arr in &arrays {
        let n = arr.n;
        let f = WeightedLogMgf::from_array(dist, arr)?;
        for (&t, &p) in t_set.iter().zip(psi) {
            rows.push(ProfileRow { n, t, gap: abs(f.value(t)? - p), seed });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianGap {
    pub n: usize,
    pub t: f64,
    pub median: f64,
    pub seeds: usize,
}

/// Median gap over seeds for every `(n, t)`, in first-appearance order.
pub fn median_gaps(rows: &[ProfileRow]) -> Vec<MedianGap> {
    let mut keys: Vec<(usize, f64)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(n, t)| n == r.n && t.to_bits() == r.t.to_bits()) {
            keys.push((r.n, r.t));
        }
    }
    keys.into_iter()
        .map(|(n, t)| {
            let gaps: Vec<f64> =
                rows.iter().filter(|r| r.n == n && r.t.to_bits() == t.to_bits()).map(|r| r.gap).collect();
            MedianGap { n, t, median: median(&gaps), seeds: gaps.len() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::generate;

    fn medians(dist: DistributionSpec, mode: DirectionMode, t_set: &[f64], n_set: &[usize]) -> Vec<MedianGap> {
        let psi = psi_values(dist, t_set).unwrap();
        let mut rows = Vec::new();
        for seed in 0..100 {
            rows.extend(profile_rows(dist, mode, seed, t_set, &psi, n_set).unwrap());
        }
        median_gaps(&rows)
    }

    #[test]
    fn zero_and_gaussian_closed_form() {
        let g = DistributionSpec::gaussian_alpha(1.5).unwrap();
        let arr = generate(DirectionMode::GaussianIndependent, 300, 4, false).unwrap();
        assert_eq!(finite_lmgf(g, &arr, 0.0).unwrap(), 0.0);
        assert_eq!(finite_lmgf(DistributionSpec::rademacher(), &arr, 0.0).unwrap(), 0.0);
        let t = 1.3;
        let sq: f64 = arr.row.iter().map(|z| z * z).sum::<f64>() / 300.0;
        let want = 1.5 * 1.5 * t * t / 4.0 * sq;
        assert!((finite_lmgf(g, &arr, t).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn normalized_row_uses_scaled_weights() {
        let d = DistributionSpec::rademacher();
        let theta = generate(DirectionMode::GaussianIndependent, 50, 2, true).unwrap();
        let direct: f64 = theta.row.iter().map(|x| (0.7 * 50f64.sqrt() * x).cosh().ln()).sum::<f64>() / 50.0;
        assert!((finite_lmgf(d, &theta, 0.7).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn rademacher_large_row_near_psi() {
        let d = DistributionSpec::rademacher();
        let arr = generate(DirectionMode::GaussianIndependent, 10_000, 8, false).unwrap();
        let psi = PsiOracle::new(d).psi(1.0).unwrap();
        assert!((finite_lmgf(d, &arr, 1.0).unwrap() - psi).abs() < 0.05);
    }

    #[test]
    fn curve_is_convex() {
        let d = DistributionSpec::uniform_symmetric(2.0).unwrap();
        let arr = generate(DirectionMode::GaussianColumnConstant, 40, 1, false).unwrap();
        let grid: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.25).collect();
        let c = FiniteLogMgfCurve::new(d, arr, grid).unwrap();
        for i in 1..c.values.len() - 1 {
            assert!(c.values[i] <= 0.5 * (c.values[i - 1] + c.values[i + 1]) + 1e-10);
        }
    }

    #[test]
    fn e1_curve() {
        let r = DistributionSpec::rademacher();
        assert_eq!(e1_lmgf(r, 10, 0.0).unwrap(), 0.0);
        let v = e1_lmgf(r, 1_000_000, 2.0).unwrap();
        assert!(v <= 2e-3 && v > 0.0);
        let gn = DistributionSpec::generalized_normal(1.0, 4.0).unwrap();
        let (c, r_exp) = gn.tail_bound_constant().unwrap().unwrap();
        let mut prev = f64::INFINITY;
        for n in [100usize, 10_000, 1_000_000] {
            let v = e1_lmgf(gn, n, 1.0).unwrap();
            let nf = n as f64;
            assert!(v <= c * nf.powf(r_exp / 2.0 - 1.0) + c / nf, "n={n}: {v}");
            assert!(v < prev);
            prev = v;
        }
        assert!(e1_lmgf(r, 0, 1.0).is_err());
    }

    #[test]
    fn gaussian_profile_gap_formula() {
        let g = DistributionSpec::gaussian_alpha(1.0).unwrap();
        let rows = convergence_profile(g, DirectionMode::GaussianIndependent, 3, &[1.0], &[500]).unwrap();
        let arr = generate(DirectionMode::GaussianIndependent, 500, 3, false).unwrap();
        let sq: f64 = arr.row.iter().map(|z| z * z).sum::<f64>() / 500.0;
        assert!((rows[0].gap - 0.25 * (sq - 1.0).abs()).abs() < 1e-12);
        let m = medians(g, DirectionMode::GaussianIndependent, &[1.0], &[10_000]);
        assert!(m[0].median <= 0.02);
    }

    #[test]
    fn rademacher_median_gap_decreases() {
        let d = DistributionSpec::rademacher();
        for mode in [DirectionMode::GaussianIndependent, DirectionMode::GaussianColumnConstant] {
            let m = medians(d, mode, &[1.0, 2.0], &[100, 1000, 10_000]);
            for t in [1.0, 2.0] {
                let seq: Vec<f64> = m.iter().filter(|r| r.t == t).map(|r| r.median).collect();
                assert!(seq[0] > seq[1] && seq[1] > seq[2], "{mode} t={t}: {seq:?}");
            }
        }
    }

    #[test]
    fn profile_rejects_fixed_modes() {
        assert!(
            convergence_profile(DistributionSpec::rademacher(), DirectionMode::CramerIota, 0, &[1.0], &[10]).is_err()
        );
    }
}
