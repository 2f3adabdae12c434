//! Importance-sampling estimates of `P(W ≥ w)` for
//! `W = n^{−1/2} ⟨X, θ⟩ = (1/n) Σ c_i X_i`.
//!
//! Coordinate `i` is drawn from its law tilted by `t* c_i`, where `t*` solves
//! `(1/n) Σ c_i Λ′(t* c_i) = w`, so the tilted mean of `W` sits on the
//! threshold. Each draw is weighted by the likelihood ratio
//! `exp(−t* Σ c_i X_i + Σ Λ(t* c_i))`.
//!
//! Samples are split into fixed-size chunks, each with its own random stream.
//! Chunk statistics are merged in chunk order, so the result depends only on
//! the seed and the chunk size, never on how chunks are scheduled.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::directions::{generate_many, DirectionArray, DirectionMode};
use crate::dist::{DistributionSpec, TiltedSampler};
use crate::error::{Error, Result};
use crate::legendre::{conjugate, ConvexOracle};
use crate::lmgf::WeightedLogMgf;
use crate::math::{exp, log, sqrt};
use crate::rng::{stream, Domain};

pub const DEFAULT_CHUNK: usize = 4096;
pub const MIN_SAMPLES: usize = 1000;
pub const MIN_ESS: f64 = 10.0;
/// Slack on the closed threshold `W ≥ w` absorbing rounding in `Σ c_i X_i / n`.
pub const THRESHOLD_SLACK: f64 = 1e-12;

/// Solves `(1/n) Σ c_i Λ′(t c_i) = w`.
pub fn choose_tilt(dist: DistributionSpec, arr: &DirectionArray, w: f64) -> Result<f64> {
    tilt_for(&WeightedLogMgf::from_array(dist, arr)?, w)
}

fn tilt_for(f: &WeightedLogMgf, w: f64) -> Result<f64> {
    let (lo, hi) = f.derivative_range();
    if !(w > lo && w < hi) {
        return Err(Error::InfeasibleThreshold { w, lo, hi });
    }
    conjugate(f, w)?.tilt.ok_or(Error::InfeasibleThreshold { w, lo, hi })
}

/// Sufficient statistics of one chunk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChunkStats {
    pub index: usize,
    pub samples: usize,
    pub hits: usize,
    pub sum: f64,
    pub sum_sq: f64,
    pub proposals: u64,
    pub draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub dist: DistributionSpec,
    pub mode: DirectionMode,
    pub normalized: bool,
    pub n: usize,
    pub w: f64,
    pub tilt: f64,
    pub p_hat: f64,
    pub stderr: f64,
    /// `−ln(p_hat)/n`; `+∞` when no sample hit.
    pub rate_hat: f64,
    /// Delta-method standard error of `rate_hat`.
    pub rate_stderr: f64,
    pub samples: usize,
    pub hits: usize,
    pub seed: u64,
    pub effective_sample_size: f64,
    pub acceptance_rate: f64,
    pub warning: Option<String>,
}

/// Chunked tilted estimator for one `(dist, row, w)`.
#[derive(Debug, Clone)]
pub struct TailEstimator {
    dist: DistributionSpec,
    mode: DirectionMode,
    normalized: bool,
    weights: Vec<f64>,
    samplers: Vec<TiltedSampler>,
    w: f64,
    tilt: f64,
    log_norm: f64,
    samples: usize,
    chunk_size: usize,
    seed: u64,
}

impl TailEstimator {
    pub fn new(
        dist: DistributionSpec,
        arr: &DirectionArray,
        w: f64,
        samples: usize,
        seed: u64,
        chunk_size: usize,
    ) -> Result<Self> {
        let f = WeightedLogMgf::from_array(dist, arr)?;
        let tilt = tilt_for(&f, w)?;
        Self::build(dist, arr, f, w, tilt, samples, seed, chunk_size)
    }

    /// Uses `tilt` instead of solving for it; `0` gives plain Monte Carlo.
    pub fn with_tilt(
        dist: DistributionSpec,
        arr: &DirectionArray,
        w: f64,
        tilt: f64,
        samples: usize,
        seed: u64,
        chunk_size: usize,
    ) -> Result<Self> {
        if !tilt.is_finite() {
            return Err(Error::Domain(tilt));
        }
        let f = WeightedLogMgf::from_array(dist, arr)?;
        Self::build(dist, arr, f, w, tilt, samples, seed, chunk_size)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        dist: DistributionSpec,
        arr: &DirectionArray,
        f: WeightedLogMgf,
        w: f64,
        tilt: f64,
        samples: usize,
        seed: u64,
        chunk_size: usize,
    ) -> Result<Self> {
        if !w.is_finite() {
            return Err(Error::Domain(w));
        }
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidArgument(alloc::format!("need at least {MIN_SAMPLES} samples, got {samples}")));
        }
        if chunk_size == 0 {
            return Err(Error::InvalidArgument("chunk size must be positive".into()));
        }
        let log_norm = f.value(tilt)? * arr.n as f64;
        let weights = f.weights().to_vec();
        let samplers = weights.iter().map(|&c| TiltedSampler::new(dist, tilt * c)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dist,
            mode: arr.mode,
            normalized: arr.normalized,
            weights,
            samplers,
            w,
            tilt,
            log_norm,
            samples,
            chunk_size,
            seed,
        })
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    pub fn chunk_count(&self) -> usize {
        self.samples.div_ceil(self.chunk_size)
    }

    /// Runs chunk `index`; any order and any thread.
    pub fn run_chunk(&self, index: usize) -> Result<ChunkStats> {
        let n = self.weights.len();
        let start = index * self.chunk_size;
        if start >= self.samples {
            return Err(Error::InvalidArgument(alloc::format!("chunk {index} out of range")));
        }
        let count = self.chunk_size.min(self.samples - start);
        let mut rng = stream(self.seed, Domain::TailChunk, n as u64, index as u64);
        let cut = self.w - THRESHOLD_SLACK;
        let mut stats = ChunkStats { index, samples: count, hits: 0, sum: 0.0, sum_sq: 0.0, proposals: 0, draws: 0 };
        for _ in 0..count {
            let mut s = 0.0;
            for (sampler, &c) in self.samplers.iter().zip(&self.weights) {
                let (x, tries) = sampler.draw(&mut rng)?;
                stats.proposals += u64::from(tries);
                s += c * x;
            }
            stats.draws += n as u64;
            if s / n as f64 >= cut {
                let lr = exp(self.log_norm - self.tilt * s);
                stats.hits += 1;
                stats.sum += lr;
                stats.sum_sq += lr * lr;
            }
        }
        Ok(stats)
    }

    /// Merges chunk statistics (sorted by index first) into a report.
    pub fn finish(&self, mut chunks: Vec<ChunkStats>) -> Result<SimulationReport> {
        chunks.sort_by_key(|c| c.index);
        let complete = chunks.len() == self.chunk_count() && chunks.iter().enumerate().all(|(i, c)| c.index == i);
        if !complete {
            return Err(Error::InvalidArgument("chunk set is incomplete or duplicated".into()));
        }
        let (mut sum, mut sum_sq, mut hits, mut proposals, mut draws) = (0.0, 0.0, 0usize, 0u64, 0u64);
        for c in &chunks {
            sum += c.sum;
            sum_sq += c.sum_sq;
            hits += c.hits;
            proposals += c.proposals;
            draws += c.draws;
        }
        let m = self.samples as f64;
        let n = self.weights.len();
        let p_hat = sum / m;
        let var = ((sum_sq / m - p_hat * p_hat) * m / (m - 1.0)).max(0.0);
        let stderr = sqrt(var / m);
        let (rate_hat, rate_stderr) = if p_hat > 0.0 {
            (-log(p_hat) / n as f64, stderr / (p_hat * n as f64))
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        let ess = if sum_sq > 0.0 { sum * sum / sum_sq } else { 0.0 };
        let warning = (ess < MIN_ESS).then(|| alloc::format!("effective sample size {ess:.3} is below {MIN_ESS}"));
        Ok(SimulationReport {
            dist: self.dist,
            mode: self.mode,
            normalized: self.normalized,
            n,
            w: self.w,
            tilt: self.tilt,
            p_hat,
            stderr,
            rate_hat,
            rate_stderr,
            samples: self.samples,
            hits,
            seed: self.seed,
            effective_sample_size: ess,
            acceptance_rate: if proposals == 0 { 1.0 } else { draws as f64 / proposals as f64 },
            warning,
        })
    }

    /// All chunks in order on the current thread.
    pub fn run(&self) -> Result<SimulationReport> {
        let chunks = (0..self.chunk_count()).map(|i| self.run_chunk(i)).collect::<Result<Vec<_>>>()?;
        self.finish(chunks)
    }
}

/// Tilted estimate of `P(W ≥ w)` with the default chunk size.
pub fn estimate_tail(
    dist: DistributionSpec,
    arr: &DirectionArray,
    w: f64,
    samples: usize,
    seed: u64,
) -> Result<SimulationReport> {
    TailEstimator::new(dist, arr, w, samples, seed, DEFAULT_CHUNK)?.run()
}

/// [`estimate_tail`] on normalized rows for every `n` in `n_set`; rows are
/// generated from `seed` (column-constant rows share one realization).
pub fn rate_scan(
    dist: DistributionSpec,
    mode: DirectionMode,
    w: f64,
    n_set: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<SimulationReport>> {
    generate_many(mode, n_set, seed, true)?.iter().map(|arr| estimate_tail(dist, arr, w, samples, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::generate;

    #[test]
    fn tilt_values() {
        let r = DistributionSpec::rademacher();
        let iota = generate(DirectionMode::CramerIota, 30, 0, true).unwrap();
        assert_eq!(choose_tilt(r, &iota, 0.0).unwrap(), 0.0);
        assert!((choose_tilt(r, &iota, 0.3).unwrap() - 0.3f64.atanh()).abs() < 1e-9);
        let g = DistributionSpec::gaussian_alpha(1.4).unwrap();
        assert!((choose_tilt(g, &iota, 0.5).unwrap() - 2.0 * 0.5 / (1.4 * 1.4)).abs() < 1e-10);
        assert!(matches!(choose_tilt(r, &iota, 1.2), Err(Error::InfeasibleThreshold { .. })));
        assert!(matches!(choose_tilt(r, &iota, 1.0), Err(Error::InfeasibleThreshold { .. })));
    }

    /// Exact P(W ≥ w) for Rademacher along ι at n = 10 by enumerating 2^10 signs.
    fn enumerate(w: f64) -> f64 {
        let n = 10u32;
        let mut hits = 0u32;
        for mask in 0u32..(1 << n) {
            let s = 2 * mask.count_ones() as i32 - n as i32;
            if s as f64 / n as f64 >= w - 1e-12 {
                hits += 1;
            }
        }
        hits as f64 / 1024.0
    }

    #[test]
    fn unbiased_against_enumeration() {
        let r = DistributionSpec::rademacher();
        let iota = generate(DirectionMode::CramerIota, 10, 0, true).unwrap();
        for w in [0.2, 0.4, 0.6] {
            let rep = estimate_tail(r, &iota, w, 100_000, 17).unwrap();
            let exact = enumerate(w);
            assert!((rep.p_hat - exact).abs() < 4.0 * rep.stderr, "w={w}: {} vs {exact} ± {}", rep.p_hat, rep.stderr);
        }
    }

    #[test]
    fn zero_tilt_is_plain_frequency() {
        let d = DistributionSpec::uniform_symmetric(1.0).unwrap();
        let arr = generate(DirectionMode::GaussianIndependent, 7, 2, true).unwrap();
        let est = TailEstimator::with_tilt(d, &arr, 0.2, 0.0, 3000, 5, 1000).unwrap();
        let rep = est.run().unwrap();
        let c = arr.effective_weights();
        let mut hits = 0usize;
        for chunk in 0..3u64 {
            let mut rng = stream(5, Domain::TailChunk, 7, chunk);
            for _ in 0..1000 {
                let s: f64 = c.iter().map(|&ci| ci * d.draw(&mut rng)).sum();
                if s / 7.0 >= 0.2 - THRESHOLD_SLACK {
                    hits += 1;
                }
            }
        }
        assert_eq!(rep.hits, hits);
        assert_eq!(rep.p_hat, hits as f64 / 3000.0);
    }

    #[test]
    fn chunk_order_does_not_matter() {
        let d = DistributionSpec::generalized_normal(1.0, 3.0).unwrap();
        let arr = generate(DirectionMode::GaussianIndependent, 12, 1, true).unwrap();
        let est = TailEstimator::new(d, &arr, 0.4, 5000, 9, 512).unwrap();
        let forward = est.run().unwrap();
        let mut chunks: Vec<ChunkStats> = (0..est.chunk_count()).rev().map(|i| est.run_chunk(i).unwrap()).collect();
        chunks.swap(0, 3);
        assert_eq!(est.finish(chunks).unwrap(), forward);
        assert!(est.finish(alloc::vec![est.run_chunk(0).unwrap()]).is_err());
    }

    #[test]
    fn symmetric_half() {
        let d = DistributionSpec::gaussian_alpha(1.0).unwrap();
        let arr = generate(DirectionMode::GaussianIndependent, 9, 4, true).unwrap();
        let rep = estimate_tail(d, &arr, 0.0, 100_000, 3).unwrap();
        assert_eq!(rep.tilt, 0.0);
        assert!((rep.p_hat - 0.5).abs() < 3.0 * rep.stderr);
    }

    #[test]
    fn reports_warning_on_degenerate_weights() {
        let d = DistributionSpec::rademacher();
        let iota = generate(DirectionMode::CramerIota, 10, 0, true).unwrap();
        // plain sampling of a 2^-10 event with 1000 draws yields almost no hits
        let rep = TailEstimator::with_tilt(d, &iota, 1.0, 0.0, 1000, 1, 1000).unwrap().run().unwrap();
        assert!(rep.warning.is_some());
        assert!(TailEstimator::new(d, &iota, 0.1, 999, 1, 100).is_err());
    }

    #[test]
    fn rate_scan_shapes() {
        let d = DistributionSpec::rademacher();
        let reps = rate_scan(d, DirectionMode::GaussianColumnConstant, 0.3, &[20, 40], 2000, 1).unwrap();
        assert_eq!(reps.iter().map(|r| r.n).collect::<Vec<_>>(), [20, 40]);
        assert!(reps.iter().all(|r| r.rate_hat.is_finite() && r.normalized));
    }
}
