//! Parallel wrappers around the core computations. Work items are independent
//! and results are collected in input order, so output never depends on the
//! number of worker threads.

use ldproj_core::directions::generate_many;
use ldproj_core::legendre::{validate_grid, RateOracle};
use ldproj_core::lmgf::{profile_rows, psi_values};
use ldproj_core::{
    conjugate, DirectionArray, DirectionMode, DistributionSpec, ProfileRow, RateFunctionTable, RateKind,
    SimulationReport, TailEstimator,
};
use rayon::prelude::*;

use crate::error::CliError;

/// Pool with `threads` workers; `None` uses rayon's default.
pub fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        if k == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        b = b.num_threads(k);
    }
    Ok(b.build()?)
}

pub fn rate_table(dist: DistributionSpec, kind: RateKind, grid: &[f64]) -> Result<RateFunctionTable, CliError> {
    validate_grid(grid)?;
    let oracle = RateOracle::new(dist, kind);
    let results = grid.par_iter().map(|&w| conjugate(&oracle, w)).collect::<Result<Vec<_>, _>>()?;
    Ok(RateFunctionTable { kind, dist, grid: grid.to_vec(), results })
}

pub fn estimate(
    dist: DistributionSpec,
    arr: &DirectionArray,
    w: f64,
    samples: usize,
    seed: u64,
    chunk_size: usize,
) -> Result<SimulationReport, CliError> {
    let est = TailEstimator::new(dist, arr, w, samples, seed, chunk_size)?;
    let chunks = (0..est.chunk_count()).into_par_iter().map(|i| est.run_chunk(i)).collect::<Result<Vec<_>, _>>()?;
    Ok(est.finish(chunks)?)
}

/// Normalized rows for `n_set` from one seed, in `n_set` order.
pub fn arrays(mode: DirectionMode, n_set: &[usize], seed: u64) -> Result<Vec<DirectionArray>, CliError> {
    Ok(generate_many(mode, n_set, seed, true)?)
}

/// Gap rows for seeds `seed, seed + 1, …` (wrapping), seed-major.
pub fn profile(
    dist: DistributionSpec,
    mode: DirectionMode,
    seed: u64,
    seed_count: u64,
    t_set: &[f64],
    n_set: &[usize],
) -> Result<Vec<ProfileRow>, CliError> {
    let psi = psi_values(dist, t_set)?;
    let per_seed = (0..seed_count)
        .into_par_iter()
        .map(|k| profile_rows(dist, mode, seed.wrapping_add(k), t_set, &psi, n_set))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_seed.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ldproj_core::{estimate_tail, generate};

    #[test]
    fn parallel_matches_serial() {
        let r = DistributionSpec::rademacher();
        let grid = [-1.5, -0.5, 0.0, 0.3, 1.0];
        let p = pool(Some(3)).unwrap();
        let par = p.install(|| rate_table(r, RateKind::UniversalRate, &grid)).unwrap();
        assert_eq!(par, ldproj_core::rate_table(r, RateKind::UniversalRate, &grid).unwrap());

        let arr = generate(DirectionMode::CramerIota, 40, 0, true).unwrap();
        let a = p.install(|| estimate(r, &arr, 0.3, 20_000, 9, ldproj_core::mc::DEFAULT_CHUNK)).unwrap();
        assert_eq!(a, estimate_tail(r, &arr, 0.3, 20_000, 9).unwrap());
    }

    #[test]
    fn zero_threads_rejected() {
        assert_eq!(pool(Some(0)).unwrap_err().exit_code(), 2);
    }
}
