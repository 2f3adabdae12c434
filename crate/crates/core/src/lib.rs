//! Numerical engine for large deviations of scalar projections of i.i.d.
//! vectors.
//!
//! For `X = (X_1, ..., X_n)` i.i.d. with log-mgf `Λ` and a direction
//! `θ ∈ S^{n-1}`, the normalized projection
//!
//! ```text
//! W = n^{-1/2} <X, θ> = (1/n) Σ X_i (√n θ_i)
//! ```
//!
//! obeys Cramér's rate `Λ*` along `ι = n^{-1/2}(1, ..., 1)` and the universal
//! rate `Ψ*` along almost every direction sequence, where
//! `Ψ(t) = E[Λ(tZ)]` for a standard normal `Z`. This crate computes both
//! rate functions, the finite-n log-mgf curves that converge to `Ψ`, and
//! tilted Monte Carlo estimates of `P(W ≥ w)`.
//!
//! The crate is `no_std` (it needs `alloc`). IO, the CLI and parallel drivers
//! live in the `ldproj` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod integrate;
mod math;

pub mod atyp;
pub mod directions;
pub mod dist;
pub mod legendre;
pub mod lmgf;
pub mod mc;
pub mod quad;
pub mod rng;

pub use atyp::{
    check_hypotheses, compare_rates, jensen_check, ComparisonRow, ComparisonTable, Curvature, HypothesisReport,
    JensenReport, PhiMonotonicity,
};
pub use directions::{generate, norm_factor, DirectionArray, DirectionMode};
pub use dist::{DistributionSpec, Family, LogMgfOracle, TiltedDraws, TiltedSampler};
pub use error::{Error, Result};
pub use legendre::{conjugate, rate_table, ConjugateResult, ConvexOracle, RateFunctionTable, RateKind};
pub use lmgf::{convergence_profile, e1_lmgf, finite_lmgf, FiniteLogMgfCurve, ProfileRow};
pub use math::median;
pub use mc::{choose_tilt, estimate_tail, rate_scan, ChunkStats, SimulationReport, TailEstimator};
pub use quad::{Estimate, PsiOracle};
