//! Hypothesis checks and the comparison of `Λ*` with `Ψ*`.
//!
//! When `s ↦ Λ(√s)` is concave, Jensen's inequality gives `Ψ ≤ Λ`, hence
//! `Ψ* ≥ Λ*`: projections along a typical direction are rarer than along the
//! constant direction. Convexity reverses both inequalities and linearity (the
//! Gaussian case) makes them equalities.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::legendre::{rate_table, RateFunctionTable, RateKind};
use crate::math::{abs, log, pow};
use crate::quad::PsiOracle;

/// `s` grid for the curvature of `Λ∘√`: log-spaced on `[1e−4, 1e2]`.
pub const CURVATURE_POINTS: usize = 61;
pub const CURVATURE_TOL: f64 = 1e-10;
pub const H2_POINTS: [f64; 3] = [1.0, 2.0, 5.0];
pub const H2PRIME_MAX_SLOPE: f64 = 1.95;
pub const PHI_MAX_K: u32 = 10;

pub const GAP_SLACK: f64 = 1e-8;
pub const GAP_MARGIN: f64 = 1e-6;
pub const GAP_MARGIN_FROM: f64 = 0.25;
pub const JENSEN_SLACK: f64 = 1e-9;
pub const JENSEN_STRICT: f64 = 1e-8;
pub const JENSEN_STRICT_FROM: f64 = 0.5;
pub const JENSEN_LINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Curvature {
    Concave,
    Convex,
    Linear,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhiMonotonicity {
    NonDecreasing,
    NonIncreasing,
    /// Both at once; the Gaussian case.
    Constant,
    Neither,
}

/// Second divided differences of a function on a grid, with their extremes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEvidence {
    pub class: Curvature,
    /// `(s, second difference)` at the most negative and most positive points.
    pub min: (f64, f64),
    pub max: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Check {
    pub pass: bool,
    /// `(t, E|Λ(tZ)|⁴, quadrature gap)`; the value is `NaN` if quadrature failed.
    pub values: Vec<(f64, f64, f64)>,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H2PrimeCheck {
    pub pass: bool,
    /// Fitted `Λ(t) ≈ C t^r` on `[10, 10³]`.
    pub constant: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H3Check {
    pub pass: bool,
    pub max_asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub dist: DistributionSpec,
    pub h2: H2Check,
    pub h2prime: H2PrimeCheck,
    pub h3: H3Check,
    pub sqrt_curvature: CurvatureEvidence,
    /// `φ(k)` for `k = 1..=10`.
    pub phi: Vec<f64>,
    pub phi_monotonic: PhiMonotonicity,
    /// Curvature of `s ↦ log f(√s)` where a density is available.
    pub density_curvature: Option<Curvature>,
    /// No decisive classification contradicts another.
    pub consistent: bool,
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (log(lo), log(hi));
    (0..points).map(|i| libm::exp(a + (b - a) * i as f64 / (points - 1) as f64)).collect()
}

/// Classifies `g` on `s` by the signs of its second divided differences.
pub fn classify<G: Fn(f64) -> Result<f64>>(g: G, s: &[f64], tol: f64) -> Result<CurvatureEvidence> {
    let f = s.iter().map(|&x| g(x)).collect::<Result<Vec<_>>>()?;
    let mut min = (f64::NAN, f64::INFINITY);
    let mut max = (f64::NAN, f64::NEG_INFINITY);
    for j in 1..s.len() - 1 {
        let left = (f[j] - f[j - 1]) / (s[j] - s[j - 1]);
        let right = (f[j + 1] - f[j]) / (s[j + 1] - s[j]);
        let d = 2.0 * (right - left) / (s[j + 1] - s[j - 1]);
        if d < min.1 {
            min = (s[j], d);
        }
        if d > max.1 {
            max = (s[j], d);
        }
    }
    let class = if abs(min.1) <= tol && abs(max.1) <= tol {
        Curvature::Linear
    } else if max.1 < -tol {
        Curvature::Concave
    } else if min.1 > tol {
        Curvature::Convex
    } else {
        Curvature::Indeterminate
    };
    Ok(CurvatureEvidence { class, min, max })
}

/// Curvature of `s ↦ Λ(√s)` on the standard grid.
pub fn sqrt_curvature(dist: DistributionSpec) -> Result<CurvatureEvidence> {
    classify(|s| dist.log_mgf(libm::sqrt(s)), &log_grid(1e-4, 1e2, CURVATURE_POINTS), CURVATURE_TOL)
}

/// `φ(k) = (2k+1) E|X|^{2k} / E|X|^{2k+2}` for `k = 1..=max_k`.
pub fn phi_values(dist: DistributionSpec, max_k: u32) -> Result<Vec<f64>> {
    (1..=max_k)
        .map(|k| Ok((2 * k + 1) as f64 * dist.absolute_moment(2 * k)? / dist.absolute_moment(2 * k + 2)?))
        .collect()
}

pub fn phi_monotonicity(phi: &[f64]) -> PhiMonotonicity {
    let tol = |a: f64, b: f64| 1e-12 * abs(a).max(abs(b));
    let up = phi.windows(2).all(|p| p[1] - p[0] >= -tol(p[0], p[1]));
    let down = phi.windows(2).all(|p| p[0] - p[1] >= -tol(p[0], p[1]));
    match (up, down) {
        (true, true) => PhiMonotonicity::Constant,
        (true, false) => PhiMonotonicity::NonDecreasing,
        (false, true) => PhiMonotonicity::NonIncreasing,
        _ => PhiMonotonicity::Neither,
    }
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

fn agrees(curv: Curvature, phi: PhiMonotonicity) -> bool {
    matches!(
        (phi, curv),
        (PhiMonotonicity::Neither, _)
            | (_, Curvature::Indeterminate)
            | (PhiMonotonicity::NonDecreasing, Curvature::Concave)
            | (PhiMonotonicity::NonIncreasing, Curvature::Convex)
            | (PhiMonotonicity::Constant, Curvature::Linear)
    )
}

/// Runs (H2), (H2′), (H3), the curvature of `Λ∘√`, the moment-ratio test and,
/// for generalized normals, the curvature of `log f∘√`.
pub fn check_hypotheses(dist: DistributionSpec) -> Result<HypothesisReport> {
    let oracle = PsiOracle::new(dist);
    let mut values = Vec::new();
    let mut pass = true;
    let mut max_residual: f64 = 0.0;
    for &t in &H2_POINTS {
        match oracle.h2_estimate(t) {
            Ok(e) if e.value.is_finite() => {
                max_residual = max_residual.max(e.error);
                values.push((t, e.value, e.error));
            }
            _ => {
                pass = false;
                values.push((t, f64::NAN, f64::NAN));
            }
        }
    }
    let h2 = H2Check { pass, values, max_residual };

    let ts = log_grid(10.0, 1e3, 31);
    let lx: Vec<f64> = ts.iter().map(|&t| log(t)).collect();
    let ly = ts.iter().map(|&t| dist.log_mgf(t).map(log)).collect::<Result<Vec<_>>>()?;
    let (intercept, slope) = least_squares(&lx, &ly);
    let h2prime = H2PrimeCheck { pass: slope < H2PRIME_MAX_SLOPE, constant: libm::exp(intercept), slope };

    let mut max_asymmetry: f64 = 0.0;
    for i in 0..=20 {
        let t = 0.25 * i as f64;
        max_asymmetry = max_asymmetry.max(abs(dist.log_mgf(t)? - dist.log_mgf(-t)?));
    }
    let h3 = H3Check { pass: max_asymmetry <= 1e-10, max_asymmetry };

    let sqrt_curvature = sqrt_curvature(dist)?;
    let phi = phi_values(dist, PHI_MAX_K)?;
    let phi_monotonic = phi_monotonicity(&phi);
    let density_curvature = match dist.family() {
        Family::GeneralizedNormal { alpha, beta } => {
            let ev = classify(
                |s| Ok(-pow(s / (alpha * alpha), 0.5 * beta)),
                &log_grid(1e-4, 1e2, CURVATURE_POINTS),
                CURVATURE_TOL,
            )?;
            Some(ev.class)
        }
        _ => None,
    };
    let density_ok = match density_curvature {
        Some(d) if d != Curvature::Indeterminate && sqrt_curvature.class != Curvature::Indeterminate => {
            d == sqrt_curvature.class
        }
        _ => true,
    };
    let consistent = agrees(sqrt_curvature.class, phi_monotonic) && density_ok;
    Ok(HypothesisReport { dist, h2, h2prime, h3, sqrt_curvature, phi, phi_monotonic, density_curvature, consistent })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub w: f64,
    pub cramer: f64,
    pub universal: f64,
    /// `universal − cramer`; `NaN` when both are infinite.
    pub gap: f64,
    /// Trivial rate of the basis direction: 0 at `w = 0`, `+∞` elsewhere.
    pub chi0: f64,
}

/// A point where the expected ordering fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub w: f64,
    pub gap: f64,
    pub expected: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub dist: DistributionSpec,
    pub curvature: Curvature,
    pub rows: Vec<ComparisonRow>,
    pub violation: Option<Witness>,
}

/// Rate tables, gaps and the first ordering violation (if any) for a known
/// curvature class. Does not fail on violations.
pub fn build_comparison(dist: DistributionSpec, grid: &[f64], curvature: Curvature) -> Result<ComparisonTable> {
    if curvature == Curvature::Indeterminate {
        return Err(Error::Indeterminate);
    }
    let cramer = rate_table(dist, RateKind::CramerRate, grid)?;
    let universal = rate_table(dist, RateKind::UniversalRate, grid)?;
    comparison_from_tables(curvature, &cramer, &universal)
}

/// [`build_comparison`] from precomputed tables on a common grid.
pub fn comparison_from_tables(
    curvature: Curvature,
    cramer: &RateFunctionTable,
    universal: &RateFunctionTable,
) -> Result<ComparisonTable> {
    if curvature == Curvature::Indeterminate {
        return Err(Error::Indeterminate);
    }
    if cramer.kind != RateKind::CramerRate || universal.kind != RateKind::UniversalRate {
        return Err(Error::InvalidArgument("tables must be a Cramér table and a universal table".into()));
    }
    if cramer.grid != universal.grid || cramer.dist != universal.dist {
        return Err(Error::InvalidArgument("tables must share distribution and grid".into()));
    }
    let rows: Vec<ComparisonRow> = cramer
        .grid
        .iter()
        .zip(cramer.values().zip(universal.values()))
        .map(|(&w, (c, u))| {
            let gap = if c.is_infinite() && u.is_infinite() { f64::NAN } else { u - c };
            ComparisonRow { w, cramer: c, universal: u, gap, chi0: if w == 0.0 { 0.0 } else { f64::INFINITY } }
        })
        .collect();
    let violation = rows.iter().find_map(|r| check_row(r, curvature));
    Ok(ComparisonTable { dist: cramer.dist, curvature, rows, violation })
}

fn check_row(r: &ComparisonRow, curvature: Curvature) -> Option<Witness> {
    if r.gap.is_nan() {
        return None;
    }
    let both_finite = r.cramer.is_finite() && r.universal.is_finite();
    let strict = both_finite && abs(r.w) >= GAP_MARGIN_FROM;
    let fail = |expected| Some(Witness { w: r.w, gap: r.gap, expected });
    if r.w == 0.0 && abs(r.gap) > GAP_SLACK {
        return fail("zero gap at w = 0");
    }
    match curvature {
        Curvature::Concave if r.gap < -GAP_SLACK => fail("universal >= cramer"),
        Curvature::Concave if strict && r.gap <= GAP_MARGIN => fail("universal > cramer by 1e-6"),
        Curvature::Convex if r.gap > GAP_SLACK => fail("universal <= cramer"),
        Curvature::Convex if strict && r.gap >= -GAP_MARGIN => fail("universal < cramer by 1e-6"),
        Curvature::Linear if !both_finite || abs(r.gap) > GAP_SLACK => fail("universal == cramer"),
        _ => None,
    }
}

/// Classifies `Λ∘√`, builds both rate tables and enforces the ordering.
pub fn compare_rates(dist: DistributionSpec, grid: &[f64]) -> Result<ComparisonTable> {
    let table = build_comparison(dist, grid, sqrt_curvature(dist)?.class)?;
    match table.violation {
        Some(v) => Err(Error::Verdict { at: v.w, residual: v.gap, expected: v.expected }),
        None => Ok(table),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenReport {
    pub curvature: Curvature,
    /// `(t, Ψ(t) − Λ(t))`.
    pub residuals: Vec<(f64, f64)>,
    /// Largest residual in the forbidden direction (`Ψ − Λ` when concave,
    /// `Λ − Ψ` when convex, `|Ψ − Λ|` when linear).
    pub max_violation: f64,
    pub witness: f64,
}

/// Checks `Ψ ≤ Λ` (concave), `Ψ ≥ Λ` (convex) or `Ψ = Λ` (linear) on a grid,
/// strictly by [`JENSEN_STRICT`] once `|t| ≥ 0.5`.
pub fn jensen_check(dist: DistributionSpec, t_grid: &[f64]) -> Result<JensenReport> {
    let curvature = sqrt_curvature(dist)?.class;
    let sign = match curvature {
        Curvature::Concave => 1.0,
        Curvature::Convex => -1.0,
        Curvature::Linear => 0.0,
        Curvature::Indeterminate => return Err(Error::Indeterminate),
    };
    let oracle = PsiOracle::new(dist);
    let mut residuals = Vec::with_capacity(t_grid.len());
    let (mut max_violation, mut witness) = (f64::NEG_INFINITY, f64::NAN);
    let mut failure = None;
    for &t in t_grid {
        let r = oracle.psi(t)? - dist.log_mgf(t)?;
        residuals.push((t, r));
        let v = if sign == 0.0 { abs(r) } else { sign * r };
        if v > max_violation {
            max_violation = v;
            witness = t;
        }
        if failure.is_some() {
            continue;
        }
        failure = match curvature {
            Curvature::Linear if v > JENSEN_LINEAR_TOL => Some((t, r, "psi == lambda")),
            Curvature::Concave | Curvature::Convex if v > JENSEN_SLACK => Some((t, r, "jensen ordering")),
            Curvature::Concave | Curvature::Convex if abs(t) >= JENSEN_STRICT_FROM && v > -JENSEN_STRICT => {
                Some((t, r, "strict jensen ordering"))
            }
            _ => None,
        };
    }
    if let Some((at, residual, expected)) = failure {
        return Err(Error::Verdict { at, residual, expected });
    }
    Ok(JensenReport { curvature, residuals, max_violation, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gn(beta: f64) -> DistributionSpec {
        DistributionSpec::generalized_normal(1.0, beta).unwrap()
    }

    #[test]
    fn curvature_classes() {
        assert_eq!(sqrt_curvature(DistributionSpec::gaussian_alpha(1.0).unwrap()).unwrap().class, Curvature::Linear);
        assert_eq!(sqrt_curvature(DistributionSpec::rademacher()).unwrap().class, Curvature::Concave);
        assert_eq!(
            sqrt_curvature(DistributionSpec::uniform_symmetric(1.0).unwrap()).unwrap().class,
            Curvature::Concave
        );
        assert_eq!(sqrt_curvature(gn(4.0)).unwrap().class, Curvature::Concave);
        assert_eq!(sqrt_curvature(gn(1.5)).unwrap().class, Curvature::Convex);
    }

    #[test]
    fn classify_mixed_signs() {
        let s: Vec<f64> = (1..30).map(|i| i as f64 * 0.2).collect();
        assert_eq!(classify(|x| Ok(libm::sin(x)), &s, 1e-10).unwrap().class, Curvature::Indeterminate);
    }

    #[test]
    fn phi_rademacher_is_2k_plus_1() {
        let phi = phi_values(DistributionSpec::rademacher(), 10).unwrap();
        for (k, p) in phi.iter().enumerate() {
            assert_eq!(*p, (2 * k + 3) as f64);
        }
        assert_eq!(phi_monotonicity(&phi), PhiMonotonicity::NonDecreasing);
        let g = phi_values(DistributionSpec::gaussian_alpha(1.0).unwrap(), 10).unwrap();
        assert_eq!(phi_monotonicity(&g), PhiMonotonicity::Constant);
        assert_eq!(phi_monotonicity(&[1.0, 2.0, 1.0]), PhiMonotonicity::Neither);
    }

    #[test]
    fn hypothesis_reports() {
        let g = check_hypotheses(DistributionSpec::gaussian_alpha(1.0).unwrap()).unwrap();
        assert!(g.h2.pass && g.h3.pass && g.consistent);
        assert_eq!(g.sqrt_curvature.class, Curvature::Linear);
        assert!(!g.h2prime.pass);
        let r = check_hypotheses(DistributionSpec::rademacher()).unwrap();
        assert!(r.h2.pass && r.h3.pass && r.h2prime.pass && r.consistent);
        assert!((r.h2prime.slope - 1.0).abs() < 0.05);
        for (beta, class) in [(4.0, Curvature::Concave), (1.5, Curvature::Convex)] {
            let h = check_hypotheses(gn(beta)).unwrap();
            assert_eq!(h.sqrt_curvature.class, class);
            assert_eq!(h.density_curvature, Some(class));
            assert!(h.consistent && h.h2.pass);
        }
        let h4 = check_hypotheses(gn(4.0)).unwrap();
        assert!(h4.h2prime.pass && (h4.h2prime.slope - 4.0 / 3.0).abs() < 0.05);
        assert_eq!(h4.phi_monotonic, PhiMonotonicity::NonDecreasing);
    }

    #[test]
    fn gaussian_comparison_has_zero_gap() {
        let grid: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.25).collect();
        let t = compare_rates(DistributionSpec::gaussian_alpha(1.0).unwrap(), &grid).unwrap();
        for r in &t.rows {
            assert!(r.gap.abs() <= 1e-8 && (r.cramer - r.w * r.w).abs() <= 1e-8);
        }
    }

    #[test]
    fn rademacher_comparison() {
        let t = compare_rates(DistributionSpec::rademacher(), &[-1.2, -0.5, 0.0, 0.3, 0.5, 0.79, 0.9]).unwrap();
        assert_eq!(t.curvature, Curvature::Concave);
        let half = t.rows.iter().find(|r| r.w == 0.5).unwrap();
        let h = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((half.cramer - h).abs() < 1e-8 && half.gap > 1e-6);
        let zero = t.rows.iter().find(|r| r.w == 0.0).unwrap();
        assert_eq!((zero.cramer, zero.universal, zero.chi0), (0.0, 0.0, 0.0));
        assert!(t.rows[0].gap.is_nan());
        assert!(t.rows.last().unwrap().universal.is_infinite());
    }

    #[test]
    fn forced_wrong_class_is_reported() {
        let t = build_comparison(DistributionSpec::rademacher(), &[0.0, 0.5], Curvature::Convex).unwrap();
        assert_eq!(t.violation.unwrap().w, 0.5);
        assert!(matches!(
            build_comparison(DistributionSpec::rademacher(), &[0.5], Curvature::Indeterminate),
            Err(Error::Indeterminate)
        ));
    }

    #[test]
    fn jensen_and_ordering_transfer() {
        let grid: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.25).collect();
        let g = jensen_check(DistributionSpec::gaussian_alpha(1.0).unwrap(), &grid).unwrap();
        assert!(g.max_violation <= 1e-12);
        for spec in [DistributionSpec::rademacher(), gn(1.5)] {
            let j = jensen_check(spec, &grid).unwrap();
            assert!(j.max_violation <= JENSEN_SLACK);
            let c = compare_rates(spec, &[-0.5, 0.0, 0.5]).unwrap();
            let sign = if j.curvature == Curvature::Concave { 1.0 } else { -1.0 };
            assert!(c.rows.iter().all(|r| sign * r.gap >= -GAP_SLACK));
        }
    }
}
