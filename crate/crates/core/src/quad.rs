//! Gaussian expectations `E[g(Z)]`, `Z ~ N(0, 1)`, for the universal log-mgf
//! `Ψ(t) = E[Λ(tZ)]`, its derivative `Ψ′(t) = E[Z Λ′(tZ)]` and the
//! integrability functional `E[|Λ(tZ)|⁴]`.
//!
//! The primary rule is Gauss–Hermite with the substitution `u = √2 x`, run at
//! `N` and `2N` nodes and escalated up to 512 nodes until consecutive values
//! agree. Integrands with complex singularities close to the real axis (for
//! instance `log cosh(tu)` at large `|t|`, whose poles sit at `±iπ/(2t)`) defeat
//! any global Gaussian rule; those fall back to a composite Gauss–Legendre
//! rule whose panels near the origin shrink like `1/|t|`.

use alloc::vec::Vec;

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::legendre::ConvexOracle;
use crate::math::{abs, exp, sqrt};

/// Node counts with cached Gauss–Hermite tables.
pub const NODE_COUNTS: [usize; 4] = [64, 128, 256, 512];
pub const DEFAULT_NODES: usize = 128;
/// Consecutive estimates must agree to this (relative once |value| > 1).
pub const AGREEMENT_TOL: f64 = 1e-9;
/// Upper truncation of the Gaussian measure for the composite rule;
/// `φ(14) ≈ 2e−43`.
const COMPOSITE_RADIUS: f64 = 14.0;
const MAX_PANELS: usize = 1 << 16;

/// `E|Z| = √(2/π)`.
pub const MEAN_ABS_NORMAL: f64 = 0.797_884_560_802_865_4;

/// How an [`Estimate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GaussHermite { nodes: usize },
    CompositeLegendre { panels: usize },
}

/// Quadrature value with the gap between the last two refinements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

/// Positive half of a symmetric rule for `E[g(Z)]`: all integrands here are
/// even in `u`, so `E[g(Z)] = Σ w_i g(u_i)` over `u_i > 0` with doubled weights.
#[derive(Debug, Clone)]
struct HalfRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl HalfRule {
    fn hermite(n: usize) -> Self {
        let (x, w) = gauss_hermite(n);
        let scale = 2.0 / sqrt(core::f64::consts::PI);
        let mut nodes = Vec::with_capacity(n / 2);
        let mut weights = Vec::with_capacity(n / 2);
        for i in 0..n / 2 {
            nodes.push(core::f64::consts::SQRT_2 * x[i]);
            weights.push(scale * w[i]);
        }
        Self { nodes, weights }
    }

    fn apply<G: Fn(f64) -> Result<f64>>(&self, g: &G) -> Result<f64> {
        let mut s = 0.0;
        for (&u, &w) in self.nodes.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            s += w * g(u)?;
        }
        Ok(s)
    }
}

/// Gauss–Hermite nodes (descending) and weights for the weight `exp(−x²)`.
/// Starting values are eigenvalues of the Jacobi matrix; each is polished by
/// Newton steps on the orthonormal recurrence, which also yields the weight.
/// Weights of the outermost nodes underflow to zero for large `n`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{−1/4}
    let off: Vec<f64> = (0..n).map(|k| if k + 1 < n { sqrt((k + 1) as f64 / 2.0) } else { 0.0 }).collect();
    let mut guess = tridiagonal_eigenvalues(alloc::vec![0.0; n], off);
    guess.sort_by(|a, b| b.total_cmp(a));
    let nf = n as f64;
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = if n % 2 == 1 && i == n / 2 { 0.0 } else { guess[i] };
        let mut pp = 0.0;
        for iter in 0..20 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * sqrt(2.0 / (jf + 1.0)) * p2 - sqrt(jf / (jf + 1.0)) * p3;
            }
            pp = sqrt(2.0 * nf) * p2;
            let step = p1 / pp;
            if iter > 0 && abs(step) <= 1e-15 * (1.0 + abs(z)) {
                break;
            }
            z -= step;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        let wi = 2.0 / (pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i+1`; the last entry is unused),
/// by the implicit QL method.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Vec<f64> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = abs(d[m]) + abs(d[m + 1]);
                if abs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l || iter == 100 {
                break;
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / pp;
            z -= step;
            if abs(step) <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Quadrature-backed evaluator of `Ψ`, `Ψ′` and the (H2) integral for one
/// catalog member. Construction builds every node table; evaluation is pure.
#[derive(Debug, Clone)]
pub struct PsiOracle {
    dist: DistributionSpec,
    nodes: usize,
    rules: Vec<HalfRule>,
    legendre: (Vec<f64>, Vec<f64>),
}

impl PsiOracle {
    pub fn new(dist: DistributionSpec) -> Self {
        Self {
            dist,
            nodes: DEFAULT_NODES,
            rules: NODE_COUNTS.iter().map(|&n| HalfRule::hermite(n)).collect(),
            legendre: gauss_legendre(16),
        }
    }

    /// Starts the doubling ladder at `nodes` (64, 128 or 256).
    pub fn with_nodes(dist: DistributionSpec, nodes: usize) -> Result<Self> {
        if !NODE_COUNTS[..3].contains(&nodes) {
            return Err(Error::InvalidArgument(alloc::format!(
                "starting node count must be 64, 128 or 256, got {nodes}"
            )));
        }
        Ok(Self { nodes, ..Self::new(dist) })
    }

    pub fn dist(&self) -> DistributionSpec {
        self.dist
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// `Ψ(t)`.
    pub fn psi(&self, t: f64) -> Result<f64> {
        Ok(self.psi_estimate(t)?.value)
    }

    pub fn psi_estimate(&self, t: f64) -> Result<Estimate> {
        check(t)?;
        let d = self.dist;
        self.expect(t, |u| d.log_mgf(t * u))
    }

    /// `Ψ′(t) = E[Z Λ′(tZ)]`.
    pub fn psi_deriv(&self, t: f64) -> Result<f64> {
        Ok(self.psi_deriv_estimate(t)?.value)
    }

    pub fn psi_deriv_estimate(&self, t: f64) -> Result<Estimate> {
        check(t)?;
        let d = self.dist;
        self.expect(t, |u| Ok(u * d.evaluate(t * u)?.d1))
    }

    /// `E[|Λ(tZ)|⁴]`.
    pub fn h2_integral(&self, t: f64) -> Result<f64> {
        Ok(self.h2_estimate(t)?.value)
    }

    pub fn h2_estimate(&self, t: f64) -> Result<Estimate> {
        check(t)?;
        let d = self.dist;
        self.expect(t, |u| {
            let v = d.log_mgf(t * u)?;
            Ok(v * v * v * v)
        })
    }

    /// `Ψ(t)` from one fixed Gauss–Hermite rule, without escalation.
    pub fn psi_fixed(&self, t: f64, nodes: usize) -> Result<f64> {
        check(t)?;
        let i = NODE_COUNTS
            .iter()
            .position(|&n| n == nodes)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("no cached rule with {nodes} nodes")))?;
        let d = self.dist;
        self.rules[i].apply(&|u| d.log_mgf(t * u))
    }

    /// `(inf Ψ′, sup Ψ′)`: `Ψ′(t) → E|Z| · sup Λ′` as `t → ∞`.
    pub fn derivative_range(&self) -> (f64, f64) {
        let (lo, hi) = self.dist.derivative_range();
        (MEAN_ABS_NORMAL * lo, MEAN_ABS_NORMAL * hi)
    }

    fn expect<G: Fn(f64) -> Result<f64>>(&self, t: f64, g: G) -> Result<Estimate> {
        let start = NODE_COUNTS.iter().position(|&n| n == self.nodes).unwrap_or(1);
        let mut prev = self.rules[start].apply(&g)?;
        for (rule, &nodes) in self.rules.iter().zip(&NODE_COUNTS).skip(start + 1) {
            let next = rule.apply(&g)?;
            let gap = abs(next - prev);
            if !next.is_finite() {
                return Err(Error::Oracle { at: t });
            }
            if gap <= AGREEMENT_TOL * abs(next).max(1.0) {
                return Ok(Estimate { value: next, error: gap, method: Method::GaussHermite { nodes } });
            }
            prev = next;
        }
        self.composite(t, &g, prev)
    }

    /// Composite 16-point Gauss–Legendre over `[0, R]` against `2φ(u)` on a
    /// graded mesh, checked against the mesh with every panel halved.
    fn composite<G: Fn(f64) -> Result<f64>>(&self, t: f64, g: &G, hermite: f64) -> Result<Estimate> {
        let breaks = graded_mesh(t);
        let panels = breaks.len() - 1;
        if 2 * panels > MAX_PANELS {
            return Err(Error::Accuracy { t, coarse: hermite, fine: f64::NAN });
        }
        let coarse = self.composite_sum(g, &breaks, 1)?;
        let fine = self.composite_sum(g, &breaks, 2)?;
        let gap = abs(fine - coarse);
        if fine.is_finite() && gap <= AGREEMENT_TOL * abs(fine).max(1.0) {
            Ok(Estimate { value: fine, error: gap, method: Method::CompositeLegendre { panels: 2 * panels } })
        } else {
            Err(Error::Accuracy { t, coarse: hermite, fine })
        }
    }

    fn composite_sum<G: Fn(f64) -> Result<f64>>(&self, g: &G, breaks: &[f64], split: usize) -> Result<f64> {
        let (x, w) = &self.legendre;
        // 2φ(u) = √(2/π) e^{−u²/2}
        let norm = sqrt(2.0 / core::f64::consts::PI);
        let mut total = 0.0;
        for pair in breaks.windows(2) {
            let h = (pair[1] - pair[0]) / split as f64;
            for k in 0..split {
                let c = pair[0] + (k as f64 + 0.5) * h;
                let mut s = 0.0;
                for (&xi, &wi) in x.iter().zip(w) {
                    let u = c + 0.5 * h * xi;
                    s += wi * g(u)? * exp(-0.5 * u * u);
                }
                total += 0.5 * h * s;
            }
        }
        Ok(norm * total)
    }
}

/// Breakpoints on `[0, R]` with width `min(1/2, max(1/|t|, u/4))`. The
/// integrands vary on the scale `1/|t|` only near the origin (the poles of
/// `log cosh(tu)` lie on the imaginary axis), so panels may grow with `u`.
fn graded_mesh(t: f64) -> Vec<f64> {
    let floor = (1.0 / abs(t)).min(0.5);
    let mut breaks = alloc::vec![0.0];
    let mut u = 0.0;
    while u < COMPOSITE_RADIUS {
        u = (u + floor.max(0.25 * u).min(0.5)).min(COMPOSITE_RADIUS);
        breaks.push(u);
    }
    breaks
}

fn check(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(t))
    }
}

impl ConvexOracle for PsiOracle {
    fn value(&self, t: f64) -> Result<f64> {
        self.psi(t)
    }

    fn derivative(&self, t: f64) -> Result<f64> {
        self.psi_deriv(t)
    }

    fn derivative_range(&self) -> (f64, f64) {
        PsiOracle::derivative_range(self)
    }
}
