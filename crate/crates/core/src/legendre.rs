//! Legendre transform `f*(w) = sup_t {tw − f(t)}` of a smooth convex function
//! given value and derivative oracles.
//!
//! Whether the supremum is attained is decided from the closure of the
//! derivative's range: inside it the stationarity equation `f′(t) = w` is
//! bracketed and solved, outside it the transform is `+∞`, and on its boundary
//! the supremum is the limit of `tw − f(t)` along `t = ±2^k`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::{DistributionSpec, LogMgfOracle};
use crate::error::{Error, Result};
use crate::math::abs;
use crate::quad::PsiOracle;

pub const STATIONARITY_TOL: f64 = 1e-10;
pub const MAX_DOUBLINGS: i32 = 60;
const MAX_ITER: usize = 300;

/// Value and derivative of a differentiable convex function. The derivative
/// may return `±∞` outside the function's effective domain; `NaN` is an error.
pub trait ConvexOracle {
    fn value(&self, t: f64) -> Result<f64>;
    fn derivative(&self, t: f64) -> Result<f64>;
    /// `(inf f′, sup f′)` as extended reals.
    fn derivative_range(&self) -> (f64, f64);
}

impl<T: ConvexOracle + ?Sized> ConvexOracle for &T {
    fn value(&self, t: f64) -> Result<f64> {
        (**self).value(t)
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        (**self).derivative(t)
    }
    fn derivative_range(&self) -> (f64, f64) {
        (**self).derivative_range()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateResult {
    pub w: f64,
    /// `+∞` outside the effective domain.
    pub value: f64,
    /// Maximizing `t`, present only when attained.
    pub tilt: Option<f64>,
    pub attained: bool,
}

impl ConjugateResult {
    fn infinite(w: f64) -> Self {
        Self { w, value: f64::INFINITY, tilt: None, attained: false }
    }
}

/// `f*(w)` and its maximizer. See the module docs for the three regimes.
pub fn conjugate<F: ConvexOracle + ?Sized>(f: &F, w: f64) -> Result<ConjugateResult> {
    if !w.is_finite() {
        return Err(Error::Domain(w));
    }
    let (lo, hi) = f.derivative_range();
    if w < lo || w > hi {
        return Ok(ConjugateResult::infinite(w));
    }
    if w == lo || w == hi {
        return boundary(f, w);
    }
    let floor = -finite_value(f, 0.0)?;
    let d0 = derivative(f, 0.0)?;
    if d0 == w {
        return Ok(ConjugateResult { w, value: floor, tilt: Some(0.0), attained: true });
    }
    let dir = if w > d0 { 1.0 } else { -1.0 };
    let g = |t: f64| derivative(f, t).map(|d| d - w);
    let (mut a, mut ga) = (0.0, d0 - w);
    for k in 0..=MAX_DOUBLINGS {
        let b = dir * libm::ldexp(1.0, k);
        let gb = g(b)?;
        if gb == 0.0 || gb.signum() != ga.signum() {
            let t = if gb == 0.0 { b } else { brent(g, a, ga, b, gb, STATIONARITY_TOL * (1.0 + abs(w)))? };
            let value = t * w - finite_value(f, t)?;
            return Ok(ConjugateResult { w, value: value.max(floor), tilt: Some(t), attained: true });
        }
        a = b;
        ga = gb;
    }
    boundary(f, w)
}

/// Limit of `tw − f(t)` along `t = sign(w)·2^k`; the sequence is non-decreasing
/// because `f′ ≤ w` on the way out.
fn boundary<F: ConvexOracle + ?Sized>(f: &F, w: f64) -> Result<ConjugateResult> {
    let floor = -finite_value(f, 0.0)?;
    let dir = if w < 0.0 { -1.0 } else { 1.0 };
    let mut best = floor;
    let mut prev = floor;
    for k in 0..=MAX_DOUBLINGS {
        let t = dir * libm::ldexp(1.0, k);
        let v = t * w - finite_value(f, t)?;
        best = best.max(v);
        if abs(v - prev) <= 1e-12 * (1.0 + abs(v)) {
            return Ok(ConjugateResult { w, value: best, tilt: None, attained: false });
        }
        prev = v;
    }
    Ok(ConjugateResult::infinite(w))
}

fn finite_value<F: ConvexOracle + ?Sized>(f: &F, t: f64) -> Result<f64> {
    let v = f.value(t)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Oracle { at: t })
    }
}

fn derivative<F: ConvexOracle + ?Sized>(f: &F, t: f64) -> Result<f64> {
    let d = f.derivative(t)?;
    if d.is_nan() {
        Err(Error::Oracle { at: t })
    } else {
        Ok(d)
    }
}

/// Brent's method on a sign-changing bracket, stopping once `|g| ≤ ytol` or the
/// bracket reaches machine resolution. Interpolation steps are skipped while
/// any stored residual is infinite.
pub(crate) fn brent<G: Fn(f64) -> Result<f64>>(g: G, x1: f64, f1: f64, x2: f64, f2: f64, ytol: f64) -> Result<f64> {
    let (mut a, mut b, mut c) = (x1, x2, x2);
    let (mut fa, mut fb) = (f1, f2);
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if (fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if abs(fc) < abs(fb) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * abs(b) + 1e-300;
        let xm = 0.5 * (c - b);
        if abs(fb) <= ytol || abs(xm) <= tol1 {
            return Ok(b);
        }
        let smooth = fa.is_finite() && fb.is_finite() && fc.is_finite();
        if smooth && abs(e) >= tol1 && abs(fa) > abs(fb) {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = abs(p);
            if 2.0 * p < (3.0 * xm * q - abs(tol1 * q)).min(abs(e * q)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if abs(d) > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b)?;
    }
    Ok(b)
}

/// Which rate function a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateKind {
    /// `Λ*`, the rate along the constant direction.
    CramerRate,
    /// `Ψ*`, the rate along almost every direction.
    UniversalRate,
}

impl RateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RateKind::CramerRate => "CramerRate",
            RateKind::UniversalRate => "UniversalRate",
        }
    }
}

/// `Λ` or `Ψ` of one distribution behind a single oracle type.
#[derive(Debug, Clone)]
pub enum RateOracle {
    Cramer(LogMgfOracle),
    Universal(PsiOracle),
}

impl RateOracle {
    pub fn new(dist: DistributionSpec, kind: RateKind) -> Self {
        match kind {
            RateKind::CramerRate => RateOracle::Cramer(LogMgfOracle::new(dist)),
            RateKind::UniversalRate => RateOracle::Universal(PsiOracle::new(dist)),
        }
    }
}

impl ConvexOracle for RateOracle {
    fn value(&self, t: f64) -> Result<f64> {
        match self {
            RateOracle::Cramer(o) => o.value(t),
            RateOracle::Universal(o) => o.value(t),
        }
    }
    fn derivative(&self, t: f64) -> Result<f64> {
        match self {
            RateOracle::Cramer(o) => o.derivative(t),
            RateOracle::Universal(o) => o.derivative(t),
        }
    }
    fn derivative_range(&self) -> (f64, f64) {
        match self {
            RateOracle::Cramer(o) => o.derivative_range(),
            RateOracle::Universal(o) => ConvexOracle::derivative_range(o),
        }
    }
}

/// The conjugate viewed as a convex function of `w`, with derivative equal to
/// the maximizing tilt (`±∞` off the interior of the domain).
#[derive(Debug, Clone)]
pub struct Conjugated<F>(pub F);

impl<F: ConvexOracle> ConvexOracle for Conjugated<F> {
    fn value(&self, w: f64) -> Result<f64> {
        Ok(conjugate(&self.0, w)?.value)
    }
    fn derivative(&self, w: f64) -> Result<f64> {
        let r = conjugate(&self.0, w)?;
        Ok(match r.tilt {
            Some(t) => t,
            None if w > 0.0 => f64::INFINITY,
            None => f64::NEG_INFINITY,
        })
    }
    fn derivative_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFunctionTable {
    pub kind: RateKind,
    pub dist: DistributionSpec,
    pub grid: Vec<f64>,
    pub results: Vec<ConjugateResult>,
}

impl RateFunctionTable {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.results.iter().map(|r| r.value)
    }
}

/// Checks that a grid is finite and non-decreasing.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if let Some(w) = grid.iter().find(|w| !w.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!("grid value {w} is not finite")));
    }
    if grid.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::InvalidArgument("grid must be sorted".into()));
    }
    Ok(())
}

/// Applies [`conjugate`] at every grid point with `f = Λ` or `f = Ψ`.
pub fn rate_table(dist: DistributionSpec, kind: RateKind, grid: &[f64]) -> Result<RateFunctionTable> {
    validate_grid(grid)?;
    let oracle = RateOracle::new(dist, kind);
    let results = grid.iter().map(|&w| conjugate(&oracle, w)).collect::<Result<Vec<_>>>()?;
    Ok(RateFunctionTable { kind, dist, grid: grid.to_vec(), results })
}
