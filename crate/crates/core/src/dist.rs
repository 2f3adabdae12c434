//! Catalog of symmetric source laws with their log-mgfs, samplers and
//! exponentially tilted samplers.
//!
//! Every member has a log-mgf `Λ` that is finite on all of ℝ and even, and
//! satisfies the Gaussian-integrability condition used by the universal rate
//! function. Laws with exponential or heavier tails are rejected at
//! construction.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::integrate3;
use crate::math::{abs, cosh, exp, expm1, lgamma, log, log1p, log_cosh, pow, sech2, signum, sinh, sqrt, tanh};

/// Relative tolerance for quadrature-backed log-mgfs.
pub const LOG_MGF_REL_TOL: f64 = 1e-13;

/// Below this acceptance rate the tilted rejection sampler gives up.
pub const MIN_ACCEPTANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Density ∝ exp(−(|x|/α)^β), β > 1.
    GeneralizedNormal { alpha: f64, beta: f64 },
    /// ±1 with probability 1/2 each.
    Rademacher,
    /// Uniform on [−a, a].
    UniformSymmetric { half_width: f64 },
    /// Density ∝ exp(−(x/α)²), i.e. variance α²/2.
    GaussianAlpha { alpha: f64 },
}

/// A validated member of the distribution catalog.
///
/// Serializes as `{"family": "...", "params": {...}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DistributionSpec {
    family: Family,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", content = "params", deny_unknown_fields)]
enum RawSpec {
    GeneralizedNormal { alpha: f64, beta: f64 },
    Rademacher {},
    UniformSymmetric { half_width: f64 },
    GaussianAlpha { alpha: f64 },
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw {
            RawSpec::GeneralizedNormal { alpha, beta } => Self::generalized_normal(alpha, beta),
            RawSpec::Rademacher {} => Ok(Self::rademacher()),
            RawSpec::UniformSymmetric { half_width } => Self::uniform_symmetric(half_width),
            RawSpec::GaussianAlpha { alpha } => Self::gaussian_alpha(alpha),
        }
    }
}

impl From<DistributionSpec> for RawSpec {
    fn from(spec: DistributionSpec) -> Self {
        match spec.family {
            Family::GeneralizedNormal { alpha, beta } => RawSpec::GeneralizedNormal { alpha, beta },
            Family::Rademacher => RawSpec::Rademacher {},
            Family::UniformSymmetric { half_width } => RawSpec::UniformSymmetric { half_width },
            Family::GaussianAlpha { alpha } => RawSpec::GaussianAlpha { alpha },
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl DistributionSpec {
    /// Generalized normal with scale `alpha` and shape `beta > 1`.
    ///
    /// `beta <= 1` has at most exponential tails, so `Λ` is not finite on all
    /// of ℝ and the law is rejected.
    pub fn generalized_normal(alpha: f64, beta: f64) -> Result<Self> {
        let alpha = positive("alpha", alpha)?;
        if !(beta.is_finite() && beta > 1.0) {
            return Err(Error::InvalidParameter(format!("generalized normal shape beta must be > 1, got {beta}")));
        }
        Ok(Self { family: Family::GeneralizedNormal { alpha, beta } })
    }

    pub fn rademacher() -> Self {
        Self { family: Family::Rademacher }
    }

    pub fn uniform_symmetric(half_width: f64) -> Result<Self> {
        let half_width = positive("half_width", half_width)?;
        Ok(Self { family: Family::UniformSymmetric { half_width } })
    }

    pub fn gaussian_alpha(alpha: f64) -> Result<Self> {
        let alpha = positive("alpha", alpha)?;
        Ok(Self { family: Family::GaussianAlpha { alpha } })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Short label used in CSV outputs; never contains a comma.
    pub fn label(&self) -> String {
        match self.family {
            Family::GeneralizedNormal { alpha, beta } => format!("GeneralizedNormal(alpha={alpha};beta={beta})"),
            Family::Rademacher => String::from("Rademacher"),
            Family::UniformSymmetric { half_width } => format!("UniformSymmetric(half_width={half_width})"),
            Family::GaussianAlpha { alpha } => format!("GaussianAlpha(alpha={alpha})"),
        }
    }

    /// Whether `Λ` is available in closed form.
    pub fn is_analytic(&self) -> bool {
        !matches!(self.family, Family::GeneralizedNormal { beta, .. } if beta != 2.0)
    }

    /// The open interval `(inf Λ′, sup Λ′)`.
    pub fn derivative_range(&self) -> (f64, f64) {
        match self.family {
            Family::Rademacher => (-1.0, 1.0),
            Family::UniformSymmetric { half_width } => (-half_width, half_width),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `Λ(t) = log E[exp(t X)]`.
    pub fn log_mgf(&self, t: f64) -> Result<f64> {
        check_finite(t)?;
        Ok(match self.family {
            Family::Rademacher => log_cosh(t),
            Family::GaussianAlpha { alpha } => 0.25 * alpha * alpha * t * t,
            Family::UniformSymmetric { half_width } => uniform_log_mgf(half_width * t),
            Family::GeneralizedNormal { alpha, beta: 2.0 } => 0.25 * alpha * alpha * t * t,
            Family::GeneralizedNormal { alpha, beta } => gn_log_mgf(alpha, beta, t)?.value,
        })
    }

    /// `(Λ′(t), Λ″(t))`. Quadrature-backed members compute these as the mean
    /// and variance of the `t`-tilted law.
    pub fn log_mgf_derivs(&self, t: f64) -> Result<(f64, f64)> {
        let e = self.evaluate(t)?;
        Ok((e.d1, e.d2))
    }

    /// `Λ`, `Λ′` and `Λ″` in one pass.
    pub fn evaluate(&self, t: f64) -> Result<LogMgfValue> {
        check_finite(t)?;
        Ok(match self.family {
            Family::Rademacher => LogMgfValue { value: log_cosh(t), d1: tanh(t), d2: sech2(t) },
            Family::GaussianAlpha { alpha } => gaussian_value(alpha, t),
            Family::GeneralizedNormal { alpha, beta: 2.0 } => gaussian_value(alpha, t),
            Family::UniformSymmetric { half_width } => {
                let x = half_width * t;
                LogMgfValue {
                    value: uniform_log_mgf(x),
                    d1: half_width * langevin(x),
                    d2: half_width * half_width * langevin_deriv(x),
                }
            }
            Family::GeneralizedNormal { alpha, beta } => gn_log_mgf(alpha, beta, t)?,
        })
    }

    /// `E|X|^order` for even `order >= 2`.
    pub fn absolute_moment(&self, order: u32) -> Result<f64> {
        if order < 2 || order % 2 == 1 {
            return Err(Error::InvalidArgument(format!("absolute moment order must be even and >= 2, got {order}")));
        }
        let k = (order / 2) as i32;
        let p = order as f64;
        Ok(match self.family {
            Family::Rademacher => 1.0,
            Family::UniformSymmetric { half_width } => pow(half_width, p) / (p + 1.0),
            Family::GaussianAlpha { alpha } => gaussian_even_moment(alpha, k),
            Family::GeneralizedNormal { alpha, beta } => {
                pow(alpha, p) * exp(lgamma((p + 1.0) / beta) - lgamma(1.0 / beta))
            }
        })
    }

    /// `count` i.i.d. draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.draw(rng)).collect()
    }

    /// One plain draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            Family::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Family::GaussianAlpha { alpha } => {
                let z: f64 = StandardNormal.sample(rng);
                alpha * core::f64::consts::FRAC_1_SQRT_2 * z
            }
            Family::UniformSymmetric { half_width } => half_width * (2.0 * rng.random::<f64>() - 1.0),
            Family::GeneralizedNormal { alpha, beta } => {
                // |X|/α = G^{1/β} with G ~ Gamma(1/β, 1); the sign is independent.
                let gamma = Gamma::new(1.0 / beta, 1.0).expect("shape 1/beta is positive");
                let g: f64 = gamma.sample(rng);
                let mag = alpha * pow(g, 1.0 / beta);
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            }
        }
    }

    /// `count` i.i.d. draws from the tilted law `dγ_t/dγ(x) = exp(t x − Λ(t))`.
    pub fn sample_tilted<R: Rng + ?Sized>(&self, tilt: f64, rng: &mut R, count: usize) -> Result<TiltedDraws> {
        let sampler = TiltedSampler::new(*self, tilt)?;
        let mut values = Vec::with_capacity(count);
        let mut tries: u64 = 0;
        for _ in 0..count {
            let (x, k) = sampler.draw(rng)?;
            tries += u64::from(k);
            values.push(x);
        }
        let acceptance_rate = if tries == 0 { 1.0 } else { count as f64 / tries as f64 };
        if acceptance_rate < MIN_ACCEPTANCE {
            return Err(Error::Envelope { tilt, rate: acceptance_rate });
        }
        Ok(TiltedDraws { values, acceptance_rate })
    }

    /// For generalized normals, the constant `C` and exponent `β/(β−1)` of a
    /// bound `Λ(t) ≤ C|t|^{β/(β−1)} + C` fitted on `t ∈ [−50, 50]`.
    pub fn tail_bound_constant(&self) -> Result<Option<(f64, f64)>> {
        let Family::GeneralizedNormal { beta, .. } = self.family else {
            return Ok(None);
        };
        let exponent = beta / (beta - 1.0);
        let mut excess: f64 = 0.0;
        for i in 0..=200 {
            let t = -50.0 + 0.5 * i as f64;
            excess = excess.max(self.log_mgf(t)? - pow(abs(t), exponent));
        }
        Ok(Some((1.0 + excess, exponent)))
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn check_finite(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(t))
    }
}

/// `Λ(t)` together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMgfValue {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

fn gaussian_value(alpha: f64, t: f64) -> LogMgfValue {
    let v = 0.5 * alpha * alpha;
    LogMgfValue { value: 0.5 * v * t * t, d1: v * t, d2: v }
}

fn gaussian_even_moment(alpha: f64, k: i32) -> f64 {
    // (α²/2)^k (2k−1)!!
    let var = 0.5 * alpha * alpha;
    let mut m = 1.0;
    for j in 1..=k {
        m *= var * (2 * j - 1) as f64;
    }
    m
}

const UNIFORM_SERIES_CUTOFF: f64 = 0.25;

/// `log(sinh x / x)`.
fn uniform_log_mgf(x: f64) -> f64 {
    let a = abs(x);
    if a < UNIFORM_SERIES_CUTOFF {
        let y = a * a;
        y * (1.0 / 6.0
            + y * (-1.0 / 180.0
                + y * (1.0 / 2835.0 + y * (-1.0 / 37800.0 + y * (1.0 / 467775.0 - y * 691.0 / 3831077250.0)))))
    } else {
        // log sinh a = a + log(1 − e^{−2a}) − log 2
        a + log(-expm1(-2.0 * a)) - crate::math::LN_2 - log(a)
    }
}

/// Langevin function `coth x − 1/x`.
fn langevin(x: f64) -> f64 {
    let a = abs(x);
    let v = if a < UNIFORM_SERIES_CUTOFF {
        let y = a * a;
        a * (1.0 / 3.0
            + y * (-1.0 / 45.0
                + y * (2.0 / 945.0
                    + y * (-1.0 / 4725.0
                        + y * (2.0 / 93555.0
                            + y * (-1382.0 / 638512875.0 + y * (4.0 / 18243225.0 - y * 3617.0 / 162820783125.0)))))))
    } else {
        1.0 / tanh(a) - 1.0 / a
    };
    signum(x) * v
}

/// Derivative of the Langevin function, `1/x² − 1/sinh² x`.
fn langevin_deriv(x: f64) -> f64 {
    let a = abs(x);
    if a < UNIFORM_SERIES_CUTOFF {
        let y = a * a;
        1.0 / 3.0
            + y * (-1.0 / 15.0
                + y * (2.0 / 189.0
                    + y * (-1.0 / 675.0
                        + y * (2.0 / 10395.0
                            + y * (-1382.0 / 58046625.0 + y * (4.0 / 1403325.0 - y * 3617.0 / 10854718875.0))))))
    } else if a > 350.0 {
        1.0 / (a * a)
    } else {
        let s = sinh(a);
        1.0 / (a * a) - 1.0 / (s * s)
    }
}

/// Generalized-normal log-mgf by adaptive quadrature in the variable
/// `y = x/α`, with `s = |t| α`.
///
/// Small tilts integrate `cosh(sy) − 1` against `exp(−y^β)` so that
/// `Λ = log1p(·)` keeps full relative accuracy near zero. Larger tilts work in
/// log space around the tilted mode to avoid overflow.
fn gn_log_mgf(alpha: f64, beta: f64, t: f64) -> Result<LogMgfValue> {
    let g_half = exp(lgamma(1.0 + 1.0 / beta)); // ∫_0^∞ exp(−y^β) dy
    if t == 0.0 {
        let var = alpha * alpha * exp(lgamma(3.0 / beta) - lgamma(1.0 / beta));
        return Ok(LogMgfValue { value: 0.0, d1: 0.0, d2: var });
    }
    let sign = signum(t);
    let s = abs(t) * alpha;
    let mode = pow(s / beta, 1.0 / (beta - 1.0));
    let g = |y: f64| s * y - pow(abs(y), beta);
    let g_mode = g(mode);
    let radius = truncation_radius(s, beta, g_mode.max(0.0));

    if s <= beta {
        let f = |y: f64| {
            let e = exp(-pow(y, beta));
            let u = s * y;
            if u < 1.0 {
                let h = sinh(0.5 * u);
                [2.0 * h * h * e, y * sinh(u) * e, y * y * cosh(u) * e]
            } else {
                let ep = 0.5 * exp(u - pow(y, beta));
                let em = 0.5 * exp(-u - pow(y, beta));
                [ep + em - e, y * (ep - em), y * y * (ep + em)]
            }
        };
        let breaks = geometric_breaks(0.0, 1.0, radius);
        let [j0, j1, j2] = integrate3(f, &breaks, LOG_MGF_REL_TOL, |e| [abs(e[0]), abs(e[1]), abs(e[2])])?;
        let m = 1.0 + j0 / g_half;
        let m1 = j1 / g_half / m;
        let m2 = j2 / g_half / m;
        return Ok(LogMgfValue {
            value: log1p(j0 / g_half),
            d1: sign * alpha * m1,
            d2: alpha * alpha * (m2 - m1 * m1),
        });
    }

    let width = 1.0 / sqrt(beta * (beta - 1.0) * pow(mode, beta - 2.0));
    let mode_pow = pow(mode, beta);
    // C(β, k) for k = 2..=9
    let mut binom = [0.0; 8];
    let mut c = beta;
    for (i, b) in binom.iter_mut().enumerate() {
        let k = (i + 2) as f64;
        c *= (beta - k + 1.0) / k;
        *b = c;
    }
    // g(mode + d) − g(mode) without cancelling large terms: with u = d/mode
    // and s = β mode^{β−1} it equals mode^β (βu − ((1+u)^β − 1)).
    let excess = |d: f64| {
        let y = mode + d;
        if y <= 0.0 {
            return s * y - pow(-y, beta) - g_mode;
        }
        let u = d / mode;
        if abs(u) < 1e-3 {
            -mode_pow * u * u * binom.iter().rev().fold(0.0, |acc, &b| acc * u + b)
        } else {
            mode_pow * (beta * u - expm1(beta * log1p(u)))
        }
    };
    let f = |d: f64| {
        let e = exp(excess(d));
        [e, d * e, d * d * e]
    };
    let mut breaks = Vec::new();
    breaks.push(-radius - mode);
    breaks.push(-mode);
    let mut k = 32.0;
    while k >= 1.0 {
        if k * width < mode {
            breaks.push(-k * width);
        }
        k *= 0.5;
    }
    breaks.push(0.0);
    let mut k = 1.0;
    while mode + k * width < radius {
        breaks.push(k * width);
        k *= 2.0;
    }
    breaks.push(radius - mode);
    let [i0, i1, i2] = integrate3(f, &breaks, LOG_MGF_REL_TOL, |e| [abs(e[0]), sqrt(abs(e[0] * e[2])), abs(e[2])])?;
    let shift = i1 / i0;
    Ok(LogMgfValue {
        value: g_mode + log(i0) - log(2.0 * g_half),
        d1: sign * alpha * (mode + shift),
        d2: alpha * alpha * (i2 / i0 - shift * shift),
    })
}

/// Radius beyond which `exp(s y − y^β)` is negligible next to its peak.
/// Starts from `max(10, 10 (1+s)^{1/(β−1)})` and grows until the integrand is
/// 60 nats below the peak.
fn truncation_radius(s: f64, beta: f64, peak: f64) -> f64 {
    let mut r = (10.0 * pow(1.0 + s, 1.0 / (beta - 1.0))).max(10.0);
    while s * r - pow(r, beta) + 2.0 * log(r) > peak - 60.0 {
        r *= 1.25;
    }
    r
}

fn geometric_breaks(start: f64, first: f64, end: f64) -> Vec<f64> {
    let mut v = Vec::new();
    v.push(start);
    let mut b = first;
    while b < end {
        v.push(b);
        b *= 2.0;
    }
    v.push(end);
    v
}

/// Output of [`DistributionSpec::sample_tilted`].
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedDraws {
    pub values: Vec<f64>,
    /// Accepted draws over proposals; 1 for direct samplers.
    pub acceptance_rate: f64,
}

/// Reusable sampler for one tilted law.
#[derive(Debug, Clone)]
pub struct TiltedSampler {
    spec: DistributionSpec,
    tilt: f64,
    kind: TiltKind,
}

#[derive(Debug, Clone)]
enum TiltKind {
    Plain,
    Rademacher { p_plus: f64 },
    Gaussian { mean: f64, sd: f64 },
    Uniform { half_width: f64, tau: f64, span: f64, flip: bool },
    LogConcave(Envelope),
}

/// Three-piece envelope for the log-concave tilted generalized normal in
/// `y = x/α`: a flat top on `[lo, hi]` and tangent exponential tails.
#[derive(Debug, Clone)]
struct Envelope {
    alpha: f64,
    beta: f64,
    s: f64,
    flip: bool,
    g_mode: f64,
    lo: f64,
    hi: f64,
    g_lo: f64,
    g_hi: f64,
    slope_lo: f64,
    slope_hi: f64,
    p_left: f64,
    p_mid: f64,
}

impl Envelope {
    fn new(alpha: f64, beta: f64, tilt: f64) -> Self {
        let s = abs(tilt) * alpha;
        let flip = tilt < 0.0;
        let g = |y: f64| s * y - pow(abs(y), beta);
        let dg = |y: f64| s - beta * signum(y) * pow(abs(y), beta - 1.0);
        let mode = pow(s / beta, 1.0 / (beta - 1.0));
        let g_mode = g(mode);
        // Points where the density drops by a factor e on each side.
        let offset = |dir: f64| {
            let mut hi = 1.0;
            while g(mode + dir * hi) > g_mode - 1.0 {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(mode + dir * mid) > g_mode - 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        };
        let lo = mode - offset(-1.0);
        let hi = mode + offset(1.0);
        let (g_lo, g_hi) = (g(lo) - g_mode, g(hi) - g_mode);
        let (slope_lo, slope_hi) = (dg(lo), dg(hi));
        let a_left = exp(g_lo) / slope_lo;
        let a_mid = hi - lo;
        let a_right = exp(g_hi) / (-slope_hi);
        let total = a_left + a_mid + a_right;
        Self {
            alpha,
            beta,
            s,
            flip,
            g_mode,
            lo,
            hi,
            g_lo,
            g_hi,
            slope_lo,
            slope_hi,
            p_left: a_left / total,
            p_mid: a_mid / total,
        }
    }

    fn log_target(&self, y: f64) -> f64 {
        self.s * y - pow(abs(y), self.beta) - self.g_mode
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, u32)> {
        const MAX_TRIES: u32 = 1_000_000;
        for tries in 1..=MAX_TRIES {
            let u: f64 = rng.random();
            let (y, env) = if u < self.p_left {
                let e: f64 = Exp1.sample(rng);
                let y = self.lo - e / self.slope_lo;
                (y, self.g_lo + self.slope_lo * (y - self.lo))
            } else if u < self.p_left + self.p_mid {
                let v: f64 = rng.random();
                (self.lo + (self.hi - self.lo) * v, 0.0)
            } else {
                let e: f64 = Exp1.sample(rng);
                let y = self.hi + e / (-self.slope_hi);
                (y, self.g_hi + self.slope_hi * (y - self.hi))
            };
            let e: f64 = Exp1.sample(rng);
            // Accept with probability exp(log_target − env).
            if -e <= self.log_target(y) - env {
                let x = self.alpha * y;
                return Ok((if self.flip { -x } else { x }, tries));
            }
        }
        Err(Error::Envelope { tilt: if self.flip { -self.s } else { self.s } / self.alpha, rate: 0.0 })
    }
}

impl TiltedSampler {
    pub fn new(spec: DistributionSpec, tilt: f64) -> Result<Self> {
        check_finite(tilt)?;
        let kind = if tilt == 0.0 {
            TiltKind::Plain
        } else {
            match spec.family {
                Family::Rademacher => TiltKind::Rademacher { p_plus: 1.0 / (1.0 + exp(-2.0 * tilt)) },
                Family::GaussianAlpha { alpha } => TiltKind::Gaussian {
                    mean: 0.5 * tilt * alpha * alpha,
                    sd: alpha * core::f64::consts::FRAC_1_SQRT_2,
                },
                Family::UniformSymmetric { half_width } => {
                    let tau = abs(tilt);
                    TiltKind::Uniform { half_width, tau, span: -expm1(-2.0 * tau * half_width), flip: tilt < 0.0 }
                }
                Family::GeneralizedNormal { alpha, beta } => TiltKind::LogConcave(Envelope::new(alpha, beta, tilt)),
            }
        };
        Ok(Self { spec, tilt, kind })
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    pub fn spec(&self) -> DistributionSpec {
        self.spec
    }

    /// One draw and the number of proposals it took.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, u32)> {
        Ok(match &self.kind {
            TiltKind::Plain => (self.spec.draw(rng), 1),
            TiltKind::Rademacher { p_plus } => (if rng.random::<f64>() < *p_plus { 1.0 } else { -1.0 }, 1),
            TiltKind::Gaussian { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                (mean + sd * z, 1)
            }
            TiltKind::Uniform { half_width, tau, span, flip } => {
                // Inverse CDF of density ∝ e^{τx} on [−a, a], written from the right end.
                let v: f64 = rng.random();
                let x = half_width + log1p(-(1.0 - v) * span) / tau;
                let x = x.clamp(-half_width, *half_width);
                (if *flip { -x } else { x }, 1)
            }
            TiltKind::LogConcave(env) => env.draw(rng)?,
        })
    }
}

/// `Λ` of a catalog member viewed as a smooth convex function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMgfOracle {
    pub spec: DistributionSpec,
}

impl LogMgfOracle {
    pub fn new(spec: DistributionSpec) -> Self {
        Self { spec }
    }
}

impl crate::legendre::ConvexOracle for LogMgfOracle {
    fn value(&self, t: f64) -> Result<f64> {
        self.spec.log_mgf(t)
    }

    fn derivative(&self, t: f64) -> Result<f64> {
        Ok(self.spec.evaluate(t)?.d1)
    }

    fn derivative_range(&self) -> (f64, f64) {
        self.spec.derivative_range()
    }
}
