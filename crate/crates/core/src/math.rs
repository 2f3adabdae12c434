//! Thin float helpers over `libm` (no `std` float intrinsics here).

pub(crate) use libm::{cosh, exp, expm1, fabs as abs, lgamma, log, log1p, pow, sinh, sqrt, tanh};

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

/// `log cosh x` without overflow.
#[inline]
pub(crate) fn log_cosh(x: f64) -> f64 {
    let a = abs(x);
    a + log1p(exp(-2.0 * a)) - LN_2
}

/// `sech² x`, zero once `cosh x` would overflow.
#[inline]
pub(crate) fn sech2(x: f64) -> f64 {
    let a = abs(x);
    if a > 350.0 {
        return 0.0;
    }
    let c = cosh(a);
    1.0 / (c * c)
}

#[inline]
pub(crate) fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Median of a non-empty slice; sorts a copy.
pub fn median(values: &[f64]) -> f64 {
    let mut v = alloc::vec::Vec::from(values);
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
