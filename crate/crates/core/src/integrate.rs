//! Globally adaptive Gauss–Kronrod (7/15) quadrature for three moment
//! integrands evaluated in one pass.

#![allow(clippy::excessive_precision)] // published tables, kept verbatim

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::abs;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub(crate) type Vec3 = [f64; 3];

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    est: Vec3,
    err: Vec3,
}

fn gk15<F: Fn(f64) -> Vec3>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = [0.0; 3];
    let mut gauss = [0.0; 3];
    let fc = f(c);
    for k in 0..3 {
        kron[k] = WGK[7] * fc[k];
        gauss[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for k in 0..3 {
            let s = f1[k] + f2[k];
            kron[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut est = [0.0; 3];
    let mut err = [0.0; 3];
    for k in 0..3 {
        est[k] = kron[k] * h;
        err[k] = abs((kron[k] - gauss[k]) * h);
    }
    Panel { a, b, est, err }
}

/// Integrates `f` over the union of consecutive intervals given by
/// `breaks` (sorted). Stops once `err[k] <= rel_tol * scale(est)[k]` for every
/// component, splitting the panel with the largest weighted error otherwise.
pub(crate) fn integrate3<F, S>(f: F, breaks: &[f64], rel_tol: f64, scale: S) -> Result<Vec3>
where
    F: Fn(f64) -> Vec3,
    S: Fn(&Vec3) -> Vec3,
{
    const MAX_PANELS: usize = 4000;
    let mut panels: Vec<Panel> = breaks.windows(2).filter(|w| w[1] > w[0]).map(|w| gk15(&f, w[0], w[1])).collect();
    loop {
        let mut est = [0.0; 3];
        let mut err = [0.0; 3];
        for p in &panels {
            for k in 0..3 {
                est[k] += p.est[k];
                err[k] += p.err[k];
            }
        }
        let sc = scale(&est);
        let tol = [rel_tol * sc[0], rel_tol * sc[1], rel_tol * sc[2]];
        if (0..3).all(|k| err[k] <= tol[k]) {
            return Ok(est);
        }
        if panels.len() >= MAX_PANELS {
            let worst = (0..3).map(|k| err[k] / sc[k].max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
            return Err(Error::Integration { error: worst });
        }
        // Split the panel whose error is largest relative to the tolerance.
        let mut worst_i = 0;
        let mut worst_r = -1.0;
        for (i, p) in panels.iter().enumerate() {
            let r = (0..3).map(|k| p.err[k] / tol[k].max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
            if r > worst_r {
                worst_r = r;
                worst_i = i;
            }
        }
        let p = panels.swap_remove(worst_i);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // Interval exhausted at machine resolution; accept what we have.
            return Ok(est);
        }
        panels.push(gk15(&f, p.a, mid));
        panels.push(gk15(&f, mid, p.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::exp;

    #[test]
    fn integrates_gaussian_moments() {
        let f = |x: f64| {
            let g = exp(-0.5 * x * x);
            [g, x * x * g, x * x * x * x * g]
        };
        let r = integrate3(f, &[-12.0, 0.0, 12.0], 1e-13, |e| [abs(e[0]), abs(e[1]), abs(e[2])]).unwrap();
        let s = (2.0 * core::f64::consts::PI).sqrt();
        assert!((r[0] / s - 1.0).abs() < 1e-13);
        assert!((r[1] / s - 1.0).abs() < 1e-13);
        assert!((r[2] / s - 3.0).abs() < 1e-12);
    }

    #[test]
    fn handles_fractional_power_kink() {
        // ∫_0^∞ exp(-x^1.5) dx = Γ(1 + 1/1.5)
        let f = |x: f64| {
            let g = exp(-libm::pow(x, 1.5));
            [g, x * g, 0.0]
        };
        let r = integrate3(f, &[0.0, 60.0], 1e-13, |e| [abs(e[0]), abs(e[1]), 1.0]).unwrap();
        let want = libm::tgamma(1.0 + 1.0 / 1.5);
        assert!((r[0] - want).abs() < 1e-12 * want);
        let want1 = libm::tgamma(2.0 / 1.5) / 1.5;
        assert!((r[1] - want1).abs() < 1e-12 * want1);
    }
}
