//! Slow reference integrators.
//!
//! Everything here is deliberately plain: adaptive Gauss–Kronrod bisection and
//! Romberg-corrected Simpson sums. These routines certify the fast closed
//! forms and share no code with them.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// 15-point Kronrod nodes on [0, 1] half of [-1, 1] (symmetric) with the
// embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
}

/// Adaptive G7–K15 integration of a complex function over `[a, b]`,
/// starting from the given breakpoints (which must lie inside `[a, b]`).
///
/// Converges when the summed Kronrod–Gauss discrepancy is below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Integral> {
    const MAX_PANELS: usize = 200_000;
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breakpoints.iter().copied().filter(|&p| p > a && p < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let (value, e) = kronrod(&f, w[0], w[1]);
        total += value;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value, err: e });
    }
    while err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() > MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] after {MAX_PANELS} panels (error {err:.3e})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature(format!(
                "interval around {mid} cannot be bisected further (error {err:.3e})"
            )));
        }
        let (vl, el) = kronrod(&f, worst.a, mid);
        let (vr, er) = kronrod(&f, mid, worst.b);
        total += vl + vr - worst.value;
        err += el + er - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: vl, err: el });
        heap.push(Panel { a: mid, b: worst.b, value: vr, err: er });
    }
    // Re-add from scratch to limit rounding drift from the running updates.
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.err).sum();
    Ok(Integral { value, error })
}

/// Uniform-grid integral of sampled values: composite Simpson on spacing `h`
/// and `2h`, Richardson-combined. Returns the combined value and the
/// difference between the two Simpson sums as an error estimate.
///
/// The number of samples must be `4m + 1` for some `m >= 1`.
pub fn romberg_simpson(samples: &[Complex64], h: f64) -> Result<Integral> {
    let n = samples.len();
    if n < 5 || !(n - 1).is_multiple_of(4) {
        return Err(Error::Quadrature(format!(
            "romberg_simpson needs 4m+1 samples, got {n}"
        )));
    }
    let simpson = |stride: usize| -> Complex64 {
        let step = h * stride as f64;
        let m = (n - 1) / stride;
        let mut acc = samples[0] + samples[n - 1];
        for j in 1..m {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            acc += samples[j * stride] * w;
        }
        acc * (step / 3.0)
    };
    let fine = simpson(1);
    let coarse = simpson(2);
    Ok(Integral {
        value: fine + (fine - coarse) / 15.0,
        error: (fine - coarse).norm() / 15.0,
    })
}

/// Reference Faddeyeva function from its contour integral
/// `w(z) = (1/iπ) ∫_Γ e^{-u²}/(u - z) du`, with Γ running from -∞ to +∞
/// below the pole.
///
/// The path is the horizontal line `Im u = c`:
///
/// * `Im z >= 1`: `c = 0` (the real axis is already below the pole);
/// * `0 <= Im z < 1`: `c = Im z - 1`;
/// * `-1 < Im z < 0`: `c = Im z + 1`, above the pole, plus the residue `2e^{-z²}`;
/// * `Im z <= -1`: `c = 0`, plus the residue.
///
/// The pole therefore always sits a unit distance from the path and the
/// Gaussian factor on the path never exceeds `e`.
pub fn faddeyeva_contour(z: Complex64) -> Result<Complex64> {
    let (c, residue) = if z.im >= 1.0 {
        (0.0, false)
    } else if z.im >= 0.0 {
        (z.im - 1.0, false)
    } else if z.im > -1.0 {
        (z.im + 1.0, true)
    } else {
        (0.0, true)
    };
    let half_width = (c * c + 60.0_f64).sqrt();
    let integrand = |s: f64| {
        let u = Complex64::new(s, c);
        (-u * u).exp() / (u - z)
    };
    let lo = -half_width + z.re.min(0.0);
    let hi = half_width + z.re.max(0.0);
    let line = integrate(integrand, lo, hi, &[z.re], 1e-15, 1e-300)?;
    let mut w = line.value / Complex64::new(0.0, PI);
    if residue {
        w += 2.0 * (-z * z).exp();
    }
    Ok(w)
}
