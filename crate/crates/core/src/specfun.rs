//! Faddeyeva and Moshinsky functions.
//!
//! `w(z) = exp(-z²) erfc(-iz)` is evaluated in the closed upper half plane by
//! one of two schemes:
//!
//! * a Laplace continued fraction (modified Lentz) for large `|z|`, and
//! * the exponentially convergent Zaghloul–Ali sums, built on the real scaled
//!   complementary error function, for the region around the origin.
//!
//! The lower half plane is reached through `w(z) = 2 exp(-z²) - w(-z)`.
//! [`moshinsky`] folds the exponential of that identity into a single complex
//! exponent so that the large factors never appear separately.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Largest real part of an exponent that still fits in an `f64`.
const MAX_EXP_ARG: f64 = 709.78;

/// Zaghloul–Ali step parameter, `π / sqrt(-ln(ε/2))` for `ε = 2⁻⁵²`.
const ZA_STEP: f64 = 0.518_321_480_430_085_9;

/// `exp(y²) erfc(y)` for `y >= 0`.
pub(crate) fn erfcx_nonneg(y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    if y < 1.5 {
        // exp(y²) - (2/√π) Σ 2ⁿ y^(2n+1) / (2n+1)!!, all terms positive.
        let mut sum = 0.0;
        let mut term = y;
        let mut n = 0.0;
        loop {
            sum += term;
            n += 1.0;
            term *= 2.0 * y * y / (2.0 * n + 1.0);
            if term <= 1e-17 * sum {
                break;
            }
        }
        (y * y).exp() - 2.0 * INV_SQRT_PI * sum
    } else {
        // y + (1/2)/(y + 1/(y + (3/2)/(y + ...)))
        let tiny = 1e-300;
        let mut f = y;
        let mut c = f;
        let mut d = 0.0;
        for n in 1..2000 {
            let a = 0.5 * n as f64;
            d = y + a * d;
            if d == 0.0 {
                d = tiny;
            }
            d = 1.0 / d;
            c = y + a / c;
            if c == 0.0 {
                c = tiny;
            }
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        INV_SQRT_PI / f
    }
}

fn in_continued_fraction_region(x: f64, y: f64) -> bool {
    let ax = x.abs();
    y > 7.0 || (ax > 6.0 && y > 0.1) || ax > 8.0
}

/// `w(z)` through the Laplace continued fraction
/// `(i/√π) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...))))`.
fn w_continued_fraction(z: Complex64) -> Complex64 {
    if z.norm() > 1e7 {
        return Complex64::new(0.0, INV_SQRT_PI) / z;
    }
    let tiny = Complex64::new(1e-300, 0.0);
    let mut f = z;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..20_000 {
        let a = -0.5 * n as f64;
        d = z + a * d;
        if d.norm_sqr() == 0.0 {
            d = tiny;
        }
        d = d.inv();
        c = z + a / c;
        if c.norm_sqr() == 0.0 {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    Complex64::new(0.0, INV_SQRT_PI) / f
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Zaghloul–Ali sums for `y >= 0`, `|x| <= 8`.
fn w_sums(z: Complex64) -> Complex64 {
    let xs = z.re;
    let x = xs.abs();
    let y = z.im;
    let a = ZA_STEP;
    let a2 = a * a;
    let c = 2.0 * a / PI;
    let ex2 = (-x * x).exp();

    // s1 = Σ e^{-a²n²-x²}/(a²n²+y²); s23 = s2 + s3; s54 = s5 - s4 in the
    // original notation, written with cosh/sinh so that small x loses nothing.
    let mut s1 = 0.0;
    let mut s23 = 0.0;
    let mut s54 = 0.0;
    let mut n = 1.0_f64;
    loop {
        let an = a * n;
        let den = a2 * n * n + y * y;
        let t = (-a2 * n * n - x * x).exp() / den;
        let u = 2.0 * an * x;
        let tc = 2.0 * t * u.cosh();
        s1 += t;
        s23 += tc;
        s54 += 2.0 * an * t * u.sinh();
        if an > x && tc * an.max(1.0) <= 1e-17 * s23 {
            break;
        }
        n += 1.0;
    }

    let coef1 = ex2 * erfcx_nonneg(y) - c * y * s1;
    let coef2 = c * xs * ex2;
    let xy = xs * y;
    let re = coef1 * (2.0 * xy).cos() + coef2 * xy.sin() * sinc(xy) + 0.5 * c * y * s23;
    let im = coef2 * sinc(2.0 * xy) - coef1 * (2.0 * xy).sin() + (0.5 * c * s54).copysign(xs);
    Complex64::new(re, im)
}

/// `w(z)` for `Im z >= 0`. Never overflows.
pub(crate) fn w_upper(z: Complex64) -> Complex64 {
    debug_assert!(z.im >= 0.0);
    if in_continued_fraction_region(z.re, z.im) {
        w_continued_fraction(z)
    } else {
        w_sums(z)
    }
}

/// The Faddeyeva function `w(z) = exp(-z²) erfc(-iz)`.
///
/// Fails with [`Error::Overflow`] in the lower half plane when `exp(-z²)`
/// is not representable.
pub fn faddeyeva(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NanInput("faddeyeva"));
    }
    if z.im >= 0.0 {
        return Ok(w_upper(z));
    }
    let mz2 = -z * z;
    if mz2.re > MAX_EXP_ARG {
        return Err(Error::Overflow(format!(
            "exp(-z^2) at z = {z} exceeds the f64 range"
        )));
    }
    Ok(2.0 * mz2.exp() - w_upper(-z))
}

/// Arguments of the Moshinsky function `M(x, k, τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoshinskyArgs {
    pub x: f64,
    /// Complex wavenumber; purely imaginary values arise from δ couplings.
    pub k: Complex64,
    /// Effective time `ħt/m` (length²), strictly positive.
    pub tau: f64,
}

impl MoshinskyArgs {
    pub fn new(x: f64, k: Complex64, tau: f64) -> Result<Self> {
        if !(x.is_finite() && k.re.is_finite() && k.im.is_finite() && tau.is_finite()) {
            return Err(Error::NanInput("moshinsky"));
        }
        if tau <= 0.0 {
            return Err(Error::NonPositiveTime(tau));
        }
        Ok(Self { x, k, tau })
    }

    /// `z = (1+i)/2 · √τ · (k - x/τ)`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(0.5, 0.5) * self.tau.sqrt() * (self.k - self.x / self.tau)
    }
}

/// `M(x, k, τ) = exp(i x²/2τ) w(-z) / 2`.
pub fn moshinsky(args: MoshinskyArgs) -> Result<Complex64> {
    let MoshinskyArgs { x, k, tau } = args;
    let u = -args.z();
    let phase = Complex64::from_polar(1.0, x * x / (2.0 * tau));
    if u.im >= 0.0 {
        return Ok(0.5 * phase * w_upper(u));
    }
    // w(u) = 2 e^{-u²} - w(-u), and e^{ix²/2τ} e^{-u²} = e^{ikx - ik²τ/2}.
    let i = Complex64::i();
    let exponent = i * k * x - 0.5 * i * k * k * tau;
    if exponent.re > MAX_EXP_ARG {
        return Err(Error::Overflow(format!(
            "M({x}, {k}, {tau}) is not representable"
        )));
    }
    Ok(exponent.exp() - 0.5 * phase * w_upper(-u))
}

/// Shorthand for `moshinsky(MoshinskyArgs::new(x, k, tau)?)`.
pub fn moshinsky_at(x: f64, k: Complex64, tau: f64) -> Result<Complex64> {
    moshinsky(MoshinskyArgs::new(x, k, tau)?)
}

/// Closed-form antiderivative of `e^{ikx} M(ax+b, c, τ)` in `x`:
///
/// ```text
/// e^{ikx} / (i(k + ca)) · [M(ax+b, c, τ) - M(ax+b, -k/a, τ)]
/// ```
pub fn moshinsky_primitive(a: f64, b: f64, c: Complex64, k: f64, tau: f64, x: f64) -> Result<Complex64> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::Degenerate(format!("scale a = {a} must be nonzero")));
    }
    let pole = k + c * a;
    if pole.norm() <= 1e-12 * (k.abs() + (c * a).norm()).max(1e-300) || pole.norm() == 0.0 {
        return Err(Error::Degenerate(format!(
            "k + c·a = {pole} vanishes; the resonant case needs its own limit"
        )));
    }
    let y = a * x + b;
    let m_c = moshinsky_at(y, c, tau)?;
    let m_k = moshinsky_at(y, Complex64::new(-k / a, 0.0), tau)?;
    let i = Complex64::i();
    Ok(Complex64::from_polar(1.0, k * x) / (i * pole) * (m_c - m_k))
}
