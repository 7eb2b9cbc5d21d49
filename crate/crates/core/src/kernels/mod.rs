//! Closed-form propagators for atoms crossing a δ-laser.
//!
//! Every kernel here has the form `K₀(x−x′)·1 − (m/ħ²)·Σ M(X, ·, ħΔt/m)·A`
//! with `X = |x−ξ| + |ξ−x′|`; the matrices `A` are written out per
//! configuration. [`spectral`] rebuilds the same objects from the coupling
//! eigenbasis and serves as their reference.

mod system;
pub mod spectral;

pub use system::{LaserSystem, ThreeLevel};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::moshinsky_at;

/// Propagator matrix `K(x,t|x′,t′)` at one pair of spacetime points.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub entries: DMatrix<Complex64>,
    pub x: f64,
    pub xprime: f64,
    pub t: f64,
    pub tprime: f64,
}

impl KernelMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, k: usize) -> Complex64 {
        self.entries[(i, k)]
    }

    /// Matrix–spinor product.
    pub fn apply(&self, spinor: &[Complex64]) -> Vec<Complex64> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|k| self.entries[(i, k)] * spinor[k]).sum())
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A − B| / max |B|`, the entrywise distance relative to `other`.
    pub fn rel_diff(&self, other: &KernelMatrix) -> f64 {
        let d = (&self.entries - &other.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if d == 0.0 {
            0.0
        } else {
            d / other.max_abs()
        }
    }
}

/// What [`star_kernel`] does when every spoke strength is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uncoupled {
    Reject,
    Free,
}

fn check_finite(vals: &[f64], what: &'static str) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NanInput(what))
    }
}

fn time_step(t: f64, tp: f64) -> Result<f64> {
    let dt = t - tp;
    if dt > 0.0 {
        Ok(dt)
    } else {
        Err(Error::NonPositiveTime(dt))
    }
}

/// One-channel free propagator. The square root takes its principal value,
/// `√(m/2πħΔt)·e^{−iπ/4}`.
pub fn free_kernel(x: f64, t: f64, xp: f64, tp: f64, mass: f64, hbar: f64) -> Result<Complex64> {
    check_finite(&[x, t, xp, tp, mass, hbar], "free_kernel")?;
    let dt = time_step(t, tp)?;
    Ok(free_at(x - xp, dt, mass, hbar))
}

fn free_at(dx: f64, dt: f64, mass: f64, hbar: f64) -> Complex64 {
    let amp = (mass / (2.0 * PI * hbar * dt)).sqrt();
    let phase = mass * dx * dx / (2.0 * hbar * dt) - 0.25 * PI;
    Complex64::from_polar(amp, phase)
}

/// Path length through the laser, `|x−ξ| + |ξ−x′|`.
pub fn image_distance(x: f64, xp: f64, xi: f64) -> f64 {
    (x - xi).abs() + (xi - xp).abs()
}

/// One-channel propagator for `V(x) = g·δ(x−ξ)`.
#[allow(clippy::too_many_arguments)]
pub fn single_delta_kernel(
    g: f64,
    x: f64,
    t: f64,
    xp: f64,
    tp: f64,
    xi: f64,
    mass: f64,
    hbar: f64,
) -> Result<Complex64> {
    check_finite(&[g, x, t, xp, tp, xi, mass, hbar], "single_delta_kernel")?;
    let dt = time_step(t, tp)?;
    let k0 = free_at(x - xp, dt, mass, hbar);
    if g == 0.0 {
        return Ok(k0);
    }
    let kappa = mass * g / (hbar * hbar);
    let m = moshinsky_at(image_distance(x, xp, xi), Complex64::new(0.0, -kappa), hbar * dt / mass)?;
    Ok(k0 - kappa * m)
}

struct Setup {
    k0: Complex64,
    image: Complex64,
    dist: f64,
    tau: f64,
    pref: f64,
}

fn setup(sys: &LaserSystem, x: f64, t: f64, xp: f64, tp: f64) -> Result<Setup> {
    check_finite(&[x, t, xp, tp], "kernel evaluation")?;
    let dt = time_step(t, tp)?;
    let (m, h) = (sys.mass(), sys.hbar());
    let dist = image_distance(x, xp, sys.xi());
    Ok(Setup {
        k0: free_at(x - xp, dt, m, h),
        image: free_at(dist, dt, m, h),
        dist,
        tau: sys.tau(dt),
        pref: m / (2.0 * h * h),
    })
}

fn finish(entries: DMatrix<Complex64>, x: f64, t: f64, xp: f64, tp: f64) -> Result<KernelMatrix> {
    if entries.iter().any(|z| !z.is_finite()) {
        return Err(Error::Overflow("kernel entry is not finite".into()));
    }
    Ok(KernelMatrix { entries, x, xprime: xp, t, tprime: tp })
}

/// Two-level atom with a single resonant laser of strength `V₀`.
pub fn two_level_kernel(sys: &LaserSystem, x: f64, t: f64, xp: f64, tp: f64) -> Result<KernelMatrix> {
    if sys.n_levels() != 2 {
        return Err(Error::Coupling(format!(
            "two-level kernel needs 2 levels, got {}",
            sys.n_levels()
        )));
    }
    let s = setup(sys, x, t, xp, tp)?;
    let v0 = sys.coupling()[(0, 1)];
    let mut k = DMatrix::from_diagonal_element(2, 2, s.k0);
    if v0 != 0.0 {
        let kappa = Complex64::new(0.0, -sys.wavenumber(v0));
        for alpha in [1.0, -1.0] {
            let c = s.pref * v0 * moshinsky_at(s.dist, alpha * kappa, s.tau)?;
            k[(0, 0)] -= c * alpha;
            k[(1, 1)] -= c * alpha;
            k[(0, 1)] -= c;
            k[(1, 0)] -= c;
        }
    }
    finish(k, x, t, xp, tp)
}

/// Three-level atom in ladder, V or Λ configuration.
pub fn three_level_kernel(
    config: ThreeLevel,
    sys: &LaserSystem,
    x: f64,
    t: f64,
    xp: f64,
    tp: f64,
) -> Result<KernelMatrix> {
    sys.require_three_level(config)?;
    let s = setup(sys, x, t, xp, tp)?;
    let hub = config.hub();
    let v = sys.spokes(hub);
    let veff = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut k = DMatrix::from_diagonal_element(3, 3, s.k0);
    if veff == 0.0 {
        return finish(k, x, t, xp, tp);
    }
    for alpha in [1.0, -1.0] {
        let m = moshinsky_at(s.dist, Complex64::new(0.0, -alpha * sys.wavenumber(veff)), s.tau)?;
        let c = s.pref * m;
        for i in 0..3 {
            for j in 0..3 {
                let a = if i == hub && j == hub {
                    alpha * veff
                } else if i == hub {
                    v[j]
                } else if j == hub {
                    v[i]
                } else {
                    alpha * v[i] * v[j] / veff
                };
                k[(i, j)] -= c * a;
            }
        }
    }
    finish(k, x, t, xp, tp)
}

/// N-level star: level `hub` coupled to every other level.
pub fn star_kernel(
    sys: &LaserSystem,
    hub: usize,
    x: f64,
    t: f64,
    xp: f64,
    tp: f64,
    uncoupled: Uncoupled,
) -> Result<KernelMatrix> {
    sys.require_star(hub)?;
    let s = setup(sys, x, t, xp, tp)?;
    let n = sys.n_levels();
    let v = sys.spokes(hub);
    let vm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut k = DMatrix::from_diagonal_element(n, n, s.k0);
    if vm == 0.0 {
        return match uncoupled {
            Uncoupled::Free => finish(k, x, t, xp, tp),
            Uncoupled::Reject => Err(Error::Degenerate(format!(
                "all spokes of the star at level {hub} vanish"
            ))),
        };
    }
    for alpha in [1.0, -1.0] {
        let m = moshinsky_at(s.dist, Complex64::new(0.0, -alpha * sys.wavenumber(vm)), s.tau)?;
        let c = s.pref / vm * m;
        for i in 0..n {
            for j in 0..n {
                let a = match (i == hub, j == hub) {
                    (true, true) => alpha * vm * vm,
                    (true, false) => v[j] * vm,
                    (false, true) => v[i] * vm,
                    (false, false) => alpha * v[i] * v[j],
                };
                if a != 0.0 {
                    k[(i, j)] -= c * a;
                }
            }
        }
    }
    finish(k, x, t, xp, tp)
}

/// Limit of one infinitely strong laser coupling levels `j` and `n`: both
/// see a hard wall at `ξ`, every other level propagates freely.
pub fn mirror_kernel(
    sys: &LaserSystem,
    hard_pair: (usize, usize),
    x: f64,
    t: f64,
    xp: f64,
    tp: f64,
) -> Result<KernelMatrix> {
    let n = sys.n_levels();
    let (j, l) = hard_pair;
    if j >= n || l >= n || j == l {
        return Err(Error::InvalidParameter(format!(
            "mirror pair ({j}, {l}) must be two distinct levels below {n}"
        )));
    }
    let s = setup(sys, x, t, xp, tp)?;
    let mut k = DMatrix::from_diagonal_element(n, n, s.k0);
    k[(j, j)] -= s.image;
    k[(l, l)] -= s.image;
    finish(k, x, t, xp, tp)
}

/// Limit of two infinitely strong spokes `l < n` of a star at `hub`, with
/// `V_l/V_n = c` held fixed. The hub is fully reflected; `l` and `n` are
/// reflected along the bright combination `(c, 1)/√(1+c²)` only.
#[allow(clippy::too_many_arguments)]
pub fn two_strong_kernel(
    sys: &LaserSystem,
    pair: (usize, usize),
    hub: usize,
    c: f64,
    x: f64,
    t: f64,
    xp: f64,
    tp: f64,
) -> Result<KernelMatrix> {
    let size = sys.n_levels();
    let (l, n) = pair;
    if !(l < n && n < size && hub < size && hub != l && hub != n) {
        return Err(Error::InvalidParameter(format!(
            "need l < n < {size} with hub {hub} distinct from both, got ({l}, {n})"
        )));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("ratio c must be positive, got {c}")));
    }
    let s = setup(sys, x, t, xp, tp)?;
    let norm = 1.0 + c * c;
    let mut k = DMatrix::from_diagonal_element(size, size, s.k0);
    k[(hub, hub)] -= s.image;
    k[(l, l)] -= s.image * (c * c / norm);
    k[(n, n)] -= s.image * (1.0 / norm);
    k[(l, n)] -= s.image * (c / norm);
    k[(n, l)] -= s.image * (c / norm);
    finish(k, x, t, xp, tp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_kernel_reference_value() {
        // √(1/2πi)·e^{i/2} at Δx = 1, Δt = 1.
        let k = free_kernel(1.0, 1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        let amp = (0.5 / PI).sqrt();
        let expect = Complex64::from_polar(amp, 0.5 - PI / 4.0);
        assert!((k - expect).norm() < 1e-16);
        assert!((k - Complex64::new(0.382_804_917_544_483_24, -0.112_318_022_577_219_2)).norm() < 1e-15);
    }

    #[test]
    fn free_kernel_is_translation_invariant() {
        let a = free_kernel(3.5, 2.0, 1.25, 0.5, 1.0, 1.0).unwrap();
        let b = free_kernel(2.25, 1.5, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn nonpositive_time_is_rejected() {
        assert_eq!(free_kernel(0.0, 1.0, 0.0, 1.0, 1.0, 1.0), Err(Error::NonPositiveTime(0.0)));
        assert!(single_delta_kernel(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0).is_err());
        let sys = LaserSystem::two_level(1.0, 0.0).unwrap();
        assert!(two_level_kernel(&sys, 0.0, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn zero_strength_is_free() {
        let a = single_delta_kernel(0.0, 0.3, 1.0, -0.2, 0.0, 0.0, 1.0, 1.0).unwrap();
        let b = free_kernel(0.3, 1.0, -0.2, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(a, b);
        let sys = LaserSystem::two_level(0.0, 0.0).unwrap();
        let k = two_level_kernel(&sys, 0.3, 1.0, -0.2, 0.0).unwrap();
        assert_eq!(k.get(0, 0), b);
        assert_eq!(k.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn star_rejects_empty_spokes_unless_asked() {
        let sys = LaserSystem::star(1, &[0.0, 0.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            star_kernel(&sys, 1, 0.0, 1.0, 0.5, 0.0, Uncoupled::Reject),
            Err(Error::Degenerate(_))
        ));
        let k = star_kernel(&sys, 1, 0.0, 1.0, 0.5, 0.0, Uncoupled::Free).unwrap();
        assert_eq!(k.get(2, 2), free_kernel(0.0, 1.0, 0.5, 0.0, 1.0, 1.0).unwrap());
    }

    #[test]
    fn sparsity_is_checked() {
        let ladder = LaserSystem::ladder(1.0, 1.0, 0.0).unwrap();
        assert!(three_level_kernel(ThreeLevel::Vee, &ladder, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(star_kernel(&ladder, 0, 0.0, 1.0, 0.0, 0.0, Uncoupled::Reject).is_err());
    }

    #[test]
    fn mirror_vanishes_at_the_wall() {
        let sys = LaserSystem::star(0, &[0.0, 1.0, 0.0], 0.0).unwrap();
        let k = mirror_kernel(&sys, (0, 1), 0.0, 1.0, -0.7, 0.0).unwrap();
        assert!(k.get(0, 0).norm() < 1e-15);
        assert!(k.get(1, 1).norm() < 1e-15);
        assert_eq!(k.get(2, 2), free_kernel(0.0, 1.0, -0.7, 0.0, 1.0, 1.0).unwrap());
    }

    #[test]
    fn two_strong_reduces_to_mirror_as_c_vanishes() {
        let sys = LaserSystem::star(0, &[0.0, 1.0, 1.0], 0.0).unwrap();
        let k = two_strong_kernel(&sys, (1, 2), 0, 1e-9, 0.4, 1.0, 1.1, 0.0).unwrap();
        let m = mirror_kernel(&sys, (0, 2), 0.4, 1.0, 1.1, 0.0).unwrap();
        assert!(k.rel_diff(&m) < 1e-8);
        assert!(two_strong_kernel(&sys, (1, 2), 0, 0.0, 0.4, 1.0, 1.1, 0.0).is_err());
        assert!(two_strong_kernel(&sys, (2, 1), 0, 1.0, 0.4, 1.0, 1.1, 0.0).is_err());
    }

    #[test]
    fn two_strong_at_unit_ratio_splits_evenly() {
        let sys = LaserSystem::star(0, &[0.0, 1.0, 1.0], 0.0).unwrap();
        let (x, xp) = (0.4, 1.1);
        let k = two_strong_kernel(&sys, (1, 2), 0, 1.0, x, 1.0, xp, 0.0).unwrap();
        let k0 = free_kernel(x, 1.0, xp, 0.0, 1.0, 1.0).unwrap();
        let img = free_kernel(image_distance(x, xp, 0.0), 1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert!((k.get(1, 2) + 0.5 * img).norm() < 1e-15);
        assert!((k.get(1, 1) - (k0 - 0.5 * img)).norm() < 1e-15);
        assert!((k.get(2, 2) - (k0 - 0.5 * img)).norm() < 1e-15);
    }
}
