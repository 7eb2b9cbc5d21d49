//! Grid reference for two-level scattering of long beams and packets.
//!
//! The field is split as `Ψ = Ψ_f + Ψ_s` with `Ψ_f` the exact free
//! evolution of the initial state. Only `Ψ_s`, which vanishes initially and
//! is sourced by `V·δ_σ·Ψ_f`, is put on a grid: a fine periodic window around
//! `ξ` that resolves `σ`. Outgoing parts of `Ψ_s` are peeled off with a
//! smooth mask at regular intervals, moved onto a coarse grid and propagated
//! freely to the final time in momentum space. The split-step update is the
//! Strang scheme for the total field, rewritten for `Ψ_s`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;
use super::tdse::{regularized_delta, Boundary, Kinetic, DELTA_CUTOFF, MAX_KICK_PHASE};
use crate::dynamics::Spinor;
use crate::error::{Error, Result};
use crate::kernels::LaserSystem;

/// Numerical parameters of [`scatter_two_level`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterSetup {
    /// Width of the Gaussian standing in for `δ`.
    pub sigma: f64,
    pub dt: f64,
    /// Points in the fine window (even).
    pub fine_points: usize,
    pub fine_spacing: f64,
    /// Coarse spacing in units of the fine one; must divide `fine_points`.
    pub decimation: usize,
    pub coarse_points: usize,
    /// Width of the absorbing ramp at either end of the fine window.
    pub mask_width: f64,
    /// Time between two peel-offs.
    pub mask_interval: f64,
}

impl ScatterSetup {
    /// Parameters tuned for a beam of wavenumber `k`, with the regularized
    /// δ of width `sigma` and `k·v·dt = ratio·k·σ`, where `v = ħk/m`.
    pub fn for_wavenumber(
        sys: &LaserSystem,
        k: f64,
        sigma: f64,
        ratio: f64,
        coarse_points: usize,
    ) -> Self {
        let v = sys.hbar() * k / sys.mass();
        ScatterSetup {
            sigma,
            dt: ratio * sigma / v,
            fine_points: 2048,
            fine_spacing: FINE_SPACING_K / k,
            decimation: 32,
            coarse_points,
            mask_width: 17.0 / k,
            mask_interval: 1.0 / (k * v),
        }
    }

    fn validate(&self, sys: &LaserSystem) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Grid(format!("{name} must be positive, got {v}")))
            }
        };
        pos("sigma", self.sigma)?;
        pos("dt", self.dt)?;
        pos("fine_spacing", self.fine_spacing)?;
        pos("mask_width", self.mask_width)?;
        pos("mask_interval", self.mask_interval)?;
        if sys.n_levels() != 2 {
            return Err(Error::Grid("the scattering oracle handles two levels".into()));
        }
        if self.sigma < 2.0 * self.fine_spacing {
            return Err(Error::Grid(format!(
                "regularization width {} is below two fine spacings ({})",
                self.sigma,
                2.0 * self.fine_spacing
            )));
        }
        if self.decimation == 0 || !self.fine_points.is_multiple_of(2 * self.decimation) {
            return Err(Error::Grid("decimation must divide half the fine window".into()));
        }
        let window = self.fine_points / self.decimation;
        if self.coarse_points < 2 * window {
            return Err(Error::Grid("coarse grid is smaller than the fine window".into()));
        }
        let half = 0.5 * self.fine_points as f64 * self.fine_spacing;
        if half - self.mask_width < DELTA_CUTOFF * self.sigma + self.fine_spacing {
            return Err(Error::Grid("mask ramps overlap the regularized δ".into()));
        }
        Ok(())
    }

    /// The coarse-grid sample points, with the fine window in the middle.
    pub fn coarse_grid(&self, xi: f64) -> Result<Grid> {
        let hc = self.fine_spacing * self.decimation as f64;
        let window = self.fine_points / self.decimation;
        let start = (self.coarse_points - window) / 2;
        let x0 = xi - 0.5 * self.fine_points as f64 * self.fine_spacing - start as f64 * hc;
        Grid::with_spacing(x0, hc, self.coarse_points)
    }
}

/// `k·h` of the fine window for [`ScatterSetup::for_wavenumber`].
pub const FINE_SPACING_K: f64 = 0.025;

/// Outcome of [`scatter_two_level`].
#[derive(Debug, Clone)]
pub struct ScatterRun {
    pub coarse: Grid,
    /// `Ψ_s` on the coarse grid at `t`.
    pub scattered: Vec<Spinor>,
    pub t: f64,
    pub steps: usize,
    /// Norm of `Ψ_s` still inside the fine window at the end.
    pub window_norm: f64,
    /// `max |Ψ_s|` in the outermost tenth of the coarse grid, a wrap-around
    /// sentinel.
    pub edge_amplitude: f64,
}

impl ScatterRun {
    /// `Ψ_f + Ψ_s` on the coarse grid.
    pub fn total(&self, free: impl Fn(f64, f64) -> Result<Spinor>) -> Result<Vec<Spinor>> {
        self.scattered
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let f = free(self.coarse.x(i), self.t)?;
                Ok([f[0] + s[0], f[1] + s[1]])
            })
            .collect()
    }
}

/// Low-pass resampling of a periodic fine-window channel onto every
/// `decimation`-th point.
struct Decimator {
    fine_fwd: Arc<dyn Fft<f64>>,
    coarse_inv: Arc<dyn Fft<f64>>,
    nf: usize,
    nw: usize,
    fine_buf: Vec<Complex64>,
}

impl Decimator {
    fn new(nf: usize, nw: usize) -> Self {
        let mut planner = FftPlanner::new();
        Decimator {
            fine_fwd: planner.plan_fft_forward(nf),
            coarse_inv: planner.plan_fft_inverse(nw),
            nf,
            nw,
            fine_buf: vec![Complex64::new(0.0, 0.0); nf],
        }
    }

    fn apply(&mut self, fine: &[Complex64], out: &mut [Complex64]) {
        self.fine_buf.copy_from_slice(fine);
        self.fine_fwd.process(&mut self.fine_buf);
        let zero = Complex64::new(0.0, 0.0);
        out.iter_mut().for_each(|o| *o = zero);
        let half = self.nw / 2;
        let scale = 1.0 / self.nf as f64;
        // The Nyquist bin is dropped so the resampled field stays symmetric.
        for j in 0..half {
            out[j] = self.fine_buf[j] * scale;
        }
        for j in 1..half {
            out[self.nw - j] = self.fine_buf[self.nf - j] * scale;
        }
        self.coarse_inv.process(out);
    }
}

/// Evolves `Ψ_s` for a two-level system from `t = 0` to `t_final`.
///
/// `free(x, t)` must return the exact free evolution of the initial state,
/// including at `t = 0`; it is evaluated inside `ξ ± 9σ` and, by
/// [`ScatterRun::total`], on the coarse grid.
pub fn scatter_two_level(
    sys: &LaserSystem,
    free: &dyn Fn(f64, f64) -> Result<Spinor>,
    setup: &ScatterSetup,
    t_final: f64,
) -> Result<ScatterRun> {
    setup.validate(sys)?;
    if !(t_final > 0.0) {
        return Err(Error::NonPositiveTime(t_final));
    }
    let (m, hbar) = (sys.mass(), sys.hbar());
    let v0 = sys.coupling()[(0, 1)];
    let steps = (t_final / setup.dt).ceil() as usize;
    let dt = t_final / steps as f64;
    let kick_phase = 0.5 * dt * v0.abs() * regularized_delta(0.0, setup.sigma) / hbar;
    if kick_phase > MAX_KICK_PHASE {
        return Err(Error::Grid(format!(
            "time step too large: half-step kick phase {kick_phase:.3} exceeds {MAX_KICK_PHASE:.3}"
        )));
    }
    let mask_every = ((setup.mask_interval / dt).round() as usize).max(1);

    let nf = setup.fine_points;
    let hf = setup.fine_spacing;
    let x0 = sys.xi() - 0.5 * nf as f64 * hf;
    let xf = |j: usize| x0 + j as f64 * hf;

    // exp(−iθσₓ) = cos θ − i sin θ σₓ at every source point.
    let mut source: Vec<(usize, f64, f64)> = Vec::new();
    for j in 0..nf {
        let d = xf(j) - sys.xi();
        if d.abs() <= DELTA_CUTOFF * setup.sigma {
            let theta = 0.5 * dt * v0 * regularized_delta(d, setup.sigma) / hbar;
            source.push((j, theta.cos(), theta.sin()));
        }
    }
    let mask: Vec<f64> = (0..nf)
        .map(|j| {
            let u = j as f64 * hf;
            let d = u.min(nf as f64 * hf - u);
            if d >= setup.mask_width {
                1.0
            } else {
                (0.5 * PI * d / setup.mask_width).sin().powi(2)
            }
        })
        .collect();

    let coarse = setup.coarse_grid(sys.xi())?;
    let nc = setup.coarse_points;
    let nw = nf / setup.decimation;
    let start = (nc - nw) / 2;
    let hc = coarse.spacing();
    let hbar_over_2m = 0.5 * hbar / m;

    // Peeled parts collect on a buffer around the window and are flushed to
    // the full coarse grid once the fastest band-limited component could
    // have crossed half the buffer margin.
    let nb = BUFFER_POINTS.min(nc).max(2 * nw);
    let woff = (nb - nw) / 2;
    let bstart = start - woff;
    let t_peel = mask_every as f64 * dt;
    let v_max = 2.0 * hbar_over_2m * PI / hc;
    let batch = ((0.5 * woff as f64 * hc / v_max / t_peel) as usize).max(1);
    let mut buffer = FreeSum::new(nb, hc, hbar_over_2m);
    let mut full = FreeSum::new(nc, hc, hbar_over_2m);
    let step_phase: Vec<Complex64> =
        buffer.omega.iter().map(|w| Complex64::from_polar(1.0, w * t_peel)).collect();
    let one = Complex64::new(1.0, 0.0);
    let mut phase = vec![one; nb];
    let mut in_batch = 0usize;

    let zero = Complex64::new(0.0, 0.0);
    let mut psi = [vec![zero; nf], vec![zero; nf]];
    let mut kinetic = Kinetic::new(nf, hf, dt, hbar / m, Boundary::Periodic);
    let mut decimator = Decimator::new(nf, nw);
    let mut removed = vec![zero; nf];
    let mut small = vec![zero; nw];
    let mut local = vec![zero; nb];
    let mut flushed = vec![zero; nb];
    let mut wide = vec![zero; nc];

    let eval_free = |t: f64| -> Result<Vec<Spinor>> {
        source.iter().map(|&(j, _, _)| free(xf(j), t)).collect()
    };
    let kick = |psi: &mut [Vec<Complex64>; 2], f: &[Spinor]| {
        let mi = Complex64::new(0.0, -1.0);
        for ((j, c, s), fv) in source.iter().zip(f) {
            let (a, b) = (psi[0][*j], psi[1][*j]);
            // K·Ψ_s + (K − 1)·Ψ_f.
            psi[0][*j] = c * a + mi * s * b + (c - 1.0) * fv[0] + mi * s * fv[1];
            psi[1][*j] = c * b + mi * s * a + (c - 1.0) * fv[1] + mi * s * fv[0];
        }
    };
    let mut flush = |buffer: &mut FreeSum, full: &mut FreeSum, phase: &[Complex64], t: f64| {
        for c in 0..2 {
            buffer.field_with_phase(c, phase, &mut flushed);
            wide.iter_mut().for_each(|w| *w = zero);
            wide[bstart..bstart + nb].copy_from_slice(&flushed);
            full.add_at(c, &mut wide, t);
        }
        buffer.clear();
    };

    let mut f_now = eval_free(0.0)?;
    let mut t_batch_end = 0.0;
    for n in 0..steps {
        kick(&mut psi, &f_now);
        kinetic.apply(&mut psi[0]);
        kinetic.apply(&mut psi[1]);
        let t_next = if n + 1 == steps { t_final } else { (n + 1) as f64 * dt };
        let f_next = eval_free(t_next)?;
        kick(&mut psi, &f_next);
        f_now = f_next;
        if (n + 1) % mask_every != 0 || n + 1 == steps {
            continue;
        }
        for c in 0..2 {
            for j in 0..nf {
                removed[j] = psi[c][j] * (1.0 - mask[j]);
                psi[c][j] *= mask[j];
            }
            decimator.apply(&removed, &mut small);
            local.iter_mut().for_each(|l| *l = zero);
            local[woff..woff + nw].copy_from_slice(&small);
            buffer.add_with_phase(c, &mut local, &phase);
        }
        in_batch += 1;
        t_batch_end = t_next;
        if in_batch == batch {
            flush(&mut buffer, &mut full, &phase, t_next);
            phase.iter_mut().for_each(|p| *p = one);
            in_batch = 0;
        } else {
            phase.iter_mut().zip(&step_phase).for_each(|(p, s)| *p *= s);
        }
    }
    if in_batch > 0 {
        // `phase` has already advanced one peel interval past the last peel.
        flush(&mut buffer, &mut full, &phase, t_batch_end + t_peel);
    }
    let window_norm = hf * psi.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
    if !window_norm.is_finite() {
        return Err(Error::Grid("scattered field became non-finite".into()));
    }

    let mut out = [vec![zero; nc], vec![zero; nc]];
    for c in 0..2 {
        full.field_at(c, t_final, &mut out[c]);
        // What is left in the window goes through the same band limit.
        decimator.apply(&psi[c], &mut small);
        for (o, s) in out[c][start..start + nw].iter_mut().zip(&small) {
            *o += s;
        }
    }
    let edge = nc / 20;
    let edge_amplitude = out
        .iter()
        .flat_map(|ch| ch[..edge].iter().chain(&ch[nc - edge..]))
        .fold(0.0f64, |a, z| a.max(z.norm()));
    let scattered = (0..nc).map(|i| [out[0][i], out[1][i]]).collect();
    Ok(ScatterRun { coarse, scattered, t: t_final, steps, window_norm, edge_amplitude })
}

/// Coarse points in the intermediate buffer.
const BUFFER_POINTS: usize = 2048;

/// Two-channel sum of fields, each freely evolved from the time it was added,
/// kept in momentum space on a periodic grid.
struct FreeSum {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// `ħp²/2m` per bin.
    omega: Vec<f64>,
    acc: [Vec<Complex64>; 2],
}

impl FreeSum {
    fn new(n: usize, h: f64, hbar_over_2m: f64) -> Self {
        let mut planner = FftPlanner::new();
        let dp = 2.0 * PI / (n as f64 * h);
        let omega = (0..n)
            .map(|j| {
                let s = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                hbar_over_2m * (s * dp).powi(2)
            })
            .collect();
        let zero = Complex64::new(0.0, 0.0);
        FreeSum {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            omega,
            acc: [vec![zero; n], vec![zero; n]],
        }
    }

    /// Adds `field` (overwritten) with per-bin factors `e^{iωt}`.
    fn add_with_phase(&mut self, c: usize, field: &mut [Complex64], phase: &[Complex64]) {
        self.fwd.process(field);
        for ((a, f), p) in self.acc[c].iter_mut().zip(field.iter()).zip(phase) {
            *a += f * p;
        }
    }

    fn add_at(&mut self, c: usize, field: &mut [Complex64], t: f64) {
        self.fwd.process(field);
        for ((a, f), w) in self.acc[c].iter_mut().zip(field.iter()).zip(&self.omega) {
            *a += f * Complex64::from_polar(1.0, w * t);
        }
    }

    /// The sum at the time whose factors are `phase`.
    fn field_with_phase(&self, c: usize, phase: &[Complex64], out: &mut [Complex64]) {
        let scale = 1.0 / self.n as f64;
        for ((o, a), p) in out.iter_mut().zip(&self.acc[c]).zip(phase) {
            *o = a * p.conj() * scale;
        }
        self.inv.process(out);
    }

    fn field_at(&self, c: usize, t: f64, out: &mut [Complex64]) {
        let scale = 1.0 / self.n as f64;
        for ((o, a), w) in out.iter_mut().zip(&self.acc[c]).zip(&self.omega) {
            *o = a * Complex64::from_polar(scale, -w * t);
        }
        self.inv.process(out);
    }

    fn clear(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        self.acc.iter_mut().flatten().for_each(|a| *a = zero);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimator_reproduces_band_limited_fields() {
        let (nf, nw) = (512, 64);
        let h = 0.1;
        // Spectrum at the coarse Nyquist π/0.8 is below 1e-11.
        let f = |x: f64| Complex64::from_polar((-(x - 25.6).powi(2) / 8.0).exp(), 0.3 * x);
        let fine: Vec<Complex64> = (0..nf).map(|j| f(j as f64 * h)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); nw];
        Decimator::new(nf, nw).apply(&fine, &mut out);
        for (i, o) in out.iter().enumerate() {
            assert!((o - f(i as f64 * h * 8.0)).norm() < 1e-10, "{i}");
        }
    }

    #[test]
    fn setup_rejects_unresolved_delta() {
        let sys = LaserSystem::two_level(1.0, 0.0).unwrap();
        let mut s = ScatterSetup::for_wavenumber(&sys, 1.0, 0.05, 0.25, 4096);
        assert!(s.validate(&sys).is_ok());
        s.sigma = 0.04;
        assert!(s.validate(&sys).is_err());
    }

    #[test]
    fn no_coupling_means_no_scattered_field() {
        let sys = LaserSystem::two_level(0.0, 0.0).unwrap();
        let setup = ScatterSetup::for_wavenumber(&sys, 1.0, 0.2, 0.25, 1024);
        let free = |x: f64, _t: f64| Ok([Complex64::from_polar(1.0, x), Complex64::new(0.0, 0.0)]);
        let run = scatter_two_level(&sys, &free, &setup, 2.0).unwrap();
        assert!(run.scattered.iter().all(|s| s[0].norm() == 0.0 && s[1].norm() == 0.0));
    }
}
