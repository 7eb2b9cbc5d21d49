//! Density data behind the four figures, at their captioned parameters, and
//! the feature measurements used to check them.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::csvio::{write_densities, DensityRow};
use crate::dynamics::{
    shutter_free, shutter_with_laser, sine_packet_free, sine_packet_with_laser, ShutterScenario,
    SinePacketScenario, Spinor,
};
use crate::error::{Error, Result};
use crate::kernels::LaserSystem;
use crate::units::{Dimension, UnitSystem};

/// Atom velocity of every figure, m/s. The couplings are `V₀ = ħv`.
pub const VELOCITY: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6];

    /// Laser position, m.
    pub fn xi(self) -> f64 {
        match self {
            Figure::Fig3 => 50e-6,
            Figure::Fig4 | Figure::Fig6 => 100e-6,
            Figure::Fig5 => 200e-6,
        }
    }

    /// Snapshot time, s. Fig. 5 is a raster in `t` instead.
    pub fn time(self) -> Option<f64> {
        match self {
            Figure::Fig3 => Some(50e-3),
            Figure::Fig4 => Some(150e-3),
            Figure::Fig5 => None,
            Figure::Fig6 => Some(100e-3),
        }
    }

    /// Position axis `(x_min, x_max, step)`, m.
    pub fn x_axis(self) -> (f64, f64, f64) {
        match self {
            Figure::Fig3 => (-100e-6, 700e-6, 0.1e-6),
            Figure::Fig4 => (-500e-6, 1700e-6, 0.25e-6),
            Figure::Fig5 => (100e-6, 300e-6, 1e-6),
            Figure::Fig6 => (-1100e-6, 1300e-6, 0.1e-6),
        }
    }

    /// Fig. 5 time axis `(t_min, t_max, step)`, s.
    pub fn t_axis(self) -> Option<(f64, f64, f64)> {
        match self {
            Figure::Fig5 => Some((0.5e-3, 40e-3, 0.5e-3)),
            _ => None,
        }
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fig3" => Figure::Fig3,
            "fig4" => Figure::Fig4,
            "fig5" => Figure::Fig5,
            "fig6" => Figure::Fig6,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown figure `{other}` (expected fig3, fig4, fig5 or fig6)"
                )))
            }
        })
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
        })
    }
}

/// `n + 1` evenly spaced values from `a` to `b`, `n = round((b − a)/h)`.
fn axis(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = ((b - a) / h).round() as usize;
    (0..=n).map(|j| a + (b - a) * j as f64 / n as f64).collect()
}

enum Source {
    Beam(ShutterScenario),
    Packet(SinePacketScenario),
}

impl Source {
    fn new(fig: Figure, u: &UnitSystem) -> Result<Source> {
        let k = u.to_natural(VELOCITY, Dimension::Velocity)?;
        let sys = LaserSystem::two_level(k, u.to_natural(fig.xi(), Dimension::Length)?)?;
        Ok(match fig {
            Figure::Fig6 => {
                let length = u.to_natural(50e-6, Dimension::Length)?;
                Source::Packet(SinePacketScenario::new(length, 1, k, sys)?)
            }
            _ => Source::Beam(ShutterScenario::new(k, sys)?),
        })
    }

    fn fields(&self, x: f64, t: f64) -> Result<(Spinor, Spinor)> {
        match self {
            Source::Beam(s) => Ok((shutter_with_laser(x, t, s)?, shutter_free(x, t, s)?)),
            Source::Packet(s) => Ok((sine_packet_with_laser(x, t, s)?, sine_packet_free(x, t, s)?)),
        }
    }

    /// SI density per natural density: the beam is relative to the incident
    /// intensity, the packet is a probability per metre.
    fn density_scale(&self, u: &UnitSystem) -> f64 {
        match self {
            Source::Beam(_) => 1.0,
            Source::Packet(_) => 1.0 / u.length_scale,
        }
    }
}

/// Density rows of one figure, SI, ordered by `t` then `x`.
pub fn figure_rows(fig: Figure) -> Result<Vec<DensityRow>> {
    let u = UnitSystem::rb87_micrometre();
    let src = Source::new(fig, &u)?;
    let rho = src.density_scale(&u);
    let (x0, x1, hx) = fig.x_axis();
    let xs = axis(x0, x1, hx);
    let ts = match (fig.time(), fig.t_axis()) {
        (Some(t), _) => vec![t],
        (None, Some((a, b, h))) => axis(a, b, h),
        (None, None) => unreachable!(),
    };
    let mut rows = Vec::with_capacity(xs.len() * ts.len());
    for &t in &ts {
        let tn = u.to_natural(t, Dimension::Time)?;
        for &x in &xs {
            let (psi, free) = src.fields(u.to_natural(x, Dimension::Length)?, tn)?;
            let (r1, r2) = (psi[0].norm_sqr() * rho, psi[1].norm_sqr() * rho);
            rows.push(DensityRow {
                x,
                t,
                rho_1: r1,
                rho_2: r2,
                rho_total: r1 + r2,
                rho_free: (free[0].norm_sqr() + free[1].norm_sqr()) * rho,
            });
        }
    }
    Ok(rows)
}

pub fn write_figure<W: Write>(fig: Figure, out: W) -> Result<()> {
    write_densities(out, &figure_rows(fig)?)
}

/// Diffraction length `√(ħt/m)`, m.
pub fn diffraction_length(t: f64) -> f64 {
    let u = UnitSystem::rb87_micrometre();
    (u.hbar * t / u.mass).sqrt()
}

/// Front of the transmitted beam: the last `x` where `ρ_total` is still at
/// half the plateau, the plateau being the mean over the middle half of
/// `[ξ, vt]`. Returns `(front, vt)`.
pub fn fig3_front(rows: &[DensityRow]) -> Result<(f64, f64)> {
    let t = rows.first().ok_or_else(|| Error::InvalidParameter("no rows".into()))?.t;
    let (xi, vt) = (Figure::Fig3.xi(), VELOCITY * t);
    let (a, b) = (xi + 0.25 * (vt - xi), vt - 0.25 * (vt - xi));
    let mid: Vec<f64> = rows.iter().filter(|r| r.x >= a && r.x <= b).map(|r| r.rho_total).collect();
    if mid.is_empty() {
        return Err(Error::InvalidParameter("grid misses the plateau".into()));
    }
    let half = 0.5 * mid.iter().sum::<f64>() / mid.len() as f64;
    let last = rows
        .iter()
        .rposition(|r| r.rho_total >= half)
        .ok_or_else(|| Error::InvalidParameter("no plateau".into()))?;
    let front = if last + 1 < rows.len() {
        // Linear interpolation of the crossing.
        let (p, q) = (&rows[last], &rows[last + 1]);
        p.x + (q.x - p.x) * (p.rho_total - half) / (p.rho_total - q.rho_total)
    } else {
        rows[last].x
    };
    Ok((front, vt))
}

/// `max_{x<ξ} |ρ_total − ρ_free| / max ρ_free`.
pub fn fig4_deviation(rows: &[DensityRow]) -> f64 {
    let peak = rows.iter().map(|r| r.rho_free).fold(0.0, f64::max);
    let dev = rows
        .iter()
        .filter(|r| r.x < Figure::Fig4.xi())
        .map(|r| (r.rho_total - r.rho_free).abs())
        .fold(0.0, f64::max);
    dev / peak
}

/// Largest `ρ₂` at times `t ≤ t_max` relative to the largest `ρ₂` of the
/// whole raster.
pub fn fig5_early_excitation(rows: &[DensityRow], t_max: f64) -> f64 {
    let peak = rows.iter().map(|r| r.rho_2).fold(0.0, f64::max);
    let early = rows.iter().filter(|r| r.t <= t_max).map(|r| r.rho_2).fold(0.0, f64::max);
    early / peak
}

/// Fraction of the peak a fringe must rise above its neighbouring minima.
pub const FRINGE_CONTRAST: f64 = 0.1;
/// Fringes lower than this fraction of the reflected-side peak are ignored.
pub const FRINGE_FLOOR: f64 = 1e-3;

/// Local maxima of `ρ_total` on the reflected side `x < ξ` that stand out
/// from both neighbouring minima by [`FRINGE_CONTRAST`] of their height.
pub fn fig6_fringes(rows: &[DensityRow]) -> usize {
    let rho: Vec<f64> = rows.iter().filter(|r| r.x < Figure::Fig6.xi()).map(|r| r.rho_total).collect();
    count_fringes(&rho, FRINGE_CONTRAST, FRINGE_FLOOR)
}

/// Relative L² distance between the reflected-side density and the free
/// packet mirrored about `ξ`, scaled by the best-fitting reflectance.
/// Returns `(distance, reflectance)`. Needs an axis symmetric about `ξ`.
pub fn fig6_mirror_deviation(rows: &[DensityRow]) -> Result<(f64, f64)> {
    let xi = Figure::Fig6.xi();
    let n = rows.len();
    let h = rows.get(1).map(|r| r.x - rows[0].x).unwrap_or(0.0);
    if n < 2 || ((rows[0].x + rows[n - 1].x) - 2.0 * xi).abs() > 1e-3 * h {
        return Err(Error::InvalidParameter("axis is not symmetric about the laser".into()));
    }
    let pairs: Vec<(f64, f64)> =
        (0..n).filter(|&j| rows[j].x < xi).map(|j| (rows[j].rho_total, rows[n - 1 - j].rho_free)).collect();
    let r = pairs.iter().map(|p| p.0).sum::<f64>() / pairs.iter().map(|p| p.1).sum::<f64>();
    let num: f64 = pairs.iter().map(|(a, b)| (a - r * b).powi(2)).sum();
    let den: f64 = pairs.iter().map(|(a, _)| a * a).sum();
    Ok(((num / den).sqrt(), r))
}

fn count_fringes(rho: &[f64], contrast: f64, floor: f64) -> usize {
    let peak = rho.iter().copied().fold(0.0, f64::max);
    let mut count = 0;
    let mut low = f64::INFINITY;
    // Candidate maximum waiting for the next drop.
    let mut high: Option<f64> = None;
    for &r in rho {
        match high {
            None => {
                low = low.min(r);
                if r >= floor * peak && r - low >= contrast * r {
                    high = Some(r);
                }
            }
            Some(h) if r > h => high = Some(r),
            Some(h) if h - r >= contrast * h => {
                count += 1;
                high = None;
                low = r;
            }
            Some(_) => {}
        }
    }
    count
}
