//! Subcommands of the `deltaprop` binary. Each writes its CSV to `out`.

use std::io::Write;

use crate::config::{RunConfig, Scale};
use crate::csvio::{write_convergence, write_densities, write_kernels, write_table, DensityRow};
use crate::dynamics::{
    shutter_free, shutter_with_laser, sine_packet_free, sine_packet_with_laser,
    stationary_scattering_for, Spinor,
};
use crate::error::{Error, Result};
use crate::figures::{write_figure, Figure};
use crate::kernels::{
    mirror_kernel, star_kernel, three_level_kernel, two_level_kernel, two_strong_kernel,
    KernelMatrix, LaserSystem, ThreeLevel, Uncoupled,
};
use crate::oracle::{certify, Certification, CertifyOptions, Scenario};
use crate::units::{Dimension, UnitSystem};
use crate::verify::{self, Suite};

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(Error::Config("grid needs at least one point".into())),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|j| a + (b - a) * j as f64 / (n - 1) as f64).collect()),
    }
}

type KernelFn = Box<dyn Fn(f64, f64, f64) -> Result<KernelMatrix>>;

/// Kernel of the configured system, `(x, t, x′) ↦ K(x, t | x′, 0)`.
pub fn kernel_evaluator(cfg: &RunConfig) -> Result<KernelFn> {
    let sys = cfg.laser_system()?;
    let s = cfg.system()?;
    let pair = || {
        s.pair.map(|[a, b]| (a, b)).ok_or_else(|| Error::Config("system.pair is required".into()))
    };
    let three = |c: ThreeLevel, sys: LaserSystem| -> KernelFn {
        Box::new(move |x, t, xp| three_level_kernel(c, &sys, x, t, xp, 0.0))
    };
    Ok(match s.configuration.as_str() {
        "two-level" => Box::new(move |x, t, xp| two_level_kernel(&sys, x, t, xp, 0.0)),
        "ladder" => three(ThreeLevel::Ladder, sys),
        "vee" => three(ThreeLevel::Vee, sys),
        "lambda" => three(ThreeLevel::Lambda, sys),
        "star" => {
            let hub = s.hub.unwrap_or(0);
            Box::new(move |x, t, xp| star_kernel(&sys, hub, x, t, xp, 0.0, Uncoupled::Free))
        }
        "mirror" => {
            let p = pair()?;
            Box::new(move |x, t, xp| mirror_kernel(&sys, p, x, t, xp, 0.0))
        }
        "two-strong" => {
            let p = pair()?;
            let hub = s.hub.unwrap_or(0);
            let c = s.ratio.ok_or_else(|| Error::Config("system.ratio is required".into()))?;
            Box::new(move |x, t, xp| two_strong_kernel(&sys, p, hub, c, x, t, xp, 0.0))
        }
        other => return Err(Error::Config(format!("system.configuration: unknown configuration `{other}`"))),
    })
}

fn axis(sc: &Scale, a: f64, b: f64, n: usize, dim: Dimension) -> Result<Vec<f64>> {
    linspace(a, b, n)?.into_iter().map(|v| sc.to_natural(v, dim)).collect()
}

fn times(cfg: &RunConfig, sc: &Scale) -> Result<Vec<f64>> {
    let g = cfg.grid()?;
    if g.times.is_empty() {
        return Err(Error::Config("grid.times is empty".into()));
    }
    g.times.iter().map(|&t| sc.to_natural(t, Dimension::Time)).collect()
}

/// Kernel entries over `t × x × x′`, in that nesting order.
pub fn cmd_kernel<W: Write>(cfg: &RunConfig, out: W) -> Result<()> {
    let sc = cfg.scale()?;
    let g = cfg.grid()?;
    let eval = kernel_evaluator(cfg)?;
    let n = cfg.laser_system()?.n_levels();
    let xs = axis(&sc, g.x_min, g.x_max, g.n_points, Dimension::Length)?;
    let xps = match (g.xp_min, g.xp_max, g.xp_points) {
        (Some(a), Some(b), Some(m)) => axis(&sc, a, b, m, Dimension::Length)?,
        (None, None, None) => xs.clone(),
        _ => return Err(Error::Config("grid.xp_min, xp_max and xp_points go together".into())),
    };
    let mut rows = Vec::with_capacity(xs.len() * xps.len());
    for t in times(cfg, &sc)? {
        for &x in &xs {
            for &xp in &xps {
                rows.push(eval(x, t, xp)?);
            }
        }
    }
    // K carries one inverse length.
    let k_scale = 1.0 / sc.to_output(1.0, Dimension::Length)?;
    write_kernels(
        out,
        n,
        &rows,
        |k| {
            Ok([
                sc.to_output(k.x, Dimension::Length)?,
                sc.to_output(k.xprime, Dimension::Length)?,
                sc.to_output(k.t, Dimension::Time)?,
            ])
        },
        k_scale,
    )
}

fn density_rows(
    cfg: &RunConfig,
    sc: &Scale,
    rho_scale: f64,
    field: impl Fn(f64, f64) -> Result<(Spinor, Spinor)>,
) -> Result<Vec<DensityRow>> {
    let g = cfg.grid()?;
    let xs = axis(sc, g.x_min, g.x_max, g.n_points, Dimension::Length)?;
    let mut rows = Vec::new();
    for t in times(cfg, sc)? {
        for &x in &xs {
            let (psi, free) = field(x, t)?;
            let (r1, r2) = (psi[0].norm_sqr() * rho_scale, psi[1].norm_sqr() * rho_scale);
            rows.push(DensityRow {
                x: sc.to_output(x, Dimension::Length)?,
                t: sc.to_output(t, Dimension::Time)?,
                rho_1: r1,
                rho_2: r2,
                rho_total: r1 + r2,
                rho_free: (free[0].norm_sqr() + free[1].norm_sqr()) * rho_scale,
            });
        }
    }
    Ok(rows)
}

/// Released beam densities; relative to the incident intensity.
pub fn cmd_shutter<W: Write>(cfg: &RunConfig, out: W) -> Result<()> {
    let sc = cfg.scale()?;
    let s = cfg.shutter()?;
    let rows = density_rows(cfg, &sc, 1.0, |x, t| Ok((shutter_with_laser(x, t, &s)?, shutter_free(x, t, &s)?)))?;
    write_densities(out, &rows)
}

/// Box-state densities, per unit length.
pub fn cmd_wavepacket<W: Write>(cfg: &RunConfig, out: W) -> Result<()> {
    let sc = cfg.scale()?;
    let p = cfg.sine_packet()?;
    let rho = 1.0 / sc.to_output(1.0, Dimension::Length)?;
    let rows =
        density_rows(cfg, &sc, rho, |x, t| Ok((sine_packet_with_laser(x, t, &p)?, sine_packet_free(x, t, &p)?)))?;
    write_densities(out, &rows)
}

/// Stationary probabilities of the configured beam.
pub fn cmd_scatter<W: Write>(cfg: &RunConfig, out: W) -> Result<()> {
    let s = cfg.shutter()?;
    let c = stationary_scattering_for(s.k, &s.sys)?;
    let sc = cfg.scale()?;
    let k = 1.0 / sc.to_output(1.0 / s.k, Dimension::Length)?;
    write_table(out, &["k", "r1", "r2", "t1", "t2", "total"], &[vec![k, c.r1, c.r2, c.t1, c.t2, c.total()]])
}

pub fn cmd_figure<W: Write>(which: Figure, out: W) -> Result<()> {
    write_figure(which, out)
}

/// Writes the report; `Ok(false)` when any check failed.
pub fn cmd_verify<W: Write>(suite: Suite, out: W) -> Result<bool> {
    let checks = verify::run(suite)?;
    verify::write_report(out, &checks)?;
    Ok(verify::all_pass(&checks))
}

/// Built-in certification runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OraclePreset {
    Fig3,
    Fig6,
}

impl std::str::FromStr for OraclePreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(OraclePreset::Fig3),
            "fig6" => Ok(OraclePreset::Fig6),
            other => Err(Error::InvalidParameter(format!("unknown preset `{other}` (expected fig3 or fig6)"))),
        }
    }
}

/// Scenario and options of a preset, natural units of ⁸⁷Rb and 1 μm.
pub fn oracle_preset(p: OraclePreset) -> Result<(Scenario, CertifyOptions)> {
    let u = UnitSystem::rb87_micrometre();
    let k = u.to_natural(crate::figures::VELOCITY, Dimension::Velocity)?;
    let fig = match p {
        OraclePreset::Fig3 => Figure::Fig3,
        OraclePreset::Fig6 => Figure::Fig6,
    };
    let sys = LaserSystem::two_level(k, u.to_natural(fig.xi(), Dimension::Length)?)?;
    let t = u.to_natural(fig.time().unwrap_or_default(), Dimension::Time)?;
    Ok(match p {
        OraclePreset::Fig3 => (
            Scenario::Shutter(crate::dynamics::ShutterScenario::new(k, sys)?),
            CertifyOptions { t, x_range: (-450.0, 700.0), coarse_points: 65536 },
        ),
        OraclePreset::Fig6 => (
            Scenario::Packet(crate::dynamics::SinePacketScenario::new(50.0, 1, k, sys)?),
            CertifyOptions { t, x_range: (-1000.0, 1200.0), coarse_points: 65536 },
        ),
    })
}

/// Scenario and options from the `[oracle]` section.
pub fn oracle_from_config(cfg: &RunConfig) -> Result<(Scenario, CertifyOptions)> {
    let sc = cfg.scale()?;
    let o = cfg.oracle()?;
    let scenario = match o.scenario.as_str() {
        "shutter" => Scenario::Shutter(cfg.shutter()?),
        "packet" => Scenario::Packet(cfg.sine_packet()?),
        other => return Err(Error::Config(format!("oracle.scenario: unknown scenario `{other}`"))),
    };
    let opts = CertifyOptions {
        t: sc.to_natural(o.t, Dimension::Time)?,
        x_range: (sc.to_natural(o.x_min, Dimension::Length)?, sc.to_natural(o.x_max, Dimension::Length)?),
        coarse_points: o.coarse_points,
    };
    Ok((scenario, opts))
}

/// Convergence CSV, one row per width; `l2_error` is the worse channel.
pub fn write_certification<W: Write>(cert: &Certification, sc: &Scale, out: W) -> Result<()> {
    let rows = cert
        .runs
        .iter()
        .map(|r| {
            Ok((
                sc.to_output(r.sigma, Dimension::Length)?,
                sc.to_output(r.dt, Dimension::Time)?,
                r.errors[0].max(r.errors[1]),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    write_convergence(out, &rows)
}

pub fn cmd_oracle<W: Write>(scenario: &Scenario, opts: &CertifyOptions, sc: &Scale, out: W) -> Result<Certification> {
    let cert = certify(scenario, opts)?;
    write_certification(&cert, sc, out)?;
    Ok(cert)
}
