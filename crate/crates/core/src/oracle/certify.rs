//! Grid certification of the closed-form scattering solutions.

use num_complex::Complex64;

use super::grid::relative_l2;
use super::scatter::{scatter_two_level, ScatterSetup, FINE_SPACING_K};
use crate::dynamics::{
    channel_density, shutter_free, shutter_with_laser, sine_packet_free, sine_packet_with_laser,
    ShutterScenario, SinePacketScenario, Spinor,
};
use crate::error::{Error, Result};
use crate::kernels::LaserSystem;

/// A released state crossing a two-level laser.
#[derive(Debug, Clone)]
pub enum Scenario {
    Shutter(ShutterScenario),
    Packet(SinePacketScenario),
}

impl Scenario {
    pub fn sys(&self) -> &LaserSystem {
        match self {
            Scenario::Shutter(s) => &s.sys,
            Scenario::Packet(s) => &s.sys,
        }
    }

    /// Carrier wavenumber.
    pub fn wavenumber(&self) -> f64 {
        match self {
            Scenario::Shutter(s) => s.k,
            Scenario::Packet(s) => s.q.abs().max(std::f64::consts::PI * s.n as f64 / s.length),
        }
    }

    /// Peak modulus of the initial state.
    pub fn amplitude(&self) -> f64 {
        match self {
            Scenario::Shutter(_) => 1.0,
            Scenario::Packet(s) => (2.0 / s.length).sqrt(),
        }
    }

    /// Exact evolution without the laser; the initial state at `t = 0`.
    pub fn free(&self, x: f64, t: f64) -> Result<Spinor> {
        let zero = Complex64::new(0.0, 0.0);
        if t == 0.0 {
            let a = match self {
                Scenario::Shutter(s) if x < 0.0 => Complex64::from_polar(1.0, s.k * x),
                Scenario::Shutter(_) => zero,
                Scenario::Packet(s) => s.initial(x),
            };
            return Ok([a, zero]);
        }
        match self {
            Scenario::Shutter(s) => shutter_free(x, t, s),
            Scenario::Packet(s) => sine_packet_free(x, t, s),
        }
    }

    /// Closed-form evolution with the laser.
    pub fn exact(&self, x: f64, t: f64) -> Result<Spinor> {
        match self {
            Scenario::Shutter(s) => shutter_with_laser(x, t, s),
            Scenario::Packet(s) => sine_packet_with_laser(x, t, s),
        }
    }
}

/// Regularization widths in fine-grid spacings, coarsest first.
pub const SIGMA_STEPS: [f64; 3] = [8.0, 4.0, 2.0];
/// `v·dt/σ` for every width.
pub const STEP_RATIO: f64 = 0.25;
/// Per-channel relative L² density error allowed after extrapolation.
pub const DENSITY_TOLERANCE: f64 = 0.02;
/// Scattered amplitude allowed near the ends of the periodic coarse grid,
/// relative to the incident amplitude.
pub const EDGE_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub t: f64,
    /// Comparison window.
    pub x_range: (f64, f64),
    pub coarse_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRun {
    pub sigma: f64,
    pub dt: f64,
    pub steps: usize,
    /// Relative L² error of `|ψ₁|²` and `|ψ₂|²`.
    pub errors: [f64; 2],
    /// Largest scattered amplitude near the coarse-grid ends, relative to
    /// the incident amplitude.
    pub edge: f64,
}

#[derive(Debug, Clone)]
pub struct Certification {
    pub runs: Vec<SigmaRun>,
    /// Errors of `(8ρ(2h) − 6ρ(4h) + ρ(8h))/3`.
    pub extrapolated: [f64; 2],
    pub xs: Vec<f64>,
    pub exact: [Vec<f64>; 2],
    pub grid: [Vec<f64>; 2],
}

impl Certification {
    /// Errors shrink with `σ` in every channel.
    pub fn monotone(&self) -> bool {
        (0..2).all(|c| self.runs.windows(2).all(|w| w[1].errors[c] < w[0].errors[c]))
    }

    pub fn passed(&self) -> bool {
        self.monotone() && self.extrapolated.iter().all(|e| *e <= DENSITY_TOLERANCE)
    }
}

/// Runs the grid oracle at the three widths of [`SIGMA_STEPS`] and compares
/// each channel density with the closed form on the coarse points inside
/// `x_range`.
pub fn certify(scenario: &Scenario, opts: &CertifyOptions) -> Result<Certification> {
    let sys = scenario.sys();
    let k = scenario.wavenumber();
    let (a, b) = opts.x_range;
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("empty comparison window [{a}, {b}]")));
    }
    let free = |x: f64, t: f64| scenario.free(x, t);
    let h = FINE_SPACING_K / k;

    let mut runs = Vec::new();
    let mut densities: Vec<[Vec<f64>; 2]> = Vec::new();
    let mut xs = Vec::new();
    let mut exact = [Vec::new(), Vec::new()];
    for (i, steps_h) in SIGMA_STEPS.iter().enumerate() {
        let setup = ScatterSetup::for_wavenumber(sys, k, steps_h * h, STEP_RATIO, opts.coarse_points);
        let run = scatter_two_level(sys, &free, &setup, opts.t)?;
        let edge = run.edge_amplitude / scenario.amplitude();
        if edge > EDGE_TOLERANCE {
            return Err(Error::Grid(format!(
                "scattered field reached the coarse-grid edge (relative |Ψ| = {edge:.2e}); enlarge the grid"
            )));
        }
        let total = run.total(free)?;
        let idx: Vec<usize> =
            (0..run.coarse.n_points).filter(|&j| (a..=b).contains(&run.coarse.x(j))).collect();
        if idx.is_empty() {
            return Err(Error::InvalidParameter("comparison window misses the grid".into()));
        }
        let here: Vec<f64> = idx.iter().map(|&j| run.coarse.x(j)).collect();
        if i == 0 {
            xs = here;
            let field: Vec<Spinor> =
                xs.iter().map(|&x| scenario.exact(x, opts.t)).collect::<Result<_>>()?;
            let d = channel_density(&xs, &field)?;
            exact = [d.rho1, d.rho2];
        } else if here != xs {
            return Err(Error::Grid("coarse grids differ between widths".into()));
        }
        let field: Vec<Spinor> = idx.iter().map(|&j| total[j]).collect();
        let d = channel_density(&xs, &field)?;
        let rho = [d.rho1, d.rho2];
        runs.push(SigmaRun {
            sigma: setup.sigma,
            dt: opts.t / run.steps as f64,
            steps: run.steps,
            errors: [relative_l2(&rho[0], &exact[0]), relative_l2(&rho[1], &exact[1])],
            edge,
        });
        densities.push(rho);
    }
    let extrap: [Vec<f64>; 2] = std::array::from_fn(|c| {
        (0..xs.len())
            .map(|j| (8.0 * densities[2][c][j] - 6.0 * densities[1][c][j] + densities[0][c][j]) / 3.0)
            .collect()
    });
    Ok(Certification {
        runs,
        extrapolated: [relative_l2(&extrap[0], &exact[0]), relative_l2(&extrap[1], &exact[1])],
        xs,
        exact,
        grid: extrap,
    })
}
