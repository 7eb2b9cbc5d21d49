use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{GridSpec, GridState};
use crate::error::{Error, Result};
use crate::kernels::LaserSystem;

/// Boundary treatment of the spectral kinetic step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Period `n·h`.
    Periodic,
    /// Hard walls one spacing beyond either end of the grid (odd extension).
    Reflecting,
}

/// Exact free evolution `e^{−iħp²dt/2m}` of one channel on a uniform grid.
pub(crate) struct Kinetic {
    n: usize,
    boundary: Boundary,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    phase: Vec<Complex64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Kinetic {
    pub(crate) fn new(n: usize, h: f64, dt: f64, hbar_over_m: f64, boundary: Boundary) -> Self {
        let len = match boundary {
            Boundary::Periodic => n,
            Boundary::Reflecting => 2 * (n + 1),
        };
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        let dp = 2.0 * PI / (len as f64 * h);
        let phase = (0..len)
            .map(|j| {
                let m = if j <= len / 2 { j as f64 } else { j as f64 - len as f64 };
                let p = m * dp;
                // Normalization of the inverse transform folded in.
                Complex64::from_polar(1.0 / len as f64, -0.5 * hbar_over_m * p * p * dt)
            })
            .collect();
        Kinetic {
            n,
            boundary,
            fwd,
            inv,
            phase,
            buf: vec![Complex64::new(0.0, 0.0); len],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub(crate) fn apply(&mut self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n);
        match self.boundary {
            Boundary::Periodic => {
                self.fwd.process_with_scratch(data, &mut self.scratch);
                for (d, p) in data.iter_mut().zip(&self.phase) {
                    *d *= p;
                }
                self.inv.process_with_scratch(data, &mut self.scratch);
            }
            Boundary::Reflecting => {
                let n = self.n;
                let zero = Complex64::new(0.0, 0.0);
                self.buf[0] = zero;
                self.buf[n + 1] = zero;
                for j in 0..n {
                    self.buf[j + 1] = data[j];
                    self.buf[2 * n + 1 - j] = -data[j];
                }
                self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
                for (d, p) in self.buf.iter_mut().zip(&self.phase) {
                    *d *= p;
                }
                self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
                data.copy_from_slice(&self.buf[1..=n]);
            }
        }
    }
}

/// Unit-mass Gaussian of width `sigma`, the regularized `δ(x)`.
pub fn regularized_delta(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp() / ((2.0 * PI).sqrt() * sigma)
}

/// Beyond this many widths the regularized δ is below 1e-17 of its peak.
pub(crate) const DELTA_CUTOFF: f64 = 9.0;

/// Largest half-step kick phase `dt·max|g|·δ_σ(0)/2ħ` allowed.
pub const MAX_KICK_PHASE: f64 = 0.5 * PI;

/// Outcome of [`evolve_tdse`].
#[derive(Debug, Clone)]
pub struct TdseRun {
    pub state: GridState,
    pub steps: usize,
    /// Largest `|‖ψ‖² − ‖ψ₀‖²|` seen after any single step.
    pub max_norm_drift: f64,
    /// Probability in the outer 5% of the grid on either side at the end.
    pub edge_mass: f64,
}

/// Fraction of the grid on either side watched for probability reaching the
/// boundary.
const SENTINEL_FRACTION: f64 = 0.05;
/// Probability allowed in the sentinel zones at `t_final`.
pub const SENTINEL_THRESHOLD: f64 = 1e-8;

/// Strang split-step integration of
/// `iħ∂ψ/∂t = −(ħ²/2m)∂²ψ + V·δ_σ(x−ξ)·ψ` for an `N`-level coupling matrix
/// `V`. Second order in `dt`, unitary to rounding.
///
/// The potential half-step `exp(−iθ(x)V)` is built from the eigenbasis of
/// `V` once per grid point inside `ξ ± 9σ`.
pub fn evolve_tdse(
    initial: &GridState,
    sys: &LaserSystem,
    spec: &GridSpec,
    t_final: f64,
    boundary: Boundary,
) -> Result<TdseRun> {
    let grid = spec.grid;
    if initial.grid != grid {
        return Err(Error::Grid("initial state lives on a different grid".into()));
    }
    let nl = sys.n_levels();
    if initial.n_levels() != nl {
        return Err(Error::Grid(format!(
            "state has {} channels, system has {nl}",
            initial.n_levels()
        )));
    }
    if !(t_final > initial.t) {
        return Err(Error::NonPositiveTime(t_final - initial.t));
    }
    let span = t_final - initial.t;
    let steps = (span / spec.dt).ceil() as usize;
    let dt = span / steps as f64;
    let (m, hbar) = (sys.mass(), sys.hbar());
    let sigma = spec.regularization_width;

    let eig = SymmetricEigen::new(sys.coupling().clone());
    let gmax = eig.eigenvalues.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    let kick_phase = 0.5 * dt * gmax * regularized_delta(0.0, sigma) / hbar;
    if kick_phase > MAX_KICK_PHASE {
        return Err(Error::Grid(format!(
            "time step too large: half-step kick phase {kick_phase:.3} exceeds {MAX_KICK_PHASE:.3}"
        )));
    }

    let h = grid.spacing();
    let mut kicks: Vec<(usize, DMatrix<Complex64>)> = Vec::new();
    if gmax > 0.0 {
        let u = eig.eigenvectors.map(|v| Complex64::new(v, 0.0));
        for j in 0..grid.n_points {
            let d = grid.x(j) - sys.xi();
            if d.abs() > DELTA_CUTOFF * sigma {
                continue;
            }
            let theta = 0.5 * dt * regularized_delta(d, sigma) / hbar;
            let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                nl,
                eig.eigenvalues.iter().map(|g| Complex64::from_polar(1.0, -theta * g)),
            ));
            kicks.push((j, &u * diag * u.transpose()));
        }
    }

    let mut channels: Vec<Vec<Complex64>> = (0..nl).map(|c| initial.channel(c)).collect();
    let mut kinetic = Kinetic::new(grid.n_points, h, dt, hbar / m, boundary);
    let norm0: f64 = channels.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * h;
    let mut max_drift: f64 = 0.0;
    let mut psi_local = vec![Complex64::new(0.0, 0.0); nl];

    let kick = |channels: &mut Vec<Vec<Complex64>>, psi_local: &mut Vec<Complex64>| {
        for (j, mat) in &kicks {
            for c in 0..nl {
                psi_local[c] = channels[c][*j];
            }
            for r in 0..nl {
                channels[r][*j] = (0..nl).map(|c| mat[(r, c)] * psi_local[c]).sum();
            }
        }
    };

    for _ in 0..steps {
        kick(&mut channels, &mut psi_local);
        for ch in channels.iter_mut() {
            kinetic.apply(ch);
        }
        kick(&mut channels, &mut psi_local);
        let norm: f64 = channels.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * h;
        max_drift = max_drift.max((norm - norm0).abs());
        if !norm.is_finite() {
            return Err(Error::Grid("field became non-finite".into()));
        }
    }

    let n = grid.n_points;
    let edge = ((n as f64 * SENTINEL_FRACTION).ceil() as usize).max(1);
    let edge_mass = h * channels
        .iter()
        .map(|ch| ch[..edge].iter().chain(&ch[n - edge..]).map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>();
    if edge_mass > SENTINEL_THRESHOLD * norm0.max(1e-300) {
        return Err(Error::Grid(format!(
            "probability {edge_mass:.3e} reached the grid edges; enlarge the domain"
        )));
    }
    let psi = (0..n).map(|j| channels.iter().map(|ch| ch[j]).collect()).collect();
    Ok(TdseRun {
        state: GridState::new(grid, psi, t_final)?,
        steps,
        max_norm_drift: max_drift,
        edge_mass,
    })
}
