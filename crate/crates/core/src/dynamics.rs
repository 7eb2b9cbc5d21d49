//! Closed-form evolution of a released beam and of a released box state
//! crossing a two-level δ-laser, plus the stationary scattering
//! probabilities of the same laser.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::LaserSystem;
use crate::specfun::moshinsky_at;

/// Two-component amplitude `(⟨1|Ψ⟩, ⟨2|Ψ⟩)`.
pub type Spinor = [Complex64; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        Err(Error::NanInput("time"))
    } else if t <= 0.0 {
        Err(Error::NonPositiveTime(t))
    } else {
        Ok(())
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NanInput("position"))
    }
}

fn require_two_level(sys: &LaserSystem) -> Result<f64> {
    if sys.n_levels() != 2 {
        return Err(Error::Coupling(format!("scenario needs 2 levels, got {}", sys.n_levels())));
    }
    Ok(sys.coupling()[(0, 1)])
}

/// `½·Σ_α (α, 1)·κ/(k − ακ)·[M(a, k, τ) − M(a, ακ, τ)]`: the laser's
/// contribution for a unit shutter edge at distance `a` (≥ 0) from `x` through
/// the laser.
fn edge_correction(a: f64, k: f64, kappa: Complex64, tau: f64) -> Result<Spinor> {
    let mk = moshinsky_at(a, Complex64::new(k, 0.0), tau)?;
    let mut out = [ZERO; 2];
    for alpha in [1.0, -1.0] {
        let denom = k - alpha * kappa;
        if denom.norm() < 1e-300 {
            return Err(Error::Degenerate("resonant denominator k − ακ vanishes".into()));
        }
        let c = 0.5 * kappa / denom * (mk - moshinsky_at(a, alpha * kappa, tau)?);
        out[0] += alpha * c;
        out[1] += c;
    }
    Ok(out)
}

/// Plane wave `e^{ikx}Θ(−x)|1⟩` released at `t = 0`, laser at `ξ > 0`.
#[derive(Debug, Clone)]
pub struct ShutterScenario {
    pub k: f64,
    pub sys: LaserSystem,
}

impl ShutterScenario {
    pub fn new(k: f64, sys: LaserSystem) -> Result<Self> {
        require_two_level(&sys)?;
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!("beam wavenumber must be positive, got {k}")));
        }
        if sys.xi() <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "laser must sit in front of the shutter (xi > 0), got {}",
                sys.xi()
            )));
        }
        Ok(ShutterScenario { k, sys })
    }

    fn kappa(&self) -> Complex64 {
        Complex64::new(0.0, -self.sys.wavenumber(self.sys.coupling()[(0, 1)]))
    }
}

/// Free diffraction in time: `M(x, k, ħt/m)·|1⟩`.
pub fn shutter_free(x: f64, t: f64, sc: &ShutterScenario) -> Result<Spinor> {
    check_x(x)?;
    check_time(t)?;
    Ok([moshinsky_at(x, Complex64::new(sc.k, 0.0), sc.sys.tau(t))?, ZERO])
}

/// Released beam in the presence of the laser.
pub fn shutter_with_laser(x: f64, t: f64, sc: &ShutterScenario) -> Result<Spinor> {
    let mut psi = shutter_free(x, t, sc)?;
    let kappa = sc.kappa();
    if kappa.im == 0.0 {
        return Ok(psi);
    }
    let xi = sc.sys.xi();
    let c = edge_correction((x - xi).abs() + xi, sc.k, kappa, sc.sys.tau(t))?;
    psi[0] += c[0];
    psi[1] += c[1];
    Ok(psi)
}

/// Long-time probabilities for a ground-state plane wave hitting the laser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoefficients {
    pub r1: f64,
    pub r2: f64,
    pub t1: f64,
    pub t2: f64,
}

impl ScatteringCoefficients {
    pub fn total(&self) -> f64 {
        self.r1 + self.r2 + self.t1 + self.t2
    }
}

/// Stationary scattering in natural units (`m = ħ = 1`).
///
/// In the `(|1⟩ ± |2⟩)/√2` basis the laser is two independent δ-barriers of
/// strength `±V₀`, each with `t_± = 1/(1 ± iV₀/k)` and `r_± = t_± − 1`.
pub fn stationary_scattering(k: f64, v0: f64) -> Result<ScatteringCoefficients> {
    if !(k.is_finite() && v0.is_finite()) {
        return Err(Error::NanInput("stationary_scattering"));
    }
    if k <= 0.0 || v0 < 0.0 {
        return Err(Error::InvalidParameter(format!("need k > 0 and V0 >= 0, got k={k}, V0={v0}")));
    }
    let b = v0 / k;
    let tp = 1.0 / Complex64::new(1.0, b);
    let tm = 1.0 / Complex64::new(1.0, -b);
    let (rp, rm) = (tp - 1.0, tm - 1.0);
    Ok(ScatteringCoefficients {
        r1: 0.25 * (rp + rm).norm_sqr(),
        r2: 0.25 * (rp - rm).norm_sqr(),
        t1: 0.25 * (tp + tm).norm_sqr(),
        t2: 0.25 * (tp - tm).norm_sqr(),
    })
}

/// Scattering for a system with arbitrary `m`, `ħ`.
pub fn stationary_scattering_for(k: f64, sys: &LaserSystem) -> Result<ScatteringCoefficients> {
    let v0 = require_two_level(sys)?.abs();
    stationary_scattering(k, sys.wavenumber(v0))
}

/// Box eigenstate `n` of `[0, L]`, boosted by `q`, released at `t = 0`,
/// laser at `ξ > L`.
#[derive(Debug, Clone)]
pub struct SinePacketScenario {
    pub length: f64,
    pub n: u32,
    pub q: f64,
    pub sys: LaserSystem,
}

impl SinePacketScenario {
    pub fn new(length: f64, n: u32, q: f64, sys: LaserSystem) -> Result<Self> {
        require_two_level(&sys)?;
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!("box length must be positive, got {length}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("mode index must be at least 1".into()));
        }
        if !q.is_finite() {
            return Err(Error::NanInput("SinePacketScenario::new"));
        }
        if sys.xi() <= length {
            return Err(Error::InvalidParameter(format!(
                "laser must sit beyond the box (xi > L = {length}), got {}",
                sys.xi()
            )));
        }
        Ok(SinePacketScenario { length, n, q, sys })
    }

    /// `q_{nβ} = q + βnπ/L`.
    pub fn q_beta(&self, beta: f64) -> f64 {
        self.q + beta * self.n as f64 * std::f64::consts::PI / self.length
    }

    fn prefactor(&self) -> Complex64 {
        // 1/(2i)·√(2/L)
        Complex64::new(0.0, -0.5) * (2.0 / self.length).sqrt()
    }

    /// Initial state `√(2/L)·sin(nπx/L)·e^{iqx}` on `[0, L]`.
    pub fn initial(&self, x: f64) -> Complex64 {
        if (0.0..=self.length).contains(&x) {
            let s = (self.n as f64 * std::f64::consts::PI * x / self.length).sin();
            Complex64::from_polar((2.0 / self.length).sqrt() * s, self.q * x)
        } else {
            ZERO
        }
    }
}

/// Free expansion of the box state. As a difference of two shutters,
/// `e^{iqx}χ_[0,L] = e^{iqL}e^{iq(x−L)}Θ(L−x) − e^{iqx}Θ(−x)`.
pub fn sine_packet_free(x: f64, t: f64, sc: &SinePacketScenario) -> Result<Spinor> {
    check_x(x)?;
    check_time(t)?;
    let tau = sc.sys.tau(t);
    let l = sc.length;
    let mut acc = ZERO;
    for beta in [1.0, -1.0] {
        let qb = sc.q_beta(beta);
        let k = Complex64::new(qb, 0.0);
        let far = Complex64::from_polar(1.0, qb * l) * moshinsky_at(x - l, k, tau)?;
        acc += beta * (far - moshinsky_at(x, k, tau)?);
    }
    Ok([sc.prefactor() * acc, ZERO])
}

/// Box state crossing the laser: each of the four shutter edges picks up
/// its own laser correction, with wavenumber `q_{nβ}`.
pub fn sine_packet_with_laser(x: f64, t: f64, sc: &SinePacketScenario) -> Result<Spinor> {
    let mut psi = sine_packet_free(x, t, sc)?;
    let v0 = sc.sys.coupling()[(0, 1)];
    if v0 == 0.0 {
        return Ok(psi);
    }
    let kappa = Complex64::new(0.0, -sc.sys.wavenumber(v0));
    let tau = sc.sys.tau(t);
    let (l, xi) = (sc.length, sc.sys.xi());
    let a = (x - xi).abs() + xi;
    let pref = sc.prefactor();
    for beta in [1.0, -1.0] {
        let qb = sc.q_beta(beta);
        let far = edge_correction(a - l, qb, kappa, tau)?;
        let near = edge_correction(a, qb, kappa, tau)?;
        let phase = Complex64::from_polar(1.0, qb * l);
        for c in 0..2 {
            psi[c] += pref * beta * (phase * far[c] - near[c]);
        }
    }
    Ok(psi)
}

/// Per-channel densities over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Densities {
    pub rho1: Vec<f64>,
    pub rho2: Vec<f64>,
    pub total: Vec<f64>,
}

pub fn channel_density(xs: &[f64], field: &[Spinor]) -> Result<Densities> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    if xs.len() != field.len() {
        return Err(Error::InvalidParameter(format!(
            "grid has {} points but field has {}",
            xs.len(),
            field.len()
        )));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("grid must be strictly ascending".into()));
    }
    let rho1: Vec<f64> = field.iter().map(|s| s[0].norm_sqr()).collect();
    let rho2: Vec<f64> = field.iter().map(|s| s[1].norm_sqr()).collect();
    let total = rho1.iter().zip(&rho2).map(|(a, b)| a + b).collect();
    Ok(Densities { rho1, rho2, total })
}
