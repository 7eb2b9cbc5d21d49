use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Atom with `n` internal levels coupled by resonant zero-range lasers
/// sitting at a common position `xi`.
///
/// `coupling[(i, k)]` is the δ-strength `V_ik = ħΩ_ik/2` (energy·length).
#[derive(Debug, Clone, PartialEq)]
pub struct LaserSystem {
    coupling: DMatrix<f64>,
    xi: f64,
    mass: f64,
    hbar: f64,
}

/// Which three-level topology a coupling matrix has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeLevel {
    /// 1–2 and 2–3.
    Ladder,
    /// 1–2 and 1–3.
    Vee,
    /// 1–3 and 2–3.
    Lambda,
}

impl ThreeLevel {
    /// Index of the level shared by both transitions.
    pub fn hub(self) -> usize {
        match self {
            ThreeLevel::Ladder => 1,
            ThreeLevel::Vee => 0,
            ThreeLevel::Lambda => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ThreeLevel::Ladder => "ladder",
            ThreeLevel::Vee => "vee",
            ThreeLevel::Lambda => "lambda",
        }
    }
}

impl LaserSystem {
    /// General system in natural units (`m = ħ = 1`).
    pub fn new(coupling: DMatrix<f64>, xi: f64) -> Result<Self> {
        let n = coupling.nrows();
        if n < 2 || coupling.ncols() != n {
            return Err(Error::Coupling(format!(
                "coupling must be square with at least 2 levels, got {}x{}",
                coupling.nrows(),
                coupling.ncols()
            )));
        }
        if !xi.is_finite() || coupling.iter().any(|v| !v.is_finite()) {
            return Err(Error::NanInput("LaserSystem::new"));
        }
        for i in 0..n {
            if coupling[(i, i)] != 0.0 {
                return Err(Error::Coupling(format!("diagonal entry V[{i}][{i}] must be zero")));
            }
            for k in 0..i {
                if coupling[(i, k)] != coupling[(k, i)] {
                    return Err(Error::Coupling(format!("coupling is not symmetric at ({k}, {i})")));
                }
            }
        }
        Ok(LaserSystem { coupling, xi, mass: 1.0, hbar: 1.0 })
    }

    /// Same couplings with explicit mass and ħ.
    pub fn with_units(mut self, mass: f64, hbar: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0 && hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass and hbar must be positive, got m={mass}, hbar={hbar}"
            )));
        }
        self.mass = mass;
        self.hbar = hbar;
        Ok(self)
    }

    pub fn two_level(v0: f64, xi: f64) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(2, 2, &[0.0, v0, v0, 0.0]), xi)
    }

    pub fn ladder(v12: f64, v23: f64, xi: f64) -> Result<Self> {
        Self::star(ThreeLevel::Ladder.hub(), &[v12, 0.0, v23], xi)
    }

    pub fn vee(v12: f64, v13: f64, xi: f64) -> Result<Self> {
        Self::star(ThreeLevel::Vee.hub(), &[0.0, v12, v13], xi)
    }

    pub fn lambda(v13: f64, v23: f64, xi: f64) -> Result<Self> {
        Self::star(ThreeLevel::Lambda.hub(), &[v13, v23, 0.0], xi)
    }

    /// Star: level `hub` coupled to every level `i` with strength `spokes[i]`.
    /// `spokes[hub]` must be zero.
    pub fn star(hub: usize, spokes: &[f64], xi: f64) -> Result<Self> {
        let n = spokes.len();
        if hub >= n {
            return Err(Error::Coupling(format!("hub {hub} out of range for {n} levels")));
        }
        if spokes[hub] != 0.0 {
            return Err(Error::Coupling(format!("hub {hub} cannot couple to itself")));
        }
        let mut v = DMatrix::zeros(n, n);
        for (i, &s) in spokes.iter().enumerate() {
            v[(hub, i)] = s;
            v[(i, hub)] = s;
        }
        Self::new(v, xi)
    }

    pub fn n_levels(&self) -> usize {
        self.coupling.nrows()
    }

    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Effective time `ħΔt/m` (length²).
    pub fn tau(&self, dt: f64) -> f64 {
        self.hbar * dt / self.mass
    }

    /// Wavenumber `m·g/ħ²` associated with a δ-strength `g`.
    pub fn wavenumber(&self, g: f64) -> f64 {
        self.mass * g / (self.hbar * self.hbar)
    }

    /// True when every nonzero coupling involves `hub`.
    pub fn is_star_at(&self, hub: usize) -> bool {
        let n = self.n_levels();
        hub < n
            && (0..n).all(|i| (0..n).all(|k| i == hub || k == hub || self.coupling[(i, k)] == 0.0))
    }

    /// Spoke strengths `V_i = V[hub][i]` (zero at the hub itself).
    pub fn spokes(&self, hub: usize) -> Vec<f64> {
        (0..self.n_levels()).map(|i| self.coupling[(hub, i)]).collect()
    }

    pub(crate) fn require_star(&self, hub: usize) -> Result<()> {
        if self.is_star_at(hub) {
            Ok(())
        } else {
            Err(Error::Coupling(format!("couplings do not form a star around level {hub}")))
        }
    }

    pub(crate) fn require_three_level(&self, config: ThreeLevel) -> Result<()> {
        if self.n_levels() != 3 {
            return Err(Error::Coupling(format!(
                "{} configuration needs 3 levels, got {}",
                config.name(),
                self.n_levels()
            )));
        }
        if !self.is_star_at(config.hub()) {
            return Err(Error::Coupling(format!(
                "coupling sparsity does not match the {} configuration",
                config.name()
            )));
        }
        Ok(())
    }

    /// Same system with every coupling between `subset` and its complement
    /// removed.
    pub fn decoupled(&self, subset: &[usize]) -> Self {
        let n = self.n_levels();
        let inside = |i: usize| subset.contains(&i);
        let mut v = self.coupling.clone();
        for i in 0..n {
            for k in 0..n {
                if inside(i) != inside(k) {
                    v[(i, k)] = 0.0;
                }
            }
        }
        LaserSystem { coupling: v, ..self.clone() }
    }
}
