//! Run configuration: TOML with one section per concern. Unknown keys are
//! rejected. Values are SI unless the run is in natural units.

use serde::{Deserialize, Serialize};

use crate::dynamics::{ShutterScenario, SinePacketScenario};
use crate::error::{Error, Result};
use crate::kernels::LaserSystem;
use crate::units::{Dimension, UnitSystem};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Values below are already in natural units (`ħ = m = 1`).
    #[serde(default, skip_serializing_if = "is_false")]
    pub natural_units: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet: Option<PacketSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Particle mass (kg) and length scale (m); defaults to ⁸⁷Rb and 1 μm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSection {
    pub mass: f64,
    pub length_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    /// two-level | ladder | vee | lambda | star | mirror | two-strong
    pub configuration: String,
    /// Two-level `[V0]`; ladder `[V12, V23]`; vee `[V12, V13]`;
    /// lambda `[V13, V23]`; star, mirror and two-strong take one entry per
    /// level with 0 at the hub.
    pub couplings: Vec<f64>,
    /// Couplings are given as velocities `v` with `V = ħv`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub couplings_as_velocity: bool,
    pub xi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hub: Option<usize>,
    /// Channel pair `(j, n)` of the mirror and two-strong limits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[usize; 2]>,
    /// `V_l/V_n` of the two-strong limit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

/// Evaluation grid. Kernel runs also need the source axis `xp_*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xp_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xp_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xp_points: Option<usize>,
}

/// Released beam; `k = m·v/ħ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    pub velocity: f64,
}

/// Box state `n` of `[0, L]` with carrier `q = m·v/ħ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSection {
    pub length: f64,
    pub mode: u32,
    pub velocity: f64,
}

/// Grid-oracle certification of the beam or packet run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    /// shutter | packet
    pub scenario: String,
    pub t: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub coarse_points: usize,
}

/// Config reduced to natural units, ready for the library.
#[derive(Debug, Clone, Copy)]
pub struct Scale {
    pub units: Option<UnitSystem>,
}

impl Scale {
    pub fn to_natural(&self, v: f64, dim: Dimension) -> Result<f64> {
        match &self.units {
            Some(u) => u.to_natural(v, dim),
            None if v.is_finite() => Ok(v),
            None => Err(Error::NanInput("config value")),
        }
    }

    pub fn to_output(&self, v: f64, dim: Dimension) -> Result<f64> {
        match &self.units {
            Some(u) => u.to_si(v, dim),
            None => Ok(v),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn scale(&self) -> Result<Scale> {
        if self.natural_units {
            return Ok(Scale { units: None });
        }
        let u = match &self.units {
            Some(s) => UnitSystem::new(s.mass, s.length_scale, UnitSystem::rb87_micrometre().hbar)
                .map_err(|e| Error::Config(format!("units: {e}")))?,
            None => UnitSystem::rb87_micrometre(),
        };
        Ok(Scale { units: Some(u) })
    }

    fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T> {
        s.as_ref().ok_or_else(|| Error::Config(format!("missing section [{name}]")))
    }

    pub fn system(&self) -> Result<&SystemSection> {
        Self::section(&self.system, "system")
    }

    pub fn grid(&self) -> Result<&GridSection> {
        Self::section(&self.grid, "grid")
    }

    pub fn beam(&self) -> Result<&BeamSection> {
        Self::section(&self.beam, "beam")
    }

    pub fn packet(&self) -> Result<&PacketSection> {
        Self::section(&self.packet, "packet")
    }

    pub fn oracle(&self) -> Result<&OracleSection> {
        Self::section(&self.oracle, "oracle")
    }

    /// Couplings in natural units.
    fn couplings(&self, sc: &Scale) -> Result<Vec<f64>> {
        let s = self.system()?;
        let dim = if s.couplings_as_velocity { Dimension::Velocity } else { Dimension::EnergyLength };
        // With V = ħv, a natural velocity is a natural coupling.
        s.couplings.iter().map(|&v| sc.to_natural(v, dim)).collect()
    }

    /// The laser system, validated against the configuration name.
    pub fn laser_system(&self) -> Result<LaserSystem> {
        let sc = self.scale()?;
        let s = self.system()?;
        let v = self.couplings(&sc)?;
        let xi = sc.to_natural(s.xi, Dimension::Length)?;
        let need = |n: usize| {
            if v.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "system.couplings: `{}` takes {n} values, got {}",
                    s.configuration,
                    v.len()
                )))
            }
        };
        match s.configuration.as_str() {
            "two-level" => {
                need(1)?;
                LaserSystem::two_level(v[0], xi)
            }
            "ladder" => {
                need(2)?;
                LaserSystem::ladder(v[0], v[1], xi)
            }
            "vee" => {
                need(2)?;
                LaserSystem::vee(v[0], v[1], xi)
            }
            "lambda" => {
                need(2)?;
                LaserSystem::lambda(v[0], v[1], xi)
            }
            "star" | "mirror" | "two-strong" => {
                let hub = s.hub.ok_or_else(|| Error::Config("system.hub is required".into()))?;
                LaserSystem::star(hub, &v, xi)
            }
            other => Err(Error::Config(format!(
                "system.configuration: unknown configuration `{other}` (expected two-level, ladder, \
                 vee, lambda, star, mirror or two-strong)"
            ))),
        }
    }

    pub fn shutter(&self) -> Result<ShutterScenario> {
        let sc = self.scale()?;
        let k = sc.to_natural(self.beam()?.velocity, Dimension::Velocity)?;
        ShutterScenario::new(k, self.laser_system()?)
    }

    pub fn sine_packet(&self) -> Result<SinePacketScenario> {
        let sc = self.scale()?;
        let p = self.packet()?;
        SinePacketScenario::new(
            sc.to_natural(p.length, Dimension::Length)?,
            p.mode,
            sc.to_natural(p.velocity, Dimension::Velocity)?,
            self.laser_system()?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[system]
configuration = "two-level"
couplings = [0.01]
couplings_as_velocity = true
xi = 5e-5

[beam]
velocity = 0.01

[grid]
x_min = -1e-4
x_max = 7e-4
n_points = 801
times = [0.05]
"#;

    #[test]
    fn round_trip_is_identity() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        let again = RunConfig::parse(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::parse("[beam]\nvelocity = 1.0\nspeed = 2.0\n").unwrap_err();
        assert!(err.to_string().contains("speed"), "{err}");
        assert!(err.is_validation());
    }

    #[test]
    fn si_beam_maps_to_caption_wavenumber() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        let s = c.shutter().unwrap();
        assert!((s.k - 13.684801971149206).abs() < 1e-9);
        // V0 = ħv, so the coupling wavenumber equals the beam's.
        assert!((s.sys.wavenumber(s.sys.coupling()[(0, 1)]) - s.k).abs() < 1e-9);
        assert!((s.sys.xi() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn wrong_arity_is_rejected() {
        let text = SAMPLE.replace("configuration = \"two-level\"", "configuration = \"ladder\"");
        let err = RunConfig::parse(&text).unwrap().laser_system().unwrap_err();
        assert!(err.to_string().contains("couplings"));
        let text = SAMPLE.replace("two-level", "triangle");
        assert!(RunConfig::parse(&text).unwrap().laser_system().is_err());
    }
}
