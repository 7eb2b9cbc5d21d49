//! SI ↔ natural units (`ħ = m = 1`, lengths in a chosen scale).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const CONSTANTS_FILE: &str = include_str!("../data/constants.txt");

/// Pinned physical constants (SI).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub rb87_mass: f64,
}

impl Constants {
    /// Parses `key = value` lines; `#` starts a comment. Both keys are
    /// required and no others are accepted.
    pub fn parse(text: &str) -> Result<Self> {
        let (mut hbar, mut mass) = (None, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("constants line {}: expected key = value", lineno + 1)))?;
            let value: f64 = value.trim().parse().map_err(|e| {
                Error::Config(format!("constants line {}: bad number: {e}", lineno + 1))
            })?;
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!("constants line {}: value must be positive", lineno + 1)));
            }
            let slot = match key.trim() {
                "hbar" => &mut hbar,
                "rb87_mass" => &mut mass,
                other => return Err(Error::Config(format!("unknown constant `{other}`"))),
            };
            if slot.replace(value).is_some() {
                return Err(Error::Config(format!("constant `{}` given twice", key.trim())));
            }
        }
        Ok(Constants {
            hbar: hbar.ok_or_else(|| Error::Config("missing constant `hbar`".into()))?,
            rb87_mass: mass.ok_or_else(|| Error::Config("missing constant `rb87_mass`".into()))?,
        })
    }

    /// The constants shipped in `data/constants.txt`.
    pub fn builtin() -> &'static Constants {
        static C: OnceLock<Constants> = OnceLock::new();
        C.get_or_init(|| Constants::parse(CONSTANTS_FILE).expect("bundled constants file is valid"))
    }
}

/// Physical dimensions the scenarios use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Velocity,
    Wavenumber,
    /// δ-coupling strength, J·m.
    EnergyLength,
}

impl FromStr for Dimension {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "length" => Dimension::Length,
            "time" => Dimension::Time,
            "velocity" => Dimension::Velocity,
            "wavenumber" => Dimension::Wavenumber,
            "energy_length" => Dimension::EnergyLength,
            other => return Err(Error::InvalidParameter(format!("unknown dimension `{other}`"))),
        })
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Velocity => "velocity",
            Dimension::Wavenumber => "wavenumber",
            Dimension::EnergyLength => "energy_length",
        })
    }
}

/// Natural units for a particle of mass `mass` with lengths measured in
/// `length_scale`; the time unit is `m·L²/ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub mass: f64,
    pub length_scale: f64,
    pub hbar: f64,
}

impl UnitSystem {
    pub fn new(mass: f64, length_scale: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("length_scale", length_scale), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(UnitSystem { mass, length_scale, hbar })
    }

    /// ⁸⁷Rb with lengths in micrometres.
    pub fn rb87_micrometre() -> Self {
        let c = Constants::builtin();
        UnitSystem { mass: c.rb87_mass, length_scale: 1e-6, hbar: c.hbar }
    }

    pub fn time_scale(&self) -> f64 {
        self.mass * self.length_scale * self.length_scale / self.hbar
    }

    /// SI size of one natural unit of `dim`.
    pub fn scale(&self, dim: Dimension) -> f64 {
        let l = self.length_scale;
        match dim {
            Dimension::Length => l,
            Dimension::Time => self.time_scale(),
            Dimension::Velocity => self.hbar / (self.mass * l),
            Dimension::Wavenumber => 1.0 / l,
            Dimension::EnergyLength => self.hbar * self.hbar / (self.mass * l),
        }
    }

    pub fn to_natural(&self, si: f64, dim: Dimension) -> Result<f64> {
        if !si.is_finite() {
            return Err(Error::NanInput("to_natural"));
        }
        Ok(si / self.scale(dim))
    }

    pub fn to_si(&self, natural: f64, dim: Dimension) -> Result<f64> {
        if !natural.is_finite() {
            return Err(Error::NanInput("to_si"));
        }
        Ok(natural * self.scale(dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_constants() {
        let c = Constants::builtin();
        assert_eq!(c.hbar, 1.054_571_817e-34);
        assert_eq!(c.rb87_mass, 1.443_160_648e-25);
    }

    #[test]
    fn constants_parser_rejects_junk() {
        assert!(Constants::parse("hbar = 1\n").is_err());
        assert!(Constants::parse("hbar = 1\nrb87_mass = 2\nc = 3\n").is_err());
        assert!(Constants::parse("hbar = 1\nhbar = 1\nrb87_mass = 2\n").is_err());
        assert!(Constants::parse("hbar 1\nrb87_mass = 2\n").is_err());
        assert!(Constants::parse("hbar = -1\nrb87_mass = 2\n").is_err());
        let c = Constants::parse("# x\nhbar = 1 # y\n rb87_mass=2\n").unwrap();
        assert_eq!((c.hbar, c.rb87_mass), (1.0, 2.0));
    }

    #[test]
    fn micrometres_map_to_plain_numbers() {
        let u = UnitSystem::rb87_micrometre();
        assert!((u.to_natural(50e-6, Dimension::Length).unwrap() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_names_round_trip() {
        for d in [
            Dimension::Length,
            Dimension::Time,
            Dimension::Velocity,
            Dimension::Wavenumber,
            Dimension::EnergyLength,
        ] {
            assert_eq!(d.to_string().parse::<Dimension>().unwrap(), d);
        }
        assert!("mass".parse::<Dimension>().is_err());
    }
}
