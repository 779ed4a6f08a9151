//! Conversions between spectroscopic input units and atomic units (ħ = 1).
//!
//! Constants are CODATA 2018 recommended values.

use std::fmt;
use std::str::FromStr;

use crate::error::ConfigError;

/// Hartree energy expressed as a wavenumber, cm⁻¹.
pub const HARTREE_CM1: f64 = 219_474.631_363_2;
/// Atomic unit of time, ps.
pub const AU_TIME_PS: f64 = 2.418_884_326_585_7e-5;
/// Bohr radius, Å.
pub const BOHR_ANGSTROM: f64 = 0.529_177_210_903;
/// Unified atomic mass unit in electron masses.
pub const AMU_ELECTRON_MASSES: f64 = 1_822.888_486_209;

/// Half the standard atomic mass of sodium, amu.
pub const NA2_REDUCED_MASS_AMU: f64 = 11.494_884_64;

/// Unit tags accepted at the configuration boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Wavenumber,
    Picosecond,
    Femtosecond,
    Angstrom,
    Bohr,
    Amu,
    /// Already in atomic units.
    Internal,
}

impl Unit {
    /// Multiplier taking a value in this unit to atomic units.
    pub fn scale(self) -> f64 {
        match self {
            Unit::Wavenumber => 1.0 / HARTREE_CM1,
            Unit::Picosecond => 1.0 / AU_TIME_PS,
            Unit::Femtosecond => 1e-3 / AU_TIME_PS,
            Unit::Angstrom => 1.0 / BOHR_ANGSTROM,
            Unit::Bohr | Unit::Internal => 1.0,
            Unit::Amu => AMU_ELECTRON_MASSES,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Unit::Wavenumber => "cm-1",
            Unit::Picosecond => "ps",
            Unit::Femtosecond => "fs",
            Unit::Angstrom => "angstrom",
            Unit::Bohr => "bohr",
            Unit::Amu => "amu",
            Unit::Internal => "internal",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Unit {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "cm-1" | "cm^-1" | "cm⁻¹" | "wavenumber" => Ok(Unit::Wavenumber),
            "ps" => Ok(Unit::Picosecond),
            "fs" => Ok(Unit::Femtosecond),
            "angstrom" | "Å" | "A" => Ok(Unit::Angstrom),
            "bohr" => Ok(Unit::Bohr),
            "amu" => Ok(Unit::Amu),
            "internal" | "au" => Ok(Unit::Internal),
            other => Err(ConfigError::Unit(format!("unknown unit tag `{other}`"))),
        }
    }
}

pub fn to_internal(value: f64, unit: Unit) -> f64 {
    value * unit.scale()
}

pub fn from_internal(value: f64, unit: Unit) -> f64 {
    value / unit.scale()
}

/// Parses the tag and converts; unknown tags are configuration errors.
pub fn to_internal_tagged(value: f64, tag: &str) -> Result<f64, ConfigError> {
    Ok(to_internal(value, tag.parse()?))
}

pub fn cm1(value: f64) -> f64 {
    to_internal(value, Unit::Wavenumber)
}

pub fn ps(value: f64) -> f64 {
    to_internal(value, Unit::Picosecond)
}

pub fn angstrom(value: f64) -> f64 {
    to_internal(value, Unit::Angstrom)
}

pub fn amu(value: f64) -> f64 {
    to_internal(value, Unit::Amu)
}

pub fn to_cm1(energy: f64) -> f64 {
    from_internal(energy, Unit::Wavenumber)
}

pub fn to_ps(time: f64) -> f64 {
    from_internal(time, Unit::Picosecond)
}
