use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const M_PER_FT: f64 = 0.3048;
pub const FT_PER_M: f64 = 1.0 / M_PER_FT;
pub const FT_PER_MI: f64 = 5280.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    FtPerS,
    MiPerH,
    MPerS,
    Ft,
    M,
    FtPerS2,
    MPerS2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Length,
    Speed,
    Acceleration,
}

impl Unit {
    fn dimension(self) -> Dimension {
        match self {
            Unit::Ft | Unit::M => Dimension::Length,
            Unit::FtPerS | Unit::MiPerH | Unit::MPerS => Dimension::Speed,
            Unit::FtPerS2 | Unit::MPerS2 => Dimension::Acceleration,
        }
    }

    /// Multiplier taking a value in this unit to the canonical feet/seconds unit.
    fn to_canonical(self) -> f64 {
        match self {
            Unit::Ft | Unit::FtPerS | Unit::FtPerS2 => 1.0,
            Unit::M | Unit::MPerS | Unit::MPerS2 => FT_PER_M,
            Unit::MiPerH => FT_PER_MI / 3600.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::FtPerS => "ft/s",
            Unit::MiPerH => "mi/h",
            Unit::MPerS => "m/s",
            Unit::Ft => "ft",
            Unit::M => "m",
            Unit::FtPerS2 => "ft/s^2",
            Unit::MPerS2 => "m/s^2",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "ft/s" | "fps" => Unit::FtPerS,
            "mi/h" | "mph" => Unit::MiPerH,
            "m/s" => Unit::MPerS,
            "ft" => Unit::Ft,
            "m" => Unit::M,
            "ft/s2" | "ft/s^2" | "ft/s²" => Unit::FtPerS2,
            "m/s2" | "m/s^2" | "m/s²" => Unit::MPerS2,
            other => return Err(Error::domain(format!("unknown unit '{other}'"))),
        })
    }
}

pub fn convert_units(value: f64, from: Unit, to: Unit) -> Result<f64> {
    if from.dimension() != to.dimension() {
        return Err(Error::domain(format!("cannot convert {from} to {to}")));
    }
    if from == to {
        return Ok(value);
    }
    Ok(value * from.to_canonical() / to.to_canonical())
}

/// String-keyed variant of [`convert_units`].
pub fn convert_units_str(value: f64, from: &str, to: &str) -> Result<f64> {
    convert_units(value, from.parse()?, to.parse()?)
}
