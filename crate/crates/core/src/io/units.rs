//! Unit suffixes on config and command-line values.
//!
//! Unit prefixes are folded into the decimal exponent before the number is
//! parsed, so `1.3e-10 s` and `130000 fs` read as the same double.

use std::fmt;

/// Physical dimension of a configuration value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Dimensionless,
    /// Stored in fs.
    Time,
    /// Stored in mm.
    Length,
    /// Stored in nm.
    Wavelength,
    /// Stored in fs/mm.
    TimePerLength,
    /// Stored in rad/fs.
    AngularFrequency,
    /// Stored in 1/fs.
    InverseTime,
}

impl Dimension {
    /// Suffix written when serializing.
    pub fn canonical_unit(self) -> &'static str {
        match self {
            Dimension::Dimensionless => "",
            Dimension::Time => "fs",
            Dimension::Length => "mm",
            Dimension::Wavelength => "nm",
            Dimension::TimePerLength => "fs/mm",
            Dimension::AngularFrequency => "rad/fs",
            Dimension::InverseTime => "/fs",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Dimensionless => "dimensionless",
            Dimension::Time => "time",
            Dimension::Length | Dimension::Wavelength => "length",
            Dimension::TimePerLength => "time per length",
            Dimension::AngularFrequency => "angular frequency",
            Dimension::InverseTime => "inverse time",
        })
    }
}

fn time_exponent(unit: &str) -> Option<i32> {
    Some(match unit {
        "fs" => -15,
        "ps" => -12,
        "ns" => -9,
        "us" | "µs" => -6,
        "ms" => -3,
        "s" => 0,
        _ => return None,
    })
}

fn length_exponent(unit: &str) -> Option<i32> {
    Some(match unit {
        "nm" => -9,
        "um" | "µm" => -6,
        "mm" => -3,
        "cm" => -2,
        "m" => 0,
        _ => return None,
    })
}

fn reciprocal_time(unit: &str) -> Option<&str> {
    unit.strip_prefix("1/")
        .or_else(|| unit.strip_prefix('/'))
        .or_else(|| unit.strip_suffix("^-1"))
}

/// Power of ten taking `unit` to the canonical unit of `dim`.
fn exponent(unit: &str, dim: Dimension) -> Option<i32> {
    match dim {
        Dimension::Dimensionless => unit.is_empty().then_some(0),
        Dimension::Time => time_exponent(unit).map(|e| e + 15),
        Dimension::Length => length_exponent(unit).map(|e| e + 3),
        Dimension::Wavelength => length_exponent(unit).map(|e| e + 9),
        Dimension::TimePerLength => {
            let (t, l) = unit.split_once('/')?;
            Some(time_exponent(t)? + 15 - (length_exponent(l)? + 3))
        }
        Dimension::AngularFrequency => {
            let t = unit.strip_prefix("rad/")?;
            Some(-(time_exponent(t)? + 15))
        }
        Dimension::InverseTime => Some(-(time_exponent(reciprocal_time(unit)?)? + 15)),
    }
}

fn parse_scaled(number: &str, shift: i32) -> Option<f64> {
    let (mantissa, exp) = match number.find(['e', 'E']) {
        Some(i) => (&number[..i], number[i + 1..].parse::<i32>().ok()?),
        None => (number, 0),
    };
    mantissa.parse::<f64>().ok()?;
    format!("{mantissa}e{}", exp.checked_add(shift)?)
        .parse()
        .ok()
}

/// Why a value could not be read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitError {
    Number(String),
    MissingUnit(Dimension),
    UnknownUnit { unit: String, dim: Dimension },
}

impl fmt::Display for UnitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitError::Number(s) => write!(f, "`{s}` is not a number"),
            UnitError::MissingUnit(dim) => {
                write!(f, "missing {dim} unit (e.g. `{}`)", dim.canonical_unit())
            }
            UnitError::UnknownUnit { unit, dim } if *dim == Dimension::Dimensionless => {
                write!(f, "dimensionless value takes no unit, got `{unit}`")
            }
            UnitError::UnknownUnit { unit, dim } => write!(f, "`{unit}` is not a {dim} unit"),
        }
    }
}

/// Parses `<number>[ ]<unit>` into the internal unit of `dim`.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, UnitError> {
    let text = text.trim();
    let split = text
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit() || c == '.' || c == '+' || c == '-')
                && !((c == 'e' || c == 'E') && is_exponent_marker(text, i))
        })
        .map_or(text.len(), |(i, _)| i);
    let (number, unit) = text.split_at(split);
    let not_a_number = || UnitError::Number(number.to_string());
    number.parse::<f64>().map_err(|_| not_a_number())?;
    let unit: String = unit.chars().filter(|c| !c.is_whitespace()).collect();
    if unit.is_empty() && dim != Dimension::Dimensionless {
        return Err(UnitError::MissingUnit(dim));
    }
    let exp = exponent(&unit, dim).ok_or(UnitError::UnknownUnit { unit, dim })?;
    parse_scaled(number, exp).ok_or_else(not_a_number)
}

// `e` belongs to the number only when it follows a digit and precedes one
fn is_exponent_marker(text: &str, i: usize) -> bool {
    let b = text.as_bytes();
    let before = i > 0 && (b[i - 1].is_ascii_digit() || b[i - 1] == b'.');
    let mut j = i + 1;
    if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
        j += 1;
    }
    before && j < b.len() && b[j].is_ascii_digit()
}

/// Formats an internal value with its canonical unit.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    match dim.canonical_unit() {
        "" => format!("{value}"),
        unit => format!("{value} {unit}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converts_to_internal_units() {
        assert_eq!(
            parse_quantity("2.5 ps/cm", Dimension::TimePerLength),
            Ok(250.0)
        );
        assert_eq!(
            parse_quantity("250fs/mm", Dimension::TimePerLength),
            Ok(250.0)
        );
        assert_eq!(parse_quantity("0.56 mm", Dimension::Length), Ok(0.56));
        assert_eq!(parse_quantity("52 cm", Dimension::Length), Ok(520.0));
        assert_eq!(parse_quantity("700 nm", Dimension::Wavelength), Ok(700.0));
        assert_eq!(parse_quantity("0.7 um", Dimension::Wavelength), Ok(700.0));
        assert_eq!(parse_quantity("70fs", Dimension::Time), Ok(70.0));
        assert_eq!(parse_quantity("1.3e-10 s", Dimension::Time), Ok(130000.0));
        assert_eq!(parse_quantity("0.13 ns", Dimension::Time), Ok(130000.0));
        assert_eq!(
            parse_quantity("0.14e14 /s", Dimension::InverseTime),
            Ok(0.014)
        );
        assert_eq!(parse_quantity("2e14 s^-1", Dimension::InverseTime), Ok(0.2));
        assert_eq!(parse_quantity("0.2 1/fs", Dimension::InverseTime), Ok(0.2));
        assert_eq!(
            parse_quantity("5.3 rad/fs", Dimension::AngularFrequency),
            Ok(5.3)
        );
        assert_eq!(parse_quantity("-4", Dimension::Dimensionless), Ok(-4.0));
        assert_eq!(parse_quantity("1e-8", Dimension::Dimensionless), Ok(1e-8));
    }

    #[test]
    fn rejects_bad_units() {
        assert_eq!(
            parse_quantity("70", Dimension::Time),
            Err(UnitError::MissingUnit(Dimension::Time))
        );
        assert!(matches!(
            parse_quantity("70 kg", Dimension::Time),
            Err(UnitError::UnknownUnit { .. })
        ));
        assert!(matches!(
            parse_quantity("3 fs", Dimension::Dimensionless),
            Err(UnitError::UnknownUnit { .. })
        ));
        assert!(matches!(
            parse_quantity("fs", Dimension::Time),
            Err(UnitError::Number(_))
        ));
        assert!(matches!(
            parse_quantity("1..2 fs", Dimension::Time),
            Err(UnitError::Number(_))
        ));
    }

    #[test]
    fn canonical_form_is_identity() {
        for dim in [
            Dimension::Time,
            Dimension::Length,
            Dimension::Wavelength,
            Dimension::TimePerLength,
            Dimension::AngularFrequency,
            Dimension::InverseTime,
            Dimension::Dimensionless,
        ] {
            for v in [0.1, 70.0, 5.381_861_620_882_438, 1.3e5, 1e-8] {
                assert_eq!(parse_quantity(&format_quantity(v, dim), dim), Ok(v));
            }
        }
    }
}
