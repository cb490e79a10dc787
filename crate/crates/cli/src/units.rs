//! Quantities with explicit unit suffixes, converted to the internal system:
//! time in µs, angular frequencies and rates in rad/µs, lengths in µm,
//! speeds in µm/µs, angles in rad.
//!
//! Cyclic frequencies (`MHz`, `GHz`, `kHz`) pick up a factor 2π; rates and
//! angular frequencies are written `/us`, `/ns`, `rad/us` or `rad/ns`. A
//! reciprocal time such as `1/500 ns` is also accepted for rates (ħ/σ style).

use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Time,
    Frequency,
    Length,
    Speed,
    Angle,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Time => "time (ns, us)",
            Dimension::Frequency => "frequency (kHz, MHz, GHz, /us, /ns, rad/us, rad/ns, 1/<time>)",
            Dimension::Length => "length (nm, um, mm)",
            Dimension::Speed => "speed (m/s, km/s, um/us)",
            Dimension::Angle => "angle (rad, deg, pi)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnitError {
    #[error("`{0}` is not of the form `<number> <unit>`")]
    Malformed(String),
    #[error("unknown unit `{unit}`; expected {expected}")]
    Unknown { unit: String, expected: Dimension },
    #[error("`{0}` is not a finite number")]
    Number(String),
}

fn time_factor(unit: &str) -> Option<f64> {
    match unit {
        "ns" => Some(1e-3),
        "us" | "µs" => Some(1.0),
        "ms" => Some(1e3),
        "s" => Some(1e6),
        _ => None,
    }
}

fn factor(dim: Dimension, unit: &str) -> Option<f64> {
    match dim {
        Dimension::Time => time_factor(unit),
        Dimension::Frequency => match unit {
            "kHz" => Some(2.0 * PI * 1e-3),
            "MHz" => Some(2.0 * PI),
            "GHz" => Some(2.0 * PI * 1e3),
            "/us" | "/µs" | "rad/us" | "rad/µs" | "us^-1" => Some(1.0),
            "/ns" | "rad/ns" | "ns^-1" => Some(1e3),
            _ => None,
        },
        Dimension::Length => match unit {
            "nm" => Some(1e-3),
            "um" | "µm" => Some(1.0),
            "mm" => Some(1e3),
            "m" => Some(1e6),
            _ => None,
        },
        Dimension::Speed => match unit {
            // 1 m/s = 1 µm/µs
            "m/s" | "um/us" | "µm/µs" => Some(1.0),
            "km/s" => Some(1e3),
            _ => None,
        },
        Dimension::Angle => match unit {
            "rad" => Some(1.0),
            "deg" => Some(PI / 180.0),
            "pi" => Some(PI),
            _ => None,
        },
    }
}

fn number(s: &str) -> Result<f64, UnitError> {
    let v: f64 = s.trim().parse().map_err(|_| UnitError::Number(s.trim().to_owned()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(UnitError::Number(s.trim().to_owned()))
    }
}

/// Parses `"<number> <unit>"` into internal units.
pub fn parse(text: &str, dim: Dimension) -> Result<f64, UnitError> {
    let text = text.trim();
    // reciprocal time, e.g. "1/500 ns"
    if dim == Dimension::Frequency {
        if let Some(rest) = text.strip_prefix("1/") {
            let t = parse(rest, Dimension::Time).map_err(|e| match e {
                UnitError::Unknown { unit, .. } => UnitError::Unknown { unit, expected: dim },
                e => e,
            })?;
            if t == 0.0 {
                return Err(UnitError::Number(text.to_owned()));
            }
            return Ok(1.0 / t);
        }
    }
    if let Some(split) = text.find(char::is_whitespace) {
        let (value, unit) = (&text[..split], text[split..].trim());
        let f = factor(dim, unit).ok_or_else(|| UnitError::Unknown { unit: unit.to_owned(), expected: dim })?;
        return Ok(number(value)? * f);
    }
    // no space: longest numeric prefix followed by a known unit, e.g. "10ns"
    let cut = text
        .char_indices()
        .map(|(i, _)| i)
        .filter(|&i| i > 0)
        .rev()
        .find(|&i| text[..i].parse::<f64>().is_ok())
        .ok_or_else(|| UnitError::Malformed(text.to_owned()))?;
    let unit = &text[cut..];
    let f = factor(dim, unit).ok_or_else(|| UnitError::Unknown { unit: unit.to_owned(), expected: dim })?;
    Ok(number(&text[..cut])? * f)
}

/// Formats an internal value back in a conventional unit, for file headers.
pub fn describe(value: f64, dim: Dimension) -> String {
    match dim {
        Dimension::Time => format!("{} us", value),
        Dimension::Frequency => format!("{} rad/us", value),
        Dimension::Length => format!("{} um", value),
        Dimension::Speed => format!("{} um/us", value),
        Dimension::Angle => format!("{} rad", value),
    }
}
