//! Numeric output formatting and angle-unit handling.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use vertebra_core::linalg::{to_degrees, to_radians};

/// Rounds to 9 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    // Avoid "-0".
    let r = if r == 0.0 { 0.0 } else { r };
    serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

/// Same rounding for text formats (CSV, OBJ).
pub fn text(x: f64) -> String {
    match num(x) {
        Value::Number(n) => n.to_string(),
        _ => "nan".to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Degrees,
    Radians,
}

impl Units {
    pub fn to_rad(self, v: f64) -> f64 {
        match self {
            Units::Degrees => to_radians(v),
            Units::Radians => v,
        }
    }
    pub fn from_rad(self, v: f64) -> f64 {
        match self {
            Units::Degrees => to_degrees(v),
            Units::Radians => v,
        }
    }
    /// `from_rad` rounded to 12 significant digits, for values written back
    /// into config files (30 degrees stays 30). Radians pass through exactly.
    pub fn from_rad_clean(self, v: f64) -> f64 {
        match self {
            Units::Degrees => {
                let d = to_degrees(v);
                format!("{d:.11e}").parse().unwrap_or(d)
            }
            Units::Radians => v,
        }
    }
    pub fn tag(self) -> &'static str {
        match self {
            Units::Degrees => "degrees",
            Units::Radians => "radians",
        }
    }
    /// Angle in these units, rounded.
    pub fn angle(self, rad: f64) -> Value {
        num(self.from_rad(rad))
    }
    pub fn angles(self, rad: &[f64]) -> Value {
        Value::Array(rad.iter().map(|r| self.angle(*r)).collect())
    }
}

/// Parses one angle. Plain numbers use `default`; `rad`/`deg` suffixes and
/// multiples of pi (`pi/4`, `-2pi/3`, `π`) are explicit.
pub fn parse_angle(s: &str, default: Units) -> Result<f64, String> {
    let t = s.trim().replace('π', "pi");
    let bad = || format!("cannot parse angle '{s}'");
    if let Some(v) = t.strip_suffix("rad") {
        return v.trim().parse::<f64>().map_err(|_| bad());
    }
    if let Some(v) = t.strip_suffix("deg") {
        return v.trim().parse::<f64>().map(to_radians).map_err(|_| bad());
    }
    if let Some(pos) = t.find("pi") {
        let (head, tail) = (t[..pos].trim(), t[pos + 2..].trim());
        let k = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        };
        let d = match tail.strip_prefix('/') {
            Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
            None if tail.is_empty() => 1.0,
            None => return Err(bad()),
        };
        return Ok(k * std::f64::consts::PI / d);
    }
    t.parse::<f64>().map(|v| default.to_rad(v)).map_err(|_| bad())
}

/// Parses a comma-separated triple of angles.
pub fn parse_triple(s: &str, default: Units) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, got '{s}'"));
    }
    Ok([parse_angle(parts[0], default)?, parse_angle(parts[1], default)?, parse_angle(parts[2], default)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn nine_digits() {
        assert_eq!(num(PI).to_string(), "3.14159265");
        assert_eq!(num(-0.0).to_string(), "0.0");
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(text(1234567890123.0), "1234567890000.0");
    }

    #[test]
    fn angles() {
        let d = Units::Degrees;
        assert!((parse_angle("45", d).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((parse_angle("pi/4", d).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((parse_angle("π/4", d).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((parse_angle("-2pi/3", d).unwrap() + 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((parse_angle("0.1rad", d).unwrap() - 0.1).abs() < 1e-15);
        assert!((parse_angle("0.1", Units::Radians).unwrap() - 0.1).abs() < 1e-15);
        assert!(parse_angle("x", d).is_err());
        assert!(parse_triple("1,2", d).is_err());
    }
}
