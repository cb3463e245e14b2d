//! Parsing of scalar, list and range arguments.
//!
//! Reals accept plain numbers and multiples of pi: `0.4`, `pi`, `-pi/2`,
//! `4pi/7`, `2*pi`, `1.5pi`. A value list is either comma separated
//! (`0.4,1.7,3,7`) or an inclusive range `start:stop:step`.

use std::f64::consts::PI;

pub fn parse_real(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.to_ascii_lowercase();
    if t.is_empty() {
        return Err("empty number".into());
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => {
            let d: f64 = d.parse().map_err(|_| format!("bad denominator in '{s}'"))?;
            if d == 0.0 {
                return Err(format!("division by zero in '{s}'"));
            }
            (n.to_string(), d)
        }
        None => (t.clone(), 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| format!("bad coefficient in '{s}'"))?,
        };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| format!("'{s}' is not a number"))?
    };
    let v = value / den;
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(parse_real).collect(),
        3 => {
            let (a, b, h) = (parse_real(parts[0])?, parse_real(parts[1])?, parse_real(parts[2])?);
            if h <= 0.0 {
                return Err(format!("range step must be positive in '{s}'"));
            }
            if b < a {
                return Err(format!("range end below start in '{s}'"));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            if n > 1_000_000 {
                return Err(format!("range '{s}' has too many points"));
            }
            Ok((0..=n).map(|k| a + k as f64 * h).collect())
        }
        _ => Err(format!("'{s}' is neither a list nor start:stop:step")),
    }
}

pub fn parse_spins(s: &str) -> Result<Vec<u32>, String> {
    let v = parse_reals(s)?;
    v.iter()
        .map(|&x| {
            if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                Ok(x as u32)
            } else {
                Err(format!("spin {x} must be an integer >= 1"))
            }
        })
        .collect()
}

/// q values; `inf` selects the extreme-value dimension.
pub fn parse_q(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| match t.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(f64::INFINITY),
            other => {
                let q = parse_real(other)?;
                if q < 0.0 {
                    Err(format!("q = {q} must be >= 0"))
                } else {
                    Ok(q)
                }
            }
        })
        .collect()
}

/// Compact label for file names, e.g. `0.4` or `1.795196`.
pub fn label(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}
