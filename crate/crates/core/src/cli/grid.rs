//! Inclusive, count-based parameter grids written as `start:stop:count`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Parses a real number or a product/quotient involving `pi`, such as
/// `0.25`, `pi`, `-pi/2`, `3*pi/4` or `2pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if t.is_empty() {
        return Err("empty number".into());
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(&t)),
    };
    let mut value = 1.0;
    let mut divide = false;
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor = parse_factor(&rest[..end]).ok_or_else(|| format!("cannot parse '{s}'"))?;
        if divide {
            value /= factor;
        } else {
            value *= factor;
        }
        if end == rest.len() {
            break;
        }
        divide = rest.as_bytes()[end] == b'/';
        rest = &rest[end + 1..];
    }
    let v = sign * value;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not a finite number"))
    }
}

fn parse_factor(f: &str) -> Option<f64> {
    let f = f.trim();
    if f == "pi" {
        return Some(PI);
    }
    if let Some(k) = f.strip_suffix("pi") {
        return k.trim().parse::<f64>().ok().map(|k| k * PI);
    }
    f.parse().ok()
}

/// `count` uniformly spaced values from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self, String> {
        if count == 0 {
            return Err("grid count must be at least 1".into());
        }
        if !(start.is_finite() && stop.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if count == 1 && start != stop {
            return Err(format!(
                "a 1-point grid needs start == stop, got {start}:{stop}"
            ));
        }
        Ok(Self { start, stop, count })
    }

    pub fn point(x: f64) -> Self {
        Self {
            start: x,
            stop: x,
            count: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = self.count - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }

    /// Checks both ends lie in [lo, hi] (or [lo, hi) when `open_hi`).
    pub fn check_within(&self, lo: f64, hi: f64, open_hi: bool) -> Result<(), String> {
        for v in [self.start, self.stop] {
            let above = if open_hi { v >= hi } else { v > hi };
            if v < lo || above {
                let close = if open_hi { ")" } else { "]" };
                return Err(format!("value {v} outside [{lo}, {hi}{close}"));
            }
        }
        Ok(())
    }
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [x] => Ok(Grid::point(parse_angle(x)?)),
            [a, b, n] => {
                let count = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("grid count '{}' is not a positive integer", n.trim()))?;
                Grid::new(parse_angle(a)?, parse_angle(b)?, count)
            }
            _ => Err(format!(
                "expected start:stop:count or a single value, got '{s}'"
            )),
        }
    }
}

impl TryFrom<String> for Grid {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Grid> for String {
    fn from(g: Grid) -> String {
        g.to_string()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}
