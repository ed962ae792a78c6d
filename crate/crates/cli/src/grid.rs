//! Parameter lists given on the command line as `start:stop:step` or `a,b,c`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Rounds away accumulated step error so `0.1 * 3` prints as `0.3`.
fn tidy(x: f64) -> f64 {
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("not a finite number: {t:?}"))
        };
        let values = if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("range must be start:stop:step, got {s:?}"));
            }
            let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            if step <= 0.0 {
                return Err("range step must be positive".into());
            }
            if stop < start {
                return Err("range stop must not be below start".into());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| tidy(start + i as f64 * step)).collect()
        } else {
            s.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        Ok(Grid(values))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Chain lengths: `8,16,24` or `8:96:8`.
pub fn parse_schedule(s: &str) -> Result<Vec<usize>, String> {
    let grid: Grid = s.parse()?;
    grid.0
        .iter()
        .map(|&x| {
            if x.fract() == 0.0 && x >= 1.0 {
                Ok(x as usize)
            } else {
                Err(format!("chain length must be a positive integer, got {x}"))
            }
        })
        .collect()
}
