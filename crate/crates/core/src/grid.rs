//! One-dimensional sample grids written as `MIN:MAX:COUNT[:geo]`.
//!
//! `COUNT` is the number of subintervals, so a grid has `COUNT + 1` points
//! and both endpoints are hit exactly. Refining by an integer factor keeps
//! every original point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::Config(format!("grid bounds must be finite, got {min}:{max}")));
        }
        if !(min < max) {
            return Err(Error::Config(format!("grid needs min < max, got {min}:{max}")));
        }
        if count < 2 {
            return Err(Error::Config(format!("grid count must be at least 2, got {count}")));
        }
        if spacing == Spacing::Geometric && !(min > 0.0) {
            return Err(Error::Config(format!("geometric grid needs min > 0, got {min}")));
        }
        Ok(Grid { min, max, count, spacing })
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(min, max, count, Spacing::Linear)
    }

    pub fn geometric(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(min, max, count, Spacing::Geometric)
    }

    /// The same range with `factor` times as many subintervals.
    pub fn refined(&self, factor: usize) -> Self {
        Grid { count: self.count * factor.max(1), ..*self }
    }

    pub fn len(&self) -> usize {
        self.count + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n {
                    return self.max;
                }
                let frac = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * frac,
                    Spacing::Geometric => self.min * ((self.max / self.min).ln() * frac).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("grid '{s}' is not MIN:MAX:COUNT[:geo]"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let spacing = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") | Some("linear") => Spacing::Linear,
            Some("geo") | Some("geometric") => Spacing::Geometric,
            Some(_) => return Err(bad()),
        };
        Grid::new(min, max, count, spacing)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)?;
        if self.spacing == Spacing::Geometric {
            write!(f, ":geo")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_is_subintervals() {
        let g: Grid = "0:2:200".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 201);
        assert_eq!((pts[0], pts[200]), (0.0, 2.0));
        assert!((pts[100] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_spacing() {
        let g: Grid = "0.1:10:2:geo".parse().unwrap();
        let pts = g.points();
        assert!((pts[1] - 1.0).abs() < 1e-15);
        assert!("0:10:5:geo".parse::<Grid>().is_err());
    }

    #[test]
    fn refinement_keeps_points() {
        let g = Grid::linear(0.05, 1.0, 19).unwrap();
        let fine = g.refined(4).points();
        for (i, x) in g.points().iter().enumerate() {
            assert!((fine[4 * i] - x).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        for s in ["1:0:10", "0:1:1", "0:1", "a:1:3", "0:1:3:log", "0:inf:3"] {
            assert!(s.parse::<Grid>().is_err(), "{s}");
        }
    }

    #[test]
    fn display_round_trips() {
        let g: Grid = "0.5:2:10:geo".parse().unwrap();
        assert_eq!(g.to_string().parse::<Grid>().unwrap(), g);
    }
}
