//! Bound curves tabulated over a grid of `γ` values.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::bounds::{bound_b, bound_majorization, bound_r};
use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::majorization::Truncation;

pub const MAX_POINTS: usize = 1_000_000;
/// Column names, in row order.
pub const CSV_HEADER: &str = "gamma,B,R,MAJ_2,MAJ_3,MAJ_4";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
        })
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            _ => Err(domain(format!("unknown scale `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepConfig {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub points: usize,
    pub scale: Scale,
    /// Order of the `MAJ` columns; `B` uses it with its conjugate.
    pub alpha: f64,
}

impl SweepConfig {
    pub fn new(
        gamma_min: f64,
        gamma_max: f64,
        points: usize,
        scale: Scale,
        alpha: f64,
    ) -> Result<Self> {
        let cfg = SweepConfig {
            gamma_min,
            gamma_max,
            points,
            scale,
            alpha,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.gamma_min, self.gamma_max);
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return Err(domain(format!(
                "need 0 < gamma_min < gamma_max, got [{lo}, {hi}]"
            )));
        }
        if !(2..=MAX_POINTS).contains(&self.points) {
            return Err(domain(format!(
                "points must lie in 2..={MAX_POINTS}, got {}",
                self.points
            )));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(domain(format!("alpha must be > 0, got {}", self.alpha)));
        }
        Ok(())
    }

    /// The grid, with both endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == last {
                    return self.gamma_max;
                }
                let t = i as f64 / last as f64;
                match self.scale {
                    Scale::Linear => self.gamma_min + t * (self.gamma_max - self.gamma_min),
                    Scale::Log => self.gamma_min * (self.gamma_max / self.gamma_min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub b: f64,
    pub r: f64,
    /// `MAJ` for `n = 2, 3, 4`.
    pub maj: [f64; 3],
}

impl SweepRow {
    pub fn at(gamma: f64, alpha: f64) -> Result<Self> {
        let maj = |n| bound_majorization(gamma, alpha, Truncation::Finite(n));
        Ok(SweepRow {
            gamma,
            b: bound_b(gamma, alpha)?,
            r: bound_r(gamma)?,
            maj: [maj(2)?, maj(3)?, maj(4)?],
        })
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.gamma, self.b, self.r, self.maj[0], self.maj[1], self.maj[2]
        )
    }
}

/// Rows in grid order.
pub fn sweep(cfg: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    exec.map(&cfg.grid(), |&g| SweepRow::at(g, cfg.alpha))
        .into_iter()
        .collect()
}

pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    out.flush()?;
    Ok(())
}
