use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_space_dim;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }
}

/// Tensor grid of `count` equispaced points per axis, endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        let g = Grid { axes };
        g.validate()?;
        Ok(g)
    }

    pub fn cube(n: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::new(vec![Axis { lo, hi, count }; n])
    }

    pub fn line(lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::cube(1, lo, hi, count)
    }

    pub fn validate(&self) -> Result<()> {
        check_space_dim(self.axes.len())?;
        for a in &self.axes {
            if a.count < 2 {
                return Err(Error::Domain(format!("grid axis needs at least 2 points, got {}", a.count)));
            }
            if !(a.hi > a.lo && a.lo.is_finite() && a.hi.is_finite()) {
                return Err(Error::Domain(format!("grid axis [{}, {}] is empty", a.lo, a.hi)));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// Coordinates of the point with flat index `idx`; the last axis varies fastest.
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = a.point(idx % a.count);
            idx /= a.count;
        }
        out
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Scale every coordinate by `s`.
    pub fn scaled(&self, s: f64) -> Grid {
        Grid {
            axes: self
                .axes
                .iter()
                .map(|a| Axis { lo: a.lo * s, hi: a.hi * s, count: a.count })
                .collect(),
        }
    }
}

/// Values of a function at the points of a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::precondition(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled field has non-finite values".into()));
        }
        Ok(SampledField { grid, values })
    }

    /// Evaluate `f` at every grid point in parallel; output order is the grid order.
    pub fn from_fn<F>(grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let values: Result<Vec<f64>> = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.point(i)))
            .collect();
        Self::new(grid.clone(), values?)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let names = ["x", "y", "z"];
        let header: Vec<&str> = names[..self.grid.dim()].to_vec();
        writeln!(w, "{},value", header.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            let coords: Vec<String> = p.iter().map(|c| format!("{c:e}")).collect();
            writeln!(w, "{},{v:e}", coords.join(","))?;
        }
        Ok(())
    }
}

/// Riemann-sum `L^p` norm `(Σ |v|^p Π h_i)^{1/p}`; `p = ∞` gives `max |v|`.
pub fn lp_norm(field: &SampledField, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("exponent p = {p} must be positive")));
    }
    if p.is_infinite() {
        return Ok(field.values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let s: f64 = field.values.iter().map(|v| v.abs().powf(p)).sum();
    Ok((s * field.grid.cell_volume()).powf(1.0 / p))
}

/// Geometric sequence `t_min · e^{k·log_step}` for `k = 0, 1, …` up to `t_max`.
///
/// Refinement halves `log_step`, so every point of a grid is also a point of
/// its refinement and discrete suprema can only grow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricSeq {
    pub t_min: f64,
    pub t_max: f64,
    pub ratio: f64,
}

impl GeometricSeq {
    pub fn new(t_min: f64, t_max: f64, ratio: f64) -> Result<Self> {
        let g = GeometricSeq { t_min, t_max, ratio };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max >= self.t_min && self.ratio > 1.0 && self.t_max.is_finite()) {
            return Err(Error::Domain(format!(
                "geometric grid needs 0 < t_min ≤ t_max and ratio > 1 (got {}, {}, {})",
                self.t_min, self.t_max, self.ratio
            )));
        }
        Ok(())
    }

    fn log_step(&self) -> f64 {
        self.ratio.ln()
    }

    pub fn points(&self) -> Vec<f64> {
        self.points_with_step(self.log_step())
    }

    fn points_with_step(&self, step: f64) -> Vec<f64> {
        let span = (self.t_max / self.t_min).ln();
        let count = (span / step * (1.0 + 1e-12)).floor() as usize + 1;
        (0..count).map(|k| self.t_min * (k as f64 * step).exp()).collect()
    }

    /// Points after `level` halvings of the logarithmic step.
    pub fn refined_points(&self, level: u32) -> Vec<f64> {
        self.points_with_step(self.log_step() / f64::from(1u32 << level))
    }
}
