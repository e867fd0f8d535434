//! Least-squares fits on log–log data.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 for an exact fit).
    pub stderr: f64,
    /// Root-mean-square residual in natural-log units.
    pub residual: f64,
    pub predicted_slope: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub points: Vec<(f64, f64)>,
}

impl ScalingFit {
    /// Turn a fit with a residual above `max_residual` into an inconclusive-fit error.
    pub fn require_residual(self, max_residual: f64) -> Result<Self> {
        if self.residual > max_residual || !self.slope.is_finite() {
            return Err(Error::InconclusiveFit {
                reason: format!(
                    "residual {:.3e} above threshold {:.3e}",
                    self.residual, max_residual
                ),
                points: self.points,
            });
        }
        Ok(self)
    }
}

/// Fit `log y = slope · log x + intercept` by ordinary least squares.
pub fn fit_loglog(points: &[(f64, f64)], predicted: f64, tolerance: f64) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InconclusiveFit {
            reason: format!("need at least 3 points, got {}", points.len()),
            points: points.to_vec(),
        });
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::InconclusiveFit {
            reason: "log-log fit needs positive finite data".into(),
            points: points.to_vec(),
        });
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InconclusiveFit {
            reason: "abscissae are all equal".into(),
            points: points.to_vec(),
        });
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let residual = (sse / k).sqrt();
    let stderr = if lx.len() > 2 { (sse / (k - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(ScalingFit {
        slope,
        intercept,
        stderr,
        residual,
        predicted_slope: predicted,
        tolerance,
        pass: (slope - predicted).abs() <= tolerance,
        points: points.to_vec(),
    })
}

/// Least squares `y = slope · x + intercept` on raw coordinates; the verdict
/// compares the slope with `predicted` as in [`fit_loglog`].
pub fn fit_linear(points: &[(f64, f64)], predicted: f64, tolerance: f64) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InconclusiveFit {
            reason: format!("need at least 3 points, got {}", points.len()),
            points: points.to_vec(),
        });
    }
    if points.iter().any(|(x, y)| !(x.is_finite() && y.is_finite())) {
        return Err(Error::InconclusiveFit { reason: "non-finite data".into(), points: points.to_vec() });
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InconclusiveFit { reason: "abscissae are all equal".into(), points: points.to_vec() });
    }
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(ScalingFit {
        slope,
        intercept,
        stderr: (sse / (k - 2.0) / sxx).sqrt(),
        residual: (sse / k).sqrt(),
        predicted_slope: predicted,
        tolerance,
        pass: (slope - predicted).abs() <= tolerance,
        points: points.to_vec(),
    })
}
