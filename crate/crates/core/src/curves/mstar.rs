use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FunctionSpec, GeometricSeq, Grid, SampledField};
use crate::fit::{fit_loglog, ScalingFit};
use crate::quad::{gauss_legendre, refine_toward, tidy};

/// `∫_lo^hi f` for `f` on the line, split at its kinks.
pub fn interval_integral(f: &FunctionSpec, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let mut kinks = Vec::new();
    f.kinks_1d(&mut kinks);
    let mut pts = vec![lo, hi];
    pts.extend(kinks.iter().copied().filter(|k| *k > lo && *k < hi));
    tidy(&mut pts);
    // Quarter every smooth piece; bumps are not polynomial.
    let mut fine = Vec::with_capacity(4 * pts.len());
    for w in pts.windows(2) {
        for j in 0..4 {
            fine.push(w[0] + (w[1] - w[0]) * j as f64 / 4.0);
        }
    }
    fine.push(hi);
    if f.is_singular() {
        for k in kinks {
            refine_toward(&mut fine, k, 40);
        }
        tidy(&mut fine);
    }
    let rule = gauss_legendre(8);
    fine.windows(2).map(|w| rule.integrate(w[0], w[1], |y| f.eval(&[y]))).sum()
}

/// `(1/t) ∫_{x - t(h+2)}^{x - t(h-2)} f`, the average `∫_{I(h,2)} f(x - t y) dy`.
fn window(f: &FunctionSpec, h: f64, x: f64, t: f64) -> f64 {
    interval_integral(f, x - t * (h + 2.0), x - t * (h - 2.0)) / t
}

/// Discrete `sup_t ∫_{I(h,2)} f(x - ty) dy` over `ts`, optionally also over
/// the dilations at which a window end meets a kink of `f`. For piecewise
/// constant `f` the window value is monotone between those dilations, so the
/// extra candidates make the supremum exact up to the `t → 0` limit.
pub(crate) fn mstar_point(f: &FunctionSpec, h: f64, x: f64, ts: &[f64], kink_candidates: bool) -> f64 {
    let mut best = ts.iter().fold(0.0f64, |m, &t| m.max(window(f, h, x, t).abs()));
    if kink_candidates {
        let mut kinks = Vec::new();
        f.kinks_1d(&mut kinks);
        for k in kinks {
            for d in [h + 2.0, h - 2.0] {
                let t = (x - k) / d;
                if t > 0.0 && t.is_finite() {
                    best = best.max(window(f, h, x, t).abs());
                }
            }
        }
    }
    best
}

/// `M*_h f` on a one-dimensional grid, as a discrete supremum over `tgrid`.
pub fn mstar(f: &FunctionSpec, h: f64, grid: &Grid, tgrid: &GeometricSeq) -> Result<SampledField> {
    grid.validate()?;
    tgrid.validate()?;
    if grid.dim() != 1 {
        return Err(Error::Dimension(grid.dim()));
    }
    f.validate(1)?;
    if !h.is_finite() {
        return Err(Error::Domain(format!("offset h = {h} must be finite")));
    }
    let ts = tgrid.points();
    SampledField::from_fn(grid, |x| Ok(mstar_point(f, h, x[0], &ts, false)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MstarParams {
    pub tgrid: GeometricSeq,
    /// The `x`-integral runs directly over `(0, x_factor · (h + 2))`; beyond
    /// that it uses `x = X / v`.
    pub x_factor: f64,
    pub cells_per_octave: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub profile_samples: usize,
    /// Accepted range of `M*_h f(x) · (1 + x/h)` on `(0, 4h)`.
    pub profile_bounds: (f64, f64),
}

impl Default for MstarParams {
    fn default() -> Self {
        MstarParams {
            tgrid: GeometricSeq { t_min: 1e-6, t_max: 1e4, ratio: 2f64.powf(0.125) },
            x_factor: 4.0,
            cells_per_octave: 16,
            tolerance: 0.05,
            max_residual: 0.1,
            profile_samples: 256,
            profile_bounds: (0.5, 8.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MstarReport {
    pub p: f64,
    pub fit: ScalingFit,
    /// `(h, ‖M*_h f‖_p)`.
    pub norms: Vec<(f64, f64)>,
    pub profile_min: f64,
    pub profile_max: f64,
    pub profile_pass: bool,
    pub pass: bool,
}

/// Nodes and weights for `∫_0^∞ F(x) dx` when `F` decays like `1/x`:
/// composite Gauss on `(0, X]` and on `v ∈ (0, 1]` with `x = X / v`.
fn half_line_nodes(x_max: f64, cells_per_octave: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(8);
    let mut pts: Vec<f64> = (0..=8).map(|k| k as f64 / 8.0).collect();
    let octaves = x_max.log2().max(0.0);
    let cells = (octaves * cells_per_octave as f64).ceil().max(1.0) as usize;
    for k in 1..=cells {
        pts.push((octaves * k as f64 / cells as f64).exp2());
    }
    tidy(&mut pts);
    let mut nodes: Vec<(f64, f64)> = pts.windows(2).flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>()).collect();

    let mut vs: Vec<f64> = (0..=8).map(|k| k as f64 / 8.0).collect();
    let mut s = 1.0 / 8.0;
    for _ in 0..40 {
        s *= 0.5;
        vs.push(s);
    }
    tidy(&mut vs);
    for w in vs.windows(2) {
        for (v, wt) in rule.mapped(w[0], w[1]) {
            nodes.push((x_max / v, wt * x_max / (v * v)));
        }
    }
    nodes
}

/// Growth of `‖M*_h χ_{(0,1)}‖_p` in `h`, fitted on log–log axes against `1/p`.
///
/// Every `h` must be at least 2, where `M*_h χ_{(0,1)}` vanishes on `x ≤ 0`.
pub fn mstar_exponent(p: f64, hs: &[f64], params: &MstarParams) -> Result<MstarReport> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("exponent p = {p} must exceed 1")));
    }
    if hs.iter().any(|h| !(*h >= 2.0 && h.is_finite())) {
        return Err(Error::precondition("offsets h must be finite and at least 2"));
    }
    params.tgrid.validate()?;
    let f = FunctionSpec::interval(0.0, 1.0);
    let ts = params.tgrid.points();
    let mut norms = Vec::with_capacity(hs.len());
    let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
    for &h in hs {
        let x_max = params.x_factor * (h + 2.0);
        let nodes = half_line_nodes(x_max, params.cells_per_octave);
        let values: Vec<(f64, f64)> =
            nodes.par_iter().map(|&(x, w)| (mstar_point(&f, h, x, &ts, true), w)).collect();
        let norm = if p.is_infinite() {
            values.iter().fold(0.0f64, |m, (v, _)| m.max(*v))
        } else {
            values.iter().map(|(v, w)| w * v.powf(p)).sum::<f64>().powf(1.0 / p)
        };
        norms.push((h, norm));
        let count = params.profile_samples.max(1);
        let profile: Vec<f64> = (1..=count)
            .into_par_iter()
            .map(|i| {
                let x = 4.0 * h * i as f64 / (count + 1) as f64;
                mstar_point(&f, h, x, &ts, true) * (1.0 + x / h)
            })
            .collect();
        for v in profile {
            pmin = pmin.min(v);
            pmax = pmax.max(v);
        }
    }
    let predicted = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let fit = fit_loglog(&norms, predicted, params.tolerance)?.require_residual(params.max_residual)?;
    let profile_pass = pmin >= params.profile_bounds.0 && pmax <= params.profile_bounds.1;
    Ok(MstarReport { p, pass: fit.pass && profile_pass, fit, norms, profile_min: pmin, profile_max: pmax, profile_pass })
}
