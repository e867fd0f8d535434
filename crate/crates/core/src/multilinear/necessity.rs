use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bilinear::check_dim;
use crate::error::{Error, Result};
use crate::fields::{ball_volume, FunctionSpec};
use crate::fit::{fit_loglog, ScalingFit};
use crate::regions::Anisotropy;
use crate::sampling::{chunked, unit_vector, RatioAccumulator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NecessityParams {
    /// Radius factor of `f_1 = χ_{B(0, Cδ)}`.
    pub c: f64,
    /// Values of `|x|` in `[1, 2]`; the fit uses the minimum over them.
    pub radii: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_residual: f64,
}

impl Default for NecessityParams {
    fn default() -> Self {
        NecessityParams {
            c: 4.0,
            radii: vec![1.0, 1.5, 2.0],
            samples: 1_000_000,
            seed: 1,
            tolerance: 0.3,
            max_residual: 0.1,
        }
    }
}

/// `(n - 1) + Σ_{j≥2} n/a_j`, the power of `δ` in the lower bound.
pub fn necessity_slope(n: usize, a: &Anisotropy) -> f64 {
    (n - 1) as f64 + a.as_slice()[1..].iter().map(|v| n as f64 / v).sum::<f64>()
}

/// Upper limit on `1/p_1` forced by the construction: `min(1, slope/n)`.
pub fn necessity_bound(n: usize, a: &Anisotropy) -> f64 {
    (necessity_slope(n, a) / n as f64).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessityReport {
    pub n: usize,
    pub a: Vec<f64>,
    pub fit: ScalingFit,
    /// Standard error of each point, in the order of `fit.points`.
    pub std_errors: Vec<f64>,
    pub implied_bound: f64,
    pub pass: bool,
}

/// Pivot-1 sliced integral restricted to `R(δ) = {|y^j|^{a_j} ≤ δ, j ≥ 2}`,
/// at `x = (ρ, 0, …)` and `t = (ρ, …, ρ)`. On `R(δ)` the sphere of radius
/// `ρ ν` about `x` passes within `O(δ)` of the origin, so the pivot factor is
/// of order `δ^{n-1}` while `|R(δ)| ∝ δ^{Σ_{j≥2} n/a_j}`.
fn lower_bound(n: usize, a: &Anisotropy, delta: f64, rho: f64, params: &NecessityParams) -> (f64, f64) {
    let exps = a.as_slice();
    let m = exps.len();
    let mut x = vec![0.0; n];
    x[0] = rho;
    let f1 = FunctionSpec::ball(vec![0.0; n], params.c * delta);
    let rest = FunctionSpec::ball(vec![0.0; n], 4.0);
    let volume: f64 = exps[1..].iter().map(|aj| ball_volume(n) * delta.powf(n as f64 / aj)).product();
    let a1 = exps[0];
    let parts = chunked(params.seed, params.samples, |rng, count| {
        let mut acc = RatioAccumulator::default();
        let mut dir = vec![0.0; n];
        let mut y = vec![0.0; n];
        for _ in 0..count {
            let mut used = 0.0;
            let mut grad2 = 0.0;
            let mut h = 1.0;
            for &aj in &exps[1..m] {
                // Density ∝ u^{n/a_j - 1} on (0, δ].
                let u = delta * rng.random::<f64>().powf(aj / n as f64);
                used += u;
                grad2 += aj * aj * u.powf(2.0 * (aj - 1.0) / aj);
                unit_vector(rng, &mut dir);
                let r = u.powf(1.0 / aj);
                for i in 0..n {
                    y[i] = x[i] - rho * r * dir[i];
                }
                h *= rest.eval(&y);
            }
            let slack = (1.0 - used).max(0.0);
            let nu = slack.powf(1.0 / a1);
            grad2 += a1 * a1 * slack.powf(2.0 * (a1 - 1.0) / a1);
            if h != 0.0 {
                h *= nu.powf(n as f64 - a1) * grad2.sqrt() / a1 * f1.sphere_integral(&x, rho * nu);
            }
            acc.push(1.0, h);
        }
        acc
    });
    let mut total = RatioAccumulator::default();
    for p in &parts {
        total.merge(p);
    }
    let (mean, se) = total.mean();
    (volume * mean, volume * se)
}

/// Blow-up rate of the m-linear maximal function for
/// `f_1 = χ_{B(0, Cδ)}`, `f_j = χ_{B(0, 4)}`, fitted against `δ`.
pub fn necessity_experiment(n: usize, a: &Anisotropy, deltas: &[f64], params: &NecessityParams) -> Result<NecessityReport> {
    check_dim(n)?;
    let m = a.len();
    if !(2..=super::MAX_BLOCKS).contains(&m) {
        return Err(Error::precondition(format!("number of blocks m = {m} must lie in 2..={}", super::MAX_BLOCKS)));
    }
    let cap = 1.0 / (m - 1) as f64;
    if deltas.iter().any(|d| !(*d > 0.0 && *d < cap)) {
        return Err(Error::precondition(format!("δ values must lie in (0, {cap})")));
    }
    if params.radii.is_empty() || params.radii.iter().any(|r| !(1.0..=2.0).contains(r)) {
        return Err(Error::precondition("evaluation radii must lie in [1, 2]"));
    }
    if !(params.c > 0.0) || params.samples < 1000 {
        return Err(Error::precondition("need C > 0 and at least 1000 samples"));
    }
    let mut points = Vec::with_capacity(deltas.len());
    let mut std_errors = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let (v, se) = params
            .radii
            .iter()
            .map(|&rho| lower_bound(n, a, d, rho, params))
            .min_by(|p, q| p.0.total_cmp(&q.0))
            .expect("radii not empty");
        points.push((d, v));
        std_errors.push(se);
    }
    let fit = fit_loglog(&points, necessity_slope(n, a), params.tolerance)?.require_residual(params.max_residual)?;
    Ok(NecessityReport {
        n,
        a: a.as_slice().to_vec(),
        pass: fit.pass,
        fit,
        std_errors,
        implied_bound: necessity_bound(n, a),
    })
}
