//! Lower-bound constructions showing the exponent region cannot be enlarged,
//! measured as power laws in the construction scale `δ`.

use serde::{Deserialize, Serialize};

use super::maximal::{sup_over_t, MaximalMode};
use super::sliced::{average, QuadratureOpts};
use super::{check_dim, solve_s_star, AverageRequest};
use crate::error::{Error, Result};
use crate::fields::{hl_max_at, lp_norm_of_spec, sphere_area, FunctionSpec, GeometricSeq};
use crate::fit::{fit_linear, fit_loglog, ScalingFit};
use crate::quad::gauss_legendre;
use crate::regions::Anisotropy;

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.iter().any(|d| !(*d >= 2f64.powi(-10) && *d < 1.0)) {
        return Err(Error::precondition("δ values must lie in [2^-10, 1)"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::precondition("δ values must be strictly decreasing"));
    }
    Ok(())
}

fn e1(n: usize, s: f64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[0] = s;
    x
}

fn ball(n: usize, r: f64) -> FunctionSpec {
    FunctionSpec::ball(vec![0.0; n], r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Nec1Params {
    /// `ε₀ = eps0_fraction · (1 - s∗)`.
    pub eps0_fraction: f64,
    /// Radius factor of `g = χ_{B(0, C₁δ)}`.
    pub c1: f64,
    pub tolerance: f64,
    pub max_residual: f64,
    pub quad: QuadratureOpts,
}

impl Default for Nec1Params {
    fn default() -> Self {
        Nec1Params { eps0_fraction: 0.5, c1: 4.0, tolerance: 0.2, max_residual: 0.1, quad: QuadratureOpts::default() }
    }
}

/// First construction: `f = χ_{B(0, 2δ/s∗)}`, `g = χ_{B(0, C₁δ)}`,
/// `t_1 = t_2 = |x|/s∗` on the annulus `s∗ ≤ |x| ≤ s∗ + ε₀`. The averages are
/// at least of order `δ^{2n-1}`; the fit uses the minimum over three radii of
/// the annulus.
pub fn sharpness_nec1(n: usize, a: &Anisotropy, deltas: &[f64], params: &Nec1Params) -> Result<ScalingFit> {
    check_dim(n)?;
    check_deltas(deltas)?;
    let s_star = solve_s_star(a)?;
    let eps0 = params.eps0_fraction * (1.0 - s_star);
    let radii: Vec<f64> = [0.25, 0.5, 0.75].iter().map(|c| s_star + c * eps0).collect();
    let mut points = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let f = ball(n, 2.0 * d / s_star);
        let g = ball(n, params.c1 * d);
        let mut low = f64::INFINITY;
        for &s in &radii {
            let t = s / s_star;
            let mut req = AverageRequest::new(f.clone(), g.clone(), e1(n, s), t, t);
            req.quad = params.quad.clone();
            low = low.min(average(a, &req)?);
        }
        points.push((d, low));
    }
    fit_loglog(&points, (2 * n - 1) as f64, params.tolerance)?.require_residual(params.max_residual)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Nec2Params {
    /// Radius factor of the small ball `χ_{B(0, Cδ)}`.
    pub c: f64,
    /// Radius of the large ball.
    pub big_radius: f64,
    /// Values of `|x|` in `[1, 2]`.
    pub radii: Vec<f64>,
    pub tolerance: f64,
    pub max_residual: f64,
    pub quad: QuadratureOpts,
}

impl Default for Nec2Params {
    fn default() -> Self {
        Nec2Params {
            c: 4.0,
            big_radius: 10.0,
            radii: vec![1.0, 1.5, 2.0],
            tolerance: 0.15,
            max_residual: 0.1,
            quad: QuadratureOpts::default(),
        }
    }
}

fn nec_small_large(
    n: usize,
    a: &Anisotropy,
    deltas: &[f64],
    params: &Nec2Params,
    small_first: bool,
) -> Result<ScalingFit> {
    check_dim(n)?;
    check_deltas(deltas)?;
    if a.len() != 2 {
        return Err(Error::Arity { expected: 2, got: a.len() });
    }
    if params.radii.is_empty() || params.radii.iter().any(|r| !(*r >= 1.0 && *r <= 2.0)) {
        return Err(Error::precondition("evaluation radii must lie in [1, 2]"));
    }
    let exponent = if small_first { a.get(1) } else { a.get(0) };
    let predicted = n as f64 / exponent + n as f64 - 1.0;
    let big = ball(n, params.big_radius);
    let mut points = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let small = ball(n, params.c * d);
        let (f, g) = if small_first { (small, big.clone()) } else { (big.clone(), small) };
        let mut low = f64::INFINITY;
        for &s in &params.radii {
            let mut req = AverageRequest::new(f.clone(), g.clone(), e1(n, s), s, s);
            req.quad = params.quad.clone();
            low = low.min(average(a, &req)?);
        }
        points.push((d, low));
    }
    fit_loglog(&points, predicted, params.tolerance)?.require_residual(params.max_residual)
}

/// Second construction: `f = χ_{B(0, Cδ)}`, `g = χ_{B(0, 10)}`, `t = |x|`,
/// `1 ≤ |x| ≤ 2`. Predicted slope `n/a_2 + n - 1`.
pub fn sharpness_nec2(n: usize, a: &Anisotropy, deltas: &[f64], params: &Nec2Params) -> Result<ScalingFit> {
    nec_small_large(n, a, deltas, params, true)
}

/// Mirror of [`sharpness_nec2`] with the roles of `f` and `g` exchanged.
/// Predicted slope `n/a_1 + n - 1`.
pub fn sharpness_nec3(n: usize, a: &Anisotropy, deltas: &[f64], params: &Nec2Params) -> Result<ScalingFit> {
    nec_small_large(n, a, deltas, params, false)
}

/// Outcome of the `L¹ × L^∞` probe.
#[derive(Debug, Clone, Serialize)]
pub struct L1Report {
    /// `(|x|, maximal value, Hardy–Littlewood value)` on `1 ≤ |x| ≤ 2`.
    pub pointwise: Vec<(f64, f64, f64)>,
    pub min_ratio: f64,
    /// `(R, ∫_{[-R,R]^n} maximal)`.
    pub masses: Vec<(f64, f64)>,
    /// Linear fit of the mass against `ln R`.
    pub fit: ScalingFit,
    pub pass: bool,
}

/// Length (n = 2) or area (n = 3) of the part of the sphere `|x| = s` inside `[-R, R]^n`.
fn sphere_in_cube(n: usize, s: f64, r: f64) -> f64 {
    if s <= r {
        return sphere_area(n) * s.powi(n as i32 - 1);
    }
    match n {
        2 if s < r * 2f64.sqrt() => s * (2.0 * std::f64::consts::PI - 8.0 * (r / s).acos()),
        2 => 0.0,
        _ => {
            // Fraction of S² with all |coordinates| ≤ r/s, by Gauss in cos θ and exact azimuth cut.
            let c = r / s;
            if c >= 1.0 {
                return sphere_area(3) * s * s;
            }
            let rule = gauss_legendre(40);
            let frac = rule.integrate(-c, c, |u| {
                let rho = (1.0 - u * u).sqrt();
                if rho <= c {
                    return 2.0 * std::f64::consts::PI;
                }
                let cut = (c / rho).acos();
                (2.0 * std::f64::consts::PI - 8.0 * cut).max(0.0)
            });
            frac * s * s
        }
    }
}

/// With `g ≡ 1` and `f = χ_{B(0, δ)}` the maximal function dominates a
/// multiple of `Mf`; its mass over `[-R, R]^n` grows like `log R`.
pub fn l1_failure_probe(n: usize, a: &Anisotropy, scales: &[f64], delta: f64) -> Result<L1Report> {
    check_dim(n)?;
    if a.len() != 2 {
        return Err(Error::Arity { expected: 2, got: a.len() });
    }
    if a.get(0) > n as f64 || a.get(1) > n as f64 {
        return Err(Error::precondition("the probe needs a_1, a_2 ≤ n"));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::precondition("δ must lie in (0, 1/2)"));
    }
    if scales.len() < 3 || scales.windows(2).any(|w| w[1] <= w[0]) || scales[0] <= 2.0 {
        return Err(Error::precondition("need at least three increasing scales above 2"));
    }
    let f = ball(n, delta);
    let g = FunctionSpec::constant(1.0);
    let quad = QuadratureOpts::default();
    let maximal_at = |s: f64| -> Result<f64> {
        let lo = ((s - delta).max(0.0) * 0.5).max(delta / 8.0);
        let ts = GeometricSeq::new(lo, 4.0 * (s + delta), 2f64.powf(1.0 / 16.0))?.points();
        sup_over_t(a, &f, &g, &e1(n, s), &ts, MaximalMode::Diagonal, None, &quad)
    };

    let radii = GeometricSeq::new(delta / 8.0, 8.0, 2f64.powf(1.0 / 16.0))?.points();
    let mut pointwise = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for s in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let m = maximal_at(s)?;
        let h = hl_max_at(&f, &e1(n, s), &radii)?;
        min_ratio = min_ratio.min(m / h);
        pointwise.push((s, m, h));
    }

    let rule = gauss_legendre(4);
    let mut masses = Vec::new();
    for &r in scales {
        let far = r * (n as f64).sqrt();
        let mut breaks = vec![0.0, 0.5 * delta, delta, 1.5 * delta];
        let mut b = 2.0 * delta;
        while b < far {
            breaks.push(b.min(far));
            b *= 2f64.powf(0.25);
        }
        breaks.push(r);
        breaks.push(far);
        crate::quad::tidy(&mut breaks);
        let mut mass = 0.0;
        for w in breaks.windows(2) {
            for (s, wt) in rule.mapped(w[0], w[1]) {
                mass += wt * maximal_at(s)? * sphere_in_cube(n, s, r);
            }
        }
        masses.push((r, mass));
    }
    let pts: Vec<(f64, f64)> = masses.iter().map(|(r, m)| (r.ln(), *m)).collect();
    let mut fit = fit_linear(&pts, 0.0, 0.0)?;
    // Growth must be positive and roughly linear in ln R.
    let incs: Vec<f64> = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let spread = incs.iter().fold(0.0f64, |m, v| m.max(*v)) / incs.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let pass = min_ratio > 0.0 && fit.slope > 0.0 && incs.iter().all(|v| *v > 0.0) && spread < 1.5;
    fit.pass = pass;
    Ok(L1Report { pointwise, min_ratio, masses, fit, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DyadicDecayParams {
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    /// `(1/p, 1/q)`.
    pub point: (f64, f64),
    pub k_min: u32,
    pub k_max: u32,
    /// Radial extent of the domain for the `L^r` norm.
    pub radius: f64,
    /// Radial cells (three Gauss nodes each).
    pub cells: usize,
    pub tgrid: GeometricSeq,
    pub mode: MaximalMode,
    /// The fitted log₂-slope must not exceed this value.
    pub max_slope: f64,
    pub quad: QuadratureOpts,
}

impl Default for DyadicDecayParams {
    fn default() -> Self {
        DyadicDecayParams {
            f: FunctionSpec::ball(vec![0.0, 0.0], 1.0),
            g: FunctionSpec::ball(vec![0.0, 0.0], 1.0),
            point: (0.6, 0.35),
            k_min: 2,
            k_max: 8,
            radius: 6.0,
            cells: 24,
            tgrid: GeometricSeq { t_min: 0.05, t_max: 8.0, ratio: 2f64.powf(0.25) },
            mode: MaximalMode::Biparam,
            max_slope: -0.1,
            quad: QuadratureOpts::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicDecayReport {
    /// `(k, ‖sup_t piece_k‖_r / (‖f‖_p ‖g‖_q))`.
    pub ratios: Vec<(u32, f64)>,
    /// Fit of `ln ratio` against `ln 2^k`, so the slope is a log₂-rate in `k`.
    pub fit: ScalingFit,
    pub pass: bool,
}

/// `L^r` ratios of the dyadic pieces' maximal functions for radial data.
///
/// Both functions must be radial, so the maximal fields are radial and their
/// norms reduce to one-dimensional integrals in `|x|`.
pub fn dyadic_decay(n: usize, a: &Anisotropy, params: &DyadicDecayParams) -> Result<DyadicDecayReport> {
    check_dim(n)?;
    params.tgrid.validate()?;
    if !(params.f.is_radial() && params.g.is_radial()) {
        return Err(Error::precondition("dyadic decay needs radial f and g"));
    }
    params.f.validate(n)?;
    params.g.validate(n)?;
    let (x, y) = params.point;
    if !(x > 0.0 && y > 0.0 && x <= 1.0 && y <= 1.0) {
        return Err(Error::Domain("(1/p, 1/q) must lie in (0, 1]²".into()));
    }
    if params.k_min < 1 || params.k_max < params.k_min + 2 {
        return Err(Error::precondition("need k_min ≥ 1 and at least three pieces"));
    }
    let (p, q, r) = (1.0 / x, 1.0 / y, 1.0 / (x + y));
    let den = lp_norm_of_spec(&params.f, p, n)? * lp_norm_of_spec(&params.g, q, n)?;
    let ts = params.tgrid.points();
    let rule = gauss_legendre(3);
    let h = params.radius / params.cells as f64;
    let mut ratios = Vec::new();
    for k in params.k_min..=params.k_max {
        let mut acc = 0.0;
        for c in 0..params.cells {
            for (s, w) in rule.mapped(c as f64 * h, (c + 1) as f64 * h) {
                let m = sup_over_t(a, &params.f, &params.g, &e1(n, s), &ts, params.mode, Some(k), &params.quad)?;
                acc += w * m.powf(r) * sphere_area(n) * s.powi(n as i32 - 1);
            }
        }
        ratios.push((k, acc.powf(1.0 / r) / den));
    }
    let pts: Vec<(f64, f64)> = ratios.iter().map(|(k, v)| (2f64.powi(*k as i32), *v)).collect();
    let mut fit = fit_loglog(&pts, params.max_slope, 0.0)?;
    let pass = fit.slope <= params.max_slope;
    fit.pass = pass;
    Ok(DyadicDecayReport { ratios, fit, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_probe_grows_logarithmically() {
        let r = l1_failure_probe(2, &Anisotropy::pair(2.0, 2.0).unwrap(), &[4.0, 8.0, 16.0, 32.0], 0.1).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.min_ratio > 0.0);
        assert_eq!(r.masses.len(), 4);
        assert!(r.masses.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn l1_probe_rejects_bad_input() {
        let a = Anisotropy::pair(2.0, 2.0).unwrap();
        assert!(l1_failure_probe(2, &Anisotropy::pair(3.0, 2.0).unwrap(), &[4.0, 8.0, 16.0], 0.1).is_err());
        assert!(l1_failure_probe(2, &a, &[4.0, 8.0], 0.1).is_err());
        assert!(l1_failure_probe(2, &a, &[4.0, 8.0, 16.0], 0.7).is_err());
    }

    #[test]
    fn sphere_in_cube_matches_full_sphere_inside() {
        assert!((sphere_in_cube(2, 1.0, 2.0) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        // Corner radius: nothing left.
        assert!(sphere_in_cube(2, 2f64.sqrt() * 2.0, 2.0).abs() < 1e-12);
        // Continuity at s = R.
        let inside = sphere_in_cube(3, 1.0, 1.0);
        let just_out = sphere_in_cube(3, 1.0 + 1e-9, 1.0);
        assert!((inside - just_out).abs() < 1e-3);
    }

    #[test]
    fn single_delta_is_inconclusive() {
        let a = Anisotropy::pair(2.0, 2.0).unwrap();
        let e = sharpness_nec1(2, &a, &[0.125], &Nec1Params::default());
        assert!(matches!(e, Err(Error::InconclusiveFit { .. })));
        assert!(sharpness_nec1(2, &a, &[0.125, 0.25, 0.0625], &Nec1Params::default()).is_err());
    }

    #[test]
    fn nec1_slope_on_a_short_sequence() {
        let a = Anisotropy::pair(2.0, 2.0).unwrap();
        let deltas: Vec<f64> = (4..=6).map(|k| 2f64.powi(-k)).collect();
        let fit = sharpness_nec1(2, &a, &deltas, &Nec1Params::default()).unwrap();
        assert!((fit.slope - 3.0).abs() < 0.2, "{fit:?}");
    }

    #[test]
    fn nec2_with_round_exponents() {
        let a = Anisotropy::pair(2.0, 2.0).unwrap();
        let deltas: Vec<f64> = (4..=7).map(|k| 2f64.powi(-k)).collect();
        let fit = sharpness_nec2(2, &a, &deltas, &Nec2Params::default()).unwrap();
        assert!((fit.slope - 2.0).abs() < 0.15, "{fit:?}");
    }
}
