use super::function::FunctionSpec;
use super::grid::{GeometricSeq, Grid, SampledField};
use super::sphere::{ball_volume, sphere_area};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, refine_toward, tidy};

/// Breakpoints on `[0, r_max]` for the radial integral `∫ ρ^{n-1} 𝔄f(x, ρ) dρ`.
fn radial_breaks(f: &FunctionSpec, x: &[f64], radii: &[f64]) -> Vec<f64> {
    let r_max = *radii.last().expect("non-empty radii");
    let mut pts = vec![0.0];
    pts.extend_from_slice(radii);
    let levels = if f.is_singular() { 40 } else { 8 };
    let mut s = radii[0];
    for _ in 0..levels {
        s *= 0.5;
        pts.push(s);
    }
    let mut kinks = Vec::new();
    f.sphere_kinks(x, &mut kinks);
    for k in kinks {
        if k > 0.0 && k < r_max {
            refine_toward(&mut pts, k, if f.is_singular() { 30 } else { 12 });
        }
    }
    tidy(&mut pts);
    pts
}

/// `max_k` of the averages of `f` over `B(x, r_k)`, one cumulative radial sweep.
fn ball_averages_max(f: &FunctionSpec, x: &[f64], radii: &[f64]) -> f64 {
    let n = x.len();
    let rule = gauss_legendre(6);
    let pts = radial_breaks(f, x, radii);
    let mut acc = 0.0;
    let mut best: f64 = 0.0;
    let mut next = 0;
    for w in pts.windows(2) {
        acc += rule.integrate(w[0], w[1], |r| r.powi(n as i32 - 1) * f.sphere_integral(x, r));
        while next < radii.len() && radii[next] <= w[1] {
            let avg = acc / (ball_volume(n) * radii[next].powi(n as i32));
            best = best.max(avg.abs());
            next += 1;
        }
    }
    best
}

/// Average of `f` over the ball `B(x, r)`.
pub fn ball_average(f: &FunctionSpec, x: &[f64], r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    let n = x.len();
    let rule = gauss_legendre(6);
    let pts = radial_breaks(f, x, &[r]);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += rule.integrate(w[0], w[1], |s| s.powi(n as i32 - 1) * f.sphere_integral(x, s));
    }
    Ok(acc / (ball_volume(n) * r.powi(n as i32)))
}

/// Largest ball average of `f` at `x` over the given increasing radii.
pub fn hl_max_at(f: &FunctionSpec, x: &[f64], radii: &[f64]) -> Result<f64> {
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("radii must be positive and increasing".into()));
    }
    Ok(ball_averages_max(f, x, radii))
}

/// Discrete Hardy–Littlewood maximal function: at each grid point, the largest
/// ball average over the radius grid. A lower bound for `Mf`.
pub fn hl_max(f: &FunctionSpec, grid: &Grid, radii: &GeometricSeq) -> Result<SampledField> {
    radii.validate()?;
    grid.validate()?;
    f.validate(grid.dim())?;
    let rs = radii.points();
    SampledField::from_fn(grid, |x| Ok(ball_averages_max(f, x, &rs)))
}

/// Discrete spherical maximal function `max_t |𝔄f(x, t)| / |S^{n-1}|`.
pub fn spherical_max(f: &FunctionSpec, grid: &Grid, radii: &GeometricSeq) -> Result<SampledField> {
    radii.validate()?;
    grid.validate()?;
    f.validate(grid.dim())?;
    let rs = radii.points();
    let area = sphere_area(grid.dim());
    SampledField::from_fn(grid, |x| {
        Ok(rs.iter().fold(0.0f64, |m, &t| m.max((f.sphere_integral(x, t) / area).abs())))
    })
}
