use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::sphere::{ball_volume, sphere_area};
use super::{check_space_dim, norm};
use crate::error::{Error, Result};
use crate::quad::{composite, gauss_legendre, graded_both, refine_toward, tidy};

pub const DEFAULT_LOG_FLOOR: f64 = 1e-9;

fn default_floor() -> f64 {
    DEFAULT_LOG_FLOOR
}

fn is_default_floor(v: &f64) -> bool {
    *v == DEFAULT_LOG_FLOOR
}

/// A test function on `R^n`, described symbolically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        value: f64,
    },
    /// Indicator of the open ball `|x - center| < radius`.
    BallIndicator {
        center: Vec<f64>,
        radius: f64,
    },
    /// `|x|^{-β} log^{-γ}(1/|x|)` on `|x| < 1/e`, zero outside, held constant on `|x| < floor`.
    LogPower {
        beta: f64,
        gamma: f64,
        #[serde(default = "default_floor", skip_serializing_if = "is_default_floor")]
        floor: f64,
    },
    /// `exp(1 - 1/(1 - |x-c|²/w²))` on `|x - c| < w`.
    SmoothBump {
        center: Vec<f64>,
        width: f64,
    },
    /// Piecewise-linear profile in `|x|` through `(radii[i], values[i])`, constant beyond the last knot.
    RadialProfile {
        radii: Vec<f64>,
        values: Vec<f64>,
    },
    /// `x ↦ inner(factor · x)`.
    Dilated {
        inner: Box<FunctionSpec>,
        factor: f64,
    },
    /// `x ↦ inner(x - shift)`.
    Translated {
        inner: Box<FunctionSpec>,
        shift: Vec<f64>,
    },
}

/// Radial structure of a base catalogue member: centre, profile breaks and
/// whether the profile is singular at the centre.
struct Radial<'a> {
    center: Option<&'a [f64]>,
    breaks: Vec<f64>,
    singular: bool,
}

fn offset(x: &[f64], center: Option<&[f64]>) -> f64 {
    match center {
        None => norm(x),
        Some(c) => x
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let d = v - c.get(i).copied().unwrap_or(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt(),
    }
}

impl FunctionSpec {
    pub fn constant(value: f64) -> Self {
        FunctionSpec::Constant { value }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        FunctionSpec::BallIndicator { center, radius }
    }

    /// Indicator of the open interval `(lo, hi)` on the line.
    pub fn interval(lo: f64, hi: f64) -> Self {
        FunctionSpec::ball(vec![0.5 * (lo + hi)], 0.5 * (hi - lo))
    }

    pub fn log_power(beta: f64, gamma: f64) -> Self {
        FunctionSpec::LogPower { beta, gamma, floor: DEFAULT_LOG_FLOOR }
    }

    pub fn bump(center: Vec<f64>, width: f64) -> Self {
        FunctionSpec::SmoothBump { center, width }
    }

    pub fn dilate(self, factor: f64) -> Self {
        FunctionSpec::Dilated { inner: Box::new(self), factor }
    }

    pub fn translate(self, shift: Vec<f64>) -> Self {
        FunctionSpec::Translated { inner: Box::new(self), shift }
    }

    /// Check parameters against the ambient dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        check_space_dim(n)?;
        let dim_ok = |v: &Vec<f64>, what: &str| {
            if v.len() != n {
                Err(Error::Arity { expected: n, got: v.len() })
            } else if v.iter().any(|c| !c.is_finite()) {
                Err(Error::Domain(format!("{what} has non-finite entries")))
            } else {
                Ok(())
            }
        };
        match self {
            FunctionSpec::Constant { value } if !value.is_finite() => {
                Err(Error::Domain("constant must be finite".into()))
            }
            FunctionSpec::Constant { .. } => Ok(()),
            FunctionSpec::BallIndicator { center, radius } => {
                dim_ok(center, "center")?;
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Domain(format!("radius {radius} must be positive")));
                }
                Ok(())
            }
            FunctionSpec::LogPower { beta, gamma, floor } => {
                if !(*beta >= 0.0 && *gamma >= 0.0 && *floor >= 0.0 && *floor < (-1f64).exp()) {
                    return Err(Error::Domain("log-power needs β, γ ≥ 0 and 0 ≤ floor < 1/e".into()));
                }
                Ok(())
            }
            FunctionSpec::SmoothBump { center, width } => {
                dim_ok(center, "center")?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::Domain(format!("width {width} must be positive")));
                }
                Ok(())
            }
            FunctionSpec::RadialProfile { radii, values } => {
                if radii.is_empty() || radii.len() != values.len() {
                    return Err(Error::Domain("profile needs matching non-empty radii and values".into()));
                }
                if radii[0] < 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Domain("profile radii must be nonnegative and increasing".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Domain("profile values must be finite".into()));
                }
                Ok(())
            }
            FunctionSpec::Dilated { inner, factor } => {
                if !(*factor > 0.0 && factor.is_finite()) {
                    return Err(Error::Domain(format!("dilation factor {factor} must be positive")));
                }
                inner.validate(n)
            }
            FunctionSpec::Translated { inner, shift } => {
                dim_ok(shift, "shift")?;
                inner.validate(n)
            }
        }
    }

    fn radial_value(&self, r: f64) -> f64 {
        match self {
            FunctionSpec::LogPower { beta, gamma, floor } => {
                if r >= (-1f64).exp() {
                    return 0.0;
                }
                let r = r.max(*floor);
                if r == 0.0 {
                    return f64::INFINITY;
                }
                r.powf(-beta) * (-r.ln()).powf(-gamma)
            }
            FunctionSpec::SmoothBump { width, .. } => {
                let q = (r / width).powi(2);
                if q >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - q)).exp()
                }
            }
            FunctionSpec::RadialProfile { radii, values } => {
                if r <= radii[0] {
                    return values[0];
                }
                let k = radii.partition_point(|&q| q <= r);
                if k >= radii.len() {
                    return values[values.len() - 1];
                }
                let (r0, r1) = (radii[k - 1], radii[k]);
                let s = (r - r0) / (r1 - r0);
                values[k - 1] + s * (values[k] - values[k - 1])
            }
            FunctionSpec::BallIndicator { radius, .. } => f64::from(r < *radius),
            FunctionSpec::Constant { value } => *value,
            _ => unreachable!("radial_value on a wrapper"),
        }
    }

    fn radial(&self) -> Option<Radial<'_>> {
        match self {
            FunctionSpec::BallIndicator { center, radius } => Some(Radial {
                center: Some(center),
                breaks: vec![*radius],
                singular: false,
            }),
            FunctionSpec::LogPower { floor, .. } => {
                let mut breaks = vec![(-1f64).exp()];
                if *floor > 0.0 {
                    breaks.push(*floor);
                }
                Some(Radial { center: None, breaks, singular: *floor == 0.0 })
            }
            FunctionSpec::SmoothBump { center, width } => Some(Radial {
                center: Some(center),
                breaks: vec![*width],
                singular: false,
            }),
            FunctionSpec::RadialProfile { radii, .. } => Some(Radial {
                center: None,
                breaks: radii.iter().copied().filter(|r| *r > 0.0).collect(),
                singular: false,
            }),
            _ => None,
        }
    }

    /// Pointwise value.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            FunctionSpec::Constant { value } => *value,
            FunctionSpec::Dilated { inner, factor } => {
                let y: Vec<f64> = x.iter().map(|v| v * factor).collect();
                inner.eval(&y)
            }
            FunctionSpec::Translated { inner, shift } => {
                let y: Vec<f64> = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v - shift.get(i).copied().unwrap_or(0.0))
                    .collect();
                inner.eval(&y)
            }
            _ => {
                let rad = self.radial().expect("base member");
                self.radial_value(offset(x, rad.center))
            }
        }
    }

    /// Unnormalized sphere integral `∫_{S^{n-1}} f(x - tθ) dθ`, with `n = x.len()`.
    ///
    /// Exact for constants and ball indicators; otherwise a graded Gauss rule in
    /// the polar angle (or `cos θ` for `n = 3`) split where the sphere crosses the
    /// profile's breaks.
    pub fn sphere_integral(&self, x: &[f64], t: f64) -> f64 {
        let n = x.len();
        if n == 1 {
            return self.eval(&[x[0] - t]) + self.eval(&[x[0] + t]);
        }
        match self {
            FunctionSpec::Constant { value } => value * sphere_area(n),
            FunctionSpec::Dilated { inner, factor } => {
                let y: Vec<f64> = x.iter().map(|v| v * factor).collect();
                inner.sphere_integral(&y, t * factor)
            }
            FunctionSpec::Translated { inner, shift } => {
                let y: Vec<f64> = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v - shift.get(i).copied().unwrap_or(0.0))
                    .collect();
                inner.sphere_integral(&y, t)
            }
            FunctionSpec::BallIndicator { center, radius } => {
                let d = offset(x, Some(center));
                sphere_area(n) * ball_sphere_fraction(n, d, t, *radius)
            }
            _ => {
                let rad = self.radial().expect("base member");
                let d = offset(x, rad.center);
                self.radial_sphere_integral(n, d, t, &rad)
            }
        }
    }

    fn radial_sphere_integral(&self, n: usize, d: f64, t: f64, rad: &Radial<'_>) -> f64 {
        if d * t <= 1e-300 || t <= 1e-15 * d || d <= 1e-15 * t {
            return sphere_area(n) * self.radial_value(d.max(t));
        }
        // |x - c - tθ|² = d² + t² - 2dt·u, with u = cos(angle).
        let dist = |u: f64| (d * d + t * t - 2.0 * d * t * u).max(0.0).sqrt();
        let rule = gauss_legendre(8);
        let (lo, hi, to_var): (f64, f64, fn(f64) -> f64) = if n == 2 {
            (0.0, PI, |u: f64| u.clamp(-1.0, 1.0).acos())
        } else {
            (-1.0, 1.0, |u: f64| u)
        };
        let mut pts = graded_both(lo, hi, 6);
        let mut crossings: Vec<(f64, usize)> = rad
            .breaks
            .iter()
            .map(|&b| ((d * d + t * t - b * b) / (2.0 * d * t), 14))
            .collect();
        if rad.singular {
            crossings.push((1.0, 40));
        }
        for (u, levels) in crossings {
            if !(u > -1.0 - 1e-12 && u < 1.0 + 1e-12) {
                continue;
            }
            let v = to_var(u);
            if v <= lo || v >= hi {
                // Break sits at an end of the range: grade toward it.
                let mut extra = graded_both(lo, hi, levels);
                let keep_low = (v - lo).abs() < (v - hi).abs();
                let mid = 0.5 * (lo + hi);
                extra.retain(|p| if keep_low { *p <= mid } else { *p >= mid });
                pts.extend(extra);
            } else {
                refine_toward(&mut pts, v, levels);
            }
        }
        tidy(&mut pts);
        if n == 2 {
            2.0 * composite(&pts, &rule, |a| self.radial_value(dist(a.cos())))
        } else {
            2.0 * PI * composite(&pts, &rule, |u| self.radial_value(dist(u)))
        }
    }

    /// Radii `t` at which `t ↦ sphere_integral(x, t)` fails to be smooth,
    /// plus the support edges of bumps.
    pub fn sphere_kinks(&self, x: &[f64], out: &mut Vec<f64>) {
        match self {
            // Bump means are smooth too, but the support edges are reported
            // so quadrature resolves the flat tails there.
            FunctionSpec::Constant { .. } => {}
            FunctionSpec::Dilated { inner, factor } => {
                let y: Vec<f64> = x.iter().map(|v| v * factor).collect();
                let start = out.len();
                inner.sphere_kinks(&y, out);
                out[start..].iter_mut().for_each(|t| *t /= factor);
            }
            FunctionSpec::Translated { inner, shift } => {
                let y: Vec<f64> = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v - shift.get(i).copied().unwrap_or(0.0))
                    .collect();
                inner.sphere_kinks(&y, out);
            }
            _ => {
                let rad = self.radial().expect("base member");
                let d = offset(x, rad.center);
                let mut breaks = rad.breaks.clone();
                if rad.singular {
                    breaks.push(0.0);
                }
                for b in breaks {
                    out.push((d - b).abs());
                    out.push(d + b);
                }
            }
        }
    }

    /// Points of the line where a one-dimensional `f` fails to be smooth.
    pub fn kinks_1d(&self, out: &mut Vec<f64>) {
        match self {
            FunctionSpec::Constant { .. } | FunctionSpec::SmoothBump { .. } => {}
            FunctionSpec::Dilated { inner, factor } => {
                let start = out.len();
                inner.kinks_1d(out);
                out[start..].iter_mut().for_each(|p| *p /= factor);
            }
            FunctionSpec::Translated { inner, shift } => {
                let start = out.len();
                inner.kinks_1d(out);
                let s = shift.first().copied().unwrap_or(0.0);
                out[start..].iter_mut().for_each(|p| *p += s);
            }
            _ => {
                let rad = self.radial().expect("base member");
                let c = rad.center.and_then(|c| c.first().copied()).unwrap_or(0.0);
                if rad.singular {
                    out.push(c);
                }
                for b in rad.breaks {
                    out.push(c - b);
                    out.push(c + b);
                }
            }
        }
    }

    /// True when the function is invariant under rotations about the origin.
    pub fn is_radial(&self) -> bool {
        let centred = |c: &Vec<f64>| c.iter().all(|v| *v == 0.0);
        match self {
            FunctionSpec::Constant { .. } | FunctionSpec::LogPower { .. } | FunctionSpec::RadialProfile { .. } => true,
            FunctionSpec::BallIndicator { center, .. } | FunctionSpec::SmoothBump { center, .. } => centred(center),
            FunctionSpec::Dilated { inner, .. } => inner.is_radial(),
            FunctionSpec::Translated { inner, shift } => centred(shift) && inner.is_radial(),
        }
    }

    /// True when the function has an integrable singularity (unbounded values).
    pub fn is_singular(&self) -> bool {
        match self {
            FunctionSpec::Dilated { inner, .. } | FunctionSpec::Translated { inner, .. } => {
                inner.is_singular()
            }
            FunctionSpec::LogPower { floor, beta, gamma } => *floor == 0.0 && (*beta > 0.0 || *gamma > 0.0),
            _ => false,
        }
    }
}

/// Fraction of `S^{n-1}(x, t)` lying in `B(c, R)` with `d = |x - c|`.
pub(crate) fn ball_sphere_fraction(n: usize, d: f64, t: f64, r: f64) -> f64 {
    if d + t < r {
        return 1.0;
    }
    if (d - t).abs() >= r {
        return 0.0;
    }
    let kappa = ((d * d + t * t - r * r) / (2.0 * d * t)).clamp(-1.0, 1.0);
    match n {
        2 => kappa.acos() / PI,
        3 => 0.5 * (1.0 - kappa),
        _ => unreachable!(),
    }
}

/// `‖f‖_{L^p(R^n)}` computed from the symbolic description.
pub fn lp_norm_of_spec(f: &FunctionSpec, p: f64, n: usize) -> Result<f64> {
    check_space_dim(n)?;
    if !(p > 0.0) {
        return Err(Error::Domain(format!("exponent p = {p} must be positive")));
    }
    match f {
        FunctionSpec::Dilated { inner, factor } => {
            let base = lp_norm_of_spec(inner, p, n)?;
            Ok(if p.is_infinite() { base } else { base * factor.powf(-(n as f64) / p) })
        }
        FunctionSpec::Translated { inner, .. } => lp_norm_of_spec(inner, p, n),
        FunctionSpec::Constant { value } => Ok(if *value == 0.0 {
            0.0
        } else if p.is_infinite() {
            value.abs()
        } else {
            f64::INFINITY
        }),
        FunctionSpec::BallIndicator { radius, .. } => Ok(if p.is_infinite() {
            1.0
        } else {
            (ball_volume(n) * radius.powi(n as i32)).powf(1.0 / p)
        }),
        FunctionSpec::SmoothBump { width, .. } => {
            if p.is_infinite() {
                return Ok(1.0);
            }
            let rule = gauss_legendre(12);
            let pts = graded_both(0.0, *width, 12);
            let m = composite(&pts, &rule, |r| f.radial_value(r).powf(p) * r.powi(n as i32 - 1));
            Ok((sphere_area(n) * m).powf(1.0 / p))
        }
        FunctionSpec::RadialProfile { radii, values } => {
            if p.is_infinite() {
                return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
            }
            if values[values.len() - 1] != 0.0 {
                return Ok(f64::INFINITY);
            }
            let rule = gauss_legendre(12);
            let mut pts = vec![0.0];
            pts.extend(radii.iter().copied());
            tidy(&mut pts);
            let m = composite(&pts, &rule, |r| f.radial_value(r).abs().powf(p) * r.powi(n as i32 - 1));
            Ok((sphere_area(n) * m).powf(1.0 / p))
        }
        FunctionSpec::LogPower { beta, gamma, floor } => log_power_norm(*beta, *gamma, *floor, p, n),
    }
}

/// Radial integral of `|x|^{-βp} log^{-γp}(1/|x|)` over `floor < |x| < 1/e`,
/// plus the capped core, via `|x| = e^{-s}`.
fn log_power_norm(beta: f64, gamma: f64, floor: f64, p: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    if p.is_infinite() {
        return Ok(if floor > 0.0 {
            floor.powf(-beta) * (-floor.ln()).powf(-gamma)
        } else if beta > 0.0 || gamma > 0.0 {
            f64::INFINITY
        } else {
            1.0
        });
    }
    let c = nf - beta * p;
    let g = gamma * p;
    let rule = gauss_legendre(12);
    // ∫ e^{-c s} s^{-g} ds over s ∈ [1, s_max].
    let tail = if floor > 0.0 {
        let s_max = -floor.ln();
        let mut pts = vec![1.0];
        let mut s = 1.0;
        while s < s_max {
            s = (s * 1.25 + 0.25).min(s_max);
            pts.push(s);
        }
        let body = composite(&pts, &rule, |s| (-c * s).exp() * s.powf(-g));
        let core = floor.powf(-beta * p) * (-floor.ln()).powf(-g) * floor.powf(nf) / nf;
        body + core
    } else {
        if c < 0.0 || (c == 0.0 && g <= 1.0) {
            return Ok(f64::INFINITY);
        }
        // u = 1/s: ∫_0^1 u^{g-2} e^{-c/u} du.
        let pts = graded_both(0.0, 1.0, 60);
        composite(&pts, &rule, |u| {
            if u <= 0.0 {
                0.0
            } else {
                u.powf(g - 2.0) * (-c / u).exp()
            }
        })
    };
    Ok((sphere_area(n) * tail).powf(1.0 / p))
}
