//! Minimal hand-written SVG: exponent regions, scaling fits and sampled fields.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::SampledField;
use crate::fit::ScalingFit;
use crate::regions::{
    bilinear_polygon, classify_case, curve_polygon, trilinear_slice_polygon, vertices, Anisotropy, CurveCase,
};

const W: f64 = 480.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Affine map from a data box onto the plotting area.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }

    fn axes(&self, s: &mut String, xlabel: &str, ylabel: &str, ticks: usize) {
        let (l, r, b, t) = (self.px(self.x0), self.px(self.x1), self.py(self.y0), self.py(self.y1));
        let _ = writeln!(s, r#"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, r - l, b - t);
        for i in 0..=ticks {
            let fx = self.x0 + (self.x1 - self.x0) * i as f64 / ticks as f64;
            let fy = self.y0 + (self.y1 - self.y0) * i as f64 / ticks as f64;
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, self.px(fx), b + 16.0, tick(fx));
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, l - 6.0, self.py(fy) + 4.0, tick(fy));
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (l + r) / 2.0, H - 16.0, escape(xlabel));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            (t + b) / 2.0,
            (t + b) / 2.0,
            escape(ylabel)
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn polygon(s: &mut String, frame: &Frame, pts: &[(f64, f64)], fill: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", frame.px(*x), frame.py(*y))).collect();
    let _ = writeln!(s, r#"<polygon points="{}" fill="{fill}" stroke="black"/>"#, coords.join(" "));
}

/// Which exponent region to draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "lowercase", deny_unknown_fields)]
pub enum RegionPlot {
    /// The bilinear region in the `(1/p, 1/q)` square.
    Bilinear { n: usize, a: Vec<f64> },
    /// The slice `1/p_3 = x3` of the trilinear region, in the `(1/p_1, 1/p_2)` square.
    Trilinear { n: usize, a: Vec<f64>, x3: f64 },
    /// The region of a curve theorem for type `m`.
    Curve { case: CurveCase, m: u32 },
}

/// Shaded region in the unit square with its labelled corners.
pub fn plot_region(region: &RegionPlot) -> Result<String> {
    let frame = Frame { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
    let (title, xlabel, ylabel, poly, labels) = match region {
        RegionPlot::Bilinear { n, a } => {
            let an = Anisotropy::new(a.clone())?;
            if an.len() != 2 {
                return Err(Error::Arity { expected: 2, got: an.len() });
            }
            let case = classify_case(*n, &an)?;
            let labels: Vec<(String, (f64, f64))> =
                vertices(*n, &an)?.vertices.iter().map(|v| (v.label.to_string(), v.to_f64())).collect();
            (
                format!("bilinear region, n = {n}, a = ({}, {}), case {:?}", a[0], a[1], case.case),
                "1/p",
                "1/q",
                bilinear_polygon(*n, &an)?,
                labels,
            )
        }
        RegionPlot::Trilinear { n, a, x3 } => {
            let an = Anisotropy::new(a.clone())?;
            if an.len() != 3 {
                return Err(Error::Arity { expected: 3, got: an.len() });
            }
            (
                format!("trilinear slice 1/p3 = {x3}, n = {n}, a = ({}, {}, {})", a[0], a[1], a[2]),
                "1/p1",
                "1/p2",
                trilinear_slice_polygon(*n, &an, *x3)?,
                Vec::new(),
            )
        }
        RegionPlot::Curve { case, m } => {
            (format!("curve case {case:?}, m = {m}"), "1/p", "1/q", curve_polygon(*case, *m), Vec::new())
        }
    };
    let mut s = header(&title);
    frame.axes(&mut s, xlabel, ylabel, 4);
    if !poly.is_empty() {
        polygon(&mut s, &frame, &poly, "#bbbbbb");
    }
    for (label, (x, y)) in &labels {
        let (cx, cy) = (frame.px(*x), frame.py(*y));
        let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="black"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, cx + 5.0, cy - 5.0, escape(label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        return (lo - 0.5, hi + 0.5);
    }
    let m = 0.05 * (hi - lo);
    (lo - m, hi + m)
}

/// Data points of a fit with the fitted and predicted lines. With `log_axes`
/// the plot is in `(ln x, ln y)`, matching a log–log fit.
pub fn plot_fit(fit: &ScalingFit, title: &str, xlabel: &str, ylabel: &str, log_axes: bool) -> String {
    let map = |(x, y): (f64, f64)| if log_axes { (x.ln(), y.ln()) } else { (x, y) };
    let pts: Vec<(f64, f64)> = fit.points.iter().copied().map(map).filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let line = |slope: f64, icpt: f64| [(x0, icpt + slope * x0), (x1, icpt + slope * x1)];
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / pts.len().max(1) as f64;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / pts.len().max(1) as f64;
    let fitted = line(fit.slope, fit.intercept);
    let predicted = line(fit.predicted_slope, mean_y - fit.predicted_slope * mean_x);
    let (y0, y1) = bounds(pts.iter().map(|p| p.1).chain(fitted.iter().map(|p| p.1)));
    let frame = Frame { x0, x1, y0, y1 };
    let head = format!(
        "{title}: slope {:.4} (predicted {:.4} ± {}) {}",
        fit.slope,
        fit.predicted_slope,
        fit.tolerance,
        if fit.pass { "PASS" } else { "FAIL" }
    );
    let mut s = header(&head);
    let (xl, yl) = if log_axes { (format!("ln {xlabel}"), format!("ln {ylabel}")) } else { (xlabel.to_string(), ylabel.to_string()) };
    frame.axes(&mut s, &xl, &yl, 4);
    let clip = |v: f64| v.clamp(y0, y1);
    for (seg, colour, dash) in [(fitted, "#1f4e9e", ""), (predicted, "#b03030", r#" stroke-dasharray="6 4""#)] {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}"{dash}/>"#,
            frame.px(seg[0].0),
            frame.py(clip(seg[0].1)),
            frame.px(seg[1].0),
            frame.py(clip(seg[1].1))
        );
    }
    for (x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="black"/>"#, frame.px(*x), frame.py(*y));
    }
    s.push_str("</svg>\n");
    s
}

/// Line plot of a one-dimensional field, grey-scale map of a two-dimensional
/// one. Fields over three dimensions have no plot.
pub fn plot_field(field: &SampledField, title: &str) -> Option<String> {
    match field.grid.dim() {
        1 => {
            let pts: Vec<(f64, f64)> = (0..field.values.len()).map(|i| (field.grid.point(i)[0], field.values[i])).collect();
            let (x0, x1) = bounds(pts.iter().map(|p| p.0));
            let (y0, y1) = bounds(pts.iter().map(|p| p.1));
            let frame = Frame { x0, x1, y0, y1 };
            let mut s = header(title);
            frame.axes(&mut s, "x", "value", 4);
            let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", frame.px(*x), frame.py(*y))).collect();
            let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f4e9e"/>"##, coords.join(" "));
            s.push_str("</svg>\n");
            Some(s)
        }
        2 => {
            let ax = &field.grid.axes;
            let (nx, ny) = (ax[0].count, ax[1].count);
            let (hx, hy) = (ax[0].spacing(), ax[1].spacing());
            let frame = Frame { x0: ax[0].lo - hx / 2.0, x1: ax[0].hi + hx / 2.0, y0: ax[1].lo - hy / 2.0, y1: ax[1].hi + hy / 2.0 };
            let (lo, hi) = field.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
            let span = if hi > lo { hi - lo } else { 1.0 };
            let mut s = header(&format!("{title} (min {lo:.4e}, max {hi:.4e})"));
            frame.axes(&mut s, "x", "y", 4);
            let (cw, ch) = (frame.px(hx) - frame.px(0.0), frame.py(0.0) - frame.py(hy));
            for i in 0..field.values.len() {
                let p = field.grid.point(i);
                let shade = (255.0 * (1.0 - (field.values[i] - lo) / span)).round() as u8;
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},{shade})"/>"#,
                    frame.px(p[0] - hx / 2.0),
                    frame.py(p[1] + hy / 2.0),
                    cw,
                    ch
                );
            }
            debug_assert_eq!(nx * ny, field.values.len());
            s.push_str("</svg>\n");
            Some(s)
        }
        _ => None,
    }
}
