//! Bilinear averages and maximal functions along plane curves in graph form.

use serde::{Deserialize, Serialize};

use crate::bilinear::{
    default_node_cap, default_refine_tol, default_refinements, for_pairs, refined_sup, MaximalMode, Refinement,
};
use crate::error::{Error, Result};
use crate::fields::{FunctionSpec, GeometricSeq, Grid, SampledField};
use crate::quad::{gauss_legendre, refine_toward, tidy};

mod mstar;
mod sharpness;

pub use mstar::{interval_integral, mstar, mstar_exponent, MstarParams, MstarReport};
pub use sharpness::{curve_sharpness, BoundedReport, CurveSharpnessParams, CurveSharpnessReport, GrowthReport};

/// Polynomial with coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    /// The identity `s ↦ s`.
    pub fn identity() -> Self {
        Poly(vec![0.0, 1.0])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    /// `k`-th derivative at `s`.
    pub fn derivative_at(&self, k: usize, s: f64) -> f64 {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.derivative();
        }
        p.eval(s)
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// Points of `[lo, hi]` where the polynomial equals `v`.
    ///
    /// The critical points split the interval into monotone pieces, each of
    /// which holds at most one root, found by bisection. Tangential roots are
    /// critical points and are reported when the value there matches `v`.
    pub fn solve(&self, v: f64, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.degree() == 0 || !(hi > lo) {
            return out;
        }
        let crit = self.derivative().solve(0.0, lo, hi);
        let scale = self.0.iter().fold(v.abs(), |m, c| m.max(c.abs())).max(1.0);
        let mut nodes = vec![lo];
        nodes.extend(crit.iter().copied());
        nodes.push(hi);
        for &c in &crit {
            if (self.eval(c) - v).abs() <= 1e-14 * scale {
                out.push(c);
            }
        }
        for w in nodes.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a) - v, self.eval(b) - v);
            if fa == 0.0 {
                out.push(a);
            }
            if fa * fb >= 0.0 {
                continue;
            }
            let rising = fb > fa;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if (self.eval(mid) - v > 0.0) == rising {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            out.push(0.5 * (a + b));
        }
        if self.eval(hi) == v {
            out.push(hi);
        }
        tidy(&mut out);
        out
    }
}

/// The cutoff `ψ(s) = 15/(16 r) · (1 - ((s - c)/r)²)²` on `|s - c| < r`, with `∫ψ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cutoff {
    pub center: f64,
    pub radius: f64,
}

impl Cutoff {
    pub fn eval(&self, s: f64) -> f64 {
        let u = (s - self.center) / self.radius;
        if u.abs() >= 1.0 {
            0.0
        } else {
            let v = 1.0 - u * u;
            15.0 / (16.0 * self.radius) * v * v
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }
}

/// Support radius `min((1 - s₀)/4, s₀/4, 0.1)`; `0.1` when `s₀ = 0`.
pub fn default_support_radius(s0: f64) -> f64 {
    if s0 == 0.0 {
        0.1
    } else {
        ((1.0 - s0) / 4.0).min(s0 / 4.0).min(0.1)
    }
}

/// A plane curve `s ↦ (γ₁(s), γ₂(s))` with polynomial components and a cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub gamma1: Poly,
    pub gamma2: Poly,
    pub cutoff: Cutoff,
}

impl CurveSpec {
    /// Graph form `γ(s) = (s, γ₂(s))`.
    pub fn graph(gamma2: Poly, cutoff: Cutoff) -> Self {
        CurveSpec { gamma1: Poly::identity(), gamma2, cutoff }
    }

    /// Graph form with `γ₂(s) = c_* - (s - s₀)^m φ(s)`, the cutoff centred at `s₀`.
    pub fn normal_form(c_star: f64, s0: f64, m: u32, phi: Poly, radius: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::Domain("type m must be at least 1".into()));
        }
        if phi.eval(s0) == 0.0 {
            return Err(Error::Domain(format!("φ vanishes at s0 = {s0}")));
        }
        // (s - s0)^m by repeated multiplication.
        let mut power = Poly(vec![1.0]);
        for _ in 0..m {
            power = power.mul(&Poly(vec![-s0, 1.0]));
        }
        let mut g2 = power.mul(&phi);
        g2.0.iter_mut().for_each(|c| *c = -*c);
        g2.0[0] += c_star;
        let curve = Self::graph(g2, Cutoff { center: s0, radius });
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |p: &Poly| !p.0.is_empty() && p.0.iter().all(|c| c.is_finite());
        if !ok(&self.gamma1) || !ok(&self.gamma2) {
            return Err(Error::Domain("curve coefficients must be finite and non-empty".into()));
        }
        if !(self.cutoff.radius > 0.0 && self.cutoff.center.is_finite() && self.cutoff.radius.is_finite()) {
            return Err(Error::Domain(format!("cutoff radius {} must be positive", self.cutoff.radius)));
        }
        Ok(())
    }
}

/// Result of probing the order of contact of `γ₂` at `s₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeReport {
    pub s0: f64,
    pub m: usize,
    /// `|γ₂^{(k)}(s₀)|` for `k = 1..=m`.
    pub derivatives: Vec<f64>,
}

/// Smallest `m ≥ 1` with `|γ₂^{(m)}(s₀)| > tol · max_k |γ₂^{(k)}(s₀)|`, `k ≤ m_max`.
pub fn detect_type(curve: &CurveSpec, s0: f64, tol: f64, m_max: usize) -> Result<TypeReport> {
    curve.validate()?;
    if m_max < 1 {
        return Err(Error::Domain("m_max must be at least 1".into()));
    }
    let derivs: Vec<f64> = (1..=m_max).map(|k| curve.gamma2.derivative_at(k, s0).abs()).collect();
    let scale = derivs.iter().fold(0.0f64, |m, d| m.max(*d));
    if scale == 0.0 {
        return Err(Error::UntypedCurve { s0, m_max });
    }
    let m = derivs.iter().position(|d| *d > tol * scale).expect("scale is attained") + 1;
    Ok(TypeReport { s0, m, derivatives: derivs[..m].to_vec() })
}

/// One-dimensional quadrature controls for curve integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveQuad {
    pub order: usize,
    pub cells: usize,
    pub kink_levels: usize,
}

impl Default for CurveQuad {
    fn default() -> Self {
        CurveQuad { order: 8, cells: 16, kink_levels: 24 }
    }
}

/// The integrand `s ↦ f(x - t₁γ₁(s)) g(x - t₂γ₂(s)) ψ(s)` and its breakpoints.
pub(crate) struct CurveIntegrand<'a> {
    pub f: &'a FunctionSpec,
    pub g: &'a FunctionSpec,
    pub x: f64,
    pub t1: f64,
    pub t2: f64,
    pub curve: &'a CurveSpec,
}

impl CurveIntegrand<'_> {
    pub fn eval(&self, s: f64) -> f64 {
        let w = self.curve.cutoff.eval(s);
        if w == 0.0 {
            return 0.0;
        }
        let fv = self.f.eval(&[self.x - self.t1 * self.curve.gamma1.eval(s)]);
        if fv == 0.0 {
            return 0.0;
        }
        fv * self.g.eval(&[self.x - self.t2 * self.curve.gamma2.eval(s)]) * w
    }

    /// Parameters in `[lo, hi]` where the integrand may fail to be smooth.
    fn kinks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for (func, gamma, t) in [(self.f, &self.curve.gamma1, self.t1), (self.g, &self.curve.gamma2, self.t2)] {
            let mut ks = Vec::new();
            func.kinks_1d(&mut ks);
            for k in ks {
                out.extend(gamma.solve((self.x - k) / t, lo, hi));
            }
            out.extend(gamma.derivative().solve(0.0, lo, hi));
        }
        out
    }

    /// `∫_lo^hi`, with extra dyadic grading toward `lo` when `grade_lo > 0`.
    pub fn integrate(&self, lo: f64, hi: f64, quad: &CurveQuad, grade_lo: usize) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let cells = quad.cells.max(1);
        let mut pts: Vec<f64> = (0..=cells).map(|k| lo + (hi - lo) * k as f64 / cells as f64).collect();
        let mut step = (hi - lo) / cells as f64;
        for _ in 0..grade_lo {
            step *= 0.5;
            pts.push(lo + step);
        }
        let singular = self.f.is_singular() || self.g.is_singular();
        let levels = if singular { 2 * quad.kink_levels } else { quad.kink_levels };
        for k in self.kinks(lo, hi) {
            refine_toward(&mut pts, k, levels);
        }
        tidy(&mut pts);
        let rule = gauss_legendre(quad.order);
        pts.windows(2).map(|w| rule.integrate(w[0], w[1], |s| self.eval(s))).sum()
    }
}

fn check_times(t1: f64, t2: f64) -> Result<()> {
    if !(t1 > 0.0 && t2 > 0.0 && t1.is_finite() && t2.is_finite()) {
        return Err(Error::Domain(format!("dilations must be positive, got ({t1}, {t2})")));
    }
    Ok(())
}

/// `∫ f(x - t₁γ₁(s)) g(x - t₂γ₂(s)) ψ(s) ds` for `f, g` on the line.
pub fn curve_average(
    f: &FunctionSpec,
    g: &FunctionSpec,
    x: f64,
    t1: f64,
    t2: f64,
    curve: &CurveSpec,
    quad: &CurveQuad,
) -> Result<f64> {
    check_times(t1, t2)?;
    f.validate(1)?;
    g.validate(1)?;
    curve.validate()?;
    let (lo, hi) = curve.cutoff.support();
    Ok(CurveIntegrand { f, g, x, t1, t2, curve }.integrate(lo, hi, quad, 0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveMaximalRequest {
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    pub curve: CurveSpec,
    pub grid: Grid,
    pub tgrid: GeometricSeq,
    pub mode: MaximalMode,
    #[serde(default)]
    pub quad: CurveQuad,
    #[serde(default = "default_refinements")]
    pub max_refinements: u32,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    #[serde(default = "default_node_cap")]
    pub node_cap: usize,
}

impl CurveMaximalRequest {
    pub fn new(f: FunctionSpec, g: FunctionSpec, curve: CurveSpec, grid: Grid, tgrid: GeometricSeq, mode: MaximalMode) -> Self {
        CurveMaximalRequest {
            f,
            g,
            curve,
            grid,
            tgrid,
            mode,
            quad: CurveQuad::default(),
            max_refinements: default_refinements(),
            refine_tol: default_refine_tol(),
            node_cap: default_node_cap(),
        }
    }
}

/// Discrete `sup_t |∫ f(x - t₁γ₁) g(x - t₂γ₂) ψ|` on a one-dimensional grid.
pub fn curve_maximal(req: &CurveMaximalRequest) -> Result<SampledField> {
    req.grid.validate()?;
    req.tgrid.validate()?;
    if req.grid.dim() != 1 {
        return Err(Error::Dimension(req.grid.dim()));
    }
    req.f.validate(1)?;
    req.g.validate(1)?;
    req.curve.validate()?;
    let (lo, hi) = req.curve.cutoff.support();
    let refine = Refinement { max_refinements: req.max_refinements, refine_tol: req.refine_tol, node_cap: req.node_cap };
    refined_sup(&req.grid, &req.tgrid, refine, |x, ts, fresh| {
        let mut best: f64 = 0.0;
        for_pairs(ts, req.mode, fresh, |t1, t2| {
            let it = CurveIntegrand { f: &req.f, g: &req.g, x: x[0], t1, t2, curve: &req.curve };
            best = best.max(it.integrate(lo, hi, &req.quad, 0).abs());
            Ok(())
        })?;
        Ok(best)
    })
}
