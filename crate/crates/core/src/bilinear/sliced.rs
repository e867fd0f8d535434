use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::AverageRequest;
use crate::error::{Error, Result};
use crate::fields::FunctionSpec;
use crate::quad::{gauss_legendre, refine_toward, tidy};
use crate::regions::Anisotropy;

/// Radial quadrature controls shared by both slicing paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureOpts {
    /// Gauss–Legendre nodes per cell.
    pub order: usize,
    /// Uniform cells on each half of the radial range before refinement.
    pub base_cells: usize,
    /// Geometric grading levels toward the singular ends.
    pub grading_levels: usize,
    /// Geometric refinement levels around each kink.
    pub kink_levels: usize,
    /// Relative tolerance for the a-posteriori check; `None` skips it.
    pub tolerance: Option<f64>,
}

impl Default for QuadratureOpts {
    fn default() -> Self {
        QuadratureOpts { order: 8, base_cells: 8, grading_levels: 30, kink_levels: 16, tolerance: None }
    }
}

impl QuadratureOpts {
    pub fn checked(tolerance: f64) -> Self {
        QuadratureOpts { tolerance: Some(tolerance), ..Self::default() }
    }

    fn boosted(&self) -> Self {
        QuadratureOpts {
            order: self.order + 4,
            base_cells: self.base_cells * 2,
            grading_levels: self.grading_levels + self.grading_levels / 2,
            kink_levels: self.kink_levels + self.kink_levels / 2,
            tolerance: self.tolerance,
        }
    }
}

/// The sliced variable: `f`, its dilation and the exponent on its block.
#[derive(Clone, Copy)]
struct Slot<'a> {
    func: &'a FunctionSpec,
    t: f64,
    a: f64,
}

/// Split between the two radial charts, in `σ = 1 - ρ`.
const SPLIT: f64 = 0.5;

/// `σ = 1 - (1 - w)^{1/a}`, accurate for small `w`.
fn sigma_of_w(w: f64, a: f64) -> f64 {
    if w >= 1.0 {
        1.0
    } else {
        -((-w).ln_1p() / a).exp_m1()
    }
}

/// `∫ ρ^{n-1} 𝔄outer(x, t_o ρ) W ω^{n-1} 𝔄inner(x, t_i ω(ρ)) dρ` over `σ = 1 - ρ ∈ [σ_lo, σ_hi]`.
///
/// On `σ ≥ 1/2` the variable is `ρ` itself; on `σ < 1/2` it is `u` with
/// `σ = u^{a_i}`, which turns the endpoint behaviour `ω^{n - a_i}` into the
/// polynomial factor `u^{n-1}`.
struct Sliced<'a> {
    outer: Slot<'a>,
    inner: Slot<'a>,
    x: &'a [f64],
    n: usize,
}

impl Sliced<'_> {
    fn integrand(&self, rho: f64, sigma: f64) -> f64 {
        let (o, i) = (self.outer, self.inner);
        let so = o.func.sphere_integral(self.x, o.t * rho);
        if so == 0.0 {
            return 0.0;
        }
        let w = -(o.a * (-sigma).ln_1p()).exp_m1();
        let omega = w.powf(1.0 / i.a);
        if omega <= 0.0 {
            return 0.0;
        }
        let si = i.func.sphere_integral(self.x, i.t * omega);
        if si == 0.0 {
            return 0.0;
        }
        let nf = self.n as f64;
        let grad = (o.a * o.a * rho.powf(2.0 * (o.a - 1.0)) + i.a * i.a * omega.powf(2.0 * (i.a - 1.0))).sqrt();
        rho.powi(self.n as i32 - 1) * so * grad * omega.powf(nf - i.a) / i.a * si
    }

    fn kinks_sigma(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut ts = Vec::new();
        self.outer.func.sphere_kinks(self.x, &mut ts);
        for t in ts.drain(..) {
            let rho = t / self.outer.t;
            if rho > 0.0 && rho < 1.0 {
                out.push(1.0 - rho);
            }
        }
        self.inner.func.sphere_kinks(self.x, &mut ts);
        for t in ts {
            let om = t / self.inner.t;
            if om > 0.0 && om < 1.0 {
                out.push(sigma_of_w(om.powf(self.inner.a), self.outer.a));
            }
        }
        out
    }

    fn integrate(&self, sig_lo: f64, sig_hi: f64, opts: &QuadratureOpts) -> f64 {
        let rule = gauss_legendre(opts.order);
        let kinks = self.kinks_sigma();
        let mut total = 0.0;

        // Lower chart: ρ ∈ [1 - σ_hi, 1 - max(σ_lo, 1/2)].
        let lo_sig = sig_lo.max(SPLIT);
        if sig_hi > lo_sig {
            let (r0, r1) = (1.0 - sig_hi, 1.0 - lo_sig);
            let mut pts = base_mesh(r0, r1, opts.base_cells);
            if r0 == 0.0 {
                grade_toward_start(&mut pts, r1, opts.grading_levels);
            }
            for &s in &kinks {
                let r = 1.0 - s;
                if r > r0 && r < r1 {
                    refine_toward(&mut pts, r, opts.kink_levels);
                }
            }
            tidy(&mut pts);
            for w in pts.windows(2) {
                for (r, wt) in rule.mapped(w[0], w[1]) {
                    total += wt * self.integrand(r, 1.0 - r);
                }
            }
        }

        // Upper chart: σ = u^{a_i}, u ∈ [σ_lo^{1/a_i}, min(σ_hi, 1/2)^{1/a_i}].
        let hi_sig = sig_hi.min(SPLIT);
        if hi_sig > sig_lo {
            let ai = self.inner.a;
            let (u0, u1) = (sig_lo.powf(1.0 / ai), hi_sig.powf(1.0 / ai));
            let mut pts = base_mesh(u0, u1, opts.base_cells);
            if u0 == 0.0 {
                grade_toward_start(&mut pts, u1, opts.grading_levels);
            }
            for &s in &kinks {
                let u = s.powf(1.0 / ai);
                if u > u0 && u < u1 {
                    refine_toward(&mut pts, u, opts.kink_levels);
                }
            }
            tidy(&mut pts);
            for w in pts.windows(2) {
                for (u, wt) in rule.mapped(w[0], w[1]) {
                    let sigma = u.powf(ai);
                    if sigma <= 0.0 {
                        continue;
                    }
                    let jac = ai * u.powf(ai - 1.0);
                    total += wt * jac * self.integrand(1.0 - sigma, sigma);
                }
            }
        }
        total
    }

    /// Integrate, and with a tolerance set, confirm the value against a richer rule.
    fn evaluate(&self, sig_lo: f64, sig_hi: f64, opts: &QuadratureOpts) -> Result<f64> {
        let v = self.integrate(sig_lo, sig_hi, opts);
        let Some(tol) = opts.tolerance else {
            return Ok(v);
        };
        let mut cur = opts.clone();
        let mut prev = v;
        let mut est = f64::INFINITY;
        for _ in 0..2 {
            cur = cur.boosted();
            let next = self.integrate(sig_lo, sig_hi, &cur);
            let scale = next.abs().max(f64::MIN_POSITIVE);
            est = (next - prev).abs() / scale;
            if est <= tol || next == prev {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Accuracy { estimate: est, tolerance: tol })
    }
}

fn base_mesh(a: f64, b: f64, cells: usize) -> Vec<f64> {
    let cells = cells.max(1);
    (0..=cells).map(|k| a + (b - a) * k as f64 / cells as f64).collect()
}

/// Add `b · 2^{-j}` for `j = 1..=levels` (the range starts at 0).
fn grade_toward_start(pts: &mut Vec<f64>, b: f64, levels: usize) {
    let first = pts.iter().copied().filter(|p| *p > 0.0).fold(b, f64::min);
    let mut s = first;
    for _ in 0..levels {
        s *= 0.5;
        pts.push(s);
    }
}

fn pair(a: &Anisotropy) -> Result<(f64, f64)> {
    if a.len() != 2 {
        return Err(Error::Arity { expected: 2, got: a.len() });
    }
    Ok((a.get(0), a.get(1)))
}

fn g_sliced<'a>(req: &'a AverageRequest, n: usize, a1: f64, a2: f64) -> Sliced<'a> {
    Sliced {
        outer: Slot { func: &req.f, t: req.t1, a: a1 },
        inner: Slot { func: &req.g, t: req.t2, a: a2 },
        x: &req.x,
        n,
    }
}

fn f_sliced<'a>(req: &'a AverageRequest, n: usize, a1: f64, a2: f64) -> Sliced<'a> {
    Sliced {
        outer: Slot { func: &req.g, t: req.t2, a: a2 },
        inner: Slot { func: &req.f, t: req.t1, a: a1 },
        x: &req.x,
        n,
    }
}

fn finish(value: f64, req: &AverageRequest, n: usize, a: &Anisotropy) -> Result<f64> {
    if req.normalized {
        Ok(value / surface_mass(n, a, &req.quad)?)
    } else {
        Ok(value)
    }
}

/// Average computed with the outer integral over the `y`-ball (`f` sliced radially, `g` by sphere means).
pub fn average_gsliced(a: &Anisotropy, req: &AverageRequest) -> Result<f64> {
    let n = req.validate()?;
    let (a1, a2) = pair(a)?;
    let v = g_sliced(req, n, a1, a2).evaluate(0.0, 1.0, &req.quad)?;
    finish(v, req, n, a)
}

/// Average computed with the outer integral over the `z`-ball.
pub fn average_fsliced(a: &Anisotropy, req: &AverageRequest) -> Result<f64> {
    let n = req.validate()?;
    let (a1, a2) = pair(a)?;
    let v = f_sliced(req, n, a1, a2).evaluate(0.0, 1.0, &req.quad)?;
    finish(v, req, n, a)
}

/// The bilinear average; the g-sliced path is the default evaluator.
pub fn average(a: &Anisotropy, req: &AverageRequest) -> Result<f64> {
    average_gsliced(a, req)
}

/// Piece of the g-sliced average with `2^{-k} ≤ 1 - |y|^{a_1} ≤ 2^{1-k}`.
pub fn average_dyadic_piece(a: &Anisotropy, req: &AverageRequest, k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::precondition("dyadic index k must be at least 1"));
    }
    let n = req.validate()?;
    let (a1, a2) = pair(a)?;
    let w_lo = 0.5f64.powi(k as i32);
    let w_hi = 2.0 * w_lo;
    let (s_lo, s_hi) = (sigma_of_w(w_lo, a1), sigma_of_w(w_hi, a1));
    if !(s_hi > s_lo) || s_lo <= 0.0 {
        return Ok(0.0);
    }
    let v = g_sliced(req, n, a1, a2).evaluate(s_lo, s_hi, &req.quad)?;
    finish(v, req, n, a)
}

type MassKey = (usize, u64, u64, usize, usize, usize, usize);

/// Total surface measure of `S^a` in `R^{2n}`, cached per geometry and quadrature.
pub fn surface_mass(n: usize, a: &Anisotropy, opts: &QuadratureOpts) -> Result<f64> {
    super::check_dim(n)?;
    let (a1, a2) = pair(a)?;
    static CACHE: OnceLock<Mutex<HashMap<MassKey, f64>>> = OnceLock::new();
    let key = (n, a1.to_bits(), a2.to_bits(), opts.order, opts.base_cells, opts.grading_levels, opts.kink_levels);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("mass cache poisoned").get(&key) {
        return Ok(*v);
    }
    let one = FunctionSpec::constant(1.0);
    let mut req = AverageRequest::new(one.clone(), one, vec![0.0; n], 1.0, 1.0).unnormalized();
    req.quad = opts.clone();
    let v = g_sliced(&req, n, a1, a2).evaluate(0.0, 1.0, opts)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Degenerate(format!("surface mass {v} is not positive")));
    }
    cache.lock().expect("mass cache poisoned").insert(key, v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn aniso(a1: f64, a2: f64) -> Anisotropy {
        Anisotropy::pair(a1, a2).unwrap()
    }

    fn ones(n: usize) -> AverageRequest {
        let one = FunctionSpec::constant(1.0);
        AverageRequest::new(one.clone(), one, vec![0.3; n], 0.7, 1.9)
    }

    #[test]
    fn unit_sphere_in_four_dimensions() {
        let m = surface_mass(2, &aniso(2.0, 2.0), &QuadratureOpts::default()).unwrap();
        assert!((m - 2.0 * PI * PI).abs() < 1e-10, "{m}");
    }

    #[test]
    fn unit_sphere_in_six_dimensions() {
        // |S^5| = π³.
        let m = surface_mass(3, &aniso(2.0, 2.0), &QuadratureOpts::default()).unwrap();
        assert!((m - PI.powi(3)).abs() < 1e-10, "{m}");
    }

    #[test]
    fn normalized_constants_average_to_one() {
        for (a1, a2) in [(2.0, 2.0), (2.0, 3.0), (1.0, 2.0), (3.0, 3.0), (1.0, 7.0), (5.5, 1.5)] {
            for n in [2, 3] {
                let a = aniso(a1, a2);
                let g = average_gsliced(&a, &ones(n)).unwrap();
                let f = average_fsliced(&a, &ones(n)).unwrap();
                assert!((g - 1.0).abs() < 1e-9, "g a=({a1},{a2}) n={n}: {g}");
                assert!((f - 1.0).abs() < 1e-9, "f a=({a1},{a2}) n={n}: {f}");
            }
        }
    }

    #[test]
    fn mass_from_both_paths_agrees() {
        for (a1, a2) in [(2.0, 3.0), (1.0, 2.0), (4.0, 1.5)] {
            let a = aniso(a1, a2);
            let req = ones(2).unnormalized();
            let g = average_gsliced(&a, &req).unwrap();
            let f = average_fsliced(&a, &req).unwrap();
            assert!((g - f).abs() <= 1e-8 * g, "a=({a1},{a2}) {g} {f}");
        }
    }

    #[test]
    fn mass_is_stable_under_refinement() {
        let a = aniso(2.0, 5.0);
        let base = surface_mass(2, &a, &QuadratureOpts::default()).unwrap();
        let fine = surface_mass(2, &a, &QuadratureOpts::default().boosted()).unwrap();
        assert!((base - fine).abs() < 1e-8 * fine);
    }

    #[test]
    fn swapped_fsliced_is_bitwise_gsliced() {
        let req = AverageRequest::new(
            FunctionSpec::bump(vec![0.1, 0.2], 0.8),
            FunctionSpec::ball(vec![-0.3, 0.0], 0.6),
            vec![0.2, 0.1],
            0.9,
            1.3,
        )
        .unnormalized();
        let a = aniso(2.0, 3.0);
        let lhs = average_fsliced(&a, &req).unwrap();
        let rhs = average_gsliced(&a.swapped(), &req.swapped()).unwrap();
        assert_eq!(lhs.to_bits(), rhs.to_bits());
    }

    #[test]
    fn dyadic_pieces_sum_to_whole() {
        let req = AverageRequest::new(
            FunctionSpec::bump(vec![0.1, 0.2], 0.9),
            FunctionSpec::bump(vec![-0.2, 0.0], 0.7),
            vec![0.2, 0.1],
            0.6,
            0.8,
        );
        let a = aniso(2.0, 3.0);
        let whole = average(&a, &req).unwrap();
        let pieces: f64 = (1..=40).map(|k| average_dyadic_piece(&a, &req, k).unwrap()).sum();
        assert!((pieces - whole).abs() <= 1e-6 * whole, "{pieces} vs {whole}");
        assert!(average_dyadic_piece(&a, &req, 0).is_err());
        assert_eq!(average_dyadic_piece(&a, &req, 2000).unwrap(), 0.0);
    }

    #[test]
    fn constant_pieces_are_positive_and_decay() {
        let a = aniso(2.0, 4.0);
        let req = ones(2);
        let vals: Vec<f64> = (1..=12).map(|k| average_dyadic_piece(&a, &req, k).unwrap()).collect();
        assert!(vals.iter().all(|v| *v > 0.0));
        assert!(vals.windows(2).skip(1).all(|w| w[1] < w[0]), "{vals:?}");
    }

    #[test]
    fn tolerance_check_passes_on_smooth_data() {
        let mut req = AverageRequest::new(
            FunctionSpec::bump(vec![0.0, 0.0], 1.0),
            FunctionSpec::ball(vec![0.2, 0.0], 0.7),
            vec![0.5, 0.0],
            0.8,
            0.9,
        );
        req.quad = QuadratureOpts::checked(1e-8);
        assert!(average(&aniso(3.0, 2.0), &req).is_ok());
    }

    #[test]
    fn rejects_bad_requests() {
        let mut req = ones(2);
        req.t1 = 0.0;
        assert!(average(&aniso(2.0, 2.0), &req).is_err());
        assert!(matches!(average(&aniso(2.0, 2.0), &ones(4)), Err(Error::Dimension(4))));
    }
}
