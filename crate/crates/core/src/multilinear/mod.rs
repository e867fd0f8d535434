//! m-linear averages over `S_m^a = {Σ_j |y^j|^{a_j} = 1} ⊂ (R^n)^m`.
//!
//! Slicing at a pivot block `l`: for the outer blocks `ŷ = (y^j)_{j≠l}` with
//! `|ŷ|_l = Σ_{j≠l} |y^j|^{a_j} < 1`, the pivot block runs over the sphere of
//! radius `ν = ν_{a_l}(|ŷ|_l)`, and the surface measure becomes
//!
//! `ν^{n-a_l} · |∇Φ| / a_l · dŷ dθ`,  `|∇Φ|² = Σ_j a_j² |y^j|^{2(a_j-1)}`,
//!
//! with `|y^l| = ν` inside the gradient. The pivot factor is an exact sphere
//! integral of `f_l`; the outer `(m-1)n`-dimensional integral is sampled.
//!
//! Writing `u_j = |y^j|^{a_j}` and `s = 1 - Σ u_j`, the outer measure times
//! `ν^{n-a_l}` is a Dirichlet density with parameters `n/a_j` (`j ≠ l`) and
//! `n/a_l` for `s`, so `u` is drawn from that law and the directions
//! uniformly; the remaining factor `|∇Φ|` is bounded.

mod necessity;

pub use necessity::{necessity_experiment, NecessityParams, NecessityReport};

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::bilinear::{check_dim, default_node_cap, default_refine_tol, refined_sup, MaximalMode, Refinement};
use crate::error::{Error, Result};
use crate::fields::{sphere_area, FunctionSpec, GeometricSeq, Grid, SampledField};
use crate::regions::Anisotropy;
use crate::sampling::{chunked, unit_vector, RatioAccumulator};

pub const MAX_BLOCKS: usize = 4;

/// `ν_a(t) = (1 - t)_+^{1/a}`.
pub fn nu(a: f64, t: f64) -> f64 {
    (1.0 - t).max(0.0).powf(1.0 / a)
}

fn default_true() -> bool {
    true
}
fn default_pivot() -> usize {
    1
}
fn default_samples() -> usize {
    1_000_000
}
fn default_seed() -> u64 {
    1
}

/// One evaluation of `𝒜_{m,t}^a(f)(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiAverageRequest {
    pub fs: Vec<FunctionSpec>,
    pub x: Vec<f64>,
    pub ts: Vec<f64>,
    /// Slicing block, counted from 1.
    #[serde(default = "default_pivot")]
    pub pivot: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub normalized: bool,
    /// Largest accepted standard error; `None` accepts any.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl MultiAverageRequest {
    pub fn new(fs: Vec<FunctionSpec>, x: Vec<f64>, ts: Vec<f64>) -> Self {
        MultiAverageRequest {
            fs,
            x,
            ts,
            pivot: 1,
            samples: default_samples(),
            seed: default_seed(),
            normalized: true,
            tolerance: None,
        }
    }

    pub fn with_pivot(mut self, pivot: usize) -> Self {
        self.pivot = pivot;
        self
    }

    pub fn with_budget(mut self, samples: usize, seed: u64) -> Self {
        self.samples = samples;
        self.seed = seed;
        self
    }

    pub fn unnormalized(mut self) -> Self {
        self.normalized = false;
        self
    }

    fn validate(&self, a: &Anisotropy) -> Result<usize> {
        let m = a.len();
        if !(2..=MAX_BLOCKS).contains(&m) {
            return Err(Error::precondition(format!("number of blocks m = {m} must lie in 2..={MAX_BLOCKS}")));
        }
        if self.fs.len() != m {
            return Err(Error::Arity { expected: m, got: self.fs.len() });
        }
        if self.ts.len() != m {
            return Err(Error::Arity { expected: m, got: self.ts.len() });
        }
        if !(1..=m).contains(&self.pivot) {
            return Err(Error::precondition(format!("pivot {} is not a block index in 1..={m}", self.pivot)));
        }
        let n = self.x.len();
        check_dim(n)?;
        if self.ts.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::Domain(format!("dilations {:?} must be positive", self.ts)));
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("evaluation point is not finite".into()));
        }
        if self.samples < 1000 {
            return Err(Error::precondition(format!("need at least 1000 samples, got {}", self.samples)));
        }
        for f in &self.fs {
            f.validate(n)?;
        }
        Ok(n)
    }
}

/// Restriction of the pivot slack `s = ν^{a_l}` to a dyadic shell.
#[derive(Debug, Clone, Copy)]
struct Shell {
    lo: f64,
    hi: f64,
}

/// Sampled sum with the surface-mass accumulator: `w = |∇Φ| |S^{n-1}|` is the
/// integrand for `f ≡ 1`, `w·h` the integrand for `f`.
fn accumulate(a: &Anisotropy, req: &MultiAverageRequest, n: usize, shell: Option<Shell>) -> Result<RatioAccumulator> {
    let m = a.len();
    let l = req.pivot - 1;
    let exps = a.as_slice();
    let laws = (0..m)
        .map(|j| Gamma::new(n as f64 / exps[j], 1.0).map_err(|e| Error::Domain(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let area = sphere_area(n);
    let parts = chunked(req.seed, req.samples, |rng, count| {
        let mut acc = RatioAccumulator::default();
        let mut g = vec![0.0; m];
        let mut dir = vec![0.0; n];
        let mut y = vec![0.0; n];
        for _ in 0..count {
            // Slot l of `g` holds the slack.
            let mut total = 0.0;
            for (j, law) in laws.iter().enumerate() {
                g[j] = law.sample(rng);
                total += g[j];
            }
            let mut grad2 = 0.0;
            for j in 0..m {
                let u = g[j] / total;
                g[j] = u;
                grad2 += exps[j] * exps[j] * u.powf(2.0 * (exps[j] - 1.0) / exps[j]);
            }
            let w = grad2.sqrt() * area;
            let slack = g[l];
            if let Some(sh) = shell {
                if !(slack > sh.lo && slack <= sh.hi) {
                    // Still counted in the mass, contributes nothing.
                    acc.push(w, 0.0);
                    consume_directions(rng, m - 1, &mut dir);
                    continue;
                }
            }
            let mut h = 1.0;
            for j in (0..m).filter(|&j| j != l) {
                unit_vector(rng, &mut dir);
                if h == 0.0 {
                    continue;
                }
                let r = g[j].powf(1.0 / exps[j]);
                for i in 0..n {
                    y[i] = req.x[i] - req.ts[j] * r * dir[i];
                }
                h *= req.fs[j].eval(&y);
            }
            if h != 0.0 {
                let radius = req.ts[l] * slack.powf(1.0 / exps[l]);
                h *= req.fs[l].sphere_integral(&req.x, radius) / area;
            }
            acc.push(w, h);
        }
        acc
    });
    let mut total = RatioAccumulator::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

/// Keep the random stream aligned between shell hits and misses.
fn consume_directions<R: Rng + ?Sized>(rng: &mut R, count: usize, dir: &mut [f64]) {
    for _ in 0..count {
        unit_vector(rng, dir);
    }
}

/// `Π_{j≠l} |S^{n-1}| / a_j · B(n/a) / a_l`, so that the unnormalized integral
/// is this constant times the sample mean of `|∇Φ| Π_{j≠l} f_j · ∫_{S} f_l`.
fn dirichlet_scale(a: &Anisotropy, n: usize, l: usize) -> f64 {
    let area = sphere_area(n);
    let alphas: Vec<f64> = a.as_slice().iter().map(|v| n as f64 / v).collect();
    let beta = alphas.iter().map(|&v| libm::tgamma(v)).product::<f64>() / libm::tgamma(alphas.iter().sum());
    let mut scale = beta / a.get(l);
    for j in (0..a.len()).filter(|&j| j != l) {
        scale *= area / a.get(j);
    }
    scale
}

fn finish(a: &Anisotropy, req: &MultiAverageRequest, n: usize, acc: &RatioAccumulator) -> Result<(f64, f64)> {
    let (est, se) = if req.normalized {
        acc.ratio()
    } else {
        let (mean, se) = acc.mean();
        let c = dirichlet_scale(a, n, req.pivot - 1);
        (c * mean, c * se)
    };
    if let Some(tol) = req.tolerance {
        if !(se <= tol) {
            return Err(Error::Accuracy { estimate: se, tolerance: tol });
        }
    }
    Ok((est, se))
}

/// Monte-Carlo estimate of `𝒜_{m,t}^a(f)(x)` and its standard error.
///
/// The normalized average divides by the surface mass estimated from the same
/// samples, so `f ≡ 1` gives exactly 1. Results depend only on `seed`.
pub fn multilinear_average(a: &Anisotropy, req: &MultiAverageRequest) -> Result<(f64, f64)> {
    let n = req.validate(a)?;
    let acc = accumulate(a, req, n, None)?;
    finish(a, req, n, &acc)
}

/// The part of the average where the pivot slack `1 - |ŷ|_l` lies in
/// `(2^{-k}, 2^{1-k}]`; the pieces over `k ≥ 1` sum to the full average.
pub fn multilinear_dyadic_piece(a: &Anisotropy, req: &MultiAverageRequest, k: u32) -> Result<(f64, f64)> {
    let n = req.validate(a)?;
    if k == 0 {
        return Err(Error::precondition("dyadic pieces start at k = 1"));
    }
    let shell = Shell { lo: (-(k as f64)).exp2(), hi: (1.0 - k as f64).exp2() };
    let acc = accumulate(a, req, n, Some(shell))?;
    finish(a, req, n, &acc)
}

/// Unnormalized mass of `S_m^a` from the closed form of the Dirichlet integral
/// of `|∇Φ|`; only the gradient factor is sampled.
pub fn multilinear_surface_mass(a: &Anisotropy, n: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let m = a.len();
    let req = MultiAverageRequest::new(vec![FunctionSpec::constant(1.0); m], vec![0.0; n], vec![1.0; m])
        .with_budget(samples, seed)
        .unnormalized();
    multilinear_average(a, &req)
}

fn default_max_samples() -> usize {
    100_000
}
fn default_multi_refinements() -> u32 {
    1
}

/// Discrete maximal function `sup_t |𝒜_{m,t}^a(f)(x)|` over a t-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiMaximalRequest {
    pub fs: Vec<FunctionSpec>,
    pub grid: Grid,
    pub tgrid: GeometricSeq,
    /// `Diagonal` takes `t_1 = … = t_m`; `Biparam` all m-tuples.
    pub mode: MaximalMode,
    #[serde(default = "default_pivot")]
    pub pivot: usize,
    /// Samples per average; all averages share the random stream.
    #[serde(default = "default_max_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_multi_refinements")]
    pub max_refinements: u32,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    #[serde(default = "default_node_cap")]
    pub node_cap: usize,
}

impl MultiMaximalRequest {
    pub fn new(fs: Vec<FunctionSpec>, grid: Grid, tgrid: GeometricSeq, mode: MaximalMode) -> Self {
        MultiMaximalRequest {
            fs,
            grid,
            tgrid,
            mode,
            pivot: 1,
            samples: default_max_samples(),
            seed: default_seed(),
            max_refinements: default_multi_refinements(),
            refine_tol: default_refine_tol(),
            node_cap: default_node_cap(),
        }
    }
}

/// Call `eval(t)` on the m-tuples of `ts` selected by `mode`, skipping tuples
/// whose indices all fail `fresh` when it is given.
fn for_tuples<E>(ts: &[f64], m: usize, mode: MaximalMode, fresh: Option<&dyn Fn(usize) -> bool>, mut eval: E) -> Result<()>
where
    E: FnMut(&[f64]) -> Result<()>,
{
    let is_new = |i: usize| fresh.is_none_or(|p| p(i));
    match mode {
        MaximalMode::Diagonal => {
            for (i, &t) in ts.iter().enumerate() {
                if is_new(i) {
                    eval(&vec![t; m])?;
                }
            }
        }
        MaximalMode::Biparam => {
            let mut idx = vec![0usize; m];
            let mut tuple = vec![0.0; m];
            'outer: loop {
                if idx.iter().any(|&i| is_new(i)) {
                    for (t, &i) in tuple.iter_mut().zip(&idx) {
                        *t = ts[i];
                    }
                    eval(&tuple)?;
                }
                for d in (0..m).rev() {
                    idx[d] += 1;
                    if idx[d] < ts.len() {
                        continue 'outer;
                    }
                    idx[d] = 0;
                }
                break;
            }
        }
    }
    Ok(())
}

/// Discrete `𝔐_m^a(f)` on a grid, a lower bound for the true supremum.
///
/// Every average reuses one random stream, so the field is monotone in each
/// `f_j` and the diagonal field never exceeds the multiparameter one.
pub fn multilinear_maximal(a: &Anisotropy, req: &MultiMaximalRequest) -> Result<SampledField> {
    req.grid.validate()?;
    req.tgrid.validate()?;
    let m = a.len();
    let base = MultiAverageRequest {
        fs: req.fs.clone(),
        x: vec![0.0; req.grid.dim()],
        ts: vec![1.0; m],
        pivot: req.pivot,
        samples: req.samples,
        seed: req.seed,
        normalized: true,
        tolerance: None,
    };
    base.validate(a)?;
    let refine = Refinement { max_refinements: req.max_refinements, refine_tol: req.refine_tol, node_cap: req.node_cap };
    refined_sup(&req.grid, &req.tgrid, refine, |x, ts, fresh| {
        let mut r = base.clone();
        r.x = x.to_vec();
        let mut best: f64 = 0.0;
        for_tuples(ts, m, req.mode, fresh, |t| {
            r.ts.copy_from_slice(t);
            best = best.max(multilinear_average(a, &r)?.0.abs());
            Ok(())
        })?;
        Ok(best)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::{average, AverageRequest};
    use crate::quad::gauss_legendre;

    fn aniso(v: &[f64]) -> Anisotropy {
        Anisotropy::new(v.to_vec()).unwrap()
    }

    #[test]
    fn nu_values() {
        assert!((nu(3.0, 0.5) - 0.5f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(nu(2.0, 1.5), 0.0);
        assert_eq!(nu(2.7, 0.0), 1.0);
    }

    #[test]
    fn ones_average_to_one() {
        let a = aniso(&[2.0, 3.0, 2.0]);
        let req = MultiAverageRequest::new(vec![FunctionSpec::constant(1.0); 3], vec![0.3, 0.1], vec![1.0, 2.0, 0.5])
            .with_budget(20_000, 3);
        let (v, se) = multilinear_average(&a, &req).unwrap();
        assert!((v - 1.0).abs() < 1e-12 && se < 1e-12, "{v} ± {se}");
    }

    #[test]
    fn mass_matches_three_sphere() {
        // m = 2, a = (2, 2), n = 2 is the round S^3 of area 2π².
        let (v, se) = multilinear_surface_mass(&aniso(&[2.0, 2.0]), 2, 10_000, 1).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        assert!((v - exact).abs() < 1e-7 * exact && se < 1e-6, "{v} ± {se}");
    }

    #[test]
    fn mass_of_round_five_sphere() {
        // m = 3, a = (2,2,2), n = 2: S^5 has area π³.
        let (v, se) = multilinear_surface_mass(&aniso(&[2.0, 2.0, 2.0]), 2, 10_000, 1).unwrap();
        let exact = std::f64::consts::PI.powi(3);
        assert!((v - exact).abs() < 1e-7 * exact && se < 1e-6, "{v} ± {se}");
    }

    #[test]
    fn bilinear_mode_matches_sliced_engine() {
        for a in [[2.0, 3.0], [1.0, 2.0], [3.0, 3.0]] {
            let a = aniso(&a);
            let f = FunctionSpec::ball(vec![0.4, 0.0], 0.8);
            let g = FunctionSpec::bump(vec![0.0, 0.3], 1.2);
            let x = vec![0.2, -0.1];
            let exact = average(&a, &AverageRequest::new(f.clone(), g.clone(), x.clone(), 0.9, 1.3)).unwrap();
            for pivot in [1, 2] {
                let req = MultiAverageRequest::new(vec![f.clone(), g.clone()], x.clone(), vec![0.9, 1.3])
                    .with_pivot(pivot)
                    .with_budget(200_000, 5);
                let (v, se) = multilinear_average(&a, &req).unwrap();
                assert!((v - exact).abs() < 3.0 * se + 1e-9, "pivot {pivot}: {v} ± {se} vs {exact}");
            }
        }
    }

    /// Tensor Gauss rule on `(0, 1)` with cells graded toward both ends.
    fn unit_nodes(cells: usize) -> Vec<(f64, f64)> {
        let rule = gauss_legendre(8);
        let mut pts = vec![0.0];
        for k in 1..=cells {
            let s = k as f64 / cells as f64;
            pts.push(0.5 - 0.5 * (std::f64::consts::PI * s).cos());
        }
        pts.windows(2).flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>()).collect()
    }

    /// Angles integrated exactly, two outer radii by quadrature. With
    /// `v_j = u_j^{n/a_j}` the outer measure `Π r_j^{n-1} dr_j` is
    /// `Π dv_j / n`, and `u_2 < 1 - u_1` becomes `v_2 < (1 - u_1)^{n/a_2}`.
    fn radial_oracle(a: &Anisotropy, fs: &[FunctionSpec], x: &[f64], ts: &[f64], pivot: usize) -> f64 {
        let n = x.len() as f64;
        let l = pivot - 1;
        let outer: Vec<usize> = (0..3).filter(|&j| j != l).collect();
        let (j1, j2) = (outer[0], outer[1]);
        let (a1, a2, al) = (a.get(j1), a.get(j2), a.get(l));
        let nodes = unit_nodes(160);
        let mut total = 0.0;
        for &(v1, w1) in &nodes {
            let u1 = v1.powf(a1 / n);
            let top = (1.0 - u1).powf(n / a2);
            let s1 = fs[j1].sphere_integral(x, ts[j1] * u1.powf(1.0 / a1));
            for &(z, w2) in &nodes {
                let v2 = z * top;
                let u2 = v2.powf(a2 / n);
                let slack = (1.0 - u1 - u2).max(0.0);
                let grad = (a1 * a1 * u1.powf(2.0 * (a1 - 1.0) / a1)
                    + a2 * a2 * u2.powf(2.0 * (a2 - 1.0) / a2)
                    + al * al * slack.powf(2.0 * (al - 1.0) / al))
                    .sqrt();
                let nu_l = slack.powf(1.0 / al);
                let inner = fs[j2].sphere_integral(x, ts[j2] * u2.powf(1.0 / a2))
                    * fs[l].sphere_integral(x, ts[l] * nu_l)
                    * nu_l.powf(n - al)
                    * grad
                    / al;
                total += w1 * w2 * top * s1 * inner / (n * n);
            }
        }
        total
    }

    #[test]
    fn radial_oracle_reproduces_mass() {
        let a = aniso(&[2.0, 2.0, 2.0]);
        let ones = vec![FunctionSpec::constant(1.0); 3];
        let m = radial_oracle(&a, &ones, &[0.0, 0.0], &[1.0; 3], 3);
        let exact = std::f64::consts::PI.powi(3);
        assert!((m - exact).abs() < 1e-8 * exact, "{m}");
    }

    #[test]
    fn constant_third_factor_reduces_to_two_blocks() {
        for (a, pivot) in [([2.0, 2.0, 2.0], 3), ([2.0, 3.0, 2.0], 3), ([2.0, 3.0, 2.0], 1)] {
            let a = aniso(&a);
            let fs = vec![
                FunctionSpec::ball(vec![0.3, 0.0], 0.9),
                FunctionSpec::ball(vec![0.0, -0.2], 1.1),
                FunctionSpec::constant(1.0),
            ];
            let x = vec![0.1, 0.2];
            let ts = vec![1.2, 0.8, 1.0];
            let exact = radial_oracle(&a, &fs, &x, &ts, pivot);
            let req = MultiAverageRequest::new(fs, x, ts).with_pivot(pivot).with_budget(400_000, 9).unnormalized();
            let (v, se) = multilinear_average(&a, &req).unwrap();
            assert!((v - exact).abs() < 3.0 * se + 1e-4 * exact, "{v} ± {se} vs {exact}");
        }
    }

    #[test]
    fn pivots_agree() {
        let a = aniso(&[2.0, 3.0, 4.0]);
        let fs = vec![
            FunctionSpec::ball(vec![0.2, 0.0], 1.0),
            FunctionSpec::bump(vec![0.0, 0.1], 1.5),
            FunctionSpec::ball(vec![-0.3, 0.3], 1.2),
        ];
        let base = MultiAverageRequest::new(fs, vec![0.1, -0.2], vec![1.0, 0.7, 1.3]).with_budget(300_000, 4);
        let (v1, s1) = multilinear_average(&a, &base.clone().with_pivot(1)).unwrap();
        let (v3, s3) = multilinear_average(&a, &base.with_pivot(3)).unwrap();
        assert!((v1 - v3).abs() < 3.0 * (s1 * s1 + s3 * s3).sqrt(), "{v1} ± {s1} vs {v3} ± {s3}");
    }

    #[test]
    fn dyadic_pieces_sum_to_average() {
        let a = aniso(&[2.0, 2.0, 3.0]);
        let fs = vec![FunctionSpec::ball(vec![0.0, 0.0], 1.0); 3];
        let req = MultiAverageRequest::new(fs, vec![0.5, 0.0], vec![1.0; 3]).with_pivot(3).with_budget(50_000, 2);
        let (full, _) = multilinear_average(&a, &req).unwrap();
        let pieces: f64 = (1..=40).map(|k| multilinear_dyadic_piece(&a, &req, k).unwrap().0).sum();
        assert!((full - pieces).abs() < 1e-12, "{full} vs {pieces}");
    }

    #[test]
    fn tuples_cover_grid() {
        let ts = [1.0, 2.0, 3.0];
        let mut all = 0;
        for_tuples(&ts, 3, MaximalMode::Biparam, None, |_| {
            all += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(all, 27);
        let odd = |i: usize| i % 2 == 1;
        let mut fresh = 0;
        for_tuples(&ts, 3, MaximalMode::Biparam, Some(&odd), |t| {
            assert!(t.contains(&2.0));
            fresh += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(fresh, 27 - 8);
    }

    #[test]
    fn maximal_of_ones_and_ordering() {
        let a = aniso(&[2.0, 2.0, 2.0]);
        let grid = Grid::cube(2, -1.0, 1.0, 2).unwrap();
        let tgrid = GeometricSeq::new(0.25, 2.0, 2.0).unwrap();
        let mut req = MultiMaximalRequest::new(vec![FunctionSpec::constant(1.0); 3], grid.clone(), tgrid.clone(), MaximalMode::Biparam);
        req.samples = 2000;
        let ones = multilinear_maximal(&a, &req).unwrap();
        assert!(ones.values.iter().all(|v| (v - 1.0).abs() < 1e-12));

        let fs = vec![
            FunctionSpec::ball(vec![0.0, 0.0], 0.5),
            FunctionSpec::ball(vec![0.5, 0.0], 0.5),
            FunctionSpec::ball(vec![-0.5, 0.2], 0.7),
        ];
        let mut full = MultiMaximalRequest::new(fs.clone(), grid.clone(), tgrid.clone(), MaximalMode::Biparam);
        full.samples = 4000;
        let mut diag = full.clone();
        diag.mode = MaximalMode::Diagonal;
        let mut bigger = full.clone();
        bigger.fs[1] = FunctionSpec::ball(vec![0.5, 0.0], 0.9);
        let vf = multilinear_maximal(&a, &full).unwrap();
        let vd = multilinear_maximal(&a, &diag).unwrap();
        let vb = multilinear_maximal(&a, &bigger).unwrap();
        for i in 0..vf.values.len() {
            assert!(vd.values[i] <= vf.values[i]);
            assert!(vf.values[i] <= vb.values[i]);
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let a = aniso(&[2.0, 2.0, 2.0]);
        let ok = MultiAverageRequest::new(vec![FunctionSpec::constant(1.0); 3], vec![0.0, 0.0], vec![1.0; 3]);
        assert!(multilinear_average(&a, &ok.clone().with_pivot(4)).is_err());
        let mut bad = ok.clone();
        bad.ts[1] = 0.0;
        assert!(multilinear_average(&a, &bad).is_err());
        let mut tight = ok.with_budget(1000, 1);
        tight.fs[0] = FunctionSpec::ball(vec![0.3, 0.0], 0.5);
        tight.tolerance = Some(1e-9);
        assert!(matches!(multilinear_average(&a, &tight), Err(Error::Accuracy { .. })));
        assert!(multilinear_average(&aniso(&[2.0; 5]), &MultiAverageRequest::new(vec![FunctionSpec::constant(1.0); 5], vec![0.0], vec![1.0; 5])).is_err());
    }
}
