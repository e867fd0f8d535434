//! One-dimensional quadrature building blocks.
//!
//! Everything in the crate that integrates in one variable goes through a
//! [`GaussRule`] applied on a list of cells. Singular or non-smooth points are
//! handled by placing cell boundaries on them and grading the cells
//! geometrically toward them, which keeps Gauss–Legendre convergence
//! exponential in the number of grading levels.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Nodes mapped to `[a, b]` with their scaled weights.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn compute_gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1, "Gauss rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

/// Cached Gauss–Legendre rule of the given order.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

/// Breakpoints of `[a, b]` graded geometrically toward both ends:
/// `a + (b-a) 2^-k` and `b - (b-a) 2^-k` for `k = 1..=levels`.
pub fn graded_both(a: f64, b: f64, levels: usize) -> Vec<f64> {
    let len = b - a;
    let mut pts = vec![a, b, a + 0.5 * len];
    let mut s = 0.5;
    for _ in 1..levels {
        s *= 0.5;
        pts.push(a + len * s);
        pts.push(b - len * s);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Insert geometric refinement points around `center` inside `[lo, hi]`.
/// Points sit at `center ± d 2^-j`, where `d` is the distance to the second
/// nearest existing breakpoint on that side (the nearest if there is only
/// one), so a breakpoint lying very close to `center` does not leave the
/// next cell ungraded.
pub fn refine_toward(points: &mut Vec<f64>, center: f64, levels: usize) {
    if levels == 0 {
        return;
    }
    points.sort_by(f64::total_cmp);
    let (lo, hi) = (points[0], points[points.len() - 1]);
    if !(center > lo && center < hi) {
        return;
    }
    let reach = |mut ds: Vec<f64>| {
        ds.sort_by(f64::total_cmp);
        ds.get(1).or(ds.first()).copied().unwrap_or(0.0)
    };
    let mut dl = reach(points.iter().filter(|&&p| p < center).map(|p| center - p).collect());
    let mut dr = reach(points.iter().filter(|&&p| p > center).map(|p| p - center).collect());
    points.push(center);
    for _ in 0..levels {
        dl *= 0.5;
        dr *= 0.5;
        if dl > 0.0 {
            points.push(center - dl);
        }
        if dr > 0.0 {
            points.push(center + dr);
        }
    }
}

/// Sum of a Gauss rule applied on every consecutive pair of sorted breakpoints.
pub fn composite<F: FnMut(f64) -> f64>(breaks: &[f64], rule: &GaussRule, mut f: F) -> f64 {
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .sum()
}

/// Sort, drop non-finite and near-duplicate points.
pub fn tidy(points: &mut Vec<f64>) {
    points.retain(|p| p.is_finite());
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_weights_sum_to_two() {
        for n in [1, 2, 3, 7, 16, 33] {
            let r = gauss_legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn gauss_is_exact_for_polynomials_up_to_2n_minus_1() {
        let r = gauss_legendre(6);
        for k in 0..12 {
            let got = r.integrate(0.0, 1.0, |x| x.powi(k));
            assert!((got - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn graded_mesh_handles_endpoint_singularity() {
        let r = gauss_legendre(10);
        let breaks = graded_both(0.0, 1.0, 60);
        let got = composite(&breaks, &r, |x| x.powf(-0.5));
        assert!((got - 2.0).abs() < 1e-8, "{got}");
    }

    #[test]
    fn refinement_resolves_interior_kink() {
        let r = gauss_legendre(8);
        let mut breaks = vec![0.0, 1.0];
        refine_toward(&mut breaks, 0.3, 30);
        tidy(&mut breaks);
        let got = composite(&breaks, &r, |x| (x - 0.3).abs().sqrt());
        let exact = 2.0 / 3.0 * (0.3f64.powf(1.5) + 0.7f64.powf(1.5));
        assert!((got - exact).abs() < 1e-10);
    }
}
