use std::f64::consts::PI;

use serde::Serialize;

use super::function::FunctionSpec;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Surface measure of the unit sphere in `R^n` (counting measure on `{±1}` for `n = 1`).
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("sphere_area: unsupported dimension {n}"),
    }
}

pub fn ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => panic!("ball_volume: unsupported dimension {n}"),
    }
}

/// Nodes and weights for the unnormalized surface measure on `S^{n-1}`.
#[derive(Debug, Clone, Serialize)]
pub struct SphereRule {
    pub n: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Equispaced circle rule for `n = 2`; azimuth × Gauss–Legendre in `cos θ` for `n = 3`.
pub fn sphere_rule(n: usize, resolution: usize) -> Result<SphereRule> {
    if resolution < 4 {
        return Err(Error::precondition(format!("sphere resolution {resolution} is below 4")));
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    match n {
        2 => {
            let w = 2.0 * PI / resolution as f64;
            for k in 0..resolution {
                let th = 2.0 * PI * k as f64 / resolution as f64;
                nodes.push(vec![th.cos(), th.sin()]);
                weights.push(w);
            }
        }
        3 => {
            let polar = gauss_legendre((resolution / 2).max(2));
            let dphi = 2.0 * PI / resolution as f64;
            for (u, wu) in polar.nodes.iter().zip(&polar.weights) {
                let s = (1.0 - u * u).sqrt();
                for k in 0..resolution {
                    let phi = dphi * k as f64;
                    nodes.push(vec![s * phi.cos(), s * phi.sin(), *u]);
                    weights.push(wu * dphi);
                }
            }
        }
        _ => return Err(Error::Dimension(n)),
    }
    Ok(SphereRule { n, nodes, weights })
}

/// `Σ_i w_i g(x - t θ_i)`.
pub fn spherical_average(g: &FunctionSpec, x: &[f64], t: f64, rule: &SphereRule) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("radius {t} is negative")));
    }
    if x.len() != rule.n {
        return Err(Error::Arity { expected: rule.n, got: x.len() });
    }
    let mut y = vec![0.0; rule.n];
    let mut acc = 0.0;
    for (th, w) in rule.nodes.iter().zip(&rule.weights) {
        for i in 0..rule.n {
            y[i] = x[i] - t * th[i];
        }
        acc += w * g.eval(&y);
    }
    Ok(acc)
}
