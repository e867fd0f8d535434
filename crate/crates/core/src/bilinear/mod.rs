//! Bilinear averages over `S^a = {(y, z) ∈ R^n × R^n : |y|^{a_1} + |z|^{a_2} = 1}`.
//!
//! The surface integral of `f(x - t_1 y) g(x - t_2 z)` is computed by slicing:
//! for each `y` in the unit ball, the `z` with `(y, z) ∈ S^a` form the sphere of
//! radius `ω(|y|) = (1 - |y|^{a_1})^{1/a_2}`, and the induced surface measure is
//! `W(|y|) ω(|y|)^{n-1} dy dφ` with `W = sqrt(1 + ω'^2)`. Because the test
//! functions have exact (or separately integrated) sphere means, the whole
//! average collapses to a one-dimensional radial integral.

mod maximal;
mod oracle;
mod sharpness;
mod sliced;

pub use maximal::{maximal_estimate, norm_ratio, sup_over_t, MaximalMode, MaximalRequest};
pub(crate) use maximal::{default_node_cap, default_refine_tol, default_refinements, for_pairs, refined_sup, Refinement};
pub use oracle::average_param_oracle;
pub use sharpness::{
    dyadic_decay, l1_failure_probe, sharpness_nec1, sharpness_nec2, sharpness_nec3, DyadicDecayParams,
    DyadicDecayReport, L1Report, Nec1Params, Nec2Params,
};
pub use sliced::{
    average, average_dyadic_piece, average_fsliced, average_gsliced, surface_mass, QuadratureOpts,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FunctionSpec;
use crate::regions::Anisotropy;

/// Radial profile of the slice geometry for a pair of exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceGeometry {
    pub n: usize,
    pub a1: f64,
    pub a2: f64,
}

impl SliceGeometry {
    pub fn new(n: usize, a: &Anisotropy) -> Result<Self> {
        if a.len() != 2 {
            return Err(Error::Arity { expected: 2, got: a.len() });
        }
        check_dim(n)?;
        Ok(SliceGeometry { n, a1: a.get(0), a2: a.get(1) })
    }

    /// The geometry with the roles of the two blocks exchanged.
    pub fn swapped(&self) -> Self {
        SliceGeometry { n: self.n, a1: self.a2, a2: self.a1 }
    }

    /// `ω(r) = (1 - r^{a_1})^{1/a_2}`.
    pub fn omega(&self, r: f64) -> f64 {
        (1.0 - r.powf(self.a1)).max(0.0).powf(1.0 / self.a2)
    }

    /// `ω̃(r) = (1 - r^{a_2})^{1/a_1}`.
    pub fn omega_tilde(&self, r: f64) -> f64 {
        self.swapped().omega(r)
    }

    pub fn omega_prime(&self, r: f64) -> f64 {
        let w = self.omega(r);
        -(self.a1 / self.a2) * r.powf(self.a1 - 1.0) * w.powf(1.0 - self.a2)
    }

    /// `W(r) = sqrt(a_1² r^{2(a_1-1)} + a_2² ω^{2(a_2-1)}) / (a_2 ω^{a_2-1})`.
    pub fn weight(&self, r: f64) -> f64 {
        let w = self.omega(r);
        (self.a1.powi(2) * r.powf(2.0 * (self.a1 - 1.0)) + self.a2.powi(2) * w.powf(2.0 * (self.a2 - 1.0))).sqrt()
            / (self.a2 * w.powf(self.a2 - 1.0))
    }

    pub fn weight_tilde(&self, r: f64) -> f64 {
        self.swapped().weight(r)
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::Dimension(n))
    }
}

fn default_true() -> bool {
    true
}

/// One evaluation of the bilinear average `𝒜_t(f, g)(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AverageRequest {
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    pub x: Vec<f64>,
    pub t1: f64,
    pub t2: f64,
    /// Divide by the surface mass (the normalized measure).
    #[serde(default = "default_true")]
    pub normalized: bool,
    #[serde(default)]
    pub quad: QuadratureOpts,
}

impl AverageRequest {
    pub fn new(f: FunctionSpec, g: FunctionSpec, x: Vec<f64>, t1: f64, t2: f64) -> Self {
        AverageRequest { f, g, x, t1, t2, normalized: true, quad: QuadratureOpts::default() }
    }

    pub fn unnormalized(mut self) -> Self {
        self.normalized = false;
        self
    }

    /// Exchange `(f, t_1)` and `(g, t_2)`.
    pub fn swapped(&self) -> Self {
        AverageRequest {
            f: self.g.clone(),
            g: self.f.clone(),
            x: self.x.clone(),
            t1: self.t2,
            t2: self.t1,
            normalized: self.normalized,
            quad: self.quad.clone(),
        }
    }

    pub(crate) fn validate(&self) -> Result<usize> {
        let n = self.x.len();
        check_dim(n)?;
        if !(self.t1 > 0.0 && self.t2 > 0.0 && self.t1.is_finite() && self.t2.is_finite()) {
            return Err(Error::Domain(format!("dilations ({}, {}) must be positive", self.t1, self.t2)));
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("evaluation point is not finite".into()));
        }
        self.f.validate(n)?;
        self.g.validate(n)?;
        Ok(n)
    }
}

/// Root of `s^{a_1} + s^{a_2} = 1` in `(0, 1)` by bisection.
pub fn solve_s_star(a: &Anisotropy) -> Result<f64> {
    if a.len() != 2 {
        return Err(Error::Arity { expected: 2, got: a.len() });
    }
    let (a1, a2) = (a.get(0), a.get(1));
    let h = |s: f64| s.powf(a1) + s.powf(a2) - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geo(a1: f64, a2: f64) -> SliceGeometry {
        SliceGeometry::new(2, &Anisotropy::pair(a1, a2).unwrap()).unwrap()
    }

    #[test]
    fn s_star_examples() {
        let s = |a1, a2| solve_s_star(&Anisotropy::pair(a1, a2).unwrap()).unwrap();
        assert!((s(2.0, 2.0) - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((s(1.0, 2.0) - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-14);
        assert!((s(1.0, 1.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn omega_endpoints_and_swap() {
        let g = geo(2.0, 3.0);
        assert_eq!(g.omega(0.0), 1.0);
        assert_eq!(g.omega(1.0), 0.0);
        assert_eq!(g.omega(0.4), geo(3.0, 2.0).omega_tilde(0.4));
    }

    #[test]
    fn dimension_guard() {
        assert!(matches!(SliceGeometry::new(4, &Anisotropy::pair(2.0, 2.0).unwrap()), Err(Error::Dimension(4))));
    }

    proptest! {
        #[test]
        fn weight_is_arclength_factor(a1 in 1.0f64..6.0, a2 in 1.0f64..6.0, r in 0.01f64..0.99) {
            let g = geo(a1, a2);
            let lhs = g.weight(r);
            let rhs = (1.0 + g.omega_prime(r).powi(2)).sqrt();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
            // Centered difference as an independent derivative.
            let h = 1e-6 * r.min(1.0 - r);
            let fd = (g.omega(r + h) - g.omega(r - h)) / (2.0 * h);
            prop_assert!((fd - g.omega_prime(r)).abs() <= 1e-5 * (1.0 + fd.abs()));
        }

        #[test]
        fn omega_is_decreasing(a1 in 1.0f64..6.0, a2 in 1.0f64..6.0, r in 0.0f64..0.99) {
            let g = geo(a1, a2);
            prop_assert!(g.omega(r + 0.01) <= g.omega(r));
        }
    }
}
