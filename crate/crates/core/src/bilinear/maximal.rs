use serde::{Deserialize, Serialize};

use super::sliced::{average, average_dyadic_piece, QuadratureOpts};
use super::AverageRequest;
use crate::error::{Error, Result};
use crate::fields::{lp_norm, lp_norm_of_spec, FunctionSpec, GeometricSeq, Grid, SampledField};
use crate::regions::Anisotropy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaximalMode {
    /// Independent dilations `(t_1, t_2)`.
    Biparam,
    /// `t_1 = t_2`.
    Diagonal,
}

pub(crate) fn default_refinements() -> u32 {
    3
}
pub(crate) fn default_refine_tol() -> f64 {
    0.005
}
pub(crate) fn default_node_cap() -> usize {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximalRequest {
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    pub grid: Grid,
    pub tgrid: GeometricSeq,
    pub mode: MaximalMode,
    #[serde(default)]
    pub quad: QuadratureOpts,
    /// Maximum number of halvings of the logarithmic t-step.
    #[serde(default = "default_refinements")]
    pub max_refinements: u32,
    /// Stop refining once the field changes by less than this fraction of its maximum.
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    /// Cap on the number of t-values per axis.
    #[serde(default = "default_node_cap")]
    pub node_cap: usize,
}

impl MaximalRequest {
    pub fn new(f: FunctionSpec, g: FunctionSpec, grid: Grid, tgrid: GeometricSeq, mode: MaximalMode) -> Self {
        MaximalRequest {
            f,
            g,
            grid,
            tgrid,
            mode,
            quad: QuadratureOpts::default(),
            max_refinements: default_refinements(),
            refine_tol: default_refine_tol(),
            node_cap: default_node_cap(),
        }
    }

    pub(crate) fn refinement(&self) -> Refinement {
        Refinement { max_refinements: self.max_refinements, refine_tol: self.refine_tol, node_cap: self.node_cap }
    }
}

/// Call `eval(t1, t2)` on the pairs of `ts` selected by `mode`, skipping pairs
/// whose indices all fail `fresh` when it is given.
pub(crate) fn for_pairs<E>(ts: &[f64], mode: MaximalMode, fresh: Option<&dyn Fn(usize) -> bool>, mut eval: E) -> Result<()>
where
    E: FnMut(f64, f64) -> Result<()>,
{
    let is_new = |i: usize| fresh.is_none_or(|p| p(i));
    match mode {
        MaximalMode::Diagonal => {
            for (i, &t) in ts.iter().enumerate() {
                if is_new(i) {
                    eval(t, t)?;
                }
            }
        }
        MaximalMode::Biparam => {
            for (i, &t1) in ts.iter().enumerate() {
                for (j, &t2) in ts.iter().enumerate() {
                    if is_new(i) || is_new(j) {
                        eval(t1, t2)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Refinement controls shared by the discrete maximal functions.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Refinement {
    pub max_refinements: u32,
    pub refine_tol: f64,
    pub node_cap: usize,
}

/// Discrete supremum field with t-grid refinement.
///
/// `sup_at(x, ts, fresh)` returns the supremum at `x` over the pairs of `ts`
/// that involve an index accepted by `fresh`. The t-grid is refined by halving
/// its logarithmic step, visiting only the new pairs, until the field moves by
/// less than `refine_tol` (relative to its maximum), `max_refinements` is
/// reached, or the node cap would be exceeded.
pub(crate) fn refined_sup<S>(grid: &Grid, tgrid: &GeometricSeq, refine: Refinement, sup_at: S) -> Result<SampledField>
where
    S: Fn(&[f64], &[f64], Option<&dyn Fn(usize) -> bool>) -> Result<f64> + Sync,
{
    let ts0 = tgrid.points();
    let mut field = SampledField::from_fn(grid, |x| sup_at(x, &ts0, None))?;
    for level in 1..=refine.max_refinements {
        let ts = tgrid.refined_points(level);
        if ts.len() > refine.node_cap {
            break;
        }
        let odd = |i: usize| i % 2 == 1;
        let next = SampledField::from_fn(grid, |x| sup_at(x, &ts, Some(&odd)))?;
        let mut change: f64 = 0.0;
        for (old, new) in field.values.iter_mut().zip(&next.values) {
            if *new > *old {
                change = change.max(*new - *old);
                *old = *new;
            }
        }
        let scale = field.max().max(f64::MIN_POSITIVE);
        if change <= refine.refine_tol * scale {
            break;
        }
    }
    Ok(field)
}

/// `max |𝒜_t(f, g)(x)|` over the pairs of `ts` selected by `mode`.
///
/// With `piece = Some(k)` the k-th dyadic piece replaces the full average.
#[allow(clippy::too_many_arguments)]
fn sup_pairs(
    a: &Anisotropy,
    f: &FunctionSpec,
    g: &FunctionSpec,
    x: &[f64],
    ts: &[f64],
    mode: MaximalMode,
    piece: Option<u32>,
    quad: &QuadratureOpts,
    fresh: Option<&dyn Fn(usize) -> bool>,
) -> Result<f64> {
    let mut req = AverageRequest::new(f.clone(), g.clone(), x.to_vec(), 1.0, 1.0);
    req.quad = quad.clone();
    let mut best: f64 = 0.0;
    for_pairs(ts, mode, fresh, |t1, t2| {
        req.t1 = t1;
        req.t2 = t2;
        let v = match piece {
            None => average(a, &req)?,
            Some(k) => average_dyadic_piece(a, &req, k)?,
        };
        best = best.max(v.abs());
        Ok(())
    })?;
    Ok(best)
}

/// Discrete supremum over a t-grid at one point.
#[allow(clippy::too_many_arguments)]
pub fn sup_over_t(
    a: &Anisotropy,
    f: &FunctionSpec,
    g: &FunctionSpec,
    x: &[f64],
    ts: &[f64],
    mode: MaximalMode,
    piece: Option<u32>,
    quad: &QuadratureOpts,
) -> Result<f64> {
    sup_pairs(a, f, g, x, ts, mode, piece, quad, None)
}

/// Discrete maximal function on a grid.
///
/// The result is a lower bound for the true supremum and never decreases
/// under refinement of the t-grid.
pub fn maximal_estimate(a: &Anisotropy, req: &MaximalRequest) -> Result<SampledField> {
    req.grid.validate()?;
    req.tgrid.validate()?;
    let n = req.grid.dim();
    super::check_dim(n)?;
    req.f.validate(n)?;
    req.g.validate(n)?;
    refined_sup(&req.grid, &req.tgrid, req.refinement(), |x, ts, fresh| {
        sup_pairs(a, &req.f, &req.g, x, ts, req.mode, None, &req.quad, fresh)
    })
}

/// `‖field‖_r / (‖f‖_p ‖g‖_q)` on the scale-invariant line `1/r = 1/p + 1/q`.
pub fn norm_ratio(f: &FunctionSpec, g: &FunctionSpec, p: f64, q: f64, r: f64, field: &SampledField) -> Result<f64> {
    let inv = |v: f64| if v.is_infinite() { 0.0 } else { 1.0 / v };
    if (inv(r) - inv(p) - inv(q)).abs() > 1e-12 {
        return Err(Error::precondition(format!("1/r = {} differs from 1/p + 1/q = {}", inv(r), inv(p) + inv(q))));
    }
    let n = field.grid.dim();
    let den = lp_norm_of_spec(f, p, n)? * lp_norm_of_spec(g, q, n)?;
    if !(den > 0.0 && den.is_finite()) {
        return Err(Error::Degenerate(format!("denominator ‖f‖_p ‖g‖_q = {den}")));
    }
    Ok(lp_norm(field, r)? / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aniso(a1: f64, a2: f64) -> Anisotropy {
        Anisotropy::pair(a1, a2).unwrap()
    }

    #[test]
    fn constants_give_one() {
        let one = FunctionSpec::constant(1.0);
        let req = MaximalRequest::new(
            one.clone(),
            one,
            Grid::cube(2, -1.0, 1.0, 3).unwrap(),
            GeometricSeq::new(0.5, 2.0, 2.0).unwrap(),
            MaximalMode::Biparam,
        );
        let m = maximal_estimate(&aniso(2.0, 3.0), &req).unwrap();
        assert!(m.values.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn diagonal_below_biparam() {
        let f = FunctionSpec::ball(vec![0.0, 0.0], 0.5);
        let g = FunctionSpec::ball(vec![0.5, 0.0], 0.5);
        let mut req = MaximalRequest::new(
            f,
            g,
            Grid::cube(2, -1.5, 1.5, 4).unwrap(),
            GeometricSeq::new(0.1, 3.0, 1.5).unwrap(),
            MaximalMode::Diagonal,
        );
        req.max_refinements = 1;
        let a = aniso(2.0, 3.0);
        let d = maximal_estimate(&a, &req).unwrap();
        req.mode = MaximalMode::Biparam;
        let b = maximal_estimate(&a, &req).unwrap();
        for (x, y) in d.values.iter().zip(&b.values) {
            assert!(x <= y, "{x} > {y}");
        }
    }

    #[test]
    fn refinement_never_decreases() {
        let f = FunctionSpec::ball(vec![0.0, 0.0], 0.3);
        let g = FunctionSpec::ball(vec![0.0, 0.0], 1.0);
        let mut req = MaximalRequest::new(
            f,
            g,
            Grid::cube(2, 0.5, 1.5, 3).unwrap(),
            GeometricSeq::new(0.2, 4.0, 2.0).unwrap(),
            MaximalMode::Diagonal,
        );
        req.max_refinements = 0;
        let a = aniso(2.0, 2.0);
        let coarse = maximal_estimate(&a, &req).unwrap();
        req.max_refinements = 3;
        req.refine_tol = 0.0;
        let fine = maximal_estimate(&a, &req).unwrap();
        assert!(coarse.values.iter().zip(&fine.values).all(|(c, f)| c <= f));
    }

    #[test]
    fn norm_ratio_requires_scale_invariant_line() {
        let grid = Grid::cube(2, -1.0, 1.0, 3).unwrap();
        let field = SampledField::new(grid, vec![1.0; 9]).unwrap();
        let b = FunctionSpec::ball(vec![0.0, 0.0], 1.0);
        assert!(norm_ratio(&b, &b, 2.0, 2.0, 1.0, &field).unwrap() > 0.0);
        assert!(matches!(norm_ratio(&b, &b, 2.0, 2.0, 2.0, &field), Err(Error::Precondition(_))));
        let zero = FunctionSpec::constant(0.0);
        assert!(matches!(norm_ratio(&zero, &b, 2.0, 2.0, 1.0, &field), Err(Error::Degenerate(_))));
    }
}
