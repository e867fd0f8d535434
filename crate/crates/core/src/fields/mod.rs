//! Test functions, grids, sphere rules, norms and the Hardy–Littlewood maximal function.

mod function;
mod grid;
mod maximal;
mod sphere;

pub use function::{lp_norm_of_spec, FunctionSpec, DEFAULT_LOG_FLOOR};
pub use grid::{lp_norm, Axis, GeometricSeq, Grid, SampledField};
pub use maximal::{ball_average, hl_max, hl_max_at, spherical_max};
pub use sphere::{ball_volume, sphere_area, sphere_rule, spherical_average, SphereRule};

use crate::error::{Error, Result};

pub(crate) fn check_space_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::Dimension(n))
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}
