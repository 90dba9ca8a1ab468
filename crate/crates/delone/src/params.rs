//! Empirical Delone constants of a window.

use crate::covering::covering_radius;
use crate::error::{DeloneError, Result};
use crate::set::WindowedDeloneSet;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeloneParams {
    /// Half the minimum gap between interior points.
    pub r_hat: f64,
    /// Covering radius over the interior test grid.
    pub big_r_hat: f64,
    /// Test-grid step used for `big_r_hat`.
    pub resolution: f64,
    /// Radius of the interior region both estimates were taken on.
    pub interior_radius: f64,
}

/// Estimates `(r̂, R̂)` with the default grid step `r̂ / 4`.
pub fn estimate_delone_params(x: &WindowedDeloneSet) -> Result<DeloneParams> {
    estimate_delone_params_with(x, None)
}

/// Estimates `(r̂, R̂)` on the interior `B_{W − R_guess}(0)`.
///
/// `R_guess` is twice a first covering estimate over `B_{W/2}(0)`, so the
/// nearest point of every interior test point lies inside the window.
pub fn estimate_delone_params_with(x: &WindowedDeloneSet, resolution: Option<f64>) -> Result<DeloneParams> {
    let w = x.window_radius();
    let half = x.interior_indices(w / 2.0);
    if half.len() < 2 {
        return Err(DeloneError::WindowTooSmall(format!(
            "B_{}(0) holds {} point(s); need at least 2",
            w / 2.0,
            half.len()
        )));
    }
    let gap = |idx: &[usize]| {
        idx.iter()
            .filter_map(|&i| x.index().nearest_other(x.points(), x.points()[i], i))
            .map(|(_, d)| d)
            .fold(f64::INFINITY, f64::min)
    };
    let r0 = gap(&half) / 2.0;
    let h = resolution.unwrap_or(r0 / 4.0);
    let first = covering_radius(x.points(), x.dim(), w / 2.0, h, Some(x.index()))?;
    let guess = 2.0 * first.value;
    let interior = (w - guess).max(w / 2.0);
    let idx = x.interior_indices(interior);
    let r_hat = gap(&idx) / 2.0;
    let h = resolution.unwrap_or(r_hat / 4.0);
    let cov = covering_radius(x.points(), x.dim(), interior, h, Some(x.index()))?;
    Ok(DeloneParams {
        r_hat,
        big_r_hat: cov.value,
        resolution: h,
        interior_radius: interior,
    })
}
