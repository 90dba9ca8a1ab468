//! Repetitivity function, linear-repetitivity constant and the
//! repetitivity check for factors.
//!
//! All statistics use `X`-centered patches: an occurrence is a point
//! `x ∈ X` whose centered `R`-patch lies in the class.

use crate::atlas::{r_atlas, Atlas};
use crate::error::{DeloneError, Result};
use crate::geometry::Point;
use crate::set::WindowedDeloneSet;
use rayon::prelude::*;
use serde::Serialize;

pub use crate::covering::{covering_radius, CoveringRadius};

/// Default test-grid step: a quarter of `r̂`, half the minimum gap.
pub fn default_resolution(x: &WindowedDeloneSet) -> f64 {
    x.min_gap() / 8.0
}

/// Covering radius of the occurrences of one atlas class.
///
/// Test points are taken in `B_{W − 2R}(0)`, shrunk to `B_{W − R − c}(0)`
/// when a first estimate `c` exceeds `R`, so that the nearest occurrence of
/// every test point is one the window can see.
pub fn class_covering(x: &WindowedDeloneSet, atlas: &Atlas, id: usize, resolution: f64) -> Result<f64> {
    let w = x.window_radius();
    let r = atlas.radius;
    let insufficient = || DeloneError::InsufficientWindow {
        center: Point::ORIGIN,
        radius: 2.0 * r,
        window: w,
    };
    let region = w - 2.0 * r;
    if region <= 0.0 {
        return Err(insufficient());
    }
    let occ = atlas.occurrences(id);
    let first = covering_radius(occ, x.dim(), region, resolution, None)?.value;
    let shrunk = w - r - first;
    if shrunk >= region {
        return Ok(first);
    }
    if shrunk <= resolution {
        return Err(insufficient());
    }
    Ok(covering_radius(occ, x.dim(), shrunk, resolution, None)?.value)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRepetitivity {
    pub radius: f64,
    pub class_index: usize,
    pub multiplicity: usize,
    pub diameter: f64,
    pub max_offset_norm: f64,
    pub covering: f64,
    /// `(covering + diameter) / diameter`; absent for single-point patches.
    pub ratio: Option<f64>,
}

fn class_stats(x: &WindowedDeloneSet, radius: f64, resolution: f64) -> Result<Vec<ClassRepetitivity>> {
    if radius >= x.window_radius() / 4.0 {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius: 4.0 * radius,
            window: x.window_radius(),
        });
    }
    let atlas = r_atlas(x, radius)?;
    (0..atlas.len())
        .into_par_iter()
        .map(|id| {
            let c = &atlas.classes[id];
            let covering = class_covering(x, &atlas, id, resolution)?;
            let diameter = c.diameter();
            Ok(ClassRepetitivity {
                radius,
                class_index: id,
                multiplicity: c.multiplicity,
                diameter,
                max_offset_norm: c.max_offset_norm(),
                covering,
                ratio: (diameter > 0.0).then(|| (covering + diameter) / diameter),
            })
        })
        .collect()
}

/// `M̂_X(R)`: max over `R`-classes of occurrence covering radius plus the
/// largest offset of the class.
pub fn repetitivity_function(x: &WindowedDeloneSet, radius: f64) -> Result<f64> {
    repetitivity_function_with(x, radius, default_resolution(x))
}

pub fn repetitivity_function_with(x: &WindowedDeloneSet, radius: f64, resolution: f64) -> Result<f64> {
    Ok(class_stats(x, radius, resolution)?
        .iter()
        .map(|c| c.covering + c.max_offset_norm)
        .fold(0.0, f64::max))
}

/// Linear-repetitivity estimate over a grid of radii.
#[derive(Debug, Clone, Serialize)]
pub struct RepetitivityEstimate {
    #[serde(rename = "R_grid")]
    pub r_grid: Vec<f64>,
    #[serde(rename = "M_of_R")]
    pub m_of_r: Vec<f64>,
    #[serde(rename = "L_hat")]
    pub l_hat: f64,
    pub per_class: Vec<ClassRepetitivity>,
    /// Smallest grid radius from which `M̂(R) ≤ 2(L̂ + 1)R` holds for every
    /// larger grid radius.
    pub threshold_radius: Option<f64>,
    pub resolution: f64,
    pub window_radius: f64,
}

impl RepetitivityEstimate {
    /// `M̂` is nondecreasing along the grid up to `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.m_of_r.windows(2).all(|w| w[1] >= w[0] - slack)
    }
}

pub fn lr_constant(x: &WindowedDeloneSet, r_grid: &[f64]) -> Result<RepetitivityEstimate> {
    lr_constant_with(x, r_grid, default_resolution(x))
}

/// `L̂` = max over classes and radii of `(covering + diam) / diam`, at least 1.
pub fn lr_constant_with(x: &WindowedDeloneSet, r_grid: &[f64], resolution: f64) -> Result<RepetitivityEstimate> {
    if r_grid.is_empty() {
        return Err(DeloneError::InvalidInput("empty radius grid".into()));
    }
    let mut grid = r_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut m_of_r = Vec::with_capacity(grid.len());
    let mut per_class = Vec::new();
    for &r in &grid {
        let stats = class_stats(x, r, resolution)?;
        m_of_r.push(stats.iter().map(|c| c.covering + c.max_offset_norm).fold(0.0, f64::max));
        per_class.extend(stats);
    }
    let l_hat = per_class.iter().filter_map(|c| c.ratio).fold(1.0, f64::max);
    let ok: Vec<bool> = grid
        .iter()
        .zip(&m_of_r)
        .map(|(&r, &m)| m <= 2.0 * (l_hat + 1.0) * r)
        .collect();
    let threshold_radius = (0..grid.len())
        .find(|&i| ok[i..].iter().all(|&b| b))
        .map(|i| grid[i]);
    Ok(RepetitivityEstimate {
        r_grid: grid,
        m_of_r,
        l_hat,
        per_class,
        threshold_radius,
        resolution,
        window_radius: x.window_radius(),
    })
}

/// One class in [`check_factor_lr`].
#[derive(Debug, Clone, Serialize)]
pub struct FactorLrClass {
    pub radius: f64,
    pub class_index: usize,
    pub diameter: f64,
    /// Radius that every ball needs to hold an occurrence with its whole patch.
    pub needed: f64,
    /// `5 L diam(P)`.
    pub allowed: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorLrReport {
    pub l: f64,
    pub radii: Vec<f64>,
    pub classes: Vec<FactorLrClass>,
    /// Smallest tested diameter from which every class passes.
    pub threshold_diameter: Option<f64>,
    pub smallest_diameter: Option<f64>,
    pub all_passed: bool,
}

/// Checks that every ball of radius `5 L diam(P)` holds a copy of `P`, for
/// the atlas classes of `y` at the given radii.
///
/// A ball of radius `c + m` around any test point holds an occurrence
/// center (covering radius `c`) together with its patch (max offset norm
/// `m`), so `c + m ≤ 5 L diam(P)` certifies the class. Failures are
/// reported, not raised.
pub fn check_factor_lr(y: &WindowedDeloneSet, l: f64, radii: &[f64]) -> Result<FactorLrReport> {
    let res = default_resolution(y);
    let mut classes = Vec::new();
    for &r in radii {
        for c in class_stats(y, r, res)? {
            if c.diameter <= 0.0 {
                continue;
            }
            let needed = c.covering + c.max_offset_norm;
            let allowed = 5.0 * l * c.diameter;
            classes.push(FactorLrClass {
                radius: r,
                class_index: c.class_index,
                diameter: c.diameter,
                needed,
                allowed,
                passed: needed <= allowed,
            });
        }
    }
    let mut diams: Vec<f64> = classes.iter().map(|c| c.diameter).collect();
    diams.sort_by(f64::total_cmp);
    diams.dedup();
    let threshold_diameter = diams
        .iter()
        .copied()
        .find(|&d| classes.iter().filter(|c| c.diameter >= d).all(|c| c.passed));
    Ok(FactorLrReport {
        l,
        radii: radii.to_vec(),
        all_passed: classes.iter().all(|c| c.passed),
        smallest_diameter: diams.first().copied(),
        threshold_diameter,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_lattice, generate_substitution_1d, SubstitutionRule1D};

    #[test]
    fn integers() {
        let z = generate_lattice(&[vec![1.0]], 100.0).unwrap();
        let m = repetitivity_function(&z, 2.5).unwrap();
        assert!((m - 2.5).abs() < 1e-9, "{m}");
        let est = lr_constant(&z, &[2.5, 5.0]).unwrap();
        assert!(est.l_hat >= 1.0 && est.l_hat <= 2.0, "{}", est.l_hat);
    }

    #[test]
    fn fibonacci_linear_envelope() {
        let x = generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 3000.0).unwrap().forget_labels();
        let est = lr_constant(&x, &[2.0, 4.0, 8.0, 16.0]).unwrap();
        assert!(est.is_monotone(2.0 * est.resolution));
        for (&r, &m) in est.r_grid.iter().zip(&est.m_of_r) {
            assert!(m <= 2.0 * (est.l_hat + 1.0) * r);
        }
        assert!(est.l_hat > 1.0 && est.l_hat < 10.0, "{}", est.l_hat);
    }

    #[test]
    fn halving_l_can_fail_without_error() {
        let x = generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 2000.0).unwrap().forget_labels();
        let est = lr_constant(&x, &[3.0, 6.0]).unwrap();
        let ok = check_factor_lr(&x, est.l_hat, &[3.0, 6.0]).unwrap();
        assert!(ok.all_passed);
        assert_eq!(ok.threshold_diameter, ok.smallest_diameter);
        let tight = check_factor_lr(&x, 0.05, &[3.0, 6.0]).unwrap();
        assert!(!tight.all_passed);
    }
}
