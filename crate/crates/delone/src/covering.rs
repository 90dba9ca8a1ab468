//! Covering radius of a finite site set over a ball, on a lattice of test points.

use crate::error::{DeloneError, Result};
use crate::geometry::Point;
use crate::grid::{auto_cell, GridIndex};
use serde::Serialize;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveringRadius {
    /// Max over test points of the distance to the nearest site.
    pub value: f64,
    /// Spacing of the test-point lattice; the true covering radius over the
    /// region is at most `value + resolution * sqrt(d) / 2`.
    pub resolution: f64,
    /// Test point attaining `value`.
    pub witness: Point,
}

#[derive(PartialEq)]
struct Block {
    upper: f64,
    lo: [i64; 2],
    hi: [i64; 2],
}

impl Eq for Block {}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Block {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

/// Max over the test points `h·ℤᵈ ∩ B_ρ(0)` of the distance to the nearest
/// site.
///
/// Exhaustive in effect but evaluated best-first over dyadic blocks of test
/// points: a block whose center is at distance `D` from the sites and whose
/// half-diagonal is `δ` cannot hold a test point farther than `D + δ`, so
/// blocks with `D + δ` below the running maximum are skipped.
pub fn covering_radius(
    sites: &[Point],
    dim: usize,
    region_radius: f64,
    resolution: f64,
    index: Option<&GridIndex>,
) -> Result<CoveringRadius> {
    if sites.is_empty() {
        return Err(DeloneError::EmptySites);
    }
    if !(resolution > 0.0) || !(region_radius >= 0.0) {
        return Err(DeloneError::InvalidInput(format!(
            "covering radius needs a positive resolution and region (got {resolution}, {region_radius})"
        )));
    }
    let owned;
    let index = match index {
        Some(i) => i,
        None => {
            let extent = sites.iter().map(|p| p.norm()).fold(region_radius, f64::max);
            owned = GridIndex::new(sites, dim, auto_cell(sites.len(), dim, extent));
            &owned
        }
    };
    let h = resolution;
    let k = (region_radius / h).floor() as i64;
    let rho2 = region_radius * region_radius * (1.0 + 1e-12);
    let lo = [-k, if dim > 1 { -k } else { 0 }];
    let hi = [k, if dim > 1 { k } else { 0 }];

    let nearest = |p: Point| index.nearest(sites, p).map(|(_, d)| d).unwrap_or(f64::INFINITY);
    let point_at = |i: i64, j: i64| Point::new(i as f64 * h, j as f64 * h);

    let bound = |lo: [i64; 2], hi: [i64; 2]| -> Option<f64> {
        // Skip blocks that miss the region.
        let mut near2 = 0.0;
        for a in 0..2 {
            let (l, u) = (lo[a] as f64 * h, hi[a] as f64 * h);
            let c = 0.0f64.clamp(l, u);
            near2 += c * c;
        }
        if near2 > rho2 {
            return None;
        }
        let cx = (lo[0] + hi[0]) as f64 * 0.5 * h;
        let cy = (lo[1] + hi[1]) as f64 * 0.5 * h;
        let hx = (hi[0] - lo[0]) as f64 * 0.5 * h;
        let hy = (hi[1] - lo[1]) as f64 * 0.5 * h;
        Some(nearest(Point::new(cx, cy)) + hx.hypot(hy))
    };

    let mut best = CoveringRadius {
        value: 0.0,
        resolution: h,
        witness: Point::ORIGIN,
    };
    let mut have_point = false;
    let mut heap = BinaryHeap::new();
    if let Some(upper) = bound(lo, hi) {
        heap.push(Block { upper, lo, hi });
    }
    while let Some(b) = heap.pop() {
        if have_point && b.upper <= best.value {
            break;
        }
        if b.lo == b.hi {
            let p = point_at(b.lo[0], b.lo[1]);
            if p.norm_sq() <= rho2 {
                let d = nearest(p);
                if !have_point || d > best.value {
                    best.value = d;
                    best.witness = p;
                    have_point = true;
                }
            }
            continue;
        }
        let axis = if b.hi[0] - b.lo[0] >= b.hi[1] - b.lo[1] { 0 } else { 1 };
        let mid = (b.lo[axis] + b.hi[axis]).div_euclid(2);
        let mut hi_a = b.hi;
        hi_a[axis] = mid;
        let mut lo_b = b.lo;
        lo_b[axis] = mid + 1;
        for (l, u) in [(b.lo, hi_a), (lo_b, b.hi)] {
            if let Some(upper) = bound(l, u) {
                if !have_point || upper > best.value {
                    heap.push(Block { upper, lo: l, hi: u });
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(sites: &[Point], dim: usize, rho: f64, h: f64) -> f64 {
        let k = (rho / h).floor() as i64;
        let jr = if dim > 1 { k } else { 0 };
        let mut best = 0.0f64;
        for i in -k..=k {
            for j in -jr..=jr {
                let p = Point::new(i as f64 * h, j as f64 * h);
                if p.norm_sq() <= rho * rho * (1.0 + 1e-12) {
                    let d = sites.iter().map(|s| s.dist(p)).fold(f64::INFINITY, f64::min);
                    best = best.max(d);
                }
            }
        }
        best
    }

    #[test]
    fn integer_sites_have_covering_radius_one_half() {
        let sites: Vec<Point> = (-100..=100).map(|i| Point::on_line(i as f64)).collect();
        let c = covering_radius(&sites, 1, 50.0, 0.125, None).unwrap();
        assert_eq!(c.value, 0.5);
    }

    #[test]
    fn single_site_covers_region_radius() {
        let c = covering_radius(&[Point::ORIGIN], 1, 10.0, 0.1, None).unwrap();
        assert!((c.value - 10.0).abs() < 0.1);
        let c = covering_radius(&[Point::ORIGIN], 2, 10.0, 0.1, None).unwrap();
        assert!((c.value - 10.0).abs() < 0.1 * 2f64.sqrt());
    }

    #[test]
    fn branch_and_bound_matches_brute_force_in_the_plane() {
        let sites: Vec<Point> = (0..60)
            .map(|i| {
                let t = i as f64;
                Point::new(((t * 0.618034).fract() - 0.5) * 14.0, ((t * 0.41421).fract() - 0.5) * 14.0)
            })
            .collect();
        for rho in [2.0, 5.0, 6.5] {
            let c = covering_radius(&sites, 2, rho, 0.25, None).unwrap();
            let b = brute(&sites, 2, rho, 0.25);
            assert!((c.value - b).abs() < 1e-12, "{rho}: {} vs {b}", c.value);
        }
    }

    #[test]
    fn empty_sites_are_an_error() {
        assert!(matches!(
            covering_radius(&[], 1, 1.0, 0.1, None),
            Err(DeloneError::EmptySites)
        ));
    }
}
