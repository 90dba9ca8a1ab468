//! Finite windows of Delone sets.

use crate::error::{DeloneError, Result};
use crate::geometry::{Point, ETA};
use crate::grid::{auto_cell, GridIndex};
use std::cmp::Ordering;

/// The window `X ∩ B_W(0)` of an implicitly infinite Delone set.
///
/// Points are sorted (tolerant lexicographic order) and pairwise farther
/// apart than [`ETA`]. A bucket grid with cell size equal to the minimum gap
/// backs all range queries.
#[derive(Debug, Clone)]
pub struct WindowedDeloneSet {
    dim: usize,
    window_radius: f64,
    points: Vec<Point>,
    labels: Option<Vec<u32>>,
    r_declared: Option<f64>,
    big_r_declared: Option<f64>,
    meta: serde_json::Value,
    min_gap: f64,
    index: GridIndex,
}

/// Builds a validated window from raw points.
pub fn build_windowed_set(
    points: Vec<Point>,
    dim: usize,
    window_radius: f64,
    meta: serde_json::Value,
) -> Result<WindowedDeloneSet> {
    WindowedDeloneSet::new(dim, window_radius, points, None).map(|s| s.with_meta(meta))
}

impl WindowedDeloneSet {
    pub fn new(
        dim: usize,
        window_radius: f64,
        points: Vec<Point>,
        labels: Option<Vec<u32>>,
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(DeloneError::UnsupportedDimension(dim));
        }
        if !(window_radius > 0.0 && window_radius.is_finite()) {
            return Err(DeloneError::InvalidInput(format!(
                "window radius must be positive, got {window_radius}"
            )));
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(DeloneError::InvalidInput(format!(
                    "{} labels for {} points",
                    l.len(),
                    points.len()
                )));
            }
        }
        for p in &points {
            if !p.is_finite() || (dim == 1 && p.y() != 0.0) {
                return Err(DeloneError::InvalidInput(format!("bad coordinates {p:?}")));
            }
            if p.norm() > window_radius + ETA {
                return Err(DeloneError::PointOutsideWindow {
                    point: *p,
                    window: window_radius,
                });
            }
        }

        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].tolerant_cmp(&points[b]));
        let sorted: Vec<Point> = order.iter().map(|&i| points[i]).collect();
        let labels = labels.map(|l| order.iter().map(|&i| l[i]).collect::<Vec<_>>());

        let coarse = GridIndex::new(&sorted, dim, auto_cell(sorted.len(), dim, window_radius));
        let (min_gap, pair) = min_pairwise(&sorted, dim, &coarse);
        if let Some((a, b)) = pair {
            if min_gap <= ETA {
                return Err(DeloneError::DuplicatePoints {
                    a: sorted[a],
                    b: sorted[b],
                    tol: ETA,
                });
            }
        }
        let cell = if min_gap.is_finite() {
            min_gap.max(auto_cell(sorted.len(), dim, window_radius) / 8.0)
        } else {
            window_radius
        };
        let index = GridIndex::new(&sorted, dim, cell);
        Ok(WindowedDeloneSet {
            dim,
            window_radius,
            points: sorted,
            labels,
            r_declared: None,
            big_r_declared: None,
            meta: serde_json::Value::Null,
            min_gap,
            index,
        })
    }

    /// Attaches analytically known Delone constants `(r, R)`.
    ///
    /// The packing constant is checked exactly against the minimum gap; the
    /// covering constant is only recorded (see [`Self::check_declared`]).
    pub fn with_declared(mut self, r: Option<f64>, big_r: Option<f64>) -> Result<Self> {
        if let Some(r) = r {
            if self.points.len() > 1 && self.min_gap < 2.0 * r - 1e-9 {
                return Err(DeloneError::InvalidInput(format!(
                    "declared r = {r} but two points are {} apart",
                    self.min_gap
                )));
            }
        }
        self.r_declared = r;
        self.big_r_declared = big_r;
        Ok(self)
    }

    pub fn with_meta(mut self, meta: serde_json::Value) -> Self {
        self.meta = meta;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> Option<u32> {
        self.labels.as_ref().map(|l| l[i])
    }

    pub fn r_declared(&self) -> Option<f64> {
        self.r_declared
    }

    pub fn big_r_declared(&self) -> Option<f64> {
        self.big_r_declared
    }

    pub fn meta(&self) -> &serde_json::Value {
        &self.meta
    }

    /// Minimum pairwise distance (infinite for fewer than two points).
    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn index(&self) -> &GridIndex {
        &self.index
    }

    /// Errors unless `B_radius(center)` lies inside the window.
    pub fn require_ball(&self, center: Point, radius: f64) -> Result<()> {
        if center.norm() + radius <= self.window_radius + ETA {
            Ok(())
        } else {
            Err(DeloneError::InsufficientWindow {
                center,
                radius,
                window: self.window_radius,
            })
        }
    }

    /// Indices of points in the open (or closed) ball, sorted.
    pub fn indices_in_ball(&self, center: Point, radius: f64, closed: bool) -> Vec<usize> {
        self.index.within(&self.points, center, radius, closed)
    }

    /// Indices of points with norm at most `radius`.
    pub fn interior_indices(&self, radius: f64) -> Vec<usize> {
        if radius < 0.0 {
            return Vec::new();
        }
        self.indices_in_ball(Point::ORIGIN, radius + ETA, true)
    }

    pub fn nearest(&self, q: Point) -> Option<(usize, f64)> {
        self.index.nearest(&self.points, q)
    }

    /// Index of a point equal to `q` within `tol`.
    pub fn find(&self, q: Point, tol: f64) -> Option<usize> {
        let mut hit = None;
        self.index.for_each_candidate(q, tol, |i| {
            if hit.is_none() && self.points[i].approx_eq(q, tol) {
                hit = Some(i);
            }
        });
        hit
    }

    /// The set `X − v`, restricted to the largest centered window it covers.
    pub fn translate(&self, v: Point) -> Result<Self> {
        let w = self.window_radius - v.norm();
        if w <= 0.0 {
            return Err(DeloneError::WindowTooSmall(format!(
                "translation by {v} leaves no window"
            )));
        }
        let mut pts = Vec::new();
        let mut labels = self.labels.as_ref().map(|_| Vec::new());
        for (i, p) in self.points.iter().enumerate() {
            let q = *p - v;
            if q.norm() <= w {
                pts.push(q);
                if let Some(l) = labels.as_mut() {
                    l.push(self.labels.as_ref().unwrap()[i]);
                }
            }
        }
        let mut meta = self.meta.clone();
        if let serde_json::Value::Object(m) = &mut meta {
            m.insert("translated_by".into(), serde_json::json!(v.coords(self.dim)));
        }
        Self::new(self.dim, w, pts, labels)?
            .with_declared(self.r_declared, self.big_r_declared)
            .map(|s| s.with_meta(meta))
    }

    /// The same set seen through a smaller window.
    pub fn restrict(&self, radius: f64) -> Result<Self> {
        if radius > self.window_radius + ETA {
            return Err(DeloneError::WindowTooSmall(format!(
                "cannot widen window {} to {radius}",
                self.window_radius
            )));
        }
        let idx = self.interior_indices(radius.min(self.window_radius));
        let pts = idx.iter().map(|&i| self.points[i]).collect();
        let labels = self.labels.as_ref().map(|l| idx.iter().map(|&i| l[i]).collect());
        Self::new(self.dim, radius, pts, labels)?
            .with_declared(self.r_declared, self.big_r_declared)
            .map(|s| s.with_meta(self.meta.clone()))
    }

    /// Drops labels, keeping points.
    pub fn forget_labels(&self) -> Self {
        let mut s = self.clone();
        s.labels = None;
        s
    }

    /// Copy with the point at index `i` removed.
    pub fn without_point(&self, i: usize) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.remove(i);
        let labels = self.labels.clone().map(|mut l| {
            l.remove(i);
            l
        });
        Self::new(self.dim, self.window_radius, pts, labels)?
            .with_declared(self.r_declared, self.big_r_declared)
            .map(|s| s.with_meta(self.meta.clone()))
    }

    /// Same points and labels within [`ETA`], regardless of window metadata.
    pub fn same_points(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.len() == other.len()
            && self.labels.is_some() == other.labels.is_some()
            && self
                .points
                .iter()
                .enumerate()
                .all(|(i, p)| match other.find(*p, ETA) {
                    Some(j) => self.label(i) == other.label(j),
                    None => false,
                })
    }

    /// Compares declared Delone constants against the data.
    ///
    /// The covering constant is sampled on a grid of the interior
    /// `B_{W − R}(0)` with step `R / 8`.
    pub fn check_declared(&self) -> DeclaredCheck {
        let packing_ok = self
            .r_declared
            .map(|r| self.points.len() < 2 || self.min_gap >= 2.0 * r - 1e-9);
        let mut worst_gap = None;
        if let Some(big_r) = self.big_r_declared {
            let region = self.window_radius - big_r;
            if region > 0.0 && !self.points.is_empty() {
                let cov = crate::covering::covering_radius(
                    &self.points,
                    self.dim,
                    region,
                    big_r / 8.0,
                    Some(&self.index),
                );
                if let Ok(c) = cov {
                    worst_gap = Some(c.value);
                }
            }
        }
        let covering_ok = match (self.big_r_declared, worst_gap) {
            (Some(big_r), Some(g)) => Some(g <= big_r + 1e-9),
            _ => None,
        };
        DeclaredCheck {
            packing_ok,
            covering_ok,
            measured_min_gap: self.min_gap,
            measured_covering: worst_gap,
        }
    }
}

/// Result of [`WindowedDeloneSet::check_declared`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeclaredCheck {
    pub packing_ok: Option<bool>,
    pub covering_ok: Option<bool>,
    pub measured_min_gap: f64,
    pub measured_covering: Option<f64>,
}

pub(crate) fn min_pairwise(points: &[Point], dim: usize, index: &GridIndex) -> (f64, Option<(usize, usize)>) {
    let mut best = f64::INFINITY;
    let mut pair = None;
    if dim == 1 {
        for (i, w) in points.windows(2).enumerate() {
            let d = (w[1].x() - w[0].x()).abs();
            if d < best {
                best = d;
                pair = Some((i, i + 1));
            }
        }
        return (best, pair);
    }
    for (i, p) in points.iter().enumerate() {
        if let Some((j, d)) = index.nearest_other(points, *p, i) {
            if d < best {
                best = d;
                pair = Some((i.min(j), i.max(j)));
            }
        }
    }
    (best, pair)
}

/// Min distance between two of `points` (sorted in 1D) and the pair.
pub(crate) fn min_pairwise_of(points: &[Point], dim: usize) -> (f64, Option<(usize, usize)>) {
    if points.len() < 2 {
        return (f64::INFINITY, None);
    }
    let extent = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let index = GridIndex::new(points, dim, crate::grid::auto_cell(points.len(), dim, extent));
    min_pairwise(points, dim, &index)
}

/// Tolerant lexicographic comparison of two points, exposed for sorting
/// offset clouds consistently across modules.
pub fn point_order(a: &Point, b: &Point) -> Ordering {
    a.tolerant_cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn line(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::on_line(x)).collect()
    }

    #[test]
    fn small_integer_window_is_valid() {
        let s = build_windowed_set(line(&[2.0, -1.0, 0.0, 1.0, -2.0]), 1, 2.5, json!({})).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.points()[0], Point::on_line(-2.0));
        assert_eq!(s.min_gap(), 1.0);
    }

    #[test]
    fn near_duplicates_are_rejected() {
        let err = build_windowed_set(line(&[0.0, 1e-12]), 1, 1.0, json!({})).unwrap_err();
        assert!(matches!(err, DeloneError::DuplicatePoints { .. }));
    }

    #[test]
    fn points_outside_the_window_are_rejected() {
        let err = build_windowed_set(line(&[0.0, 3.0]), 1, 2.0, json!({})).unwrap_err();
        assert!(matches!(err, DeloneError::PointOutsideWindow { .. }));
    }

    #[test]
    fn dimension_three_is_unsupported() {
        let err = build_windowed_set(vec![], 3, 2.0, json!({})).unwrap_err();
        assert!(matches!(err, DeloneError::UnsupportedDimension(3)));
    }

    #[test]
    fn min_gap_in_the_plane() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(0.6, 0.8),
        ];
        let s = WindowedDeloneSet::new(2, 2.0, pts, None).unwrap();
        let expect = (0.4f64 * 0.4 + 0.8 * 0.8).sqrt().min((0.6f64 * 0.6 + 0.2 * 0.2).sqrt());
        assert!((s.min_gap() - expect).abs() < 1e-12);
    }

    #[test]
    fn declared_packing_constant_is_checked() {
        let s = WindowedDeloneSet::new(1, 3.0, line(&[-1.0, 0.0, 1.0]), None).unwrap();
        assert!(s.clone().with_declared(Some(0.5), None).is_ok());
        assert!(s.with_declared(Some(0.6), None).is_err());
    }

    #[test]
    fn translation_shrinks_window() {
        let pts = (-10..=10).map(|i| Point::on_line(i as f64)).collect();
        let s = WindowedDeloneSet::new(1, 10.0, pts, None).unwrap();
        let t = s.translate(Point::on_line(0.5)).unwrap();
        assert_eq!(t.window_radius(), 9.5);
        assert_eq!(t.points()[0], Point::on_line(-9.5));
        assert_eq!(t.len(), 20);
    }
}
