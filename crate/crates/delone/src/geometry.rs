//! Points of the ambient space.
//!
//! Dimensions 1 and 2 share one representation: a point carries two
//! coordinates and one-dimensional data keeps the second at zero. The owning
//! set records the dimension.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Identity tolerance: two coordinates closer than this are the same point.
pub const ETA: f64 = 1e-9;

/// Resolution of the integer keys used to bucket offset clouds.
///
/// Coarser than [`ETA`] so that values equal within `ETA` round to the same
/// integer except when they straddle a rounding boundary, which the class
/// tables detect and probe.
pub const KEY_RESOLUTION: f64 = 1e-6;

#[derive(Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Point(pub [f64; 2]);

impl Point {
    pub const ORIGIN: Point = Point([0.0, 0.0]);

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point([x, y])
    }

    #[inline]
    pub const fn on_line(x: f64) -> Self {
        Point([x, 0.0])
    }

    /// Builds a point from a coordinate slice of length 1 or 2.
    pub fn from_slice(c: &[f64]) -> Option<Self> {
        match c {
            [x] => Some(Point([*x, 0.0])),
            [x, y] => Some(Point([*x, *y])),
            _ => None,
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn coords(&self, dim: usize) -> &[f64] {
        &self.0[..dim]
    }

    #[inline]
    pub fn dot(&self, o: Point) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1]
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(*self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.0[0].hypot(self.0[1])
    }

    #[inline]
    pub fn dist(&self, o: Point) -> f64 {
        (*self - o).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0[0].is_finite() && self.0[1].is_finite()
    }

    /// Coordinatewise equality within `tol`.
    #[inline]
    pub fn approx_eq(&self, o: Point, tol: f64) -> bool {
        (self.0[0] - o.0[0]).abs() <= tol && (self.0[1] - o.0[1]).abs() <= tol
    }

    /// Lexicographic order on raw coordinates.
    pub fn lex_cmp(&self, o: &Point) -> Ordering {
        self.0[0]
            .total_cmp(&o.0[0])
            .then_with(|| self.0[1].total_cmp(&o.0[1]))
    }

    /// Integer key of the point at [`KEY_RESOLUTION`].
    #[inline]
    pub fn quantized(&self) -> [i64; 2] {
        [quantize(self.0[0]), quantize(self.0[1])]
    }

    /// Lexicographic order that treats coordinates equal within the key
    /// resolution as equal; stable under the floating noise of translation.
    pub fn tolerant_cmp(&self, o: &Point) -> Ordering {
        self.quantized()
            .cmp(&o.quantized())
            .then_with(|| self.lex_cmp(o))
    }
}

#[inline]
pub(crate) fn quantize(v: f64) -> i64 {
    (v / KEY_RESOLUTION).round() as i64
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0[1] == 0.0 {
            write!(f, "({})", self.0[0])
        } else {
            write!(f, "({}, {})", self.0[0], self.0[1])
        }
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point([-self.0[0], -self.0[1]])
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point([self.0[0] * s, self.0[1] * s])
    }
}

/// Volume of the unit ball in dimension `dim` (1 or 2).
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        _ => std::f64::consts::PI,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerant_order_ignores_noise_in_first_coordinate() {
        let a = Point::new(1.0, 5.0);
        let b = Point::new(1.0 + 1e-13, 2.0);
        assert_eq!(a.lex_cmp(&b), Ordering::Less);
        assert_eq!(a.tolerant_cmp(&b), Ordering::Greater);
    }

    #[test]
    fn from_slice_rejects_three_coordinates() {
        assert!(Point::from_slice(&[1.0, 2.0, 3.0]).is_none());
        assert_eq!(Point::from_slice(&[2.5]), Some(Point::on_line(2.5)));
    }
}
