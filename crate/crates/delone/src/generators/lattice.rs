use crate::error::{DeloneError, Result};
use crate::geometry::Point;
use crate::set::WindowedDeloneSet;
use serde_json::json;

/// All points of the lattice spanned by the columns of `basis` inside `B_W(0)`.
///
/// `basis` is `d×d` (row-major, columns are basis vectors). The declared
/// constants are half the shortest vector and, in the plane, the
/// circumradius of the acute triangle of a reduced basis.
pub fn generate_lattice(basis: &[Vec<f64>], window_radius: f64) -> Result<WindowedDeloneSet> {
    let dim = basis.len();
    if basis.iter().any(|r| r.len() != dim) {
        return Err(DeloneError::InvalidInput("lattice basis must be square".into()));
    }
    match dim {
        1 => {
            let b = basis[0][0];
            if b.abs() < 1e-12 || !b.is_finite() {
                return Err(DeloneError::SingularBasis);
            }
            let step = b.abs();
            let n = (window_radius / step + 1e-9).floor() as i64;
            let pts = (-n..=n).map(|i| Point::on_line(i as f64 * step)).collect();
            WindowedDeloneSet::new(1, window_radius, pts, None)?
                .with_declared(Some(step / 2.0), Some(step / 2.0))
                .map(|s| s.with_meta(json!({"model": "lattice", "basis": basis})))
        }
        2 => {
            let b1 = Point::new(basis[0][0], basis[1][0]);
            let b2 = Point::new(basis[0][1], basis[1][1]);
            let det = b1.x() * b2.y() - b1.y() * b2.x();
            if det.abs() < 1e-12 || !det.is_finite() {
                return Err(DeloneError::SingularBasis);
            }
            let (u, v) = gauss_reduce(b1, b2);
            // ‖k‖ ≤ W / σ_min; σ_min² is the small eigenvalue of BᵀB.
            let (a, b, c) = (b1.norm_sq(), b1.dot(b2), b2.norm_sq());
            let tr = a + c;
            let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
            let smin = ((tr - disc) / 2.0).max(1e-300).sqrt();
            let k = (window_radius / smin).ceil() as i64 + 1;
            let mut pts = Vec::new();
            for i in -k..=k {
                for j in -k..=k {
                    let p = b1 * i as f64 + b2 * j as f64;
                    if p.norm() <= window_radius + 1e-9 {
                        pts.push(p);
                    }
                }
            }
            let r = u.norm() / 2.0;
            let big_r = circumradius(Point::ORIGIN, u, v);
            WindowedDeloneSet::new(2, window_radius, pts, None)?
                .with_declared(Some(r), Some(big_r))
                .map(|s| s.with_meta(json!({"model": "lattice", "basis": basis})))
        }
        d => Err(DeloneError::UnsupportedDimension(d)),
    }
}

/// Lagrange–Gauss reduction; returns `(u, v)` with `‖u‖ ≤ ‖v‖` and
/// `0 ≤ u·v ≤ ‖u‖²/2`.
fn gauss_reduce(mut u: Point, mut v: Point) -> (Point, Point) {
    if u.norm_sq() > v.norm_sq() {
        std::mem::swap(&mut u, &mut v);
    }
    loop {
        let m = (u.dot(v) / u.norm_sq()).round();
        v = v - u * m;
        if v.norm_sq() >= u.norm_sq() {
            break;
        }
        std::mem::swap(&mut u, &mut v);
    }
    if u.dot(v) < 0.0 {
        v = -v;
    }
    (u, v)
}

fn circumradius(a: Point, b: Point, c: Point) -> f64 {
    let (x, y, z) = (b.dist(c), a.dist(c), a.dist(b));
    let area2 = ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x()).abs();
    x * y * z / (2.0 * area2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_line() {
        let s = generate_lattice(&[vec![1.0]], 10.0).unwrap();
        assert_eq!(s.len(), 21);
        assert_eq!(s.points()[0].x(), -10.0);
        assert_eq!(s.r_declared(), Some(0.5));
        assert_eq!(s.big_r_declared(), Some(0.5));
    }

    #[test]
    fn even_line() {
        let s = generate_lattice(&[vec![2.0]], 10.0).unwrap();
        let xs: Vec<f64> = s.points().iter().map(|p| p.x()).collect();
        assert_eq!(xs, (-5..=5).map(|i| 2.0 * i as f64).collect::<Vec<_>>());
        assert_eq!(s.r_declared(), Some(1.0));
    }

    #[test]
    fn square_lattice_disk_count() {
        // Enumerate ℤ² ∩ [-3, 3]² and keep the disk.
        let mut oracle = 0;
        for i in -3i32..=3 {
            for j in -3i32..=3 {
                if i * i + j * j <= 9 {
                    oracle += 1;
                }
            }
        }
        assert_eq!(oracle, 29);
        let s = generate_lattice(&[vec![1.0, 0.0], vec![0.0, 1.0]], 3.0).unwrap();
        assert_eq!(s.len(), oracle);
        assert!((s.big_r_declared().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hexagonal_covering_radius() {
        let s = generate_lattice(&[vec![1.0, 0.5], vec![0.0, 3f64.sqrt() / 2.0]], 5.0).unwrap();
        assert!((s.big_r_declared().unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.r_declared(), Some(0.5));
    }

    #[test]
    fn singular_basis() {
        assert!(matches!(generate_lattice(&[vec![0.0]], 5.0), Err(DeloneError::SingularBasis)));
        assert!(matches!(
            generate_lattice(&[vec![1.0, 2.0], vec![2.0, 4.0]], 5.0),
            Err(DeloneError::SingularBasis)
        ));
    }
}
