use crate::error::{DeloneError, Result};
use crate::geometry::{Point, ETA};
use crate::set::WindowedDeloneSet;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Acceptance region in internal space (dimension `N − d`, 1 or 2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AcceptanceWindow {
    Interval { lo: f64, hi: f64 },
    /// Convex polygon, vertices in counter-clockwise order.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl AcceptanceWindow {
    fn internal_dim(&self) -> usize {
        match self {
            AcceptanceWindow::Interval { .. } => 1,
            AcceptanceWindow::Polygon { .. } => 2,
        }
    }

    /// Largest norm of a window point.
    fn radius(&self) -> f64 {
        match self {
            AcceptanceWindow::Interval { lo, hi } => lo.abs().max(hi.abs()),
            AcceptanceWindow::Polygon { vertices } => {
                vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            AcceptanceWindow::Interval { lo, hi } => {
                if !(hi - lo > ETA) {
                    return Err(DeloneError::InvalidInput("acceptance interval has empty interior".into()));
                }
            }
            AcceptanceWindow::Polygon { vertices } => {
                if vertices.len() < 3 || polygon_area(vertices) <= ETA {
                    return Err(DeloneError::InvalidInput(
                        "acceptance polygon must be counter-clockwise with nonempty interior".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Signed distance to the boundary, positive inside.
    fn depth(&self, y: &[f64]) -> f64 {
        match self {
            AcceptanceWindow::Interval { lo, hi } => (y[0] - lo).min(hi - y[0]),
            AcceptanceWindow::Polygon { vertices } => {
                let n = vertices.len();
                let mut d = f64::INFINITY;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                    let len = ex.hypot(ey);
                    // Inward normal of a counter-clockwise edge.
                    let s = (ex * (y[1] - a[1]) - ey * (y[0] - a[0])) / len;
                    d = d.min(s);
                }
                d
            }
        }
    }
}

fn polygon_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

/// Lattice `B ℤᴺ` with complementary projections onto physical space
/// (dimension `d`) and internal space (dimension `N − d`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutAndProjectScheme {
    #[serde(default)]
    pub name: String,
    pub total_dim: usize,
    pub physical_dim: usize,
    /// Row-major `N×N`; columns are the lattice generators.
    pub lattice_basis: Vec<Vec<f64>>,
    /// `d×N`.
    pub physical_projection: Vec<Vec<f64>>,
    /// `(N−d)×N`.
    pub internal_projection: Vec<Vec<f64>>,
    pub acceptance_window: AcceptanceWindow,
    /// Largest number of lattice candidates the enumeration may visit.
    #[serde(default = "default_limit")]
    pub enumeration_limit: f64,
}

fn default_limit() -> f64 {
    5e8
}

/// Output of [`generate_cut_and_project`]: the set and the count of lattice
/// points rejected for lying within `η` of the acceptance boundary.
#[derive(Debug, Clone)]
pub struct GeneratedCutAndProject {
    pub set: WindowedDeloneSet,
    pub boundary_rejections: usize,
}

fn matrix(rows: &[Vec<f64>], r: usize, c: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(DeloneError::InvalidInput(format!("{what} must be {r}×{c}")));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

impl CutAndProjectScheme {
    fn matrices(&self) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        let n = self.total_dim;
        let d = self.physical_dim;
        if !(1..=2).contains(&d) {
            return Err(DeloneError::UnsupportedDimension(d));
        }
        if n <= d || n - d != self.acceptance_window.internal_dim() {
            return Err(DeloneError::InvalidInput(format!(
                "internal dimension {} does not match the acceptance window",
                n.saturating_sub(d)
            )));
        }
        let b = matrix(&self.lattice_basis, n, n, "lattice basis")?;
        let p = matrix(&self.physical_projection, d, n, "physical projection")?;
        let q = matrix(&self.internal_projection, n - d, n, "internal projection")?;
        if b.determinant().abs() < 1e-12 {
            return Err(DeloneError::SingularBasis);
        }
        let stacked = DMatrix::from_fn(n, n, |i, j| if i < d { p[(i, j)] } else { q[(i - d, j)] });
        if stacked.determinant().abs() < 1e-12 {
            return Err(DeloneError::InvalidInput("projections are not complementary".into()));
        }
        self.acceptance_window.validate()?;
        Ok((b, p, q))
    }
}

/// Fibonacci model set: `ℤ²` projected along `(1, φ)` with internal
/// direction `(1, −1/φ)` and a window of length `φ` centered at zero.
pub fn fibonacci_scheme() -> CutAndProjectScheme {
    let phi = super::PHI;
    CutAndProjectScheme {
        name: "fibonacci".into(),
        total_dim: 2,
        physical_dim: 1,
        lattice_basis: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        physical_projection: vec![vec![1.0, phi]],
        internal_projection: vec![vec![1.0, -1.0 / phi]],
        acceptance_window: AcceptanceWindow::Interval {
            lo: -phi / 2.0,
            hi: phi / 2.0,
        },
        enumeration_limit: default_limit(),
    }
}

/// Ammann–Beenker vertex set with unit edges: `ℤ⁴`, star vectors
/// `e_k = (cos kπ/4, sin kπ/4)` and `e*_k = (cos 3kπ/4, sin 3kπ/4)`, window
/// the octagon `Σ [−½, ½] e*_k` shifted off-center to a generic position.
pub fn ammann_beenker_scheme() -> CutAndProjectScheme {
    use std::f64::consts::FRAC_PI_4;
    let phys: Vec<Vec<f64>> = vec![
        (0..4).map(|k| (k as f64 * FRAC_PI_4).cos()).collect(),
        (0..4).map(|k| (k as f64 * FRAC_PI_4).sin()).collect(),
    ];
    let int: Vec<Vec<f64>> = vec![
        (0..4).map(|k| (3.0 * k as f64 * FRAC_PI_4).cos()).collect(),
        (0..4).map(|k| (3.0 * k as f64 * FRAC_PI_4).sin()).collect(),
    ];
    let gens: Vec<[f64; 2]> = (0..4).map(|k| [int[0][k], int[1][k]]).collect();
    let shift = [0.012_345_678_9, 0.034_567_891_2];
    let vertices = zonotope(&gens)
        .into_iter()
        .map(|v| [v[0] + shift[0], v[1] + shift[1]])
        .collect();
    CutAndProjectScheme {
        name: "ammann-beenker".into(),
        total_dim: 4,
        physical_dim: 2,
        lattice_basis: (0..4).map(|i| (0..4).map(|j| (i == j) as u8 as f64).collect()).collect(),
        physical_projection: phys,
        internal_projection: int,
        acceptance_window: AcceptanceWindow::Polygon { vertices },
        enumeration_limit: default_limit(),
    }
}

/// Convex hull of `Σ ±½ g_k`, counter-clockwise.
fn zonotope(gens: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    for mask in 0u32..(1 << gens.len()) {
        let mut p = [0.0, 0.0];
        for (k, g) in gens.iter().enumerate() {
            let s = if mask & (1 << k) != 0 { 0.5 } else { -0.5 };
            p[0] += s * g[0];
            p[1] += s * g[1];
        }
        pts.push(p);
    }
    convex_hull(pts)
}

/// Monotone chain; drops collinear points.
pub(crate) fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 1e-12 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// `{P z : z ∈ B ℤᴺ, Q z ∈ window, ‖P z‖ ≤ W}`, sorted.
///
/// Lattice points are enumerated inside the ellipsoid
/// `‖P z‖²/W² + ‖Q z‖²/ρ² ≤ 2` (ρ bounds the window) by Fincke–Pohst on a
/// QR factorization, so the work scales with the output rather than with
/// the `N`-ball around the window. Points within `η` of the acceptance
/// boundary are rejected and counted.
pub fn generate_cut_and_project(scheme: &CutAndProjectScheme, window_radius: f64) -> Result<GeneratedCutAndProject> {
    let (b, p, q) = scheme.matrices()?;
    let n = scheme.total_dim;
    let d = scheme.physical_dim;
    let rho = scheme.acceptance_window.radius().max(ETA);
    let w = window_radius;

    let pb = &p * &b;
    let qb = &q * &b;
    let g = DMatrix::from_fn(n, n, |i, j| if i < d { pb[(i, j)] / w } else { qb[(i - d, j)] / rho });
    let bound2 = 2.0 * (1.0 + 1e-9);
    let det = g.determinant().abs();
    let ball = match n {
        2 => std::f64::consts::PI * bound2,
        3 => 4.0 / 3.0 * std::f64::consts::PI * bound2.powf(1.5),
        4 => std::f64::consts::PI.powi(2) / 2.0 * bound2 * bound2,
        _ => (std::f64::consts::PI * bound2).powf(n as f64 / 2.0),
    };
    let estimate = ball / det + 3f64.powi(n as i32);
    if estimate > scheme.enumeration_limit {
        return Err(DeloneError::InfeasibleEnumeration {
            estimate,
            limit: scheme.enumeration_limit,
        });
    }

    let r = g.clone().qr().r();
    let mut k = vec![0i64; n];
    let mut pts = Vec::new();
    let mut rejected = 0usize;
    let mut visit = |k: &[i64]| {
        let kv = nalgebra::DVector::from_fn(n, |i, _| k[i] as f64);
        let x = &pb * &kv;
        let y = &qb * &kv;
        let phys = Point::new(x[0], if d > 1 { x[1] } else { 0.0 });
        if phys.norm() > w + 1e-9 {
            return;
        }
        let depth = scheme.acceptance_window.depth(y.as_slice());
        if depth > ETA {
            pts.push(phys);
        } else if depth >= -ETA {
            rejected += 1;
        }
    };
    fincke_pohst(&r, bound2, n - 1, 0.0, &mut k, &mut visit);

    if pts.is_empty() {
        return Err(DeloneError::EmptySet);
    }
    let set = WindowedDeloneSet::new(d, w, pts, None)?.with_meta(json!({
        "model": "cut-and-project",
        "scheme": scheme,
        "boundary_rejections": rejected,
    }));
    Ok(GeneratedCutAndProject {
        set,
        boundary_rejections: rejected,
    })
}

/// Enumerates integer `k` with `‖R k‖² ≤ bound2`, `R` upper triangular,
/// fixing coordinates from the last to the first.
fn fincke_pohst(
    r: &DMatrix<f64>,
    bound2: f64,
    level: usize,
    partial: f64,
    k: &mut [i64],
    visit: &mut impl FnMut(&[i64]),
) {
    let n = k.len();
    let rii = r[(level, level)];
    let shift: f64 = (level + 1..n).map(|j| r[(level, j)] * k[j] as f64).sum();
    let room = (bound2 - partial).max(0.0).sqrt();
    // rii·k + shift ∈ [−room, room]
    let (a, bnd) = ((-room - shift) / rii, (room - shift) / rii);
    let (lo, hi) = (a.min(bnd).ceil() as i64, a.max(bnd).floor() as i64);
    for v in lo..=hi {
        k[level] = v;
        let t = rii * v as f64 + shift;
        let next = partial + t * t;
        if next > bound2 {
            continue;
        }
        if level == 0 {
            visit(k);
        } else {
            fincke_pohst(r, bound2, level - 1, next, k, visit);
        }
    }
    k[level] = 0;
}
