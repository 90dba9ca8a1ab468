use crate::geometry::{Point, ETA};
use serde::Serialize;

/// `{y : ⟨normal, y⟩ ≤ offset}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
}

impl Halfspace {
    /// Points at least as close to `site` as to `other`.
    pub fn bisector(site: Point, other: Point) -> Self {
        let normal = other - site;
        Halfspace {
            normal,
            offset: (other.norm_sq() - site.norm_sq()) / 2.0,
        }
    }

    /// Signed distance of `y` to the boundary, positive inside.
    pub fn depth(&self, y: Point) -> f64 {
        (self.offset - self.normal.dot(y)) / self.normal.norm()
    }
}

/// A bounded convex cell: an interval for `d = 1`, a counter-clockwise
/// polygon for `d = 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polytope {
    pub dim: usize,
    pub site: Point,
    /// The halfspaces supporting a facet of the cell.
    pub halfspaces: Vec<Halfspace>,
    pub vertices: Vec<Point>,
}

impl Polytope {
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(v[i].dist(v[j]));
            }
        }
        d
    }

    /// Length for `d = 1`, area for `d = 2`.
    pub fn measure(&self) -> f64 {
        match self.dim {
            1 => (self.vertices[1].x() - self.vertices[0].x()).abs(),
            _ => polygon_area(&self.vertices),
        }
    }

    pub fn contains(&self, y: Point, tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.depth(y) >= -tol)
    }

    /// Radius of the largest ball about `center` inside the cell.
    pub fn inner_radius(&self, center: Point) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.depth(center))
            .fold(f64::INFINITY, f64::min)
    }

    /// Farthest vertex from the site.
    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|v| v.dist(self.site)).fold(0.0, f64::max)
    }

    /// Equal vertex sets within `tol`.
    pub fn same_vertices(&self, other: &Polytope, tol: f64) -> bool {
        self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .all(|a| other.vertices.iter().any(|b| a.approx_eq(*b, tol)))
    }

    /// The polygon cut down to `{y : ⟨n, y⟩ ≤ c}` for each given halfspace.
    pub fn clipped_vertices(&self, extra: &[Halfspace]) -> Vec<Point> {
        let mut ring: Vec<(Point, Option<usize>)> = self.vertices.iter().map(|&v| (v, None)).collect();
        for h in extra {
            ring = clip(&ring, h, None);
            if ring.is_empty() {
                break;
            }
        }
        ring.into_iter().map(|(p, _)| p).collect()
    }

    /// Area of the intersection of two polygons.
    pub fn overlap_area(&self, other: &Polytope) -> f64 {
        polygon_area(&self.clipped_vertices(&other.halfspaces))
    }
}

/// Square `[c − h, c + h]²` as halfspaces.
pub fn square(center: Point, half: f64) -> Vec<Halfspace> {
    [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
        .into_iter()
        .map(|(a, b)| {
            let n = Point::new(a, b);
            Halfspace {
                normal: n,
                offset: n.dot(center) + half,
            }
        })
        .collect()
}

pub fn polygon_area(v: &[Point]) -> f64 {
    if v.len() < 3 {
        return 0.0;
    }
    let n = v.len();
    let o = v[0];
    (1..n - 1)
        .map(|i| {
            let (a, b) = (v[i] - o, v[i + 1] - o);
            a.x() * b.y() - a.y() * b.x()
        })
        .sum::<f64>()
        / 2.0
}

/// One Sutherland–Hodgman step on a ring whose entries carry the label of
/// the edge leaving each vertex. New edges on the clip line get `label`.
pub(crate) fn clip<L: Copy>(ring: &[(Point, L)], h: &Halfspace, label: L) -> Vec<(Point, L)> {
    let n = ring.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (a, ea) = ring[i];
        let (b, _) = ring[(i + 1) % n];
        let da = h.normal.dot(a) - h.offset;
        let db = h.normal.dot(b) - h.offset;
        let cross = || {
            let t = da / (da - db);
            a + (b - a) * t
        };
        match (da <= 0.0, db <= 0.0) {
            (true, true) => out.push((a, ea)),
            (true, false) => {
                out.push((a, ea));
                out.push((cross(), label));
            }
            (false, true) => out.push((cross(), ea)),
            (false, false) => {}
        }
    }
    out
}

/// Drops vertices within `ETA` of their predecessor; the surviving vertex
/// keeps the label of the later edge.
pub(crate) fn merge_close<L: Copy>(ring: Vec<(Point, L)>) -> Vec<(Point, L)> {
    let mut out: Vec<(Point, L)> = Vec::with_capacity(ring.len());
    for (p, l) in ring {
        match out.last_mut() {
            Some(last) if last.0.approx_eq(p, ETA) => last.1 = l,
            _ => out.push((p, l)),
        }
    }
    while out.len() > 1 && out[0].0.approx_eq(out[out.len() - 1].0, ETA) {
        out.pop();
    }
    out
}
