//! Uniform bucket grid over a point array for fixed-radius queries.

use crate::geometry::Point;

/// Dense bucket grid in compressed-row layout: `starts[c]..starts[c + 1]`
/// indexes `items` for cell `c`.
#[derive(Debug, Clone)]
pub struct GridIndex {
    dim: usize,
    cell: f64,
    origin: [f64; 2],
    shape: [usize; 2],
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl GridIndex {
    /// Indexes `points` with square cells of side `cell`.
    pub fn new(points: &[Point], dim: usize, cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "grid cell size must be positive");
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..dim {
                lo[k] = lo[k].min(p.0[k]);
                hi[k] = hi[k].max(p.0[k]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let mut shape = [1usize; 2];
        for k in 0..dim {
            shape[k] = (((hi[k] - lo[k]) / cell).floor() as usize) + 1;
        }
        let origin = [lo[0], if dim > 1 { lo[1] } else { 0.0 }];
        let ncells = shape[0] * shape[1];
        let mut counts = vec![0u32; ncells + 1];
        let cells: Vec<usize> = points
            .iter()
            .map(|p| {
                let c = Self::cell_of(origin, cell, shape, dim, *p);
                counts[c + 1] += 1;
                c
            })
            .collect();
        for i in 0..ncells {
            counts[i + 1] += counts[i];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; points.len()];
        for (i, &c) in cells.iter().enumerate() {
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        GridIndex {
            dim,
            cell,
            origin,
            shape,
            starts,
            items,
        }
    }

    fn cell_of(origin: [f64; 2], cell: f64, shape: [usize; 2], dim: usize, p: Point) -> usize {
        let mut idx = [0usize; 2];
        for k in 0..dim {
            let i = ((p.0[k] - origin[k]) / cell).floor();
            idx[k] = (i.max(0.0) as usize).min(shape[k] - 1);
        }
        idx[1] * shape[0] + idx[0]
    }

    fn axis_range(&self, k: usize, lo: f64, hi: f64) -> Option<(usize, usize)> {
        if k >= self.dim {
            return Some((0, 0));
        }
        let a = ((lo - self.origin[k]) / self.cell).floor();
        let b = ((hi - self.origin[k]) / self.cell).floor();
        if b < 0.0 || a > (self.shape[k] - 1) as f64 {
            return None;
        }
        Some((a.max(0.0) as usize, (b as usize).min(self.shape[k] - 1)))
    }

    /// Calls `f` with the index of every point whose bucket meets the box
    /// around the closed ball; callers filter by exact distance.
    pub fn for_each_candidate(&self, center: Point, radius: f64, mut f: impl FnMut(usize)) {
        let Some((x0, x1)) = self.axis_range(0, center.0[0] - radius, center.0[0] + radius) else {
            return;
        };
        let Some((y0, y1)) = self.axis_range(1, center.0[1] - radius, center.0[1] + radius) else {
            return;
        };
        for j in y0..=y1 {
            for i in x0..=x1 {
                let c = j * self.shape[0] + i;
                for &it in &self.items[self.starts[c] as usize..self.starts[c + 1] as usize] {
                    f(it as usize);
                }
            }
        }
    }

    /// Indices of `points` within distance `< radius` of `center`
    /// (`<= radius` when `closed`).
    pub fn within(&self, points: &[Point], center: Point, radius: f64, closed: bool) -> Vec<usize> {
        let mut out = Vec::new();
        let r2 = radius * radius;
        self.for_each_candidate(center, radius, |i| {
            let d2 = (points[i] - center).norm_sq();
            if d2 < r2 || (closed && d2 <= r2) {
                out.push(i);
            }
        });
        out.sort_unstable();
        out
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// Nearest indexed point to `q`, by expanding rings of cells.
    pub fn nearest(&self, points: &[Point], q: Point) -> Option<(usize, f64)> {
        self.nearest_other(points, q, usize::MAX)
    }

    /// Nearest indexed point to `q` other than index `skip`.
    pub fn nearest_other(&self, points: &[Point], q: Point, skip: usize) -> Option<(usize, f64)> {
        if self.items.is_empty() {
            return None;
        }
        let home = [
            ((q.0[0] - self.origin[0]) / self.cell).floor() as i64,
            if self.dim > 1 {
                ((q.0[1] - self.origin[1]) / self.cell).floor() as i64
            } else {
                0
            },
        ];
        let max_ring = self.shape[0].max(self.shape[1]) as i64
            + home[0].abs().max(home[1].abs())
            + 1;
        let mut best: Option<(usize, f64)> = None;
        for ring in 0..=max_ring {
            // Every point in ring k or beyond is at least (k - 1) * cell away.
            if let Some((_, d)) = best {
                if ((ring - 1).max(0) as f64) * self.cell > d {
                    break;
                }
            }
            let mut visit = |i: i64, j: i64| {
                if i < 0 || j < 0 || i >= self.shape[0] as i64 || j >= self.shape[1] as i64 {
                    return;
                }
                let c = j as usize * self.shape[0] + i as usize;
                for &it in &self.items[self.starts[c] as usize..self.starts[c + 1] as usize] {
                    if it as usize == skip {
                        continue;
                    }
                    let d = points[it as usize].dist(q);
                    if best.map_or(true, |(_, bd)| d < bd) {
                        best = Some((it as usize, d));
                    }
                }
            };
            if self.dim == 1 {
                if ring == 0 {
                    visit(home[0], 0);
                } else {
                    visit(home[0] - ring, 0);
                    visit(home[0] + ring, 0);
                }
            } else if ring == 0 {
                visit(home[0], home[1]);
            } else {
                for t in -ring..=ring {
                    visit(home[0] + t, home[1] - ring);
                    visit(home[0] + t, home[1] + ring);
                }
                for t in (-ring + 1)..ring {
                    visit(home[0] - ring, home[1] + t);
                    visit(home[0] + ring, home[1] + t);
                }
            }
        }
        best
    }
}

/// A reasonable bucket size for `n` points spread over a ball of radius `extent`.
pub fn auto_cell(n: usize, dim: usize, extent: f64) -> f64 {
    let n = n.max(1) as f64;
    let extent = extent.max(1e-6);
    match dim {
        1 => (2.0 * extent / n).max(1e-6),
        _ => ((4.0 * extent * extent) / n).sqrt().max(1e-6),
    }
}
