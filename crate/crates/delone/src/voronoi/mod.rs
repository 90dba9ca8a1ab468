//! Voronoi cells of points and of occurrence sets, computed from the
//! points within a cutoff distance of the site.

mod polytope;
mod svg;

pub use polytope::{polygon_area, square, Halfspace, Polytope};
pub use svg::{cells_svg, CellDump};

use crate::atlas::{occurrences, return_vectors_from, ReturnVectorSet};
use crate::covering::covering_radius;
use crate::error::{DeloneError, Result};
use crate::geometry::{Point, ETA};
use crate::patch::{clouds_equal, extract_unchecked, ClassTable, Equivalence, Patch, PatchClass};
use crate::set::WindowedDeloneSet;
use polytope::{clip, merge_close};
use rayon::prelude::*;
use serde::Serialize;

/// Cell of the point `site ∈ X` against `X ∩ B_cutoff(site)`.
pub fn voronoi_cell(x: &WindowedDeloneSet, site: Point, cutoff: f64) -> Result<Polytope> {
    let i = x
        .find(site, ETA)
        .ok_or_else(|| DeloneError::InvalidInput(format!("site {site} is not a point of the set")))?;
    x.require_ball(site, cutoff)?;
    let site = x.points()[i];
    let others: Vec<Point> = x
        .indices_in_ball(site, cutoff, true)
        .into_iter()
        .filter(|&j| j != i)
        .map(|j| x.points()[j])
        .collect();
    cell_from_neighbors(x.dim(), site, others, cutoff)
}

fn cell_from_neighbors(dim: usize, site: Point, mut others: Vec<Point>, cutoff: f64) -> Result<Polytope> {
    let unbounded = || DeloneError::UnboundedCell { site, cutoff };
    if dim == 1 {
        let left = others.iter().map(|p| p.x()).filter(|&t| t < site.x()).fold(f64::NEG_INFINITY, f64::max);
        let right = others.iter().map(|p| p.x()).filter(|&t| t > site.x()).fold(f64::INFINITY, f64::min);
        if !left.is_finite() || !right.is_finite() {
            return Err(unbounded());
        }
        let halfspaces = vec![
            Halfspace::bisector(site, Point::on_line(left)),
            Halfspace::bisector(site, Point::on_line(right)),
        ];
        return Ok(Polytope {
            dim,
            site,
            halfspaces,
            vertices: vec![
                Point::on_line((left + site.x()) / 2.0),
                Point::on_line((site.x() + right) / 2.0),
            ],
        });
    }
    // Work relative to the site; labels are neighbour indices, `None` for
    // the bounding box.
    for p in others.iter_mut() {
        *p = *p - site;
    }
    others.sort_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq()).then(a.lex_cmp(b)));
    let h = 2.0 * cutoff;
    let mut ring: Vec<(Point, Option<usize>)> = vec![
        (Point::new(-h, -h), None),
        (Point::new(h, -h), None),
        (Point::new(h, h), None),
        (Point::new(-h, h), None),
    ];
    for (k, &d) in others.iter().enumerate() {
        let reach = ring.iter().map(|(p, _)| p.norm()).fold(0.0, f64::max);
        if reach <= d.norm() / 2.0 {
            break;
        }
        let hs = Halfspace {
            normal: d,
            offset: d.norm_sq() / 2.0,
        };
        ring = clip(&ring, &hs, Some(k));
    }
    let ring = merge_close(ring);
    if ring.len() < 3 || ring.iter().any(|(_, l)| l.is_none()) {
        return Err(unbounded());
    }
    let mut used: Vec<usize> = ring.iter().filter_map(|(_, l)| *l).collect();
    used.sort_unstable();
    used.dedup();
    let halfspaces = used
        .into_iter()
        .map(|k| Halfspace::bisector(site, others[k] + site))
        .collect();
    Ok(Polytope {
        dim,
        site,
        halfspaces,
        vertices: ring.into_iter().map(|(p, _)| p + site).collect(),
    })
}

/// Covering radius of a windowed set, measured away from its boundary.
pub(crate) fn window_covering(s: &WindowedDeloneSet) -> Result<f64> {
    let w = s.window_radius();
    let res = (s.min_gap() / 8.0).min(w / 64.0);
    let first = covering_radius(s.points(), s.dim(), w / 2.0, res, None)?.value;
    let region = w - 2.0 * first;
    if region <= w / 2.0 {
        return Ok(first);
    }
    Ok(first.max(covering_radius(s.points(), s.dim(), region, res, None)?.value))
}

/// Cells `V_{P,v}` of the occurrence set of a class.
#[derive(Debug, Clone)]
pub struct PatchCells {
    pub return_vectors: ReturnVectorSet,
    /// The occurrence set `X_P + x` on the window `W − R`.
    pub sites: WindowedDeloneSet,
    /// Measured covering radius of the occurrence set.
    pub covering: f64,
    pub cutoff: f64,
    /// `(v, V_{P,v})` for every `v` whose cutoff ball fits in the window.
    pub cells: Vec<(Point, Polytope)>,
}

/// Cells of the Delone set `X_P + x`, each from the occurrences within four
/// times its covering radius.
pub fn voronoi_cells_of_patch(x: &WindowedDeloneSet, class: &PatchClass) -> Result<PatchCells> {
    let occ = occurrences(x, class)?;
    let rv = return_vectors_from(x, class, &occ)?;
    let w = x.window_radius() - class.radius();
    let sites = WindowedDeloneSet::new(x.dim(), w, occ, None)?;
    if sites.len() < 2 {
        return Err(DeloneError::NoReturnVectorsFound);
    }
    let covering = window_covering(&sites)?;
    let cutoff = 4.0 * covering;
    let base = rv.base_center;
    let centers = sites.interior_indices(w - cutoff);
    if centers.is_empty() {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius: cutoff,
            window: w,
        });
    }
    let cells = centers
        .par_iter()
        .map(|&i| {
            let s = sites.points()[i];
            voronoi_cell(&sites, s, cutoff).map(|c| (s - base, c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PatchCells {
        return_vectors: rv,
        sites,
        covering,
        cutoff,
        cells,
    })
}

/// Points of `x` in the closed cell, as offsets from its site.
pub fn cell_cloud(x: &WindowedDeloneSet, cell: &Polytope) -> Patch {
    let reach = cell.circumradius() + ETA;
    let idx: Vec<usize> = x
        .indices_in_ball(cell.site, reach, true)
        .into_iter()
        .filter(|&i| cell.contains(x.points()[i], ETA))
        .collect();
    Patch::new(
        Point::ORIGIN,
        reach,
        idx.iter().map(|&i| x.points()[i] - cell.site).collect(),
        x.labels().map(|l| idx.iter().map(|&i| l[i]).collect()),
    )
}

/// Translation classes of the clouds `X ∩ V_{P,v}`.
#[derive(Debug, Clone, Serialize)]
pub struct CellPatchClasses {
    pub count: usize,
    pub classes: Vec<PatchClass>,
    /// A return vector `v_j` realizing each class, the one whose site is
    /// nearest the origin.
    pub representatives: Vec<Point>,
    /// Index into [`PatchCells::cells`] of each representative.
    pub representative_cells: Vec<usize>,
    pub cells_examined: usize,
}

pub fn cell_patch_classes(x: &WindowedDeloneSet, class: &PatchClass) -> Result<CellPatchClasses> {
    let pc = voronoi_cells_of_patch(x, class)?;
    Ok(classify_cells(x, &pc))
}

pub(crate) fn classify_cells(x: &WindowedDeloneSet, pc: &PatchCells) -> CellPatchClasses {
    let clouds: Vec<Patch> = pc.cells.par_iter().map(|(_, c)| cell_cloud(x, c)).collect();
    let mut table = ClassTable::new(Equivalence::Translation);
    let mut reps: Vec<usize> = Vec::new();
    for (k, cloud) in clouds.into_iter().enumerate() {
        // Cloud radii depend on the cell, not on the class.
        let cloud = Patch { radius: 0.0, ..cloud };
        let id = table.classify(cloud);
        if id == reps.len() {
            reps.push(k);
        } else if pc.cells[k].1.site.norm() < pc.cells[reps[id]].1.site.norm() {
            reps[id] = k;
        }
    }
    CellPatchClasses {
        count: table.len(),
        classes: table.into_classes(),
        representatives: reps.iter().map(|&k| pc.cells[k].0).collect(),
        representative_cells: reps,
        cells_examined: pc.cells.len(),
    }
}

/// Classes of the patches `P_{n,w,v}` over the return vectors `w` of a
/// cell cloud.
#[derive(Debug, Clone, Serialize)]
pub struct CellReturnPatches {
    pub n: u32,
    pub radius: f64,
    pub classes: Vec<PatchClass>,
    pub count: usize,
    /// Return vectors `w` found, searched over `(X − X)` inside the window.
    pub return_vectors_found: usize,
    /// All qualifying patches agree on `B_{R/22}(0)`.
    pub central_agreement: bool,
}

/// `P_{n,w,v} = (X − w − x − v) ∩ B_{LⁿR}(0)` for every `w` with
/// `(X − w) ∩ V_{P,v} = X ∩ V_{P,v}`.
///
/// `v` is a return vector of `class` whose cell is among
/// [`voronoi_cells_of_patch`]; `l` is the repetitivity constant in force.
pub fn cell_return_patches(
    x: &WindowedDeloneSet,
    class: &PatchClass,
    v: Point,
    n: u32,
    l: f64,
) -> Result<CellReturnPatches> {
    let pc = voronoi_cells_of_patch(x, class)?;
    let cell = pc
        .cells
        .iter()
        .find(|(u, _)| u.approx_eq(v, 1e-6))
        .map(|(_, c)| c.clone())
        .ok_or_else(|| DeloneError::InvalidInput(format!("no computed cell for return vector {v}")))?;
    cell_return_patches_of(x, class.radius(), &cell, n, l)
}

pub(crate) fn cell_return_patches_of(
    x: &WindowedDeloneSet,
    r: f64,
    cell: &Polytope,
    n: u32,
    l: f64,
) -> Result<CellReturnPatches> {
    let big = l.powi(n as i32) * r;
    let o = cell.site;
    x.require_ball(o, big)?;
    let cloud = cell_cloud(x, cell);
    let reach = cell.circumradius() + ETA;
    let centers = x.interior_indices(x.window_radius() - big);
    let hits: Vec<Point> = centers
        .par_iter()
        .filter_map(|&i| {
            let p = x.points()[i];
            let w = p - o;
            let idx: Vec<usize> = x
                .indices_in_ball(p, reach, true)
                .into_iter()
                .filter(|&j| cell.contains(x.points()[j] - w, ETA))
                .collect();
            if idx.len() != cloud.len() {
                return None;
            }
            let c = Patch::new(
                Point::ORIGIN,
                reach,
                idx.iter().map(|&j| x.points()[j] - p).collect(),
                x.labels().map(|l| idx.iter().map(|&j| l[j]).collect()),
            );
            clouds_equal(&c.offsets, c.labels.as_deref(), &cloud.offsets, cloud.labels.as_deref(), ETA)
                .then_some(p)
        })
        .collect();
    if hits.is_empty() {
        return Err(DeloneError::NoReturnVectorsFound);
    }
    let patches: Vec<Patch> = hits.par_iter().map(|&p| extract_unchecked(x, p, big)).collect();
    let core = patches[0].restrict(r / 22.0);
    let central_agreement = patches.iter().all(|p| {
        let c = p.restrict(r / 22.0);
        clouds_equal(&c.offsets, c.labels.as_deref(), &core.offsets, core.labels.as_deref(), ETA)
    });
    let mut table = ClassTable::new(Equivalence::Centered);
    for p in patches {
        table.classify(p);
    }
    table.sort_by_key();
    Ok(CellReturnPatches {
        n,
        radius: big,
        count: table.len(),
        classes: table.into_classes(),
        return_vectors_found: hits.len(),
        central_agreement,
    })
}

/// Area bookkeeping of the cells meeting a square.
#[derive(Debug, Clone, Serialize)]
pub struct TilingCheck {
    pub half_side: f64,
    pub square_area: f64,
    pub cell_area_sum: f64,
    pub relative_error: f64,
    pub max_pair_overlap: f64,
    pub cells: usize,
}

/// Clips the cells of every site that can reach the square `[−h, h]²` and
/// compares total area with the square; also reports the largest pairwise
/// overlap among those cells.
pub fn tiling_check(x: &WindowedDeloneSet, cutoff: f64, half_side: f64) -> Result<TilingCheck> {
    if x.dim() != 2 {
        return Err(DeloneError::UnsupportedDimension(x.dim()));
    }
    let reach = half_side * std::f64::consts::SQRT_2 + cutoff;
    if reach + cutoff > x.window_radius() {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius: reach + cutoff,
            window: x.window_radius(),
        });
    }
    let idx = x.interior_indices(reach);
    let cells = idx
        .par_iter()
        .map(|&i| voronoi_cell(x, x.points()[i], cutoff))
        .collect::<Result<Vec<_>>>()?;
    let sq = square(Point::ORIGIN, half_side);
    let sum: f64 = cells.par_iter().map(|c| polygon_area(&c.clipped_vertices(&sq))).sum();
    let max_overlap = cells
        .par_iter()
        .enumerate()
        .map(|(a, ca)| {
            let ra = ca.circumradius();
            cells[a + 1..]
                .iter()
                .filter(|cb| cb.site.dist(ca.site) < ra + cb.circumradius())
                .map(|cb| ca.overlap_area(cb))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let area = 4.0 * half_side * half_side;
    Ok(TilingCheck {
        half_side,
        square_area: area,
        cell_area_sum: sum,
        relative_error: (sum - area).abs() / area,
        max_pair_overlap: max_overlap,
        cells: cells.len(),
    })
}
