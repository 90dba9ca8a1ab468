//! `R`-atlases, occurrences, return vectors and the return-gap statistic.
//!
//! Atlas elements are the centered clouds `X ∩ B_R(x) − x` for `x ∈ X`, so
//! two centers share a class exactly when their neighbourhoods coincide as
//! sets around the center.

use crate::error::{DeloneError, Result};
use crate::geometry::{Point, ETA};
use crate::params::estimate_delone_params;
use crate::patch::{clouds_equal, extract_unchecked, ClassTable, Equivalence, Patch, PatchClass};
use crate::set::{min_pairwise_of, WindowedDeloneSet};
use rayon::prelude::*;
use serde::Serialize;

/// The `R`-atlas of a window with the occurrences of each class.
#[derive(Debug, Clone)]
pub struct Atlas {
    pub radius: f64,
    pub mode: Equivalence,
    /// Classes ordered by quantized key.
    pub classes: Vec<PatchClass>,
    /// Occurrence centers of each class, in point order.
    pub occurrence_map: Vec<Vec<Point>>,
    /// Centers are the points of `X ∩ B_{W − R}(0)`.
    pub valid_region_radius: f64,
    table: ClassTable,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtlasClassReport {
    pub key: String,
    pub offsets: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u32>>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtlasReport {
    #[serde(rename = "R")]
    pub radius: f64,
    pub mode: Equivalence,
    pub valid_region_radius: f64,
    pub classes: Vec<AtlasClassReport>,
}

impl Atlas {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class id of a patch of the same radius.
    pub fn class_of(&self, p: &Patch) -> Option<usize> {
        self.table.lookup(p)
    }

    pub fn occurrences(&self, id: usize) -> &[Point] {
        &self.occurrence_map[id]
    }

    pub fn report(&self, dim: usize) -> AtlasReport {
        AtlasReport {
            radius: self.radius,
            mode: self.mode,
            valid_region_radius: self.valid_region_radius,
            classes: self
                .classes
                .iter()
                .map(|c| {
                    let p = match self.mode {
                        Equivalence::Centered => c.centered(),
                        Equivalence::Translation => c.representative.clone(),
                    };
                    AtlasClassReport {
                        key: format!("{:016x}", c.quantized_key),
                        offsets: p.offsets.iter().map(|o| o.coords(dim).to_vec()).collect(),
                        labels: p.labels,
                        multiplicity: c.multiplicity,
                    }
                })
                .collect(),
        }
    }
}

fn check_radius(x: &WindowedDeloneSet, radius: f64) -> Result<()> {
    if !(radius > 0.0) {
        return Err(DeloneError::InvalidInput(format!("patch radius must be positive (got {radius})")));
    }
    if radius >= x.window_radius() {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius,
            window: x.window_radius(),
        });
    }
    Ok(())
}

/// The `R`-atlas of centered classes over the centers `X ∩ B_{W − R}(0)`.
pub fn r_atlas(x: &WindowedDeloneSet, radius: f64) -> Result<Atlas> {
    r_atlas_with(x, radius, Equivalence::Centered)
}

/// The `R`-atlas under either equivalence.
pub fn r_atlas_with(x: &WindowedDeloneSet, radius: f64, mode: Equivalence) -> Result<Atlas> {
    check_radius(x, radius)?;
    let valid = x.window_radius() - radius;
    let centers = x.interior_indices(valid);
    let patches: Vec<Patch> = centers
        .par_iter()
        .map(|&i| extract_unchecked(x, x.points()[i], radius))
        .collect();
    let mut table = ClassTable::new(mode);
    let ids: Vec<usize> = patches.into_iter().map(|p| table.classify(p)).collect();
    let remap = table.sort_by_key();
    let mut occurrence_map = vec![Vec::new(); table.len()];
    for (&i, &id) in centers.iter().zip(&ids) {
        occurrence_map[remap[id]].push(x.points()[i]);
    }
    Ok(Atlas {
        radius,
        mode,
        classes: table.classes().to_vec(),
        occurrence_map,
        valid_region_radius: valid,
        table,
    })
}

/// Centers `x ∈ X ∩ B_{W − R}(0)` whose centered `R`-patch equals the
/// centered cloud of `class`.
pub fn occurrences(x: &WindowedDeloneSet, class: &PatchClass) -> Result<Vec<Point>> {
    let radius = class.radius();
    check_radius(x, radius)?;
    let target = class.centered();
    let centers = x.interior_indices(x.window_radius() - radius);
    Ok(centers
        .par_iter()
        .filter_map(|&i| {
            let c = x.points()[i];
            let p = extract_unchecked(x, c, radius);
            clouds_equal(&p.offsets, p.labels.as_deref(), &target.offsets, target.labels.as_deref(), ETA)
                .then_some(c)
        })
        .collect())
}

/// The set `X_P` of return vectors seen from one occurrence.
#[derive(Debug, Clone)]
pub struct ReturnVectorSet {
    pub patch: PatchClass,
    /// `{x′ − x}` over occurrences `x′`, on the window `W − R − ‖x‖`.
    pub vectors: WindowedDeloneSet,
    pub base_center: Point,
}

/// Return vectors of `class` relative to its occurrence nearest the origin.
pub fn return_vectors(x: &WindowedDeloneSet, class: &PatchClass) -> Result<ReturnVectorSet> {
    let occ = occurrences(x, class)?;
    return_vectors_from(x, class, &occ)
}

pub(crate) fn return_vectors_from(x: &WindowedDeloneSet, class: &PatchClass, occ: &[Point]) -> Result<ReturnVectorSet> {
    let base = occ
        .iter()
        .copied()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.lex_cmp(b)))
        .ok_or(DeloneError::NoOccurrenceNearOrigin)?;
    let window = x.window_radius() - class.radius() - base.norm();
    if window <= 0.0 {
        return Err(DeloneError::NoOccurrenceNearOrigin);
    }
    let vecs: Vec<Point> = occ
        .iter()
        .map(|&o| o - base)
        .filter(|v| v.norm() <= window)
        .collect();
    let vectors = WindowedDeloneSet::new(x.dim(), window, vecs, None)?.with_meta(serde_json::json!({
        "model": "return-vectors",
        "patch_radius": class.radius(),
        "base_center": base.coords(x.dim()),
    }));
    Ok(ReturnVectorSet {
        patch: class.clone(),
        vectors,
        base_center: base,
    })
}

/// A shift `u` with `Q.offsets + u ⊆ P.offsets` and `B_{r_Q}(u) ⊆ B_{r_P}(0)`.
///
/// Among valid shifts the shortest is returned.
pub fn is_subpatch(q: &Patch, p: &Patch) -> Option<Point> {
    if q.radius > p.radius + ETA {
        return None;
    }
    if q.is_empty() {
        return Some(Point::ORIGIN);
    }
    if q.labels.is_some() != p.labels.is_some() {
        return None;
    }
    let q0 = q.offsets[0];
    let mut cands: Vec<Point> = (0..p.len())
        .filter(|&i| p.label(i) == q.label(0))
        .map(|i| p.offsets[i] - q0)
        .filter(|u| u.norm() + q.radius <= p.radius + ETA)
        .collect();
    cands.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.lex_cmp(b)));
    cands.into_iter().find(|&u| {
        q.offsets.iter().enumerate().all(|(k, &o)| {
            let t = o + u;
            (0..p.len()).any(|i| p.offsets[i].approx_eq(t, ETA) && p.label(i) == q.label(k))
        })
    })
}

/// Shortest `v ≠ 0` with `‖v‖ ≤ search_radius` and `X − v = X` on the window.
///
/// Candidates are differences `x − x₀` with `x₀` the point nearest the
/// origin; labels must be preserved as well.
pub fn detect_period(x: &WindowedDeloneSet, search_radius: f64) -> Option<Point> {
    let (i0, _) = x.nearest(Point::ORIGIN)?;
    let x0 = x.points()[i0];
    let mut cands: Vec<Point> = x
        .indices_in_ball(x0, search_radius, true)
        .into_iter()
        .filter(|&i| i != i0)
        .map(|i| x.points()[i] - x0)
        .collect();
    cands.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.lex_cmp(b)));
    let w = x.window_radius();
    cands.into_iter().find(|&v| {
        let reach = w - v.norm() - ETA;
        reach > 0.0
            && x.interior_indices(reach).into_iter().all(|i| {
                let p = x.points()[i];
                [p + v, p - v].iter().all(|&q| match x.find(q, ETA) {
                    Some(j) => x.label(j) == x.label(i),
                    None => false,
                })
            })
    })
}

/// Smallest distance between two occurrences of one `R`-class.
#[derive(Debug, Clone, Serialize)]
pub struct ReturnGap {
    pub radius: f64,
    pub gap: f64,
    pub class_index: usize,
    pub worst_class: PatchClass,
    pub class_count: usize,
    /// Classes with at least two occurrences in the window.
    pub classes_with_returns: usize,
}

/// Min over atlas classes of the min nonzero return-vector norm.
///
/// Errors with [`DeloneError::PeriodicInput`] when the window has a period
/// of length at most `2R̂`.
pub fn min_return_gap(x: &WindowedDeloneSet, radius: f64) -> Result<ReturnGap> {
    if radius >= x.window_radius() / 4.0 {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius: 4.0 * radius,
            window: x.window_radius(),
        });
    }
    let big_r = match x.big_r_declared() {
        Some(r) => r,
        None => estimate_delone_params(x)?.big_r_hat,
    };
    if let Some(period) = detect_period(x, 2.0 * big_r + ETA) {
        return Err(DeloneError::PeriodicInput { period });
    }
    let atlas = r_atlas(x, radius)?;
    min_return_gap_of(x.dim(), &atlas)
}

pub(crate) fn min_return_gap_of(dim: usize, atlas: &Atlas) -> Result<ReturnGap> {
    let gaps: Vec<f64> = atlas
        .occurrence_map
        .par_iter()
        .map(|occ| min_pairwise_of(occ, dim).0)
        .collect();
    let (class_index, gap) = gaps
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, g)| g.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(DeloneError::NoReturnVectorsFound)?;
    Ok(ReturnGap {
        radius: atlas.radius,
        gap,
        class_index,
        worst_class: atlas.classes[class_index].clone(),
        class_count: atlas.len(),
        classes_with_returns: gaps.iter().filter(|g| g.is_finite()).count(),
    })
}

/// How many `R₂`-classes restrict to each `R₁`-class.
#[derive(Debug, Clone, Serialize)]
pub struct ExtensionCounts {
    pub r1: f64,
    pub r2: f64,
    pub classes_r1: usize,
    pub classes_r2: usize,
    /// Count per restricted `R₁`-class, in order of first appearance.
    pub per_class: Vec<usize>,
    pub max: usize,
}

pub fn extension_counts(x: &WindowedDeloneSet, r1: f64, r2: f64) -> Result<ExtensionCounts> {
    if !(r1 > 0.0 && r1 < r2) {
        return Err(DeloneError::InvalidInput(format!("need 0 < R1 < R2 (got {r1}, {r2})")));
    }
    let big = r_atlas(x, r2)?;
    let mut small = ClassTable::new(Equivalence::Centered);
    let mut per_class = Vec::new();
    for c in &big.classes {
        let id = small.classify(c.centered().restrict(r1));
        if id == per_class.len() {
            per_class.push(0);
        }
        per_class[id] += 1;
    }
    Ok(ExtensionCounts {
        r1,
        r2,
        classes_r1: small.len(),
        classes_r2: big.len(),
        max: per_class.iter().copied().max().unwrap_or(0),
        per_class,
    })
}
