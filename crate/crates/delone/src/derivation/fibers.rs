use super::rule::{apply_rule, LocalDerivationRule};
use crate::error::{DeloneError, Result};
use crate::geometry::Point;
use crate::patch::{clouds_equal, extract_unchecked, ClassTable, Equivalence, Patch};
use crate::set::WindowedDeloneSet;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;

/// Preimage-class counts of a local derivation at one radius.
#[derive(Debug, Clone, Serialize)]
pub struct FiberCount {
    pub radius: f64,
    pub s0: f64,
    /// Max over image classes `Q` of the number of `(R + s₀)`-classes `P`
    /// mapping onto `Q`.
    pub count: usize,
    /// `(55 L²)^d`.
    pub bound: f64,
    pub image_classes: usize,
    pub preimage_classes: usize,
    pub centers: usize,
}

fn centered(x: &WindowedDeloneSet, c: Point, r: f64) -> Patch {
    let mut p = extract_unchecked(x, c, r);
    p.center = Point::ORIGIN;
    p
}

fn fiber_pairs(
    rule: &LocalDerivationRule,
    x: &WindowedDeloneSet,
    radius: f64,
) -> Result<(WindowedDeloneSet, Vec<Point>, Vec<(Patch, Patch)>)> {
    let y = apply_rule(rule, x)?;
    let s0 = rule.s0();
    let reach = y.window_radius() - radius;
    if reach <= 0.0 {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius: radius + s0,
            window: x.window_radius(),
        });
    }
    let centers: Vec<Point> = x.interior_indices(reach).into_iter().map(|i| x.points()[i]).collect();
    let pairs = centers
        .par_iter()
        .map(|&c| (centered(x, c, radius + s0), centered(&y, c, radius)))
        .collect();
    Ok((y, centers, pairs))
}

/// For each `R`-patch `Q` of `π(X)` seen from a point of `X`, the number of
/// distinct `(R + s₀)`-patches of `X` at the points where `Q` is seen.
///
/// Patches are taken at the points of `X`; this over-counts the fibers of
/// the factor map on the hull, so the bound check is conservative.
pub fn fiber_class_count(rule: &LocalDerivationRule, x: &WindowedDeloneSet, radius: f64, l: f64) -> Result<FiberCount> {
    let (_, centers, pairs) = fiber_pairs(rule, x, radius)?;
    let mut pre = ClassTable::new(Equivalence::Centered);
    let mut img = ClassTable::new(Equivalence::Centered);
    let mut fibers: Vec<BTreeSet<usize>> = Vec::new();
    for (p, q) in pairs {
        let pid = pre.classify(p);
        let qid = img.classify(q);
        if qid == fibers.len() {
            fibers.push(BTreeSet::new());
        }
        fibers[qid].insert(pid);
    }
    Ok(FiberCount {
        radius,
        s0: rule.s0(),
        count: fibers.iter().map(BTreeSet::len).max().unwrap_or(0),
        bound: (55.0 * l * l).powi(x.dim() as i32),
        image_classes: img.len(),
        preimage_classes: pre.len(),
        centers: centers.len(),
    })
}

/// Checks that points of `X` with equal `(R + s₀)`-patches have equal
/// `R`-patches in `π(X)`. Returns `(pairs_checked, violations)`, where
/// pairs are consecutive occurrences of each preimage class.
pub fn check_sliding_block(rule: &LocalDerivationRule, x: &WindowedDeloneSet, radius: f64) -> Result<(usize, usize)> {
    let (_, _, pairs) = fiber_pairs(rule, x, radius)?;
    let mut pre = ClassTable::new(Equivalence::Centered);
    let mut first: Vec<Patch> = Vec::new();
    let (mut checked, mut bad) = (0, 0);
    for (p, q) in pairs {
        let id = pre.classify(p);
        if id == first.len() {
            first.push(q);
            continue;
        }
        checked += 1;
        let f = &first[id];
        if !clouds_equal(&f.offsets, f.labels.as_deref(), &q.offsets, q.labels.as_deref(), crate::ETA) {
            bad += 1;
        }
    }
    Ok((checked, bad))
}
