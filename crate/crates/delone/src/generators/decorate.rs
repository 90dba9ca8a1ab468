use crate::error::{DeloneError, Result};
use crate::geometry::Point;
use crate::patch::{extract_unchecked, ClassTable, Equivalence, Patch};
use crate::set::WindowedDeloneSet;
use serde_json::json;

/// Map from centered radius-`s` patch classes to labels.
#[derive(Debug, Clone)]
pub struct DecorationRule {
    radius: f64,
    table: ClassTable,
    labels: Vec<u32>,
}

impl DecorationRule {
    pub fn new(radius: f64) -> Self {
        DecorationRule {
            radius,
            table: ClassTable::new(Equivalence::Centered),
            labels: Vec::new(),
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Adds or overwrites the label of a centered patch class.
    pub fn insert(&mut self, patch: Patch, label: u32) {
        match self.table.lookup(&patch) {
            Some(id) => self.labels[id] = label,
            None => {
                let id = self.table.classify(patch);
                debug_assert_eq!(id, self.labels.len());
                self.labels.push(label);
            }
        }
    }

    pub fn label_of(&self, patch: &Patch) -> Option<u32> {
        self.table.lookup(patch).map(|id| self.labels[id])
    }

    /// Labels every class met in `x` by `f`.
    pub fn from_fn(x: &WindowedDeloneSet, radius: f64, mut f: impl FnMut(&Patch) -> u32) -> Self {
        let mut rule = DecorationRule::new(radius);
        for i in x.interior_indices(x.window_radius() - radius) {
            let p = extract_unchecked(x, x.points()[i], radius);
            if rule.label_of(&p).is_none() {
                let l = f(&p);
                rule.insert(p, l);
            }
        }
        rule
    }

    /// Same label for every class met in `x`.
    pub fn constant(x: &WindowedDeloneSet, radius: f64, label: u32) -> Self {
        Self::from_fn(x, radius, |_| label)
    }

    /// One-dimensional rule labelling a point by the length of the gap to its
    /// right neighbour: the label of the nearest entry of `gaps`.
    pub fn right_gap(x: &WindowedDeloneSet, radius: f64, gaps: &[(f64, u32)]) -> Self {
        Self::from_fn(x, radius, |p| {
            let next = p
                .offsets
                .iter()
                .map(|o| o.x())
                .filter(|&t| t > 0.0)
                .fold(f64::INFINITY, f64::min);
            gaps.iter()
                .min_by(|a, b| (a.0 - next).abs().total_cmp(&(b.0 - next).abs()))
                .map_or(0, |g| g.1)
        })
    }
}

/// Labels the points of `x` within `W − s` by the class of their centered
/// `s`-patch; the result lives on the window `W − s`.
pub fn decorate(x: &WindowedDeloneSet, rule: &DecorationRule) -> Result<WindowedDeloneSet> {
    let s = rule.radius;
    let w = x.window_radius() - s;
    if w <= 0.0 {
        return Err(DeloneError::WindowTooSmall(format!(
            "decoration radius {s} exceeds window {}",
            x.window_radius()
        )));
    }
    let idx = x.interior_indices(w);
    let mut pts: Vec<Point> = Vec::with_capacity(idx.len());
    let mut labels = Vec::with_capacity(idx.len());
    for i in idx {
        let c = x.points()[i];
        let p = extract_unchecked(x, c, s);
        match rule.label_of(&p) {
            Some(l) => {
                pts.push(c);
                labels.push(l);
            }
            None => {
                return Err(DeloneError::UnknownPatchClass {
                    offsets: p.offsets,
                    labels: p.labels,
                })
            }
        }
    }
    let meta = json!({
        "model": "decorated",
        "decoration_radius": s,
        "classes": rule.len(),
        "base": x.meta(),
    });
    WindowedDeloneSet::new(x.dim(), w, pts, Some(labels))?
        .with_declared(x.r_declared(), None)
        .map(|d| d.with_meta(meta))
}
