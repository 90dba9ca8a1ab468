use crate::covering::covering_radius;
use crate::error::{DeloneError, Result};
use crate::geometry::{Point, ETA};
use crate::patch::{extract_unchecked, ClassTable, Equivalence, Patch};
use crate::set::WindowedDeloneSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Image of one patch class: offsets relative to the center, optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleImage {
    pub offsets: Vec<Point>,
    pub labels: Option<Vec<u32>>,
}

/// A local derivation: the centered radius-`s` patch of each point selects
/// a finite set of offsets, and the image is the union of the selected
/// offsets placed at every point.
#[derive(Debug, Clone)]
pub struct LocalDerivationRule {
    pub name: String,
    radius: f64,
    table: ClassTable,
    images: Vec<RuleImage>,
    offset_bound: f64,
}

impl LocalDerivationRule {
    pub fn new(name: impl Into<String>, radius: f64) -> Self {
        LocalDerivationRule {
            name: name.into(),
            radius,
            table: ClassTable::new(Equivalence::Centered),
            images: Vec::new(),
            offset_bound: 0.0,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn offset_bound(&self) -> f64 {
        self.offset_bound
    }

    /// Radius of input that determines the image on a ball: `s + max ‖offset‖`.
    pub fn s0(&self) -> f64 {
        self.radius + self.offset_bound
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Adds or replaces the image of a centered radius-`s` patch.
    pub fn insert(&mut self, class: Patch, image: RuleImage) -> Result<()> {
        if let Some(l) = &image.labels {
            if l.len() != image.offsets.len() {
                return Err(DeloneError::InvalidInput("image labels do not match image offsets".into()));
            }
        }
        if let Some(first) = self.images.first() {
            if first.labels.is_some() != image.labels.is_some() {
                return Err(DeloneError::InvalidInput("rule mixes labelled and unlabelled images".into()));
            }
        }
        let class = Patch::new(Point::ORIGIN, self.radius, class.offsets, class.labels);
        self.offset_bound = image.offsets.iter().map(|o| o.norm()).fold(self.offset_bound, f64::max);
        match self.table.lookup(&class) {
            Some(id) => self.images[id] = image,
            None => {
                self.table.classify(class);
                self.images.push(image);
            }
        }
        Ok(())
    }

    pub fn image_of(&self, class: &Patch) -> Option<&RuleImage> {
        self.table.lookup(class).map(|id| &self.images[id])
    }

    /// Rule built from every radius-`s` class met in `x`.
    pub fn from_fn(
        name: impl Into<String>,
        x: &WindowedDeloneSet,
        radius: f64,
        mut f: impl FnMut(&Patch) -> RuleImage,
    ) -> Result<Self> {
        let mut rule = LocalDerivationRule::new(name, radius);
        for i in x.interior_indices(x.window_radius() - radius) {
            let mut p = extract_unchecked(x, x.points()[i], radius);
            p.center = Point::ORIGIN;
            if rule.image_of(&p).is_none() {
                let img = f(&p);
                rule.insert(p, img)?;
            }
        }
        Ok(rule)
    }

    /// Every point maps to itself, keeping its label.
    pub fn identity(x: &WindowedDeloneSet, radius: f64) -> Result<Self> {
        Self::from_fn("identity", x, radius, |p| {
            let c = p.offsets.iter().position(|o| o.norm() < ETA).unwrap_or(0);
            RuleImage {
                offsets: vec![Point::ORIGIN],
                labels: p.labels.as_ref().map(|l| vec![l[c]]),
            }
        })
    }

    /// Every point maps to itself, labels dropped.
    pub fn forget_labels(x: &WindowedDeloneSet, radius: f64) -> Result<Self> {
        Self::from_fn("forget-labels", x, radius, |_| RuleImage {
            offsets: vec![Point::ORIGIN],
            labels: None,
        })
    }

    /// One-dimensional rule sending each point to the midpoint of the gap
    /// to its right neighbour; `radius` must exceed the largest gap.
    pub fn right_midpoints(x: &WindowedDeloneSet, radius: f64) -> Result<Self> {
        if x.dim() != 1 {
            return Err(DeloneError::UnsupportedDimension(x.dim()));
        }
        let mut missing = false;
        let rule = Self::from_fn("right-midpoints", x, radius, |p| {
            let next = p.offsets.iter().map(|o| o.x()).filter(|&t| t > ETA).fold(f64::INFINITY, f64::min);
            if !next.is_finite() {
                missing = true;
            }
            RuleImage {
                offsets: vec![Point::on_line(next / 2.0)],
                labels: None,
            }
        })?;
        if missing {
            return Err(DeloneError::InvalidInput(format!("radius {radius} does not reach the right neighbour")));
        }
        Ok(rule)
    }

    /// The same rule with every image shifted by `t`.
    pub fn translated(&self, t: Point, name: impl Into<String>) -> Self {
        let mut r = self.clone();
        r.name = name.into();
        for img in r.images.iter_mut() {
            for o in img.offsets.iter_mut() {
                *o = *o + t;
            }
        }
        r.offset_bound = r
            .images
            .iter()
            .flat_map(|i| i.offsets.iter())
            .map(|o| o.norm())
            .fold(0.0, f64::max);
        r
    }

    pub fn to_file(&self, dim: usize) -> RuleFile {
        let coords = |v: &[Point]| v.iter().map(|p| p.coords(dim).to_vec()).collect();
        RuleFile {
            name: Some(self.name.clone()),
            radius: self.radius,
            entries: self
                .table
                .classes()
                .iter()
                .zip(&self.images)
                .map(|(c, img)| {
                    let p = c.centered();
                    RuleEntry {
                        class_offsets: coords(&p.offsets),
                        labels: p.labels,
                        image_offsets: coords(&img.offsets),
                        image_labels: img.labels.clone(),
                    }
                })
                .collect(),
        }
    }

    pub fn from_file(f: &RuleFile) -> Result<Self> {
        let pts = |v: &[Vec<f64>]| -> Result<Vec<Point>> {
            v.iter()
                .map(|c| Point::from_slice(c).ok_or_else(|| DeloneError::Parse(format!("bad coordinate list {c:?}"))))
                .collect()
        };
        if !(f.radius > 0.0) {
            return Err(DeloneError::Parse("rule radius must be positive".into()));
        }
        let mut rule = LocalDerivationRule::new(f.name.clone().unwrap_or_else(|| "rule".into()), f.radius);
        for e in &f.entries {
            let offsets = pts(&e.class_offsets)?;
            if let Some(l) = &e.labels {
                if l.len() != offsets.len() {
                    return Err(DeloneError::Parse("class labels do not match class offsets".into()));
                }
            }
            rule.insert(
                Patch::new(Point::ORIGIN, f.radius, offsets, e.labels.clone()),
                RuleImage {
                    offsets: pts(&e.image_offsets)?,
                    labels: e.image_labels.clone(),
                },
            )?;
        }
        Ok(rule)
    }
}

/// Serialized form of a [`LocalDerivationRule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub radius: f64,
    pub entries: Vec<RuleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleEntry {
    pub class_offsets: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u32>>,
    pub image_offsets: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_labels: Option<Vec<u32>>,
}

/// `π(X)` on the window `W − s₀`.
///
/// Points closer than `η` are merged; merged points must carry equal labels.
pub fn apply_rule(rule: &LocalDerivationRule, x: &WindowedDeloneSet) -> Result<WindowedDeloneSet> {
    let s = rule.radius;
    let w_out = x.window_radius() - rule.s0();
    if w_out <= 0.0 {
        return Err(DeloneError::WindowTooSmall(format!(
            "rule reach {} exceeds window {}",
            rule.s0(),
            x.window_radius()
        )));
    }
    let centers = x.interior_indices(x.window_radius() - s);
    let parts: Vec<Vec<(Point, Option<u32>)>> = centers
        .par_iter()
        .map(|&i| {
            let c = x.points()[i];
            let mut p = extract_unchecked(x, c, s);
            p.center = Point::ORIGIN;
            let img = rule.image_of(&p).ok_or_else(|| DeloneError::UnknownPatchClass {
                offsets: p.offsets.clone(),
                labels: p.labels.clone(),
            })?;
            Ok(img
                .offsets
                .iter()
                .enumerate()
                .map(|(k, &o)| (c + o, img.labels.as_ref().map(|l| l[k])))
                .filter(|(q, _)| q.norm() <= w_out)
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<(Point, Option<u32>)> = parts.into_iter().flatten().collect();
    out.sort_by(|a, b| a.0.lex_cmp(&b.0));
    let mut merged: Vec<(Point, Option<u32>)> = Vec::with_capacity(out.len());
    for (p, l) in out {
        // Equal points within η are adjacent after a lexicographic sort
        // unless the first coordinates straddle; check a short tail.
        let dup = merged.iter().rev().take_while(|(q, _)| p.x() - q.x() <= ETA).find(|(q, _)| q.approx_eq(p, ETA));
        match dup {
            Some((_, l2)) if *l2 != l => {
                return Err(DeloneError::OutputNotDelone(format!("conflicting labels at {p}")));
            }
            Some(_) => {}
            None => merged.push((p, l)),
        }
    }
    if merged.len() < 2 {
        return Err(DeloneError::OutputNotDelone(format!("{} point(s) in the image window", merged.len())));
    }
    let labelled = merged[0].1.is_some();
    let pts: Vec<Point> = merged.iter().map(|m| m.0).collect();
    let labels = labelled.then(|| merged.iter().map(|m| m.1.unwrap_or(0)).collect());
    let y = WindowedDeloneSet::new(x.dim(), w_out, pts, labels)?.with_meta(serde_json::json!({
        "model": "derived",
        "rule": rule.name,
        "rule_radius": s,
        "s0": rule.s0(),
        "base": x.meta(),
    }));
    let region = w_out / 2.0;
    let cov = covering_radius(y.points(), y.dim(), region, y.min_gap() / 4.0, Some(y.index()))?;
    if cov.value > region / 2.0 {
        return Err(DeloneError::OutputNotDelone(format!(
            "image leaves a hole of radius {:.3} in B_{region:.3}(0)",
            cov.value
        )));
    }
    Ok(y)
}
