//! Patches, translation classes, and tolerant class tables.

use crate::error::{DeloneError, Result};
use crate::geometry::{Point, ETA, KEY_RESOLUTION};
use crate::set::WindowedDeloneSet;
use serde::Serialize;
use std::collections::HashMap;

/// The offset cloud `(X − center) ∩ B_radius(0)` with optional labels.
///
/// Offsets are kept in tolerant lexicographic order, labels aligned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Patch {
    pub center: Point,
    pub radius: f64,
    pub offsets: Vec<Point>,
    pub labels: Option<Vec<u32>>,
}

impl Patch {
    pub fn new(center: Point, radius: f64, offsets: Vec<Point>, labels: Option<Vec<u32>>) -> Self {
        let mut p = Patch {
            center,
            radius,
            offsets,
            labels,
        };
        p.sort();
        p
    }

    fn sort(&mut self) {
        let n = self.offsets.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            self.offsets[a]
                .tolerant_cmp(&self.offsets[b])
                .then_with(|| self.label(a).cmp(&self.label(b)))
        });
        if order.iter().enumerate().any(|(i, &j)| i != j) {
            self.offsets = order.iter().map(|&i| self.offsets[i]).collect();
            if let Some(l) = &self.labels {
                self.labels = Some(order.iter().map(|&i| l[i]).collect());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn label(&self, i: usize) -> Option<u32> {
        self.labels.as_ref().map(|l| l[i])
    }

    /// Max pairwise distance between offsets; zero for a single point.
    pub fn diameter(&self) -> f64 {
        let o = &self.offsets;
        if o.len() < 2 {
            return 0.0;
        }
        if o.iter().all(|p| p.y() == 0.0) {
            let (lo, hi) = o.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p.x()), b.max(p.x()))
            });
            return hi - lo;
        }
        let mut d: f64 = 0.0;
        for i in 0..o.len() {
            for j in i + 1..o.len() {
                d = d.max(o[i].dist(o[j]));
            }
        }
        d
    }

    pub fn max_offset_norm(&self) -> f64 {
        self.offsets.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Points of the patch in the smaller open ball `B_radius(0)`.
    pub fn restrict(&self, radius: f64) -> Patch {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.offsets[i].norm() < radius - ETA)
            .collect();
        Patch {
            center: self.center,
            radius,
            offsets: keep.iter().map(|&i| self.offsets[i]).collect(),
            labels: self.labels.as_ref().map(|l| keep.iter().map(|&i| l[i]).collect()),
        }
    }

    /// The patch with every offset shifted by `-v`.
    pub fn shifted(&self, v: Point) -> Patch {
        Patch::new(
            self.center + v,
            self.radius,
            self.offsets.iter().map(|&o| o - v).collect(),
            self.labels.clone(),
        )
    }
}

/// The `R`-patch of `x` centered at `center`; errors if the ball leaves the window.
pub fn extract_patch(x: &WindowedDeloneSet, center: Point, radius: f64) -> Result<Patch> {
    x.require_ball(center, radius)?;
    Ok(extract_unchecked(x, center, radius))
}

/// Open-ball patch without the window check; for callers that validated the region.
pub(crate) fn extract_unchecked(x: &WindowedDeloneSet, center: Point, radius: f64) -> Patch {
    let r = radius - ETA;
    let idx = if r > 0.0 {
        x.indices_in_ball(center, r, false)
    } else {
        Vec::new()
    };
    let offsets = idx.iter().map(|&i| x.points()[i] - center).collect();
    let labels = x.labels().map(|l| idx.iter().map(|&i| l[i]).collect());
    Patch::new(center, radius, offsets, labels)
}

/// Equality of two offset clouds within `tol`, labels included.
///
/// Both clouds must already be in tolerant order. Pointwise comparison
/// handles the common case; a matching pass covers orderings perturbed by
/// noise at key boundaries.
pub fn clouds_equal(a: &[Point], la: Option<&[u32]>, b: &[Point], lb: Option<&[u32]>, tol: f64) -> bool {
    if a.len() != b.len() || la.is_some() != lb.is_some() {
        return false;
    }
    let lab = |l: Option<&[u32]>, i: usize| l.map(|l| l[i]);
    if (0..a.len()).all(|i| a[i].approx_eq(b[i], tol) && lab(la, i) == lab(lb, i)) {
        return true;
    }
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&i, &j| b[i].x().total_cmp(&b[j].x()));
    let mut used = vec![false; b.len()];
    'outer: for i in 0..a.len() {
        let start = order.partition_point(|&j| b[j].x() < a[i].x() - tol);
        for &j in &order[start..] {
            if b[j].x() > a[i].x() + tol {
                break;
            }
            if !used[j] && a[i].approx_eq(b[j], tol) && lab(la, i) == lab(lb, j) {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Translation `v` with `P.offsets − v = Q.offsets` as labeled clouds.
///
/// `None` when the radii differ by more than `tol` or no translation
/// matches. A pure shift of the center with identical offsets gives `v = 0`.
pub fn patch_translation_match(p: &Patch, q: &Patch, tol: f64) -> Option<Point> {
    if (p.radius - q.radius).abs() > tol || p.len() != q.len() {
        return None;
    }
    if p.is_empty() {
        return Some(Point::ORIGIN);
    }
    if p.labels.is_some() != q.labels.is_some() {
        return None;
    }
    let q0 = q.offsets[0];
    let l0 = q.label(0);
    for (i, &cand) in p.offsets.iter().enumerate() {
        if p.label(i) != l0 {
            continue;
        }
        let v = cand - q0;
        let shifted: Vec<Point> = p.offsets.iter().map(|&o| o - v).collect();
        let tmp = Patch::new(p.center, p.radius, shifted, p.labels.clone());
        if clouds_equal(&tmp.offsets, tmp.labels.as_deref(), &q.offsets, q.labels.as_deref(), tol) {
            return Some(v);
        }
    }
    None
}

/// Translation class of a patch.
///
/// The representative is the patch shifted so its least offset sits at the
/// origin; `anchor` is that least offset in the original centered frame, so
/// the centered cloud is `representative.offsets + anchor`.
#[derive(Debug, Clone, Serialize)]
pub struct PatchClass {
    pub representative: Patch,
    pub anchor: Point,
    pub quantized_key: u64,
    pub multiplicity: usize,
}

impl PatchClass {
    pub fn radius(&self) -> f64 {
        self.representative.radius
    }

    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }

    /// The cloud in the frame of the original center.
    pub fn centered(&self) -> Patch {
        Patch::new(
            Point::ORIGIN,
            self.representative.radius,
            self.representative.offsets.iter().map(|&o| o + self.anchor).collect(),
            self.representative.labels.clone(),
        )
    }

    pub fn diameter(&self) -> f64 {
        self.representative.diameter()
    }

    /// Max distance from the original center to a point of the patch.
    pub fn max_offset_norm(&self) -> f64 {
        self.representative
            .offsets
            .iter()
            .map(|&o| (o + self.anchor).norm())
            .fold(0.0, f64::max)
    }
}

fn anchored(p: &Patch) -> (Point, Patch) {
    let anchor = p.offsets[0];
    let rep = Patch::new(
        p.center,
        p.radius,
        p.offsets.iter().map(|&o| o - anchor).collect(),
        p.labels.clone(),
    );
    (anchor, rep)
}

/// Canonical translation class: anchored representative and quantized key.
///
/// Keys are computed at [`KEY_RESOLUTION`] whatever the tolerance; class
/// tables decide membership at the tolerance.
pub fn canonical_class(p: &Patch, _tol: f64) -> Result<PatchClass> {
    if p.is_empty() {
        return Err(DeloneError::EmptyPatch);
    }
    let (anchor, rep) = anchored(p);
    let quantized_key = cloud_key(&rep.offsets, rep.labels.as_deref());
    Ok(PatchClass {
        representative: rep,
        anchor,
        quantized_key,
        multiplicity: 1,
    })
}

/// Which clouds a [`ClassTable`] identifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equivalence {
    /// Clouds equal up to an arbitrary translation.
    Translation,
    /// Clouds equal as sets around their centers (atlas elements `X ∩ B_R(x) − x`).
    Centered,
}

// FNV-1a keeps keys stable across toolchains.
fn fnv(h: &mut u64, v: u64) {
    for b in v.to_le_bytes() {
        *h ^= b as u64;
        *h = h.wrapping_mul(0x100000001b3);
    }
}

type Rounded = ([i64; 2], u32);

fn rounded(cloud: &[Point], labels: Option<&[u32]>) -> Vec<Rounded> {
    cloud
        .iter()
        .enumerate()
        .map(|(i, p)| (p.quantized(), labels.map_or(u32::MAX, |l| l[i])))
        .collect()
}

fn hash_rounded(mut r: Vec<Rounded>, labelled: bool) -> u64 {
    r.sort_unstable();
    let mut h = 0xcbf29ce484222325u64;
    fnv(&mut h, r.len() as u64);
    fnv(&mut h, labelled as u64);
    for (q, l) in r {
        fnv(&mut h, q[0] as u64);
        fnv(&mut h, q[1] as u64);
        fnv(&mut h, l as u64);
    }
    h
}

fn cloud_key(cloud: &[Point], labels: Option<&[u32]>) -> u64 {
    hash_rounded(rounded(cloud, labels), labels.is_some())
}

const MAX_PROBED: usize = 10;

/// Keys of every rounding a cloud equal within [`ETA`] could have produced.
///
/// `None` when too many coordinates sit near a rounding boundary to enumerate.
fn probe_keys(cloud: &[Point], labels: Option<&[u32]>) -> Option<Vec<u64>> {
    let margin = 2.0 * ETA / KEY_RESOLUTION;
    let base = rounded(cloud, labels);
    let mut ambiguous = Vec::new();
    for (i, p) in cloud.iter().enumerate() {
        for a in 0..2 {
            let s = p.0[a] / KEY_RESOLUTION;
            let frac = s - s.round();
            if frac.abs() >= 0.5 - margin {
                ambiguous.push((i, a, if frac > 0.0 { 1i64 } else { -1 }));
            }
        }
    }
    if ambiguous.len() > MAX_PROBED {
        return None;
    }
    let mut keys = Vec::with_capacity(1 << ambiguous.len());
    for mask in 0u32..(1u32 << ambiguous.len()) {
        let mut r = base.clone();
        for (bit, &(i, a, step)) in ambiguous.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                r[i].0[a] += step;
            }
        }
        keys.push(hash_rounded(r, labels.is_some()));
    }
    Some(keys)
}

/// Deduplicating table of patch classes.
///
/// Quantized keys only select candidates; membership is always decided by
/// [`clouds_equal`] at [`ETA`].
#[derive(Debug, Clone)]
pub struct ClassTable {
    mode: Equivalence,
    classes: Vec<PatchClass>,
    clouds: Vec<Patch>,
    buckets: HashMap<u64, Vec<usize>>,
    by_len: HashMap<usize, Vec<usize>>,
}

impl ClassTable {
    pub fn new(mode: Equivalence) -> Self {
        ClassTable {
            mode,
            classes: Vec::new(),
            clouds: Vec::new(),
            buckets: HashMap::new(),
            by_len: HashMap::new(),
        }
    }

    pub fn mode(&self) -> Equivalence {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[PatchClass] {
        &self.classes
    }

    pub fn into_classes(self) -> Vec<PatchClass> {
        self.classes
    }

    fn key_cloud(&self, p: &Patch) -> Patch {
        match self.mode {
            Equivalence::Centered => p.clone(),
            Equivalence::Translation => {
                if p.is_empty() {
                    p.clone()
                } else {
                    anchored(p).1
                }
            }
        }
    }

    fn find_cloud(&self, c: &Patch) -> Option<usize> {
        let eq = |id: usize| {
            let o = &self.clouds[id];
            (o.radius - c.radius).abs() <= ETA
                && clouds_equal(&o.offsets, o.labels.as_deref(), &c.offsets, c.labels.as_deref(), ETA)
        };
        match probe_keys(&c.offsets, c.labels.as_deref()) {
            Some(keys) => {
                for k in keys {
                    if let Some(ids) = self.buckets.get(&k) {
                        if let Some(&id) = ids.iter().find(|&&id| eq(id)) {
                            return Some(id);
                        }
                    }
                }
                None
            }
            None => self
                .by_len
                .get(&c.len())
                .and_then(|ids| ids.iter().copied().find(|&id| eq(id))),
        }
    }

    /// Class id of `p`, if present.
    pub fn lookup(&self, p: &Patch) -> Option<usize> {
        self.find_cloud(&self.key_cloud(p))
    }

    /// Class id of `p`, inserting a new class if needed; bumps multiplicity.
    pub fn classify(&mut self, p: Patch) -> usize {
        let c = self.key_cloud(&p);
        if let Some(id) = self.find_cloud(&c) {
            self.classes[id].multiplicity += 1;
            return id;
        }
        let key = cloud_key(&c.offsets, c.labels.as_deref());
        let (anchor, rep) = if p.is_empty() {
            (Point::ORIGIN, p)
        } else {
            anchored(&p)
        };
        let id = self.classes.len();
        self.classes.push(PatchClass {
            representative: rep,
            anchor,
            quantized_key: key,
            multiplicity: 1,
        });
        self.buckets.entry(key).or_default().push(id);
        self.by_len.entry(c.len()).or_default().push(id);
        self.clouds.push(c);
        id
    }

    /// Reorders classes by quantized key (ties by insertion order) and
    /// returns the permutation `old id -> new id`.
    pub fn sort_by_key(&mut self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.classes.len()).collect();
        order.sort_by_key(|&i| (self.classes[i].quantized_key, i));
        let mut remap = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        self.classes = order.iter().map(|&i| self.classes[i].clone()).collect();
        self.clouds = order.iter().map(|&i| self.clouds[i].clone()).collect();
        for ids in self.buckets.values_mut().chain(self.by_len.values_mut()) {
            for id in ids.iter_mut() {
                *id = remap[*id];
            }
        }
        remap
    }
}
