use super::rule::{apply_rule, LocalDerivationRule};
use crate::atlas::{detect_period, occurrences};
use crate::error::{DeloneError, Result};
use crate::geometry::{Point, ETA};
use crate::patch::{canonical_class, clouds_equal, extract_patch, extract_unchecked, ClassTable, Equivalence, Patch, PatchClass};
use crate::repetitivity::repetitivity_function;
use crate::set::WindowedDeloneSet;
use crate::voronoi::{cell_return_patches_of, classify_cells, voronoi_cells_of_patch};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremHarnessConfig {
    pub n: u32,
    #[serde(rename = "R")]
    pub radius: f64,
    /// Zero for local derivations.
    pub epsilon: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub rule_ids: Vec<String>,
    /// Runs with `n` below the exponent condition; such runs are exploratory.
    pub override_n: bool,
    /// Common `s₀` of the rules under comparison; each rule's own when unset.
    pub s0: Option<f64>,
}

impl TheoremHarnessConfig {
    pub fn new(n: u32, radius: f64, l: f64) -> Self {
        TheoremHarnessConfig {
            n,
            radius,
            epsilon: 0.0,
            l,
            rule_ids: Vec::new(),
            override_n: false,
            s0: None,
        }
    }

    /// `Lⁿ − 1 − 12L − 176L²`, which must exceed 1.
    pub fn exponent_value(&self) -> f64 {
        let l = self.l;
        l.powi(self.n as i32) - 1.0 - 12.0 * l - 176.0 * l * l
    }

    pub fn check_exponent(&self) -> Result<()> {
        let value = self.exponent_value();
        if value <= 1.0 && !self.override_n {
            return Err(DeloneError::ExponentTooSmall {
                n: self.n,
                l: self.l,
                value,
            });
        }
        Ok(())
    }

    pub fn big_radius(&self) -> f64 {
        self.l.powi(self.n as i32) * self.radius
    }

    /// `(Lⁿ − 1)R − ε − 4LR`.
    pub fn r_prime(&self) -> f64 {
        (self.l.powi(self.n as i32) - 1.0) * self.radius - self.epsilon - 4.0 * self.l * self.radius
    }

    pub fn c_l(&self, dim: usize) -> f64 {
        (352.0 * self.l.powi(3)).powi(dim as i32)
    }

    pub fn c_n_l(&self, dim: usize) -> f64 {
        (968.0 * self.l.powi(self.n as i32 + 3)).powi(dim as i32)
    }
}

/// The family `ℱ` of patches `P_{w_{j,l}}`.
#[derive(Debug, Clone, Serialize)]
pub struct Family {
    pub radius: f64,
    pub n: u32,
    pub l: f64,
    /// `LⁿR`, the radius of the family patches.
    pub big_radius: f64,
    /// The input is translated by this point of `X` so that `0 ∈ X`.
    pub origin_shift: Point,
    /// Number `N` of cell-cloud classes of `P = X ∩ B_R(0)`.
    pub cell_classes: usize,
    /// Representative return vectors `v_j`.
    pub v: Vec<Point>,
    /// `m_j` for each `j`.
    pub m: Vec<usize>,
    /// Distinct members of `ℱ`, as centered `LⁿR`-patches.
    pub members: Vec<PatchClass>,
    pub bound: f64,
    pub override_n: bool,
    pub period: Option<Point>,
}

impl Family {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn keys(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.quantized_key).collect()
    }
}

/// Builds `ℱ` for `P = X ∩ B_R(0)` after moving a point of `X` to the origin.
#[allow(non_snake_case)]
pub fn build_family_F(x: &WindowedDeloneSet, cfg: &TheoremHarnessConfig) -> Result<Family> {
    cfg.check_exponent()?;
    let r = cfg.radius;
    let big = cfg.big_radius();
    let (i0, _) = x.nearest(Point::ORIGIN).ok_or(DeloneError::EmptySet)?;
    let shift = x.points()[i0];
    let period = detect_period(x, 4.0 * x.min_gap().max(ETA) + ETA);
    if let (Some(p), false) = (period, cfg.override_n) {
        return Err(DeloneError::PeriodicInput { period: p });
    }
    let xs = x.translate(shift)?;
    let need = big + 4.0 * cfg.l * r;
    if xs.window_radius() < need {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius: need,
            window: xs.window_radius(),
        });
    }
    let p = extract_patch(&xs, Point::ORIGIN, r)?;
    let class = canonical_class(&p, ETA)?;
    let pc = voronoi_cells_of_patch(&xs, &class)?;
    let cells = classify_cells(&xs, &pc);
    let mut table = ClassTable::new(Equivalence::Centered);
    let mut m = Vec::new();
    for &k in &cells.representative_cells {
        let crp = cell_return_patches_of(&xs, r, &pc.cells[k].1, cfg.n, cfg.l)?;
        m.push(crp.count);
        for c in crp.classes {
            table.classify(c.centered());
        }
    }
    table.sort_by_key();
    let dim = x.dim();
    Ok(Family {
        radius: r,
        n: cfg.n,
        l: cfg.l,
        big_radius: big,
        origin_shift: shift,
        cell_classes: cells.count,
        v: cells.representatives,
        m,
        members: table
            .into_classes()
            .into_iter()
            .map(|mut c| {
                c.multiplicity = 1;
                c
            })
            .collect(),
        bound: cfg.c_l(dim) * cfg.c_n_l(dim),
        override_n: cfg.override_n,
        period,
    })
}

/// The relation `ℛ` of one rule on `ℱ`.
#[derive(Debug, Clone, Serialize)]
pub struct RelationMatrix {
    pub rule_id: String,
    pub family_size: usize,
    family_keys: Vec<u64>,
    pub entries: Vec<Vec<bool>>,
    /// `(Lⁿ − 1)R − ε − 4LR`.
    pub r_prime_nominal: f64,
    /// Radius actually compared; differs from the above only in exploratory runs.
    pub r_prime_used: f64,
    pub s0: f64,
    pub shift_radius: f64,
    pub exploratory: bool,
    /// Occurrences of each member found in the usable window.
    pub occurrences_checked: Vec<usize>,
    /// Distinct image neighbourhoods among those occurrences.
    pub neighbourhoods_checked: Vec<usize>,
    /// `M̂_X(LⁿR)` when the window allows measuring it.
    pub repetitivity_at_big_radius: Option<f64>,
    /// The usable region exceeds `M̂_X(LⁿR)`, so every member's hull
    /// behaviour is represented.
    pub hull_threshold_met: Option<bool>,
}

impl RelationMatrix {
    pub fn is_reflexive(&self) -> bool {
        (0..self.family_size).all(|a| self.entries[a][a])
    }
}

fn centered(x: &WindowedDeloneSet, c: Point, r: f64) -> Patch {
    let mut p = extract_unchecked(x, c, r);
    p.center = Point::ORIGIN;
    p
}

/// Is some patch of `y` of radius `r` centered within `reach` of `c` equal to `target`?
fn shift_exists(y: &WindowedDeloneSet, target: &Patch, c: Point, reach: f64, r: f64) -> bool {
    if target.is_empty() {
        return y.indices_in_ball(c, reach + r, false).is_empty();
    }
    let o0 = target.offsets[0];
    let l0 = target.label(0);
    y.indices_in_ball(c + o0, reach, false).into_iter().any(|q| {
        if y.label(q) != l0 {
            return false;
        }
        let m = y.points()[q] - o0;
        let p = centered(y, m, r);
        clouds_equal(&p.offsets, p.labels.as_deref(), &target.offsets, target.labels.as_deref(), ETA)
    })
}

/// `a ℛ b` iff for every occurrence realizing `a` and every occurrence
/// realizing `b` some shift `w ∈ B_{4LR + 2ε}(0)` makes the images agree on
/// `B_{R′}(0)`.
///
/// Occurrences are all centers in the usable window; occurrences of `b`
/// are grouped by their image neighbourhood of radius `R′ + 4LR + 2ε`,
/// which determines every shifted comparison.
#[allow(non_snake_case)]
pub fn relation_Ri(
    rule: &LocalDerivationRule,
    family: &Family,
    x: &WindowedDeloneSet,
    cfg: &TheoremHarnessConfig,
) -> Result<RelationMatrix> {
    let s0 = cfg.s0.unwrap_or(rule.s0()).max(rule.s0());
    let big = family.big_radius;
    let r_nominal = cfg.r_prime();
    let (r_used, exploratory) = if r_nominal > 0.0 {
        (r_nominal, family.override_n)
    } else if cfg.override_n {
        (big - s0, true)
    } else {
        return Err(DeloneError::ExponentTooSmall {
            n: cfg.n,
            l: cfg.l,
            value: cfg.exponent_value(),
        });
    };
    if r_used <= 0.0 {
        return Err(DeloneError::InvalidInput(format!(
            "no comparison radius: L^n R = {big} does not exceed s0 = {s0}"
        )));
    }
    let xs = x.translate(family.origin_shift)?;
    let y = apply_rule(rule, &xs)?;
    let reach = 4.0 * cfg.l * cfg.radius + 2.0 * cfg.epsilon;
    let usable = (y.window_radius() - reach - r_used).min(xs.window_radius() - big);
    if usable <= 0.0 {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius: reach + r_used,
            window: y.window_radius(),
        });
    }
    let k = family.len();
    let per_member: Vec<(Vec<Patch>, Vec<Point>, usize)> = family
        .members
        .par_iter()
        .enumerate()
        .map(|(a, member)| {
            let occ: Vec<Point> = occurrences(&xs, member)?
                .into_iter()
                .filter(|c| c.norm() <= usable)
                .collect();
            if occ.is_empty() {
                return Err(DeloneError::NoOccurrence(a));
            }
            let mut refs = ClassTable::new(Equivalence::Centered);
            let mut hoods = ClassTable::new(Equivalence::Centered);
            let mut hood_centers = Vec::new();
            for &c in &occ {
                refs.classify(centered(&y, c, r_used));
                if hoods.classify(centered(&y, c, r_used + reach + ETA)) == hood_centers.len() {
                    hood_centers.push(c);
                }
            }
            let refs = refs.into_classes().into_iter().map(|c| c.centered()).collect();
            Ok((refs, hood_centers, occ.len()))
        })
        .collect::<Result<_>>()?;
    let entries: Vec<Vec<bool>> = (0..k)
        .into_par_iter()
        .map(|a| {
            (0..k)
                .map(|b| {
                    per_member[a].0.iter().all(|target| {
                        per_member[b]
                            .1
                            .iter()
                            .all(|&c| shift_exists(&y, target, c, reach, r_used))
                    })
                })
                .collect()
        })
        .collect();
    let rep = if x.window_radius() > 4.0 * big {
        repetitivity_function(x, big).ok()
    } else {
        None
    };
    Ok(RelationMatrix {
        rule_id: rule.name.clone(),
        family_size: k,
        family_keys: family.keys(),
        entries,
        r_prime_nominal: r_nominal,
        r_prime_used: r_used,
        s0,
        shift_radius: reach,
        exploratory,
        occurrences_checked: per_member.iter().map(|m| m.2).collect(),
        neighbourhoods_checked: per_member.iter().map(|m| m.1.len()).collect(),
        repetitivity_at_big_radius: rep,
        hull_threshold_met: rep.map(|m| usable >= m),
    })
}

/// Index pairs `(i, j)`, `i < j`, of identical matrices.
pub fn compare_relations(matrices: &[RelationMatrix]) -> Result<Vec<(usize, usize)>> {
    if let Some(first) = matrices.first() {
        if matrices.iter().any(|m| m.family_keys != first.family_keys) {
            return Err(DeloneError::FamilyMismatch);
        }
    }
    let mut pairs = Vec::new();
    for i in 0..matrices.len() {
        for j in i + 1..matrices.len() {
            if matrices[i].entries == matrices[j].entries {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

/// Sizes that bound how many distinct relations can occur.
#[derive(Debug, Clone, Serialize)]
pub struct MagnitudeNote {
    /// `c(L) c(n, L)`.
    pub family_bound: f64,
    /// `log₁₀` of the number of binary relations on a set of that size.
    pub log10_relations: f64,
    /// `log₂ log₂` of the number of covers of a set of that size (about
    /// the set size itself).
    pub log2_log2_coverings: f64,
    /// Same two figures for the measured family.
    pub measured_log10_relations: f64,
    pub measured_log2_log2_coverings: f64,
}

/// Full run: family, one matrix per rule, equal pairs.
#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub config: TheoremHarnessConfig,
    pub exponent_value: f64,
    pub exploratory: bool,
    pub family: Family,
    pub family_within_bound: bool,
    pub matrices: Vec<RelationMatrix>,
    pub equal_pairs: Vec<(usize, usize)>,
    pub magnitudes: MagnitudeNote,
}

pub fn run_theorem_harness(
    x: &WindowedDeloneSet,
    rules: &[LocalDerivationRule],
    cfg: &TheoremHarnessConfig,
) -> Result<HarnessReport> {
    let mut cfg = cfg.clone();
    if cfg.rule_ids.is_empty() {
        cfg.rule_ids = rules.iter().map(|r| r.name.clone()).collect();
    }
    if cfg.s0.is_none() {
        cfg.s0 = rules.iter().map(|r| r.s0()).fold(None, |a: Option<f64>, s| Some(a.map_or(s, |a| a.max(s))));
    }
    let family = build_family_F(x, &cfg)?;
    let matrices = rules
        .iter()
        .map(|r| relation_Ri(r, &family, x, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let equal_pairs = compare_relations(&matrices)?;
    let k = family.bound;
    let km = family.len() as f64;
    let log2 = std::f64::consts::LOG10_2;
    Ok(HarnessReport {
        exponent_value: cfg.exponent_value(),
        exploratory: matrices.iter().any(|m| m.exploratory) || cfg.override_n,
        family_within_bound: km <= k,
        magnitudes: MagnitudeNote {
            family_bound: k,
            log10_relations: k * k * log2,
            log2_log2_coverings: k,
            measured_log10_relations: km * km * log2,
            measured_log2_log2_coverings: km,
        },
        config: cfg,
        family,
        matrices,
        equal_pairs,
    })
}
