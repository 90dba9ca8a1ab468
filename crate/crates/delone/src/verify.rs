//! Checks of each quantitative bound on a concrete window, collected into
//! machine-readable reports.

use crate::atlas::{detect_period, extension_counts, min_return_gap_of, r_atlas};
use crate::derivation::{apply_rule, fiber_class_count, LocalDerivationRule};
use crate::error::{DeloneError, Result};
use crate::geometry::{Point, ETA};
use crate::params::estimate_delone_params;
use crate::repetitivity::{check_factor_lr, lr_constant};
use crate::set::WindowedDeloneSet;
use crate::voronoi::{cell_return_patches_of, classify_cells, tiling_check, voronoi_cell, voronoi_cells_of_patch};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt;
use std::str::FromStr;

/// Named trade-off between window requirements and coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Smoke,
    Desk,
    Deep,
}

impl FromStr for Profile {
    type Err = DeloneError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Profile::Smoke),
            "desk" => Ok(Profile::Desk),
            "deep" => Ok(Profile::Deep),
            _ => Err(DeloneError::InvalidInput(format!("unknown profile {s:?} (smoke, desk, deep)"))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Smoke => "smoke",
            Profile::Desk => "desk",
            Profile::Deep => "deep",
        })
    }
}

/// Radii and sample sizes of a profile in a given dimension.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileSettings {
    pub profile: Profile,
    pub dim: usize,
    /// Smallest window the profile accepts.
    pub min_window: f64,
    /// Grid for `L̂`, return gaps and factor checks.
    pub radii: Vec<f64>,
    /// `(R₁, R₂)` for extension counts.
    pub extension: (f64, f64),
    /// `R` of the patches whose occurrence cells are examined.
    pub cell_radius: f64,
    /// Classes examined for cell checks, most frequent first.
    pub cell_classes: usize,
    pub n: u32,
    pub localization_samples: usize,
    pub tiling_half_side: f64,
}

impl ProfileSettings {
    pub fn new(profile: Profile, dim: usize) -> Self {
        let (min_window, radii, extension, cell_radius, cell_classes, samples, half) = match (profile, dim) {
            (Profile::Smoke, 1) => (150.0, vec![2.0, 5.0], (2.0, 5.0), 2.0, 4, 20, 0.0),
            (Profile::Desk, 1) => (1000.0, vec![5.0, 10.0, 20.0], (5.0, 20.0), 5.0, 8, 100, 0.0),
            (Profile::Deep, 1) => (10000.0, vec![5.0, 10.0, 20.0, 40.0], (5.0, 20.0), 5.0, 16, 200, 0.0),
            (Profile::Smoke, _) => (60.0, vec![1.0, 1.5], (1.0, 1.5), 1.0, 2, 20, 3.0),
            (Profile::Desk, _) => (80.0, vec![1.0, 1.5, 2.0], (1.0, 2.0), 1.0, 4, 100, 5.0),
            (Profile::Deep, _) => (120.0, vec![1.0, 1.5, 2.0, 3.0], (1.5, 3.0), 1.5, 8, 200, 8.0),
        };
        ProfileSettings {
            profile,
            dim,
            min_window,
            radii,
            extension,
            cell_radius,
            cell_classes,
            n: 1,
            localization_samples: samples,
            tiling_half_side: half,
        }
    }
}

/// How `measured` is compared with `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Passed,
    Failed,
    Skipped,
    Error,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowStats {
    pub dim: usize,
    pub window_radius: f64,
    pub points: usize,
    pub min_gap: f64,
}

impl WindowStats {
    pub fn of(x: &WindowedDeloneSet) -> Self {
        WindowStats {
            dim: x.dim(),
            window_radius: x.window_radius(),
            points: x.len(),
            min_gap: x.min_gap(),
        }
    }
}

/// Pass/fail record of one check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub parameters: Value,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    pub comparison: Comparison,
    pub status: CheckStatus,
    /// Why the check was skipped or could not run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub scanned_range: Value,
    pub window_stats: WindowStats,
}

impl VerificationReport {
    fn new(id: &str, x: &WindowedDeloneSet, parameters: Value, comparison: Comparison) -> Self {
        VerificationReport {
            check_id: id.into(),
            parameters,
            measured: None,
            bound: None,
            comparison,
            status: CheckStatus::Skipped,
            reason: None,
            scanned_range: Value::Null,
            window_stats: WindowStats::of(x),
        }
    }

    fn with(mut self, measured: f64, bound: f64, scanned: Value) -> Self {
        let ok = match self.comparison {
            Comparison::AtMost => measured <= bound,
            Comparison::AtLeast => measured >= bound,
        };
        self.measured = Some(measured);
        self.bound = Some(bound);
        self.status = if ok { CheckStatus::Passed } else { CheckStatus::Failed };
        self.scanned_range = scanned;
        self
    }

    fn skipped(mut self, reason: impl Into<String>) -> Self {
        self.status = CheckStatus::Skipped;
        self.reason = Some(reason.into());
        self
    }

    fn failed_with(mut self, e: &DeloneError) -> Self {
        self.status = match e {
            DeloneError::PeriodicInput { .. } => CheckStatus::Failed,
            _ => CheckStatus::Error,
        };
        self.reason = Some(e.to_string());
        self
    }

    fn from_result(self, r: Result<VerificationReport>) -> Self {
        r.unwrap_or_else(|e| self.failed_with(&e))
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Passed
    }

    /// Failed or errored; skipped checks do not count.
    pub fn is_failure(&self) -> bool {
        matches!(self.status, CheckStatus::Failed | CheckStatus::Error)
    }
}

/// Identifiers accepted by [`run_check`].
pub const CHECK_IDS: &[&str] = &[
    "atlas-partition",
    "cell-count",
    "cell-diameter",
    "cell-return-count",
    "contained-ball",
    "extension-count",
    "factor-lr",
    "fiber-bound",
    "linear-repetitivity",
    "relative-density",
    "return-gap",
    "tiling-area",
    "uniform-discreteness",
    "voronoi-localization",
];

/// Shared inputs of the checks.
struct Ctx<'a> {
    x: &'a WindowedDeloneSet,
    s: ProfileSettings,
    l: f64,
    /// Why `l` is not a measured estimate, if it is not.
    l_missing: Option<String>,
    l_report: VerificationReport,
    big_r: f64,
    period: Option<Point>,
}

impl Ctx<'_> {
    /// Reports for checks that need `L̂` when it is unavailable.
    fn needs_l(&self, rep: VerificationReport) -> std::result::Result<VerificationReport, VerificationReport> {
        match &self.l_missing {
            Some(why) => Err(rep.skipped(format!("no repetitivity constant: {why}"))),
            None => Ok(rep),
        }
    }
}

fn pow_d(v: f64, d: usize) -> f64 {
    v.powi(d as i32)
}

fn check_uniform_discreteness(c: &Ctx) -> VerificationReport {
    let rep = VerificationReport::new("uniform-discreteness", c.x, json!({}), Comparison::AtLeast);
    match c.x.r_declared() {
        None => rep.skipped("no declared packing constant"),
        Some(r) => rep.with(c.x.min_gap(), 2.0 * r - 1e-9, json!({"pairs": "all"})),
    }
}

fn check_relative_density(c: &Ctx) -> VerificationReport {
    let rep = VerificationReport::new("relative-density", c.x, json!({}), Comparison::AtMost);
    match (c.x.big_r_declared(), c.x.check_declared().measured_covering) {
        (None, _) => rep.skipped("no declared covering constant"),
        (Some(_), None) => rep.skipped("window too small to sample the covering radius"),
        (Some(big_r), Some(cov)) => rep.with(
            cov,
            big_r + 1e-9,
            json!({"region_radius": c.x.window_radius() - big_r, "resolution": big_r / 8.0}),
        ),
    }
}

/// Every class of the smallest-radius atlas occurs at least twice, and the
/// classes partition the centers.
fn check_atlas_partition(c: &Ctx) -> VerificationReport {
    let r = c.s.radii[0];
    let rep = VerificationReport::new("atlas-partition", c.x, json!({"R": r}), Comparison::AtMost);
    let run = || -> Result<VerificationReport> {
        let atlas = r_atlas(c.x, r)?;
        let centers = c.x.interior_indices(c.x.window_radius() - r).len();
        let total: usize = atlas.occurrence_map.iter().map(Vec::len).sum();
        let single = atlas.occurrence_map.iter().filter(|o| o.len() < 2).count();
        let defects = single + centers.abs_diff(total);
        Ok(rep.clone().with(
            defects as f64,
            0.0,
            json!({"centers": centers, "classes": atlas.len(), "single_occurrence_classes": single}),
        ))
    };
    rep.clone().from_result(run())
}

fn check_return_gap(c: &Ctx, r: f64) -> VerificationReport {
    let bound = r / (11.0 * c.l);
    let rep = VerificationReport::new("return-gap", c.x, json!({"R": r, "L": c.l}), Comparison::AtLeast);
    let rep = match c.needs_l(rep) {
        Ok(r) => r,
        Err(r) => return r,
    };
    if let Some(p) = c.period {
        return rep.failed_with(&DeloneError::PeriodicInput { period: p });
    }
    if r >= c.x.window_radius() / 4.0 {
        return rep.skipped(format!("R = {r} needs a window above {}", 4.0 * r));
    }
    let run = || -> Result<VerificationReport> {
        let atlas = r_atlas(c.x, r)?;
        let g = min_return_gap_of(c.x.dim(), &atlas)?;
        Ok(rep.clone().with(
            g.gap,
            bound,
            json!({"classes": g.class_count, "classes_with_returns": g.classes_with_returns, "worst_class": g.class_index}),
        ))
    };
    rep.clone().from_result(run())
}

/// Sites spread evenly over the points of `B_ρ(0)`.
fn sample_sites(x: &WindowedDeloneSet, rho: f64, k: usize) -> Vec<Point> {
    let idx = x.interior_indices(rho);
    if idx.is_empty() {
        return Vec::new();
    }
    let step = (idx.len() as f64 / k as f64).max(1.0);
    (0..k.min(idx.len()))
        .map(|i| x.points()[idx[((i as f64 + 0.5) * step) as usize % idx.len()]])
        .collect()
}

fn check_localization(c: &Ctx) -> VerificationReport {
    let (c4, c8) = (4.0 * c.big_r, 8.0 * c.big_r);
    let rep = VerificationReport::new(
        "voronoi-localization",
        c.x,
        json!({"cutoff_small": c4, "cutoff_large": c8, "samples": c.s.localization_samples}),
        Comparison::AtMost,
    );
    let rho = c.x.window_radius() - 2.0 * c8;
    if rho <= 0.0 {
        return rep.skipped("window below 16 R");
    }
    let sites = sample_sites(c.x, rho, c.s.localization_samples);
    let run = || -> Result<VerificationReport> {
        let bad = sites
            .par_iter()
            .map(|&s| Ok(!voronoi_cell(c.x, s, c4)?.same_vertices(&voronoi_cell(c.x, s, c8)?, 1e-9)))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        Ok(rep.clone().with(bad as f64, 0.0, json!({"sites": sites.len(), "region_radius": rho})))
    };
    rep.clone().from_result(run())
}

fn check_tiling(c: &Ctx) -> VerificationReport {
    let h = c.s.tiling_half_side;
    let cutoff = 4.0 * c.big_r;
    let rep = VerificationReport::new("tiling-area", c.x, json!({"half_side": h, "cutoff": cutoff}), Comparison::AtMost);
    if c.x.dim() != 2 {
        return rep.skipped("area bookkeeping is two-dimensional");
    }
    let run = || -> Result<VerificationReport> {
        let t = tiling_check(c.x, cutoff, h)?;
        Ok(rep.clone().with(
            t.relative_error.max(t.max_pair_overlap / t.square_area),
            1e-6,
            json!({"cells": t.cells, "square_area": t.square_area, "cell_area_sum": t.cell_area_sum}),
        ))
    };
    rep.clone().from_result(run())
}

/// Reports of the checks built on the occurrence cells `V_{P,v}`.
fn check_cells(c: &Ctx) -> Vec<VerificationReport> {
    let r = c.s.cell_radius;
    let d = c.x.dim();
    let params = json!({"R": r, "L": c.l, "n": c.s.n, "classes_examined": c.s.cell_classes});
    let diam = VerificationReport::new("cell-diameter", c.x, params.clone(), Comparison::AtMost);
    let ball = VerificationReport::new("contained-ball", c.x, params.clone(), Comparison::AtLeast);
    let count = VerificationReport::new("cell-count", c.x, params.clone(), Comparison::AtMost);
    let ret = VerificationReport::new("cell-return-count", c.x, params, Comparison::AtMost);
    if c.l_missing.is_some() {
        return [diam, ball, count, ret].into_iter().map(|r| c.needs_l(r).unwrap_err()).collect();
    }
    if let Some(p) = c.period {
        let e = DeloneError::PeriodicInput { period: p };
        let why = format!("skipped: {e}");
        return vec![diam.skipped(&why), ball.skipped(&why), count.skipped(&why), ret.skipped(why)];
    }
    let run = || -> Result<[(f64, usize); 4]> {
        let atlas = r_atlas(c.x, r)?;
        let mut ids: Vec<usize> = (0..atlas.len()).collect();
        ids.sort_by_key(|&i| std::cmp::Reverse(atlas.occurrences(i).len()));
        ids.truncate(c.s.cell_classes);
        let per: Vec<(f64, f64, usize, usize, usize)> = ids
            .par_iter()
            .map(|&i| {
                let pc = voronoi_cells_of_patch(c.x, &atlas.classes[i])?;
                let base = pc.return_vectors.base_center;
                let max_d = pc.cells.iter().map(|(_, p)| p.diameter()).fold(0.0, f64::max);
                let min_in = pc
                    .cells
                    .iter()
                    .map(|(v, p)| p.inner_radius(*v + base))
                    .fold(f64::INFINITY, f64::min);
                let cls = classify_cells(c.x, &pc);
                let mut worst = 0;
                let mut tried = 0;
                for &k in &cls.representative_cells {
                    match cell_return_patches_of(c.x, r, &pc.cells[k].1, c.s.n, c.l) {
                        Ok(crp) => {
                            worst = worst.max(crp.count);
                            tried += 1;
                        }
                        Err(DeloneError::InsufficientWindow { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                Ok((max_d, min_in, cls.count, worst, tried))
            })
            .collect::<Result<_>>()?;
        let max_d = per.iter().map(|p| p.0).fold(0.0, f64::max);
        let min_in = per.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let cnt = per.iter().map(|p| p.2).max().unwrap_or(0);
        let worst = per.iter().map(|p| p.3).max().unwrap_or(0);
        let tried: usize = per.iter().map(|p| p.4).sum();
        Ok([(max_d, ids.len()), (min_in, ids.len()), (cnt as f64, ids.len()), (worst as f64, tried)])
    };
    match run() {
        Err(e) => vec![
            diam.failed_with(&e),
            ball.failed_with(&e),
            count.failed_with(&e),
            ret.failed_with(&e),
        ],
        Ok([a, b, k, w]) => {
            let ret = if w.1 == 0 {
                ret.skipped("no representative cell leaves room for the L^n R ball")
            } else {
                ret.with(w.0, pow_d(968.0 * c.l.powi(c.s.n as i32 + 3), d), json!({"cells": w.1}))
            };
            vec![
                diam.with(a.0, 4.0 * c.l * r, json!({"classes": a.1})),
                ball.with(b.0, r / (22.0 * c.l), json!({"classes": b.1})),
                count.with(k.0, pow_d(352.0 * c.l.powi(3), d), json!({"classes": k.1})),
                ret,
            ]
        }
    }
}

fn check_extensions(c: &Ctx) -> VerificationReport {
    let (r1, r2) = c.s.extension;
    let d = c.x.dim();
    let rep = VerificationReport::new("extension-count", c.x, json!({"R1": r1, "R2": r2, "L": c.l}), Comparison::AtMost);
    let rep = match c.needs_l(rep) {
        Ok(r) => r,
        Err(r) => return r,
    };
    let run = || -> Result<VerificationReport> {
        let e = extension_counts(c.x, r1, r2)?;
        Ok(rep.clone().with(
            e.max as f64,
            pow_d(44.0 * c.l * c.l, d) * pow_d(r2 / r1, d),
            json!({"classes_r1": e.classes_r1, "classes_r2": e.classes_r2}),
        ))
    };
    rep.clone().from_result(run())
}

/// Rule used for the factor checks: label forgetting on labelled input,
/// right midpoints in dimension one, identity otherwise.
fn factor_rule(c: &Ctx) -> Result<LocalDerivationRule> {
    if c.x.labels().is_some() {
        LocalDerivationRule::forget_labels(c.x, 1e-6)
    } else if c.x.dim() == 1 {
        LocalDerivationRule::right_midpoints(c.x, 2.5 * c.big_r)
    } else {
        LocalDerivationRule::identity(c.x, 1e-6)
    }
}

fn check_factors(c: &Ctx) -> Vec<VerificationReport> {
    let d = c.x.dim();
    let radii: Vec<f64> = c.s.radii.clone();
    let fib = VerificationReport::new("fiber-bound", c.x, json!({"radii": radii, "L": c.l}), Comparison::AtMost);
    let lr = VerificationReport::new("factor-lr", c.x, json!({"radii": radii, "L": c.l}), Comparison::AtMost);
    if c.l_missing.is_some() {
        return [fib, lr].into_iter().map(|r| c.needs_l(r).unwrap_err()).collect();
    }
    let rule = match factor_rule(c) {
        Ok(r) => r,
        Err(e) => return vec![fib.failed_with(&e), lr.failed_with(&e)],
    };
    let name = rule.name.clone();
    let fib = fib.clone().from_result((|| {
        let counts = radii
            .iter()
            .filter(|&&r| r + rule.s0() < c.x.window_radius() - rule.s0())
            .map(|&r| fiber_class_count(&rule, c.x, r, c.l))
            .collect::<Result<Vec<_>>>()?;
        let m = counts.iter().map(|f| f.count).max().ok_or(DeloneError::WindowTooSmall("no radius fits".into()))?;
        Ok(fib.clone().with(
            m as f64,
            pow_d(55.0 * c.l * c.l, d),
            json!({"rule": name, "counts": counts.iter().map(|f| f.count).collect::<Vec<_>>()}),
        ))
    })());
    let lr = if c.period.is_some() {
        lr.skipped("periodic input")
    } else {
        lr.clone().from_result((|| {
            let y = apply_rule(&rule, c.x)?;
            let rs: Vec<f64> = radii.iter().copied().filter(|&r| r < y.window_radius() / 4.0).collect();
            let rep = check_factor_lr(&y, c.l, &rs)?;
            let failing = rep.classes.iter().filter(|k| !k.passed).count();
            Ok(lr.clone().with(
                failing as f64,
                0.0,
                json!({"rule": name, "classes": rep.classes.len(), "threshold_diameter": rep.threshold_diameter}),
            ))
        })())
    };
    vec![fib, lr]
}

fn context(x: &WindowedDeloneSet, profile: Profile, l: Option<f64>, radius: Option<f64>) -> Result<Ctx<'_>> {
    if !(x.dim() == 1 || x.dim() == 2) {
        return Err(DeloneError::UnsupportedDimension(x.dim()));
    }
    let mut s = ProfileSettings::new(profile, x.dim());
    if let Some(r) = radius {
        s.radii = vec![r];
        s.cell_radius = r;
    } else if x.window_radius() < s.min_window {
        return Err(DeloneError::WindowTooSmall(format!(
            "profile {profile} needs a window of at least {} (got {})",
            s.min_window,
            x.window_radius()
        )));
    }
    let params = estimate_delone_params(x)?;
    let big_r = x.big_r_declared().unwrap_or(params.big_r_hat);
    let rep = VerificationReport::new("linear-repetitivity", x, json!({"radii": s.radii}), Comparison::AtMost);
    let (l, l_missing, l_report) = match (l, lr_constant(x, &s.radii)) {
        (Some(l), _) => (l, None, rep.skipped(format!("L = {l} supplied"))),
        (None, Ok(est)) => {
            let mut rep = rep.with(est.l_hat, f64::INFINITY, json!({"M_of_R": est.m_of_r}));
            // Informational: a measured constant always passes.
            rep.bound = None;
            (est.l_hat, None, rep)
        }
        (None, Err(e)) => (f64::NAN, Some(e.to_string()), rep.failed_with(&e)),
    };
    let period = detect_period(x, 2.0 * big_r + ETA);
    Ok(Ctx {
        x,
        s,
        l,
        l_missing,
        l_report,
        big_r,
        period,
    })
}

/// Runs every check of the profile; failures are recorded in the reports.
///
/// `L̂` is estimated on the profile radii unless `l` is given; when it
/// cannot be estimated the `linear-repetitivity` check fails and the checks
/// that need it are skipped. Errors only when the window is below the
/// profile minimum.
pub fn verify_all(x: &WindowedDeloneSet, profile: Profile, l: Option<f64>) -> Result<Vec<VerificationReport>> {
    let c = context(x, profile, l, None)?;
    let tasks: Vec<Box<dyn Fn(&Ctx) -> Vec<VerificationReport> + Sync>> = vec![
        Box::new(|c| vec![c.l_report.clone()]),
        Box::new(|c| vec![check_uniform_discreteness(c)]),
        Box::new(|c| vec![check_relative_density(c)]),
        Box::new(|c| vec![check_atlas_partition(c)]),
        Box::new(|c| c.s.radii.iter().map(|&r| check_return_gap(c, r)).collect()),
        Box::new(|c| vec![check_localization(c)]),
        Box::new(|c| vec![check_tiling(c)]),
        Box::new(check_cells),
        Box::new(|c| vec![check_extensions(c)]),
        Box::new(check_factors),
    ];
    let mut out: Vec<VerificationReport> = tasks.par_iter().flat_map(|t| t(&c)).collect();
    out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Ok(out)
}

/// Runs one check by id; `radius` replaces the profile radii, and then the
/// profile's minimum window is not enforced.
pub fn run_check(
    x: &WindowedDeloneSet,
    id: &str,
    profile: Profile,
    radius: Option<f64>,
    l: Option<f64>,
) -> Result<Vec<VerificationReport>> {
    let c = context(x, profile, l, radius)?;
    Ok(match id {
        "atlas-partition" => vec![check_atlas_partition(&c)],
        "cell-count" | "cell-diameter" | "cell-return-count" | "contained-ball" => {
            check_cells(&c).into_iter().filter(|r| r.check_id == id).collect()
        }
        "extension-count" => vec![check_extensions(&c)],
        "factor-lr" | "fiber-bound" => check_factors(&c).into_iter().filter(|r| r.check_id == id).collect(),
        "relative-density" => vec![check_relative_density(&c)],
        "return-gap" => c.s.radii.iter().map(|&r| check_return_gap(&c, r)).collect(),
        "tiling-area" => vec![check_tiling(&c)],
        "uniform-discreteness" => vec![check_uniform_discreteness(&c)],
        "voronoi-localization" => vec![check_localization(&c)],
        _ => {
            return Err(DeloneError::InvalidInput(format!(
                "unknown check {id:?}; known: {}",
                CHECK_IDS.join(", ")
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_lattice, generate_substitution_1d, SubstitutionRule1D};

    #[test]
    fn fibonacci_smoke_passes() {
        let x = generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 300.0).unwrap();
        let reps = verify_all(&x, Profile::Smoke, None).unwrap();
        for r in &reps {
            assert!(!r.is_failure(), "{r:?}");
        }
        assert!(reps.iter().filter(|r| r.passed()).count() >= 10);
        let ids: Vec<&str> = reps.iter().map(|r| r.check_id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn deleted_point_is_caught() {
        let x = generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 300.0).unwrap();
        let i = x.nearest(Point::on_line(17.0)).unwrap().0;
        let y = x.without_point(i).unwrap();
        let reps = verify_all(&y, Profile::Smoke, None).unwrap();
        let failed: Vec<&str> = reps.iter().filter(|r| r.is_failure()).map(|r| r.check_id.as_str()).collect();
        assert!(failed.contains(&"relative-density"), "{failed:?}");
        assert!(failed.contains(&"atlas-partition"), "{failed:?}");
        // With L supplied the bound checks still run.
        let reps = verify_all(&y, Profile::Smoke, Some(2.31)).unwrap();
        assert!(reps.iter().any(|r| r.check_id == "return-gap" && r.status != CheckStatus::Skipped));
    }

    #[test]
    fn lattice_skips_periodicity_checks() {
        let z = generate_lattice(&[vec![1.0, 0.0], vec![0.0, 1.0]], 60.0).unwrap();
        let reps = verify_all(&z, Profile::Smoke, None).unwrap();
        let get = |id: &str| reps.iter().find(|r| r.check_id == id).unwrap();
        assert_eq!(get("return-gap").status, CheckStatus::Failed);
        assert!(get("return-gap").reason.as_ref().unwrap().contains("periodic"));
        assert_eq!(get("cell-diameter").status, CheckStatus::Skipped);
        assert!(get("voronoi-localization").passed());
        assert!(get("tiling-area").passed());
        assert!(get("relative-density").passed());
    }

    #[test]
    fn small_window_is_refused() {
        let x = generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 100.0).unwrap();
        assert!(matches!(verify_all(&x, Profile::Desk, None), Err(DeloneError::WindowTooSmall(_))));
        assert!("nope".parse::<Profile>().is_err());
        assert_eq!("deep".parse::<Profile>().unwrap(), Profile::Deep);
    }

    #[test]
    fn single_check_by_id() {
        let x = generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 300.0).unwrap();
        let r = run_check(&x, "return-gap", Profile::Smoke, Some(10.0), None).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].passed());
        assert!(run_check(&x, "bogus", Profile::Smoke, None, None).is_err());
    }
}
