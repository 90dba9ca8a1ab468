//! The Delone metric on finite windows, as a certified bracket.
//!
//! `d(X, Y)` is the infimum of the `ε ∈ (0, 1/√2)` for which some
//! `v, v′ ∈ B_ε(0)` give `(X − v) ∩ B_{1/ε}(0) = (Y − v′) ∩ B_{1/ε}(0)`,
//! and `1/√2` when there is none. The set of such `ε` is closed upwards, so
//! the infimum is located by bisection on an exact feasibility test.

use crate::error::{DeloneError, Result};
use crate::geometry::{Point, ETA};
use crate::set::WindowedDeloneSet;
use serde::Serialize;

pub const METRIC_CAP: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricConfig {
    /// Target width of the bracket.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            tolerance: 1e-7,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricWitness {
    pub epsilon: f64,
    pub v: Point,
    pub v_prime: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricResult {
    pub lower: f64,
    pub upper: f64,
    pub cap_hit: bool,
    pub witness: Option<MetricWitness>,
    /// The windows are too small to test `ε` below `upper`.
    pub resolution_limited: bool,
    pub iterations: usize,
}

/// Smallest `ε` whose test reads only inside both windows.
pub fn smallest_testable_epsilon(x: &WindowedDeloneSet, y: &WindowedDeloneSet) -> Result<f64> {
    let w = x.window_radius().min(y.window_radius());
    // 1/ε + 3ε ≤ w
    let disc = w * w - 12.0;
    if disc < 0.0 {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius: 12f64.sqrt(),
            window: w,
        });
    }
    Ok(((w - disc.sqrt()) / 6.0) * (1.0 + 1e-12))
}

pub fn delone_distance(x: &WindowedDeloneSet, y: &WindowedDeloneSet, cfg: &MetricConfig) -> Result<MetricResult> {
    if x.dim() != y.dim() {
        return Err(DeloneError::InvalidInput("sets of different dimension".into()));
    }
    let eps_min = smallest_testable_epsilon(x, y)?;
    let w = x.window_radius().min(y.window_radius());
    if eps_min >= METRIC_CAP {
        return Err(DeloneError::InsufficientWindow {
            center: Point::ORIGIN,
            radius: 1.0 / METRIC_CAP + 3.0 * METRIC_CAP,
            window: w,
        });
    }
    let witness_at = |eps: f64, (v, v_prime): (Point, Point)| MetricWitness {
        epsilon: eps,
        v,
        v_prime,
    };
    if x.restrict(w)?.same_points(&y.restrict(w)?) {
        return Ok(MetricResult {
            lower: 0.0,
            upper: 0.0,
            cap_hit: false,
            witness: Some(witness_at(eps_min, (Point::ORIGIN, Point::ORIGIN))),
            resolution_limited: false,
            iterations: 0,
        });
    }
    let top = METRIC_CAP * (1.0 - 1e-12);
    let Some(m) = feasible(x, y, top)? else {
        return Ok(MetricResult {
            lower: METRIC_CAP,
            upper: METRIC_CAP,
            cap_hit: true,
            witness: None,
            resolution_limited: false,
            iterations: 1,
        });
    };
    let mut hi = top;
    let mut best = m;
    let mut iterations = 1;
    if let Some(m) = feasible(x, y, eps_min)? {
        return Ok(MetricResult {
            lower: 0.0,
            upper: eps_min,
            cap_hit: false,
            witness: Some(witness_at(eps_min, m)),
            resolution_limited: true,
            iterations: 2,
        });
    }
    let mut lo = eps_min;
    while hi - lo > cfg.tolerance && iterations < cfg.max_iterations {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        match feasible(x, y, mid)? {
            Some(m) => {
                hi = mid;
                best = m;
            }
            None => lo = mid,
        }
    }
    // Candidates may sit on the boundary of B_ε; the witness is stated at a
    // slightly larger ε, where the balls are strictly satisfied.
    let eps = hi * (1.0 + 1e-12) + 2.0 * ETA;
    Ok(MetricResult {
        lower: lo,
        upper: eps.min(METRIC_CAP),
        cap_hit: false,
        witness: Some(witness_at(eps, best)),
        resolution_limited: false,
        iterations,
    })
}

/// A pair `(v, v′)` with `‖v‖, ‖v′‖ ≤ ε` and `(X − v) ∩ B_{1/ε}(0) =
/// (Y − v′) ∩ B_{1/ε}(0)`, if one exists.
///
/// Every match pairs the point `x₀` of `X` nearest the origin with some
/// `y ∈ Y` within `2ε`, which fixes `t = v − v′ = x₀ − y`. For fixed `t`,
/// the admissible `v` are the lens `B_ε(0) ∩ B_ε(t)` minus the open balls
/// `B_{1/ε}(s)` about the points `s` of `X △ (Y + t)`; if nonempty this set
/// contains `0`, `t/2` or an intersection point of two of the bounding
/// circles, which are tried in turn.
pub fn feasible(x: &WindowedDeloneSet, y: &WindowedDeloneSet, eps: f64) -> Result<Option<(Point, Point)>> {
    let rho = 1.0 / eps;
    let need = rho + 3.0 * eps;
    for s in [x, y] {
        if need > s.window_radius() + ETA {
            return Err(DeloneError::InsufficientWindow {
                center: Point::ORIGIN,
                radius: need,
                window: s.window_radius(),
            });
        }
    }
    let reach = rho + eps;
    let xs = x.indices_in_ball(Point::ORIGIN, reach, false);
    let ys = y.indices_in_ball(Point::ORIGIN, reach + 2.0 * eps, false);
    let ys_inner = y.indices_in_ball(Point::ORIGIN, reach, false);
    if xs.is_empty() && ys_inner.is_empty() {
        return Ok(Some((Point::ORIGIN, Point::ORIGIN)));
    }
    let pivots: Vec<usize> = match x.nearest(Point::ORIGIN) {
        Some((i, d)) if d + eps < rho => vec![i],
        _ => xs.clone(),
    };
    let mut ts: Vec<Point> = Vec::new();
    for &i in &pivots {
        let p = x.points()[i];
        for j in y.indices_in_ball(p, 2.0 * eps, false) {
            if x.label(i) == y.label(j) {
                ts.push(p - y.points()[j]);
            }
        }
    }
    if pivots.len() > 1 && xs.is_empty() {
        // Only `Y` has points nearby; they must all leave the ball.
        ts.extend(ys_inner.iter().map(|&j| -y.points()[j]));
    }
    ts.sort_by(|a, b| a.lex_cmp(b));
    ts.dedup_by(|a, b| a.approx_eq(*b, ETA));
    for t in ts {
        if t.norm() > 2.0 * eps {
            continue;
        }
        if let Some(v) = admissible_v(x, y, &xs, &ys, t, eps, rho) {
            return Ok(Some((v, v - t)));
        }
    }
    Ok(None)
}

fn admissible_v(
    x: &WindowedDeloneSet,
    y: &WindowedDeloneSet,
    xs: &[usize],
    ys: &[usize],
    t: Point,
    eps: f64,
    rho: f64,
) -> Option<Point> {
    let reach = rho + eps;
    let mut bad: Vec<Point> = Vec::new();
    for &i in xs {
        let p = x.points()[i];
        let hit = y.find(p - t, ETA).filter(|&j| y.label(j) == x.label(i));
        if hit.is_none() {
            if p.norm() + eps < rho {
                return None;
            }
            bad.push(p);
        }
    }
    for &j in ys {
        let z = y.points()[j] + t;
        if z.norm() >= reach {
            continue;
        }
        let hit = x.find(z, ETA).filter(|&i| x.label(i) == y.label(j));
        if hit.is_none() {
            if z.norm() + eps < rho {
                return None;
            }
            bad.push(z);
        }
    }
    let ok = |v: Point| {
        v.norm() <= eps + ETA && v.dist(t) <= eps + ETA && bad.iter().all(|&s| v.dist(s) >= rho - ETA)
    };
    let mut circles: Vec<(Point, f64)> = vec![(Point::ORIGIN, eps), (t, eps)];
    circles.extend(bad.iter().map(|&s| (s, rho)));
    let mut cands = vec![Point::ORIGIN, t * 0.5];
    if x.dim() == 1 {
        for &(c, r) in &circles {
            cands.push(Point::on_line(c.x() - r));
            cands.push(Point::on_line(c.x() + r));
        }
    } else {
        for a in 0..circles.len() {
            for b in a + 1..circles.len() {
                cands.extend(circle_intersections(circles[a], circles[b]));
            }
        }
    }
    cands.into_iter().find(|&v| ok(v))
}

fn circle_intersections((c1, r1): (Point, f64), (c2, r2): (Point, f64)) -> Vec<Point> {
    let d = c1.dist(c2);
    if d < 1e-15 || d > r1 + r2 + ETA || d < (r1 - r2).abs() - ETA {
        return Vec::new();
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let u = (c2 - c1) * (1.0 / d);
    let m = c1 + u * a;
    let perp = Point::new(-u.y(), u.x());
    vec![m + perp * h, m - perp * h]
}
