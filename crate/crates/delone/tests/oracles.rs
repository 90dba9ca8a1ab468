//! Library results against naive oracles written from the definitions.

use delone::atlas::{r_atlas, return_vectors};
use delone::generators::{
    ammann_beenker_scheme, fibonacci_scheme, generate_cut_and_project, generate_substitution_1d, SubstitutionRule1D,
};
use delone::metric::{delone_distance, MetricConfig};
use delone::voronoi::voronoi_cell;
use delone::{Point, WindowedDeloneSet};
use std::collections::BTreeSet;

fn fib(w: f64) -> WindowedDeloneSet {
    generate_substitution_1d(&SubstitutionRule1D::fibonacci(), w).unwrap().forget_labels()
}

/// Distinct centered open-ball patches, keyed by offsets rounded to 1e-6.
fn naive_class_count(x: &WindowedDeloneSet, r: f64) -> usize {
    let pts = x.points();
    let mut seen = BTreeSet::new();
    for c in pts.iter().filter(|c| c.norm() <= x.window_radius() - r) {
        let mut key: Vec<(i64, i64)> = pts
            .iter()
            .filter(|p| p.dist(*c) < r - 1e-9)
            .map(|p| (((p.x() - c.x()) * 1e6).round() as i64, ((p.y() - c.y()) * 1e6).round() as i64))
            .collect();
        key.sort_unstable();
        seen.insert(key);
    }
    seen.len()
}

#[test]
fn atlas_matches_naive_count_on_fibonacci() {
    let x = fib(600.0);
    for r in [1.0, 2.0, 3.5, 5.0, 10.0] {
        assert_eq!(r_atlas(&x, r).unwrap().len(), naive_class_count(&x, r), "R = {r}");
    }
}

#[test]
fn atlas_matches_naive_count_on_ammann_beenker() {
    let x = generate_cut_and_project(&ammann_beenker_scheme(), 25.0).unwrap().set;
    for r in [1.0, 1.5, 2.0] {
        assert_eq!(r_atlas(&x, r).unwrap().len(), naive_class_count(&x, r), "R = {r}");
    }
}

#[test]
fn substitution_and_projection_agree_on_fibonacci() {
    let s = fib(3000.0);
    let c = generate_cut_and_project(&fibonacci_scheme(), 3000.0).unwrap().set;
    for r in [2.0, 5.0, 10.0] {
        assert_eq!(r_atlas(&s, r).unwrap().len(), r_atlas(&c, r).unwrap().len(), "R = {r}");
    }
}

/// Factor complexity of the Fibonacci word: `n + 1` distinct length-`n`
/// factors, so the centered atlas grows without bound but slowly.
#[test]
fn fibonacci_word_complexity() {
    let rule = SubstitutionRule1D::fibonacci();
    let mut w = vec!['a'];
    while w.len() < 5000 {
        w = rule.apply(&w);
    }
    for n in 1..30 {
        let f: BTreeSet<&[char]> = w.windows(n).collect();
        assert_eq!(f.len(), n + 1, "n = {n}");
    }
}

#[test]
fn return_vectors_match_brute_force() {
    let x = fib(800.0);
    let atlas = r_atlas(&x, 4.0).unwrap();
    let class = &atlas.classes[0];
    let rv = return_vectors(&x, class).unwrap();
    let occ = atlas.occurrences(0);
    let base = rv.base_center;
    let direct: Vec<f64> = occ
        .iter()
        .map(|o| o.x() - base.x())
        .filter(|v| v.abs() <= rv.vectors.window_radius())
        .collect();
    assert_eq!(direct.len(), rv.vectors.len());
    for v in direct {
        assert!(rv.vectors.find(Point::on_line(v), 1e-9).is_some());
    }
}

/// Voronoi vertices are equidistant from the site and at least one other
/// point, and no point is closer to a vertex than the site.
#[test]
fn voronoi_vertices_are_equidistant() {
    let x = generate_cut_and_project(&ammann_beenker_scheme(), 20.0).unwrap().set;
    for &i in x.interior_indices(6.0).iter().step_by(7) {
        let s = x.points()[i];
        let cell = voronoi_cell(&x, s, 4.0).unwrap();
        for v in &cell.vertices {
            let d = v.dist(s);
            let nearest = x.points().iter().map(|p| p.dist(*v)).fold(f64::INFINITY, f64::min);
            assert!((nearest - d).abs() < 1e-9);
            let ties = x.points().iter().filter(|p| (p.dist(*v) - d).abs() < 1e-9).count();
            assert!(ties >= 3, "vertex {v} of cell at {s}");
        }
    }
}

fn shifted_integers(shift: f64, w: f64) -> WindowedDeloneSet {
    let n = w.ceil() as i64 + 1;
    let pts = (-n..=n).map(|k| k as f64 + shift).filter(|t| t.abs() <= w).map(Point::on_line).collect();
    WindowedDeloneSet::new(1, w, pts, None).unwrap()
}

/// `d(Z, Z − s)` against a search over grid values of `ε`, `v` and `v′`.
#[test]
fn metric_against_grid_search() {
    for s in [0.1, 0.3, 0.5] {
        let r = delone_distance(&shifted_integers(0.0, 60.0), &shifted_integers(-s, 60.0), &MetricConfig::default())
            .unwrap();
        let h = 1e-3;
        let mut best = f64::INFINITY;
        'eps: for i in 1..=707 {
            let eps = i as f64 * h;
            let rho = 1.0 / eps;
            for a in -i..=i {
                for b in -i..=i {
                    let (v, vp) = (a as f64 * h, b as f64 * h);
                    let lhs: Vec<f64> = (-60..=60).map(|k| k as f64 - v).filter(|t| t.abs() < rho).collect();
                    let rhs: Vec<f64> = (-60..=60).map(|k| k as f64 - s - vp).filter(|t| t.abs() < rho).collect();
                    if lhs.len() == rhs.len() && lhs.iter().zip(&rhs).all(|(p, q)| (p - q).abs() < h / 2.0) {
                        best = eps;
                        break 'eps;
                    }
                }
            }
        }
        assert!((r.upper - best).abs() < 2e-3, "s = {s}: {r:?} vs grid {best}");
        assert!(r.lower <= r.upper);
    }
}
