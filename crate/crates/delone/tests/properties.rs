//! Invariants checked on random inputs.

use delone::derivation::{apply_rule, LocalDerivationRule};
use delone::generators::{ammann_beenker_scheme, generate_cut_and_project, generate_substitution_1d, SubstitutionRule1D};
use delone::io::{point_set_from_csv, point_set_from_json, point_set_to_csv, point_set_to_json};
use delone::metric::{delone_distance, smallest_testable_epsilon, MetricConfig, METRIC_CAP};
use delone::voronoi::voronoi_cell;
use delone::{canonical_class, extract_patch, patch_translation_match, Point, WindowedDeloneSet};
use proptest::prelude::*;
use std::sync::OnceLock;

fn fib() -> &'static WindowedDeloneSet {
    static X: OnceLock<WindowedDeloneSet> = OnceLock::new();
    X.get_or_init(|| generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 600.0).unwrap())
}

fn ab() -> &'static WindowedDeloneSet {
    static X: OnceLock<WindowedDeloneSet> = OnceLock::new();
    X.get_or_init(|| generate_cut_and_project(&ammann_beenker_scheme(), 30.0).unwrap().set)
}

fn midpoints() -> &'static (LocalDerivationRule, WindowedDeloneSet) {
    static R: OnceLock<(LocalDerivationRule, WindowedDeloneSet)> = OnceLock::new();
    R.get_or_init(|| {
        let x = fib().forget_labels();
        let rule = LocalDerivationRule::right_midpoints(&x, 4.1).unwrap();
        let y = apply_rule(&rule, &x).unwrap();
        (rule, y)
    })
}

fn interior_point(x: &WindowedDeloneSet, margin: f64, k: usize) -> Point {
    let idx = x.interior_indices(x.window_radius() - margin);
    x.points()[idx[k % idx.len()]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn class_key_is_translation_invariant(k in 0usize..10_000, r in 1.0f64..8.0, v in -50.0f64..50.0) {
        let x = fib();
        let c = interior_point(x, 120.0, k);
        let t = Point::on_line(v);
        let y = x.translate(t).unwrap();
        let p = canonical_class(&extract_patch(x, c, r).unwrap(), 1e-6).unwrap();
        let q = canonical_class(&extract_patch(&y, c - t, r).unwrap(), 1e-6).unwrap();
        prop_assert_eq!(p.quantized_key, q.quantized_key);
    }

    #[test]
    fn class_key_survives_subresolution_noise(k in 0usize..10_000, r in 1.0f64..3.0, dx in -1e-10f64..1e-10, dy in -1e-10f64..1e-10) {
        let x = ab();
        let c = interior_point(x, 10.0, k);
        let p = extract_patch(x, c, r).unwrap();
        let mut q = p.clone();
        for o in q.offsets.iter_mut().skip(1) {
            *o = *o + Point::new(dx, dy);
        }
        let same = canonical_class(&p, 1e-6).unwrap().quantized_key == canonical_class(&q, 1e-6).unwrap().quantized_key;
        prop_assert!(same || patch_translation_match(&p, &q, 1e-6).is_some());
    }

    #[test]
    fn patch_match_finds_the_translation(k in 0usize..10_000, r in 1.0f64..2.5, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let x = ab();
        let c = interior_point(x, 10.0, k);
        let p = extract_patch(x, c, r).unwrap();
        let v = Point::new(a, b);
        let t = patch_translation_match(&p, &p.shifted(v), 1e-9);
        prop_assert!(t.is_some());
    }

    #[test]
    fn derivation_is_equivariant(v in -150.0f64..150.0) {
        let (rule, y) = midpoints();
        let x = fib().forget_labels();
        let t = Point::on_line(v);
        let a = apply_rule(rule, &x.translate(t).unwrap()).unwrap();
        let b = y.translate(t).unwrap();
        let w = a.window_radius().min(b.window_radius()) - 1.0;
        let (a, b) = (a.restrict(w).unwrap(), b.restrict(w).unwrap());
        prop_assert_eq!(a.len(), b.len());
        for p in a.points() {
            prop_assert!(b.find(*p, 1e-9).is_some());
        }
    }

    #[test]
    fn voronoi_cell_contains_its_site(k in 0usize..10_000) {
        let x = ab();
        let s = interior_point(x, 12.0, k);
        let cell = voronoi_cell(x, s, 4.0).unwrap();
        prop_assert!(cell.contains(s, 1e-12));
        prop_assert!(cell.measure() > 0.0);
        prop_assert!(cell.inner_radius(s) >= x.min_gap() / 2.0 - 1e-9);
    }

    #[test]
    fn metric_bracket_is_symmetric_and_capped(a in -0.3f64..0.3, b in -0.3f64..0.3) {
        let x = fib().forget_labels().restrict(80.0).unwrap();
        let y = x.translate(Point::on_line(a)).unwrap();
        let z = x.translate(Point::on_line(b)).unwrap();
        let cfg = MetricConfig::default();
        let d1 = delone_distance(&y, &z, &cfg).unwrap();
        let d2 = delone_distance(&z, &y, &cfg).unwrap();
        prop_assert!(d1.lower <= d1.upper && d1.upper <= METRIC_CAP);
        prop_assert!(d1.lower <= d2.upper + 1e-9 && d2.lower <= d1.upper + 1e-9);
        let floor = smallest_testable_epsilon(&y, &z).unwrap();
        prop_assert!(d1.upper <= ((a - b).abs() / 2.0).max(floor) + 1e-6);
    }

    #[test]
    fn point_files_round_trip(pts in proptest::collection::btree_set((-1000i32..1000, -1000i32..1000), 1..60), scale in 0.01f64..3.0) {
        let pts: Vec<Point> = pts.into_iter().map(|(a, b)| Point::new(a as f64 * scale, b as f64 * scale / 3.0)).collect();
        let w = pts.iter().map(|p| p.norm()).fold(0.0, f64::max) + 1.0;
        let x = WindowedDeloneSet::new(2, w, pts, None).unwrap();
        let j = point_set_from_json(&point_set_to_json(&x)).unwrap();
        let c = point_set_from_csv(&point_set_to_csv(&x)).unwrap();
        for y in [j, c] {
            prop_assert_eq!(y.window_radius().to_bits(), x.window_radius().to_bits());
            prop_assert_eq!(y.len(), x.len());
            for (p, q) in x.points().iter().zip(y.points()) {
                prop_assert_eq!(p.x().to_bits(), q.x().to_bits());
                prop_assert_eq!(p.y().to_bits(), q.y().to_bits());
            }
        }
    }
}
