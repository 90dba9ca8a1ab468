//! Acceptance suite: one PASS/FAIL line per criterion, with runtimes.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process fails when a criterion fails, except the clauses listed in
//! `KNOWN_UNATTAINABLE`, which are still printed as FAIL.

use delone::atlas::min_return_gap;
use delone::derivation::{
    apply_rule, build_family_F, compare_relations, fiber_class_count, relation_Ri, LocalDerivationRule,
    TheoremHarnessConfig,
};
use delone::generators::{
    ammann_beenker_scheme, decorate, generate_cut_and_project, generate_lattice, generate_substitution_1d,
    DecorationRule, SubstitutionRule1D,
};
use delone::io::{read_point_set, write_point_set, Format};
use delone::metric::{delone_distance, MetricConfig, METRIC_CAP};
use delone::params::estimate_delone_params;
use delone::repetitivity::lr_constant;
use delone::verify::{verify_all, CheckStatus, Profile, VerificationReport};
use delone::voronoi::{tiling_check, voronoi_cell};
use delone::{Point, WindowedDeloneSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

const PHI: f64 = 1.618_033_988_749_895;

/// `(criterion, clause)` pairs that fail for reasons recorded with the
/// project decisions; they are reported but do not fail the run.
const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(8, "identity and label-forgetting relations differ")];

type Clauses = Vec<(String, bool)>;

struct Outcome {
    id: u32,
    clauses: Clauses,
    elapsed: Duration,
    limit: Duration,
}

fn run(id: u32, title: &str, limit_s: u64, f: impl FnOnce() -> Result<Clauses, String>) -> Outcome {
    let t = Instant::now();
    let clauses = f().unwrap_or_else(|e| vec![(format!("error: {e}"), false)]);
    let elapsed = t.elapsed();
    let limit = Duration::from_secs(limit_s);
    let o = Outcome {
        id,
        clauses,
        elapsed,
        limit,
    };
    let ok = o.clauses.iter().all(|c| c.1) && elapsed < limit;
    println!(
        "criterion {id} {title}: {} ({:.2} s, limit {limit_s} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for (text, pass) in &o.clauses {
        println!("    [{}] {text}", if *pass { "pass" } else { "FAIL" });
    }
    o
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn fibonacci(w: f64) -> Result<WindowedDeloneSet, String> {
    e(generate_substitution_1d(&SubstitutionRule1D::fibonacci(), w))
}

fn ammann_beenker(w: f64) -> Result<WindowedDeloneSet, String> {
    e(generate_cut_and_project(&ammann_beenker_scheme(), w)).map(|g| g.set)
}

fn big_r(x: &WindowedDeloneSet) -> Result<f64, String> {
    match x.big_r_declared() {
        Some(r) => Ok(r),
        None => e(estimate_delone_params(x)).map(|p| p.big_r_hat),
    }
}

fn report<'a>(reps: &'a [VerificationReport], id: &str) -> Result<&'a VerificationReport, String> {
    reps.iter().find(|r| r.check_id == id).ok_or(format!("no {id} report"))
}

fn bound_clause(reps: &[VerificationReport], id: &str, set: &str) -> Result<(String, bool), String> {
    let r = report(reps, id)?;
    Ok((
        format!("{set} {id}: measured {:?} vs bound {:?} ({:?})", r.measured, r.bound, r.status),
        r.status == CheckStatus::Passed,
    ))
}

fn geometry_oracle() -> Result<Clauses, String> {
    let z2 = e(generate_lattice(&[vec![1.0, 0.0], vec![0.0, 1.0]], 10.0))?;
    let cell = e(voronoi_cell(&z2, Point::ORIGIN, 4.0 * big_r(&z2)?))?;
    let square = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)].map(|(a, b)| Point::new(a, b));
    let exact = cell.vertices.len() == 4
        && square.iter().all(|s| cell.vertices.iter().any(|v| v.approx_eq(*s, 1e-9)));
    let ab = ammann_beenker(20.0)?;
    let t = e(tiling_check(&ab, 4.0 * big_r(&ab)?, 5.0))?;
    Ok(vec![
        (format!("Z^2 origin cell vertices {:?}", cell.vertices), exact),
        (
            format!(
                "AB W=20 tiling: {} cells, relative area error {:.2e}, max overlap {:.2e}",
                t.cells, t.relative_error, t.max_pair_overlap
            ),
            t.relative_error < 1e-6 && t.max_pair_overlap < 1e-6 * t.square_area,
        ),
    ])
}

fn localization() -> Result<Clauses, String> {
    let x = ammann_beenker(40.0)?;
    let r = big_r(&x)?;
    let inner = x.interior_indices(x.window_radius() - 16.0 * r);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut bad = 0;
    for _ in 0..200 {
        let s = x.points()[inner[rng.gen_range(0..inner.len())]];
        let a = e(voronoi_cell(&x, s, 4.0 * r))?;
        let b = e(voronoi_cell(&x, s, 8.0 * r))?;
        bad += usize::from(!a.same_vertices(&b, 1e-9));
    }
    Ok(vec![(
        format!("200 sites from {} interior points, R_hat = {r:.6}: {bad} cells differ", inner.len()),
        bad == 0,
    )])
}

fn return_gap(x: &WindowedDeloneSet, l: f64) -> Result<Clauses, String> {
    [5.0, 10.0, 20.0, 40.0]
        .into_iter()
        .map(|r| {
            let g = e(min_return_gap(x, r))?;
            let bound = r / (11.0 * l);
            Ok((
                format!("R = {r}: gap {:.6} over {} classes, bound {bound:.6}", g.gap, g.class_count),
                g.gap >= bound,
            ))
        })
        .collect()
}

fn counting(fib: &WindowedDeloneSet, l: f64) -> Result<Clauses, String> {
    let ids = ["extension-count", "cell-count", "cell-return-count"];
    let mut out = Vec::new();
    let reps = e(verify_all(fib, Profile::Deep, Some(l)))?;
    for id in ids {
        out.push(bound_clause(&reps, id, "Fibonacci W=1e4 (R1,R2)=(5,20), R=5, n=1")?);
    }
    let ab = ammann_beenker(80.0)?;
    let reps = e(verify_all(&ab, Profile::Desk, None))?;
    let lr = report(&reps, "linear-repetitivity")?;
    out.push((format!("AB W=80 L_hat = {:?}", lr.measured), lr.status == CheckStatus::Passed));
    for id in ids {
        out.push(bound_clause(&reps, id, "AB W=80 (R1,R2)=(1,2), R=1, n=1")?);
    }
    Ok(out)
}

fn integers(step: f64, shift: f64, w: f64) -> WindowedDeloneSet {
    let n = (w / step).ceil() as i64 + 1;
    let pts = (-n..=n)
        .map(|k| k as f64 * step + shift)
        .filter(|t| t.abs() <= w)
        .map(Point::on_line)
        .collect();
    WindowedDeloneSet::new(1, w, pts, None).unwrap()
}

/// `d(Z, Z − shift)` by exhaustive grid search: the smallest `ε` on a grid
/// of step `h` for which some grid translations `v, v′ ∈ [−ε, ε]` make the
/// two sets agree on `(−1/ε, 1/ε)`, located by bisection over the grid
/// since feasibility is closed upwards.
fn grid_distance_to_shifted_integers(shift: f64, h: f64) -> f64 {
    let points_in = |offset: f64, rho: f64| -> Vec<f64> {
        let lo = (-rho - offset).floor() as i64 - 1;
        let hi = (rho - offset).ceil() as i64 + 1;
        (lo..=hi).map(|k| k as f64 + offset).filter(|t| t.abs() < rho).collect()
    };
    let feasible = |i: i64| -> bool {
        let rho = 1.0 / (i as f64 * h);
        let xs: Vec<Vec<f64>> = (-i..=i).map(|a| points_in(-(a as f64) * h, rho)).collect();
        let ys: Vec<Vec<f64>> = (-i..=i).map(|b| points_in(-shift - b as f64 * h, rho)).collect();
        xs.iter().any(|p| {
            ys.iter()
                .any(|q| p.len() == q.len() && p.iter().zip(q).all(|(s, t)| (s - t).abs() < h / 2.0))
        })
    };
    let (mut lo, mut hi) = (0i64, (METRIC_CAP / h) as i64);
    if !feasible(hi) {
        return METRIC_CAP;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi as f64 * h
}

fn metric() -> Result<Clauses, String> {
    let cfg = MetricConfig::default();
    let z = integers(1.0, 0.0, 60.0);
    let half = e(delone_distance(&z, &integers(1.0, -0.5, 60.0), &cfg))?;
    let oracle = grid_distance_to_shifted_integers(0.5, 1e-4);
    let twice = e(delone_distance(&z, &integers(2.0, 0.0, 60.0), &cfg))?;
    let fib = fibonacci(200.0)?;
    let same = e(delone_distance(&fib, &fib, &cfg))?;
    Ok(vec![
        (
            format!("d(Z, Z-1/2) in [{:.9}, {:.9}], grid oracle {oracle:.4}", half.lower, half.upper),
            (half.lower - oracle).abs() < 1e-3 && (half.upper - oracle).abs() < 1e-3,
        ),
        (format!("d(Z, 2Z) = {} (cap_hit {})", twice.upper, twice.cap_hit), twice.cap_hit && twice.upper == METRIC_CAP),
        (format!("d(X, X) upper = {:e}", same.upper), same.upper <= 1e-6),
    ])
}

fn factors(fib: &WindowedDeloneSet, l: f64) -> Result<Clauses, String> {
    let mut out = Vec::new();
    let radii = [5.0, 10.0, 20.0];
    let x = fib.forget_labels();
    let id = e(LocalDerivationRule::identity(&x, 1e-6))?;
    let counts = radii
        .iter()
        .map(|&r| e(fiber_class_count(&id, &x, r, l)).map(|f| f.count))
        .collect::<Result<Vec<_>, _>>()?;
    out.push((format!("identity fiber counts {counts:?}"), counts.iter().all(|&c| c == 1)));

    let gaps = [(PHI, 0), (1.0, 1)];
    let dec = e(decorate(&x, &DecorationRule::right_gap(&x, 2.0 * PHI + 1e-9, &gaps)))?;
    let forget = e(LocalDerivationRule::forget_labels(&dec, 1e-6))?;
    let counts = radii
        .iter()
        .map(|&r| e(fiber_class_count(&forget, &dec, r, l)).map(|f| f.count))
        .collect::<Result<Vec<_>, _>>()?;
    let bound = 55.0 * l * l;
    out.push((
        format!("label forgetting on gap-decorated Fibonacci: counts {counts:?}, bound {bound:.3}"),
        counts.windows(2).all(|w| w[0] == w[1]) && counts.iter().all(|&c| c as f64 <= bound),
    ));

    let rule = e(LocalDerivationRule::right_midpoints(&x, 2.5 * big_r(&x)?))?;
    let y = e(apply_rule(&rule, &x))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst = 0.0f64;
    let mut missing = 0;
    for _ in 0..50 {
        let v = Point::on_line(rng.gen_range(-100.0..100.0));
        let a = e(apply_rule(&rule, &e(x.translate(v))?))?;
        let b = e(y.translate(v))?;
        let w = a.window_radius().min(b.window_radius()) - 1.0;
        let (a, b) = (e(a.restrict(w))?, e(b.restrict(w))?);
        missing += a.len().abs_diff(b.len());
        for p in a.points() {
            match b.nearest(*p) {
                Some((_, d)) => worst = worst.max(d),
                None => missing += 1,
            }
        }
    }
    out.push((
        format!("right-midpoint rule equivariance over 50 v: max deviation {worst:.2e}, count mismatches {missing}"),
        worst <= 1e-9 && missing == 0,
    ));
    Ok(out)
}

fn stability(fib: &WindowedDeloneSet) -> Result<Clauses, String> {
    let grid = [5.0, 10.0, 20.0, 40.0];
    let small = e(lr_constant(&e(fib.restrict(1000.0))?, &grid))?;
    let large = e(lr_constant(fib, &grid))?;
    let rel = (small.l_hat - large.l_hat).abs() / large.l_hat;
    Ok(vec![
            (
                format!("L_hat W=1e3 {:.8}, W=1e4 {:.8}, relative difference {rel:.2e}", small.l_hat, large.l_hat),
                rel < 0.1,
            ),
            (
                format!("M_hat W=1e3 {:?}, W=1e4 {:?} nondecreasing", small.m_of_r, large.m_of_r),
                small.is_monotone(0.0) && large.is_monotone(0.0),
            ),
        ])
}

fn theorem_harness(fib: &WindowedDeloneSet, l: f64) -> Result<Clauses, String> {
    let mut cfg = TheoremHarnessConfig::new(2, 5.0, l);
    cfg.override_n = true;
    let family = e(build_family_F(fib, &cfg))?;
    let bound = cfg.c_l(1) * cfg.c_n_l(1);
    let id = e(LocalDerivationRule::identity(fib, 1e-6))?;
    let tid = id.translated(Point::on_line(0.3), "translated-identity");
    let forget = e(LocalDerivationRule::forget_labels(fib, 1e-6))?;
    cfg.s0 = Some(0.3);
    let mats = [&id, &tid, &forget]
        .iter()
        .map(|r| e(relation_Ri(r, &family, fib, &cfg)))
        .collect::<Result<Vec<_>, _>>()?;
    let id_tid = e(compare_relations(&mats[..2]))?;
    let id_forget = e(compare_relations(&[mats[0].clone(), mats[2].clone()]))?;
    let falses = |m: &delone::derivation::RelationMatrix| m.entries.iter().flatten().filter(|b| !**b).count();
    Ok(vec![
        (format!("family size {} <= c(L)c(2,L) = {bound:.3e}", family.len()), family.len() as f64 <= bound),
        (
            format!(
                "identity and translated identity equal ({}) and reflexive ({}, {})",
                !id_tid.is_empty(),
                mats[0].is_reflexive(),
                mats[1].is_reflexive()
            ),
            !id_tid.is_empty() && mats[0].is_reflexive() && mats[1].is_reflexive(),
        ),
        (
            format!(
                "identity and label-forgetting relations differ: false entries {} vs {} (R' used {:.3}, nominal R' {:.3}, exploratory {})",
                falses(&mats[0]),
                falses(&mats[2]),
                mats[0].r_prime_used,
                mats[0].r_prime_nominal,
                mats[0].exploratory
            ),
            id_forget.is_empty(),
        ),
    ])
}

fn mutation() -> Result<Clauses, String> {
    let dir = e(tempfile::tempdir())?;
    let path = dir.path().join("fibonacci.json");
    e(write_point_set(&path, &fibonacci(1000.0)?, Format::Json))?;
    let x = e(read_point_set(&path))?;
    let i = x.interior_indices(100.0)[7];
    let y = e(x.without_point(i))?;
    let failing: Vec<String> = e(verify_all(&y, Profile::Desk, None))?
        .into_iter()
        .filter(VerificationReport::is_failure)
        .map(|r| r.check_id)
        .collect();
    Ok(vec![(
        format!("deleted point {}; failing checks {failing:?}", x.points()[i]),
        !failing.is_empty(),
    )])
}

fn main() {
    let fib = fibonacci(10_000.0).expect("Fibonacci W=1e4");
    let mut outcomes = Vec::new();
    outcomes.push(run(1, "geometry oracle", 10, geometry_oracle));
    outcomes.push(run(2, "Voronoi localization", 30, localization));
    let mut l = f64::NAN;
    outcomes.push(run(3, "return gap", 120, || {
        l = e(lr_constant(&fib, &[5.0, 10.0, 20.0, 40.0]))?.l_hat;
        return_gap(&fib, l)
    }));
    outcomes.push(run(4, "counting bounds", 300, || counting(&fib, l)));
    outcomes.push(run(5, "metric oracle", 30, metric));
    outcomes.push(run(6, "factor suite", 120, || factors(&fib, l)));
    outcomes.push(run(7, "repetitivity stability", 120, || stability(&fib)));
    outcomes.push(run(8, "theorem harness", 300, || theorem_harness(&fib, l)));
    outcomes.push(run(9, "mutation sensitivity", 60, mutation));

    let mut unexpected = Vec::new();
    let mut known = 0;
    for o in &outcomes {
        if o.elapsed >= o.limit {
            unexpected.push(format!("criterion {} over time", o.id));
        }
        for (text, pass) in &o.clauses {
            let excused = KNOWN_UNATTAINABLE.iter().any(|(id, c)| *id == o.id && text.starts_with(c));
            match (pass, excused) {
                (false, true) => known += 1,
                (false, false) => unexpected.push(format!("criterion {}: {text}", o.id)),
                (true, true) => unexpected.push(format!("criterion {} now passes a clause listed as unattainable", o.id)),
                (true, false) => {}
            }
        }
    }
    let passed = outcomes
        .iter()
        .filter(|o| o.clauses.iter().all(|c| c.1) && o.elapsed < o.limit)
        .count();
    println!("acceptance: {passed}/{} criteria pass; {known} clause(s) fail as recorded unattainable", outcomes.len());
    if !unexpected.is_empty() {
        for u in &unexpected {
            eprintln!("unexpected: {u}");
        }
        std::process::exit(1);
    }
}
