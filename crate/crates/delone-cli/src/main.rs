use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use delone::atlas::{min_return_gap, r_atlas};
use delone::derivation::{
    apply_rule, fiber_class_count, run_theorem_harness, LocalDerivationRule, RuleFile, TheoremHarnessConfig,
};
use delone::generators::{
    ammann_beenker_scheme, decorate, generate_cut_and_project, generate_lattice, generate_substitution_1d,
    CutAndProjectScheme, DecorationRule, SubstitutionRule1D, PHI,
};
use delone::io::{csv_table, fmt_f64, read_json, read_point_set, to_json, write_point_set, Format};
use delone::metric::{delone_distance, MetricConfig};
use delone::params::estimate_delone_params;
use delone::repetitivity::lr_constant;
use delone::verify::{run_check, verify_all, Profile};
use delone::voronoi::{cell_patch_classes, cells_svg, voronoi_cell, voronoi_cells_of_patch, CellDump};
use delone::{canonical_class, extract_patch, Point, WindowedDeloneSet, ETA};
use serde::Serialize;
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Delone sets of finite type: generation, patch statistics, Voronoi
/// cells, repetitivity, the Delone metric, local derivations and bound
/// verification.
///
/// Exit status: 0 on success, 1 when a verification check fails (reports
/// are still written), 2 on usage or input errors.
#[derive(Parser, Debug)]
#[command(name = "delone", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed recorded in every artifact; all computations are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Bracket width for the Delone metric.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// Verification profile: smoke (W ≥ 150 in 1-D, 60 in 2-D), desk
    /// (1000 / 80) or deep (10000 / 120).
    #[arg(long, global = true, value_enum, default_value_t = ProfileArg::Desk)]
    profile: ProfileArg,
    /// Directory for artifacts whose path is not given explicitly.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Format of reports and point sets written to --out-dir.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileArg {
    Smoke,
    Desk,
    Deep,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Smoke => Profile::Smoke,
            ProfileArg::Desk => Profile::Desk,
            ProfileArg::Deep => Profile::Deep,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Lattice,
    Fibonacci,
    Silver,
    AmmannBeenker,
    Custom,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a windowed point set.
    Generate {
        #[arg(long, value_enum)]
        model: Model,
        /// Window radius W.
        #[arg(long)]
        window: f64,
        /// Output file; format from the extension (.csv or JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Lattice basis rows, e.g. "1,0;0,1" (default: the integers).
        #[arg(long)]
        basis: Option<String>,
        /// Cut-and-project scheme JSON for --model custom.
        #[arg(long)]
        scheme: Option<PathBuf>,
        /// Drop tile labels of substitution sets.
        #[arg(long)]
        no_labels: bool,
        /// Relabel a 1-D set by the gap to the right neighbour (0 long, 1 short).
        #[arg(long)]
        decorate_gaps: bool,
    },
    /// R-atlas of a point set.
    Atlas {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        radius: f64,
        /// Also report the smallest return gap.
        #[arg(long)]
        gap: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Voronoi cells of points, or of the occurrences of a patch.
    Voronoi {
        #[arg(long)]
        input: PathBuf,
        /// Cells V_{P,v} of the occurrences of the R-patch at the point nearest the origin.
        #[arg(long)]
        patch_radius: Option<f64>,
        /// Radius of the ball whose points get cells (default W/4).
        #[arg(long)]
        region: Option<f64>,
        /// SVG drawing (2-D only).
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Half side of the SVG viewport (default: the region radius).
        #[arg(long)]
        view: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repetitivity function and linear-repetitivity estimate.
    Repetitivity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rmax: f64,
        #[arg(long)]
        grid_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified bracket for the Delone distance of two windows.
    Metric {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a local derivation rule.
    Derive {
        #[arg(long)]
        input: PathBuf,
        /// Rule JSON, or one of identity, forget-labels, right-midpoints.
        #[arg(long)]
        rule: String,
        /// Patch radius of a built-in rule.
        #[arg(long)]
        rule_radius: Option<f64>,
        /// Write the rule in force to this file.
        #[arg(long)]
        save_rule: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Preimage-class count of a local derivation against (55 L²)^d.
    Fibers {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        rule_radius: Option<f64>,
        #[arg(long)]
        radius: f64,
        /// Repetitivity constant (estimated when absent).
        #[arg(long)]
        l: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Family of patches and relation matrices of several factors.
    TheoremHarness {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        rules: Vec<String>,
        #[arg(long)]
        rule_radius: Option<f64>,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        l: Option<f64>,
        /// Allow n below the exponent condition; the run is marked exploratory.
        #[arg(long)]
        override_n: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the quantitative bounds on a point set.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Single check (return-gap, voronoi-localization, cell-count, ...); all when absent.
        #[arg(long)]
        check: Option<String>,
        /// Radius for the single check, replacing the profile grid.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        l: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<WindowedDeloneSet> {
    read_point_set(path).with_context(|| format!("reading {}", path.display()))
}

fn out_path(g: &Global, explicit: &Option<PathBuf>, stem: &str) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.clone());
    }
    fs::create_dir_all(&g.out_dir).with_context(|| format!("creating {}", g.out_dir.display()))?;
    Ok(g.out_dir.join(format!("{stem}.{}", Format::from(g.format).extension())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// JSON of `value`, or CSV of the given table, per `--format` or the
/// extension of an explicit path.
fn emit<T: Serialize>(
    g: &Global,
    explicit: &Option<PathBuf>,
    stem: &str,
    value: &T,
    table: impl FnOnce() -> (Vec<&'static str>, Vec<Vec<String>>),
) -> Result<()> {
    let path = out_path(g, explicit, stem)?;
    let fmt = match explicit {
        Some(p) => Format::from_path(p),
        None => g.format.into(),
    };
    let text = match fmt {
        Format::Json => to_json(value)?,
        Format::Csv => {
            let (h, rows) = table();
            csv_table(&h, rows)
        }
    };
    write(&path, &text)
}

fn parse_basis(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<f64>().with_context(|| format!("basis entry {v:?}")))
                .collect()
        })
        .collect()
}

fn rule_for(spec: &str, x: &WindowedDeloneSet, radius: Option<f64>) -> Result<LocalDerivationRule> {
    let big_r = || -> Result<f64> {
        Ok(x.big_r_declared().unwrap_or(estimate_delone_params(x)?.big_r_hat))
    };
    let rule = match spec {
        "identity" => LocalDerivationRule::identity(x, radius.unwrap_or(1e-6))?,
        "forget-labels" => LocalDerivationRule::forget_labels(x, radius.unwrap_or(1e-6))?,
        "right-midpoints" => LocalDerivationRule::right_midpoints(x, radius.unwrap_or(2.5 * big_r()?))?,
        path => {
            let file: RuleFile = read_json(path).with_context(|| format!("reading rule {path}"))?;
            LocalDerivationRule::from_file(&file)?
        }
    };
    Ok(rule)
}

fn estimate_l(x: &WindowedDeloneSet, radius: f64) -> Result<f64> {
    let w = x.window_radius();
    let grid: Vec<f64> = [radius, 2.0 * radius, 4.0 * radius].into_iter().filter(|&r| r < w / 4.0).collect();
    if grid.is_empty() {
        bail!("window {w} is too small to estimate L at radius {radius}; pass --l");
    }
    Ok(lr_constant(x, &grid)?.l_hat)
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    match cli.command {
        Command::Generate {
            model,
            window,
            out,
            basis,
            scheme,
            no_labels,
            decorate_gaps,
        } => {
            let mut x = match model {
                Model::Lattice => {
                    let b = match &basis {
                        Some(s) => parse_basis(s)?,
                        None => vec![vec![1.0]],
                    };
                    generate_lattice(&b, window)?
                }
                Model::Fibonacci => generate_substitution_1d(&SubstitutionRule1D::fibonacci(), window)?,
                Model::Silver => generate_substitution_1d(&SubstitutionRule1D::silver_mean(), window)?,
                Model::AmmannBeenker => generate_cut_and_project(&ammann_beenker_scheme(), window)?.set,
                Model::Custom => {
                    let path = scheme.as_ref().ok_or_else(|| anyhow!("--model custom needs --scheme"))?;
                    let s: CutAndProjectScheme =
                        read_json(path).with_context(|| format!("reading scheme {}", path.display()))?;
                    let gen = generate_cut_and_project(&s, window)?;
                    if gen.boundary_rejections > 0 {
                        eprintln!("warning: {} points rejected at the acceptance boundary", gen.boundary_rejections);
                    }
                    gen.set
                }
            };
            if no_labels || decorate_gaps {
                x = x.forget_labels();
            }
            if decorate_gaps {
                if x.dim() != 1 {
                    bail!("--decorate-gaps needs a 1-D set");
                }
                let gaps = [(PHI, 0), (1.0, 1), (1.0 + std::f64::consts::SQRT_2, 0)];
                x = decorate(&x, &DecorationRule::right_gap(&x, 2.0 * PHI + ETA, &gaps))?;
            }
            let meta = json!({"seed": g.seed, "generator": x.meta()});
            let x = x.with_meta(meta);
            let name = format!("{model:?}").to_lowercase();
            let path = out_path(g, &out, &name)?;
            let fmt = if out.is_some() { Format::from_path(&path) } else { g.format.into() };
            write_point_set(&path, &x, fmt)?;
            println!("wrote {} ({} points, W = {window})", path.display(), x.len());
            Ok(0)
        }
        Command::Atlas { input, radius, gap, out } => {
            let x = load(&input)?;
            let atlas = r_atlas(&x, radius)?;
            let gap_report = if gap { Some(min_return_gap(&x, radius)?) } else { None };
            let report = json!({
                "input": input,
                "seed": g.seed,
                "atlas": atlas.report(x.dim()),
                "min_return_gap": gap_report,
            });
            println!("R = {radius}: {} classes", atlas.len());
            if let Some(gr) = &gap_report {
                println!("min return gap {}", gr.gap);
            }
            emit(g, &out, "atlas", &report, || {
                (
                    vec!["R", "class_count", "min_return_gap"],
                    vec![vec![
                        fmt_f64(radius),
                        atlas.len().to_string(),
                        gap_report.as_ref().map(|r| fmt_f64(r.gap)).unwrap_or_default(),
                    ]],
                )
            })?;
            Ok(0)
        }
        Command::Voronoi {
            input,
            patch_radius,
            region,
            svg,
            view,
            out,
        } => {
            let x = load(&input)?;
            let big_r = x.big_r_declared().unwrap_or(estimate_delone_params(&x)?.big_r_hat);
            let (cells, extra) = match patch_radius {
                Some(r) => {
                    let (i0, _) = x.nearest(Point::ORIGIN).ok_or_else(|| anyhow!("empty point set"))?;
                    let c0 = x.points()[i0];
                    let class = canonical_class(&extract_patch(&x, c0, r)?, ETA)?;
                    let pc = voronoi_cells_of_patch(&x, &class)?;
                    let classes = cell_patch_classes(&x, &class)?;
                    let info = json!({
                        "patch_radius": r,
                        "patch_center": c0.coords(x.dim()),
                        "occurrence_covering": pc.covering,
                        "cutoff": pc.cutoff,
                        "cell_patch_classes": classes.count,
                    });
                    (pc.cells.into_iter().map(|(_, c)| c).collect::<Vec<_>>(), info)
                }
                None => {
                    let cutoff = 4.0 * big_r;
                    let rho = region.unwrap_or(x.window_radius() / 4.0);
                    if rho + 2.0 * cutoff > x.window_radius() {
                        bail!("region {rho} plus cell reach {} exceeds the window", 2.0 * cutoff);
                    }
                    let cells = x
                        .interior_indices(rho)
                        .into_iter()
                        .map(|i| voronoi_cell(&x, x.points()[i], cutoff))
                        .collect::<delone::Result<Vec<_>>>()?;
                    (cells, json!({"region": rho, "cutoff": cutoff}))
                }
            };
            println!("{} cells", cells.len());
            if let Some(p) = &svg {
                if x.dim() != 2 {
                    bail!("--svg needs a 2-D set");
                }
                let half = view.unwrap_or_else(|| region.unwrap_or(x.window_radius() / 4.0));
                write(p, &cells_svg(&cells, Point::ORIGIN, half, 800))?;
            }
            let dumps: Vec<CellDump> = cells.iter().map(CellDump::from).collect();
            let report = json!({"input": input, "seed": g.seed, "parameters": extra, "cells": dumps});
            emit(g, &out, "voronoi", &report, || {
                let rows = dumps
                    .iter()
                    .map(|d| {
                        let mut r: Vec<String> = d.site.iter().map(|&c| fmt_f64(c)).collect();
                        r.resize(2, String::new());
                        r.push(d.vertices.len().to_string());
                        r.push(fmt_f64(d.diameter));
                        r
                    })
                    .collect();
                (vec!["site_x", "site_y", "vertices", "diameter"], rows)
            })?;
            Ok(0)
        }
        Command::Repetitivity {
            input,
            rmax,
            grid_step,
            out,
        } => {
            let x = load(&input)?;
            if !(grid_step > 0.0 && rmax >= grid_step) {
                bail!("need 0 < --grid-step <= --rmax");
            }
            let n = (rmax / grid_step + 1e-9).floor() as usize;
            let grid: Vec<f64> = (1..=n).map(|k| k as f64 * grid_step).collect();
            let est = lr_constant(&x, &grid)?;
            println!("L_hat = {}", est.l_hat);
            let counts: Vec<usize> = est
                .r_grid
                .iter()
                .map(|r| est.per_class.iter().filter(|c| c.radius == *r).count())
                .collect();
            let report = json!({"input": input, "seed": g.seed, "class_counts": counts, "estimate": est});
            emit(g, &out, "repetitivity", &report, || {
                let rows = est
                    .r_grid
                    .iter()
                    .zip(&est.m_of_r)
                    .zip(&counts)
                    .map(|((r, m), c)| vec![fmt_f64(*r), c.to_string(), fmt_f64(*m), fmt_f64(m / r)])
                    .collect();
                (vec!["R", "class_count", "M_hat", "M_hat_over_R"], rows)
            })?;
            Ok(0)
        }
        Command::Metric { a, b, out } => {
            let x = load(&a)?;
            let y = load(&b)?;
            let cfg = MetricConfig {
                tolerance: g.tol,
                ..MetricConfig::default()
            };
            let m = delone_distance(&x, &y, &cfg)?;
            println!("d in [{}, {}]{}", m.lower, m.upper, if m.cap_hit { " (cap)" } else { "" });
            let report = json!({"a": a, "b": b, "seed": g.seed, "result": m});
            emit(g, &out, "metric", &report, || {
                (
                    vec!["lower", "upper", "cap_hit"],
                    vec![vec![fmt_f64(m.lower), fmt_f64(m.upper), m.cap_hit.to_string()]],
                )
            })?;
            Ok(0)
        }
        Command::Derive {
            input,
            rule,
            rule_radius,
            save_rule,
            out,
        } => {
            let x = load(&input)?;
            let r = rule_for(&rule, &x, rule_radius)?;
            if let Some(p) = &save_rule {
                write(p, &to_json(&r.to_file(x.dim()))?)?;
            }
            let y = apply_rule(&r, &x)?;
            let meta = json!({"seed": g.seed, "derivation": y.meta()});
            let y = y.with_meta(meta);
            write_point_set(&out, &y, Format::from_path(&out))?;
            println!("wrote {} ({} points, W = {})", out.display(), y.len(), y.window_radius());
            Ok(0)
        }
        Command::Fibers {
            input,
            rule,
            rule_radius,
            radius,
            l,
            out,
        } => {
            let x = load(&input)?;
            let r = rule_for(&rule, &x, rule_radius)?;
            let l = match l {
                Some(l) => l,
                None => estimate_l(&x, radius)?,
            };
            let fc = fiber_class_count(&r, &x, radius, l)?;
            let passed = fc.count as f64 <= fc.bound;
            println!("count {} bound {} ({})", fc.count, fc.bound, if passed { "pass" } else { "FAIL" });
            let report = json!({"input": input, "rule": r.name, "L": l, "seed": g.seed, "passed": passed, "fibers": fc});
            emit(g, &out, "fibers", &report, || {
                (
                    vec!["R", "count", "bound", "passed"],
                    vec![vec![fmt_f64(radius), fc.count.to_string(), fmt_f64(fc.bound), passed.to_string()]],
                )
            })?;
            Ok(if passed { 0 } else { 1 })
        }
        Command::TheoremHarness {
            input,
            rules,
            rule_radius,
            n,
            radius,
            l,
            override_n,
            out,
        } => {
            let x = load(&input)?;
            let rs = rules
                .iter()
                .map(|s| rule_for(s, &x, rule_radius))
                .collect::<Result<Vec<_>>>()?;
            let l = match l {
                Some(l) => l,
                None => estimate_l(&x, radius)?,
            };
            let mut cfg = TheoremHarnessConfig::new(n, radius, l);
            cfg.override_n = override_n;
            cfg.rule_ids = rules.clone();
            let rep = run_theorem_harness(&x, &rs, &cfg)?;
            println!(
                "family size {} (bound {:.3e}){}; equal pairs {:?}",
                rep.family.len(),
                rep.family.bound,
                if rep.exploratory { ", exploratory" } else { "" },
                rep.equal_pairs
            );
            let report = json!({"input": input, "seed": g.seed, "report": rep});
            emit(g, &out, "theorem-harness", &report, || {
                let rows = rep
                    .equal_pairs
                    .iter()
                    .map(|(i, j)| vec![rules[*i].clone(), rules[*j].clone()])
                    .collect();
                (vec!["rule_a", "rule_b"], rows)
            })?;
            Ok(0)
        }
        Command::Verify {
            input,
            check,
            radius,
            l,
            out,
        } => {
            let x = load(&input)?;
            let profile: Profile = g.profile.into();
            let reps = match &check {
                Some(id) => run_check(&x, id, profile, radius, l)?,
                None => verify_all(&x, profile, l)?,
            };
            for r in &reps {
                println!(
                    "{:24} {:8} measured {:>14} bound {:>14}{}",
                    r.check_id,
                    format!("{:?}", r.status).to_lowercase(),
                    r.measured.map(|v| format!("{v:.6}")).unwrap_or("-".into()),
                    r.bound.map(|v| format!("{v:.6}")).unwrap_or("-".into()),
                    r.reason.as_ref().map(|s| format!("  ({s})")).unwrap_or_default()
                );
            }
            let failed = reps.iter().any(|r| r.is_failure());
            let report = json!({"input": input, "profile": profile, "seed": g.seed, "reports": reps});
            emit(g, &out, "verify", &report, || {
                let rows = reps
                    .iter()
                    .map(|r| {
                        vec![
                            r.check_id.clone(),
                            format!("{:?}", r.status).to_lowercase(),
                            r.measured.map(fmt_f64).unwrap_or_default(),
                            r.bound.map(fmt_f64).unwrap_or_default(),
                        ]
                    })
                    .collect();
                (vec!["check_id", "status", "measured", "bound"], rows)
            })?;
            Ok(if failed { 1 } else { 0 })
        }
    }
}
