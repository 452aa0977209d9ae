//! `stereolab`: experiments, tables and checks for Dirichlet stereohedra of
//! the full cubic groups.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when a computed
//! invariant fails, 3 when a computation disagrees with a published value.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use stereohedra::bounds::{emit_tables, region, vorext_verify, Family};
use stereohedra::catalog::{all_groups, catalog, catalog_json, verify_group_spec};
use stereohedra::cell::{check_containment, dirichlet_cell, rotations_meeting_base, Strategy};
use stereohedra::experiment::{
    check_p4232_structure, family_of, lemma_checks, run_sampling_experiment,
    run_special_orbit_experiment, special_orbit_cell, ExperimentConfig, ExperimentReport,
    SpecialOrbitReport,
};
use stereohedra::helix::{sample_params, verify_helix_theorem, HelixError, HelixParams};
use stereohedra::lattice::base_subdomain;
use stereohedra::polytope::{locate_point, Location};
use stereohedra::rational::{fmt_rational, parse_rational};
use stereohedra::sampling::{HalfFilter, DEFAULT_DENOMINATOR};
use stereohedra::{Point3, Rational};

#[derive(Parser)]
#[command(
    name = "stereolab",
    version,
    about = "Dirichlet stereohedra of the full cubic groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog, or verify one group from its generators.
    Catalog {
        #[arg(long)]
        group: Option<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// The Dirichlet stereohedron of one base point.
    Cell {
        #[arg(long)]
        group: String,
        /// `x,y,z` with rational coordinates such as `5/8,-1/4,3/8`.
        #[arg(long, allow_hyphen_values = true)]
        point: Point3,
        /// Restrict candidates to the group's influence region.
        #[arg(long)]
        influence: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded sampling of base points in T^A.
    Experiment {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 150)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DENOMINATOR)]
        denominator: i64,
        #[arg(long, default_value = "all")]
        half: HalfFilter,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bound tables, each number recomputed.
    Bounds {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// The neighbours of a base point under the axis subgroup of P4_232.
    Helix {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        h: Option<String>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Base points on the long edge v1 v3, with an order-2 stabilizer.
    SpecialOrbit {
        #[arg(long, default_value = "F4_132")]
        group: String,
        #[arg(long)]
        t: Option<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Catalog self-check, bound tables and extended-region certificates.
    Verify {
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// What went wrong, by exit code.
#[derive(Default)]
struct Status {
    invariant: Vec<String>,
    published: Vec<String>,
}

impl Status {
    fn exit_code(&self) -> ExitCode {
        for m in &self.invariant {
            eprintln!("invariant violation: {m}");
        }
        for m in &self.published {
            eprintln!("published value mismatch: {m}");
        }
        if !self.invariant.is_empty() {
            ExitCode::from(2)
        } else if !self.published.is_empty() {
            ExitCode::from(3)
        } else {
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for invariant failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Status> {
    match command {
        Command::Catalog { group, format } => cmd_catalog(group, format),
        Command::Cell {
            group,
            point,
            influence,
            format,
            out,
        } => cmd_cell(&group, &point, influence, format, out.as_deref()),
        Command::Experiment {
            group,
            samples,
            seed,
            denominator,
            half,
            format,
            out,
        } => {
            let config = ExperimentConfig {
                group_name: group,
                sample_count: samples,
                seed,
                denominator,
                halfspace_filter: half,
            };
            cmd_experiment(&config, format, out.as_deref())
        }
        Command::Bounds { format } => cmd_bounds(format),
        Command::Helix {
            alpha,
            beta,
            h,
            samples,
            seed,
            format,
        } => cmd_helix(alpha, beta, h, samples, seed, format),
        Command::SpecialOrbit {
            group,
            t,
            samples,
            seed,
            format,
        } => cmd_special(&group, t, samples, seed, format),
        Command::Verify { samples, seed } => cmd_verify(samples, seed),
    }
}

fn json_only(format: Option<Format>) -> Result<bool> {
    match format {
        None => Ok(false),
        Some(Format::Json) => Ok(true),
        Some(_) => bail!("this command writes text or JSON only"),
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

/// File-name safe group name: `F2/d-3` becomes `F2_d-3`.
fn file_stem(group: &str) -> String {
    group.replace(['/', ' '], "_")
}

fn rational_arg(name: &str, s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| anyhow::anyhow!("--{name}: {e}"))
}

fn cmd_catalog(group: Option<String>, format: Option<Format>) -> Result<Status> {
    let json = json_only(format)?;
    let mut status = Status::default();
    match group {
        Some(name) => {
            let spec = catalog(&name)?;
            let v = verify_group_spec(spec)?;
            if json {
                print_json(&v)?;
            } else {
                println!(
                    "{} (s = {}, m = {}, {} aspects)",
                    spec.name, v.s, v.m, v.point_group_order
                );
                for (check, ok) in &v.checks {
                    println!("  {} {check}", if *ok { "ok  " } else { "FAIL" });
                }
            }
            if !v.passed() {
                status
                    .invariant
                    .push(format!("{} does not match its generators", spec.name));
            }
        }
        None if json => print_json(&catalog_json())?,
        None => {
            println!(
                "{:<14} {:>2} {:>2}  {:<6} {:<6} {:>5}  source",
                "group", "s", "m", "black", "white", "bound"
            );
            for g in all_groups() {
                let letters = |set: &std::collections::BTreeSet<stereohedra::Letter>| -> String {
                    set.iter().map(|l| l.as_char()).collect()
                };
                let bound = if g.has_reflections {
                    "(8)".to_string()
                } else {
                    g.published_bound.to_string()
                };
                println!(
                    "{:<14} {:>2} {:>2}  {:<6} {:<6} {:>5}  {:?}",
                    g.name,
                    g.s,
                    g.m,
                    letters(&g.occupied_letters_base),
                    letters(&g.occupied_letters_neighbor),
                    bound,
                    g.bound_source
                );
            }
        }
    }
    Ok(status)
}

fn cmd_cell(
    group: &str,
    p: &Point3,
    influence: bool,
    format: Format,
    out: Option<&Path>,
) -> Result<Status> {
    let spec = catalog(group)?;
    let strategy = if influence {
        Strategy::InfluenceRegion(region(family_of(spec)))
    } else {
        Strategy::SafeRadius
    };
    let report = dirichlet_cell(spec, p, strategy)?;
    let rotations = rotations_meeting_base(&spec.presentation)?;
    let checks = lemma_checks(&report, &rotations);
    let mut status = Status::default();
    let interior = locate_point(base_subdomain(), p) == Location::Interior;
    if !checks.all() {
        if interior {
            status
                .invariant
                .push(format!("lemma checks failed: {checks:?}"));
        } else {
            // The containment statements are about interior base points.
            eprintln!("note: {p} lies on the boundary of T^A; {checks:?}");
        }
    }
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "report": report,
            "checks": checks,
            "containment": check_containment(&report),
        }))?,
        Format::Off => report.cell.to_off(),
        Format::Csv => bail!("cell writes JSON or OFF"),
    };
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let ext = if format == Format::Off { "off" } else { "json" };
            fs::write(
                dir.join(format!("{}_cell.{ext}", file_stem(&spec.name))),
                text,
            )?;
        }
        None => println!("{text}"),
    }
    Ok(status)
}

fn experiment_status(report: &ExperimentReport) -> Status {
    let mut status = Status::default();
    if report.lemma_violations > 0 {
        status.invariant.push(format!(
            "{} samples fail the lemma checks",
            report.lemma_violations
        ));
    }
    if !report.outside_candidates.is_empty() {
        status.invariant.push(format!(
            "neighbours outside the influence region: {:?}",
            report
                .outside_candidates
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
        ));
    }
    if let Ok(spec) = catalog(&report.config.group_name) {
        if let Some(max) = report.histogram.keys().max() {
            if *max as u32 > spec.published_bound {
                status.invariant.push(format!(
                    "{max} facets exceed the bound {}",
                    spec.published_bound
                ));
            }
        }
        if spec.name == "P4_232" {
            for s in &report.samples {
                if let Err(e) = check_p4232_structure(&s.report) {
                    status
                        .invariant
                        .push(format!("sample {}: {e}", s.sample_id));
                }
            }
            let outside: Vec<usize> = report
                .histogram
                .keys()
                .copied()
                .filter(|k| !(14..=17).contains(k))
                .collect();
            if report.histogram.keys().any(|k| !(11..=25).contains(k)) {
                status
                    .invariant
                    .push(format!("facet counts {outside:?} outside [11, 25]"));
            } else if !outside.is_empty() {
                status.published.push(format!(
                    "facet counts {outside:?} outside the observed [14, 17]"
                ));
            }
        }
    }
    status
}

fn cmd_experiment(config: &ExperimentConfig, format: Format, out: Option<&Path>) -> Result<Status> {
    let report = run_sampling_experiment(config)?;
    let status = experiment_status(&report);
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&report)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    fs::write(
                        dir.join(format!("{}_experiment.json", file_stem(&config.group_name))),
                        text,
                    )?;
                }
                None => println!("{text}"),
            }
        }
        Format::Csv => {
            let sink: Box<dyn Write> = match out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    Box::new(fs::File::create(
                        dir.join(format!("{}_samples.csv", file_stem(&config.group_name))),
                    )?)
                }
                None => Box::new(std::io::stdout()),
            };
            let mut w = csv::Writer::from_writer(sink);
            w.write_record([
                "sample_id",
                "px",
                "py",
                "pz",
                "facet_count",
                "neighbor_labels",
            ])?;
            for s in &report.samples {
                let labels: Vec<String> = s.neighbor_labels.iter().map(|l| l.to_string()).collect();
                w.write_record([
                    s.sample_id.to_string(),
                    fmt_rational(&s.point.x),
                    fmt_rational(&s.point.y),
                    fmt_rational(&s.point.z),
                    s.facet_count.to_string(),
                    labels.join(";"),
                ])?;
            }
            w.flush()?;
        }
        Format::Off => {
            let dir = out.context("--format off writes one file per sample; pass --out <dir>")?;
            fs::create_dir_all(dir)?;
            for s in &report.samples {
                let name = format!("{}_{}.off", file_stem(&config.group_name), s.sample_id);
                fs::write(dir.join(name), s.report.cell.to_off())?;
            }
        }
    }
    if format != Format::Json || out.is_some() {
        eprintln!("facet histogram: {:?}", report.histogram);
    }
    Ok(status)
}

fn cmd_bounds(format: Option<Format>) -> Result<Status> {
    let tables = emit_tables()?;
    if json_only(format)? {
        print_json(&tables)?;
    } else {
        print!("{}", tables.to_text());
    }
    let mut status = Status::default();
    for row in tables.mismatches() {
        status.published.push(format!(
            "{}: computed {}, published {}",
            row.group, row.bound, row.published
        ));
    }
    Ok(status)
}

fn cmd_helix(
    alpha: Option<String>,
    beta: Option<String>,
    h: Option<String>,
    samples: usize,
    seed: u64,
    format: Option<Format>,
) -> Result<Status> {
    let json = json_only(format)?;
    let params = match (alpha, beta, h) {
        (Some(a), Some(b), Some(h)) => vec![HelixParams::new(
            rational_arg("alpha", &a)?,
            rational_arg("beta", &b)?,
            rational_arg("h", &h)?,
        )?],
        (None, None, None) => sample_params(seed, samples, HalfFilter::Upper),
        _ => bail!("give all of --alpha, --beta, --h or none"),
    };
    let mut status = Status::default();
    let mut reports = Vec::new();
    for p in &params {
        match verify_helix_theorem(p) {
            Ok(r) => {
                if !json {
                    let names: Vec<String> = r.neighbors.iter().map(|n| n.to_string()).collect();
                    println!(
                        "alpha={} beta={} h={}: {} facets (statement says {}): {}",
                        fmt_rational(&p.alpha),
                        fmt_rational(&p.beta),
                        fmt_rational(&p.h),
                        r.facet_count,
                        r.stated_facet_count,
                        names.join(" ")
                    );
                }
                reports.push(r);
            }
            Err(e @ HelixError::TheoremMismatch { .. }) => status.published.push(e.to_string()),
            Err(e) => status.invariant.push(e.to_string()),
        }
    }
    if json {
        print_json(&reports)?;
    }
    Ok(status)
}

fn cmd_special(
    group: &str,
    t: Option<String>,
    samples: usize,
    seed: u64,
    format: Option<Format>,
) -> Result<Status> {
    let json = json_only(format)?;
    let reports: Vec<SpecialOrbitReport> = match t {
        Some(t) => vec![special_orbit_cell(group, &rational_arg("t", &t)?)?],
        None => run_special_orbit_experiment(group, samples, seed)?,
    };
    let mut status = Status::default();
    for r in &reports {
        if !json {
            println!(
                "t={} stabilizer {} facets {} (own orbit {}, other {})",
                fmt_rational(&r.t),
                r.stabilizer_order,
                r.facet_count,
                r.own_orbit,
                r.other_orbit
            );
        }
        if r.stabilizer_order != 2 {
            status.invariant.push(format!(
                "t={}: stabilizer of order {}",
                fmt_rational(&r.t),
                r.stabilizer_order
            ));
        }
        if r.facet_count > 12 || r.own_orbit > 8 || r.other_orbit > 4 {
            status.published.push(format!(
                "t={}: {} facets ({} + {})",
                fmt_rational(&r.t),
                r.facet_count,
                r.own_orbit,
                r.other_orbit
            ));
        }
    }
    if json {
        print_json(&reports)?;
    }
    Ok(status)
}

fn cmd_verify(samples: usize, seed: u64) -> Result<Status> {
    let mut status = Status::default();
    for g in all_groups() {
        let v = verify_group_spec(g)?;
        let failed: Vec<&str> = v
            .checks
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(c, _)| c.as_str())
            .collect();
        println!(
            "catalog {:<14} {}",
            g.name,
            if failed.is_empty() { "ok" } else { "FAIL" }
        );
        if !failed.is_empty() {
            status.invariant.push(format!("{}: {failed:?}", g.name));
        }
    }
    let tables = emit_tables()?;
    for row in &tables.table1 {
        println!(
            "bound   {:<14} {:>3} (published {:>3}) {}",
            row.group,
            row.bound,
            row.published,
            if row.matches() { "ok" } else { "MISMATCH" }
        );
    }
    for row in tables.mismatches() {
        status.published.push(format!(
            "{}: computed {}, published {}",
            row.group, row.bound, row.published
        ));
    }
    for f in [Family::Order4, Family::TransversalOrder2] {
        match vorext_verify(region(f), samples, seed) {
            Ok(r) => println!(
                "vorext  {f:?}: {} wedge certificates, {} cells over {} groups ok",
                r.wedge_certificates,
                r.cells_checked,
                r.groups.len()
            ),
            Err(e) => status.invariant.push(format!("{f:?}: {e}")),
        }
    }
    Ok(status)
}
