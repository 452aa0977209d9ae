//! Seeded sampling experiments, the structure of `P4_232` stereohedra and
//! the special orbits on a long edge.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{region, BoundError, Family};
use crate::catalog::{catalog, BoundSource, CatalogError, FullGroupSpec};
use crate::cell::{
    check_containment, check_rotation_lemma, dirichlet_cell, dirichlet_cell_in,
    rotations_meeting_base, CellError, CellOptions, StereohedronReport, Strategy,
};
use crate::group::DEFAULT_WORD_BOUND;
use crate::isometry::Isometry;
use crate::lattice::{base_centroid, base_vertices, SubdomainLabel};
use crate::polytope::circumcenter;
use crate::rational::{int, rat, Point3, Rational};
use crate::sampling::{BasePointSampler, HalfFilter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("{0} has reflections; its stereohedra are not sampled")]
    HasReflections(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub group_name: String,
    pub sample_count: usize,
    pub seed: u64,
    pub denominator: i64,
    pub halfspace_filter: HalfFilter,
}

impl ExperimentConfig {
    pub fn new(group_name: impl Into<String>, sample_count: usize, seed: u64) -> Self {
        ExperimentConfig {
            group_name: group_name.into(),
            sample_count,
            seed,
            denominator: crate::sampling::DEFAULT_DENOMINATOR,
            halfspace_filter: HalfFilter::All,
        }
    }

    pub fn with_filter(mut self, f: HalfFilter) -> Self {
        self.halfspace_filter = f;
        self
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.sample_count == 0 {
            return Err(ExperimentError::InvalidConfig(
                "sample_count must be at least 1".into(),
            ));
        }
        if self.denominator < 100 || self.denominator % 4 != 0 {
            return Err(ExperimentError::InvalidConfig(
                "denominator must be a multiple of 4 and at least 100".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Always,
    Sometimes,
    Never,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdomainClassification {
    pub status: BTreeMap<SubdomainLabel, Status>,
    pub sample_count: usize,
    /// Label order of the bitmaps.
    pub labels: Vec<SubdomainLabel>,
    /// One row per sample: which of `labels` held a neighbour.
    pub bitmaps: Vec<Vec<bool>>,
}

impl SubdomainClassification {
    pub fn of(&self, label: &SubdomainLabel) -> Option<Status> {
        self.status.get(label).copied()
    }

    pub fn with_status(&self, s: Status) -> Vec<SubdomainLabel> {
        self.status
            .iter()
            .filter(|(_, v)| **v == s)
            .map(|(l, _)| *l)
            .collect()
    }
}

/// Builds the classification over `universe` plus every observed label.
pub fn classify(
    universe: &BTreeSet<SubdomainLabel>,
    samples: &[BTreeSet<SubdomainLabel>],
) -> SubdomainClassification {
    let mut labels: BTreeSet<SubdomainLabel> = universe.clone();
    for s in samples {
        labels.extend(s.iter().copied());
    }
    let labels: Vec<SubdomainLabel> = labels.into_iter().collect();
    let bitmaps: Vec<Vec<bool>> = samples
        .iter()
        .map(|s| labels.iter().map(|l| s.contains(l)).collect())
        .collect();
    let status = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let hits = bitmaps.iter().filter(|b| b[i]).count();
            let st = if hits == samples.len() {
                Status::Always
            } else if hits == 0 {
                Status::Never
            } else {
                Status::Sometimes
            };
            (*l, st)
        })
        .collect();
    SubdomainClassification {
        status,
        sample_count: samples.len(),
        labels,
        bitmaps,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaChecks {
    pub rotation_lemma: bool,
    pub lemma32: bool,
    pub lemma33: bool,
}

impl LemmaChecks {
    pub fn all(&self) -> bool {
        self.rotation_lemma && self.lemma32 && self.lemma33
    }
}

/// Rotation lemma for every rotation meeting `T`, plus both containment lemmas.
pub fn lemma_checks(report: &StereohedronReport, rotations: &[Isometry]) -> LemmaChecks {
    let c = check_containment(report);
    LemmaChecks {
        rotation_lemma: rotations.iter().all(|r| check_rotation_lemma(report, r)),
        lemma32: c.lemma32,
        lemma33: c.lemma33,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub sample_id: usize,
    pub point: Point3,
    pub facet_count: usize,
    pub neighbor_labels: BTreeSet<SubdomainLabel>,
    pub checks: LemmaChecks,
    #[serde(skip)]
    pub report: StereohedronReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub histogram: BTreeMap<usize, usize>,
    pub classification: SubdomainClassification,
    pub samples: Vec<SampleRecord>,
    /// Draws rejected for a nontrivial stabilizer.
    pub rejected: usize,
    pub lemma_violations: usize,
    /// Labels a neighbour was seen in although they lie outside `Infl` or
    /// have an unoccupied type.
    pub outside_candidates: Vec<SubdomainLabel>,
}

/// The region family that bounds a group's neighbours.
pub fn family_of(spec: &FullGroupSpec) -> Family {
    match spec.bound_source {
        BoundSource::Order4 => Family::Order4,
        BoundSource::TransversalOrder2 | BoundSource::HelixRefinement => Family::TransversalOrder2,
        _ => Family::Basic,
    }
}

/// Subdomains of occupied type inside the group's influence region.
pub fn candidate_labels(spec: &FullGroupSpec) -> BTreeSet<SubdomainLabel> {
    region(family_of(spec))
        .infl_labels
        .iter()
        .filter(|l| {
            spec.contains_type(l.color(), l.letter) && **l != SubdomainLabel::base(crate::Letter::A)
        })
        .copied()
        .collect()
}

/// Seeded base points with trivial stabilizer, and the number rejected.
pub fn draw_points(
    spec: &FullGroupSpec,
    config: &ExperimentConfig,
) -> Result<(Vec<Point3>, usize), ExperimentError> {
    let mut rejected = 0;
    let mut points = Vec::with_capacity(config.sample_count);
    for p in BasePointSampler::new(config.seed, config.denominator, config.halfspace_filter) {
        if points.len() == config.sample_count {
            break;
        }
        if spec
            .presentation
            .stabilizer(&p, DEFAULT_WORD_BOUND)
            .map_err(CellError::from)?
            .len()
            > 1
        {
            rejected += 1;
            continue;
        }
        points.push(p);
    }
    Ok((points, rejected))
}

pub fn run_sampling_experiment(
    config: &ExperimentConfig,
) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let spec = catalog(&config.group_name)?;
    if spec.has_reflections {
        return Err(ExperimentError::HasReflections(spec.name.clone()));
    }
    let (points, rejected) = draw_points(spec, config)?;
    let rotations = rotations_meeting_base(&spec.presentation)?;
    let records: Vec<Result<SampleRecord, ExperimentError>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let report = dirichlet_cell(spec, p, Strategy::SafeRadius)?;
            let checks = lemma_checks(&report, &rotations);
            Ok(SampleRecord {
                sample_id: i,
                point: p.clone(),
                facet_count: report.facet_count,
                neighbor_labels: report.neighbor_labels(),
                checks,
                report,
            })
        })
        .collect();
    let samples: Vec<SampleRecord> = records.into_iter().collect::<Result<_, _>>()?;
    let mut histogram = BTreeMap::new();
    for s in &samples {
        *histogram.entry(s.facet_count).or_insert(0) += 1;
    }
    let universe = candidate_labels(spec);
    let sets: Vec<BTreeSet<SubdomainLabel>> =
        samples.iter().map(|s| s.neighbor_labels.clone()).collect();
    let classification = classify(&universe, &sets);
    let outside_candidates = classification
        .labels
        .iter()
        .filter(|l| !universe.contains(l) && classification.of(l) != Some(Status::Never))
        .copied()
        .collect();
    Ok(ExperimentReport {
        config: config.clone(),
        histogram,
        classification,
        rejected,
        lemma_violations: samples.iter().filter(|s| !s.checks.all()).count(),
        samples,
        outside_candidates,
    })
}

fn label(s: &str) -> SubdomainLabel {
    s.parse().expect("fixed label")
}

/// The seven subdomains that always hold a neighbour for `P4_232`.
pub fn p4232_always() -> Vec<SubdomainLabel> {
    ["T_34^A", "T_43^A", "T^B", "T_23^A", "T_32^A", "T^F", "T^E"]
        .map(label)
        .to_vec()
}

#[derive(Clone, Debug, Serialize)]
pub struct P4232Structure {
    pub octahedron_v1v2: bool,
    pub octahedron_v1v4: bool,
    pub centroid_tetrahedron: bool,
    /// Which of `T_13`, `T_24` pairs with `T^A, T^E` in a Delaunay tetrahedron,
    /// with its circumcenter.
    pub long_edge_pair: Vec<(String, Point3)>,
    pub half: HalfFilter,
    pub always_present: bool,
    pub one_of_b34_b43: bool,
    pub one_of_f23_f32: bool,
    pub some_of_a13_e13: bool,
    pub some_of_a24_e24: bool,
}

impl P4232Structure {
    /// The corollary's literal third claim: a neighbour from both long-edge
    /// pairs. Reported, not enforced; only one pair is forced by the
    /// Delaunay dichotomy.
    pub fn both_long_edge_pairs(&self) -> bool {
        self.some_of_a13_e13 && self.some_of_a24_e24
    }

    /// `"13"` or `"24"` when exactly one long-edge tetrahedron is Delaunay.
    pub fn dichotomy_pair(&self) -> Option<&str> {
        match self.long_edge_pair.as_slice() {
            [(tag, _)] => Some(tag),
            _ => None,
        }
    }
}

/// The orbit point of `p` in an occupied subdomain.
fn orbit_point(
    spec: &FullGroupSpec,
    p: &Point3,
    l: &SubdomainLabel,
) -> Result<Point3, ExperimentError> {
    let g = l.to_subdomain();
    if !spec.presentation.contains(&g).map_err(CellError::from)? {
        return Err(ExperimentError::StructureViolation(format!(
            "{l} holds no orbit point"
        )));
    }
    Ok(g.apply(p))
}

/// Whether `points` are equidistant from `center` and every other orbit
/// point is strictly farther.
fn empty_sphere(
    spec: &FullGroupSpec,
    p: &Point3,
    center: &Point3,
    points: &[Point3],
) -> Result<bool, ExperimentError> {
    let r2 = center.dist2(&points[0]);
    if points.iter().any(|q| center.dist2(q) != r2) {
        return Ok(false);
    }
    // Every orbit point within r of the center is within (|c − p| + r) of p.
    let reach = int(2) * (center.dist2(p) + &r2);
    let orbit = spec
        .presentation
        .orbit_within(p, &reach)
        .map_err(CellError::from)?;
    Ok(orbit
        .iter()
        .all(|(q, _)| points.contains(q) || center.dist2(q) > r2))
}

/// Checks the Delaunay structure around `T^A` and the neighbour claims for
/// one `P4_232` sample.
pub fn check_p4232_structure(
    report: &StereohedronReport,
) -> Result<P4232Structure, ExperimentError> {
    let spec = catalog("P4_232")?;
    let p = &report.base_point;
    let pts = |names: &[&str]| -> Result<Vec<Point3>, ExperimentError> {
        names
            .iter()
            .map(|n| orbit_point(spec, p, &label(n)))
            .collect()
    };
    let v = base_vertices();
    let octahedron_v1v2 = empty_sphere(
        spec,
        p,
        &v[0].midpoint(&v[1]),
        &pts(&["T^A", "T_34^A", "T_43^A", "T^B", "T_34^B", "T_43^B"])?,
    )?;
    let octahedron_v1v4 = empty_sphere(
        spec,
        p,
        &v[0].midpoint(&v[3]),
        &pts(&["T^A", "T_23^A", "T_32^A", "T^F", "T_23^F", "T_32^F"])?,
    )?;
    let centroid_tetrahedron = empty_sphere(
        spec,
        p,
        &base_centroid(),
        &pts(&["T^A", "T^B", "T^E", "T^F"])?,
    )?;
    let labels = report.neighbor_labels();
    let has = |n: &str| labels.contains(&label(n));
    let mut long_edge_pair = Vec::new();
    for (tag, x, y) in [("13", "T_13^A", "T_13^E"), ("24", "T_24^A", "T_24^E")] {
        let four = pts(&["T^A", "T^E", x, y])?;
        let c = circumcenter(&four[0], &four[1], &four[2], &four[3]).map_err(CellError::from)?;
        if empty_sphere(spec, p, &c, &four)? {
            if !(has(x) && has(y)) {
                return Err(ExperimentError::StructureViolation(format!(
                    "T^A, T^E, {x}, {y} is Delaunay but not both are neighbours"
                )));
            }
            long_edge_pair.push((tag.to_string(), c));
        }
    }
    let out = P4232Structure {
        octahedron_v1v2,
        octahedron_v1v4,
        centroid_tetrahedron,
        half: HalfFilter::of(p),
        always_present: p4232_always().iter().all(|l| labels.contains(l)),
        one_of_b34_b43: has("T_34^B") != has("T_43^B"),
        one_of_f23_f32: has("T_23^F") != has("T_32^F"),
        some_of_a13_e13: has("T_13^A") || has("T_13^E"),
        some_of_a24_e24: has("T_24^A") || has("T_24^E"),
        long_edge_pair,
    };
    let mids = [v[0].midpoint(&v[2]), v[1].midpoint(&v[3])];
    let long_edge_ok =
        !out.long_edge_pair.is_empty() && out.long_edge_pair.iter().all(|(_, c)| mids.contains(c));
    let clauses = [
        ("octahedron on v1v2", out.octahedron_v1v2),
        ("octahedron on v1v4", out.octahedron_v1v4),
        (
            "Delaunay tetrahedron at the centroid",
            out.centroid_tetrahedron,
        ),
        (
            "long-edge Delaunay tetrahedron at a long-edge midpoint",
            long_edge_ok,
        ),
        ("seven permanent neighbours", out.always_present),
        ("exactly one of T_34^B, T_43^B", out.one_of_b34_b43),
        ("exactly one of T_23^F, T_32^F", out.one_of_f23_f32),
    ];
    if let Some((name, _)) = clauses.iter().find(|(_, ok)| !ok) {
        return Err(ExperimentError::StructureViolation((*name).to_string()));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecialOrbitReport {
    pub group: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub t: Rational,
    pub point: Point3,
    pub stabilizer_order: usize,
    pub facet_count: usize,
    /// Neighbours in the `F23`-orbit of `p`.
    pub own_orbit: usize,
    pub other_orbit: usize,
    pub lemma33: bool,
}

/// `v_1 + t (v_3 − v_1)`, on the long edge near `v_1`.
pub fn edge_point(t: &Rational) -> Point3 {
    let v = base_vertices();
    &v[0] + &(&v[2] - &v[0]).scale(t)
}

pub fn special_orbit_cell(
    group: &str,
    t: &Rational,
) -> Result<SpecialOrbitReport, ExperimentError> {
    let spec = catalog(group)?;
    if spec.name != "F4_132" && spec.name != "F2/d-3" {
        return Err(ExperimentError::InvalidConfig(format!(
            "special orbits are studied for F4_132 and F2/d-3, not {}",
            spec.name
        )));
    }
    if !(int(0) < *t && *t < rat(1, 2)) || *t == rat(1, 4) {
        return Err(ExperimentError::InvalidConfig(
            "need 0 < t < 1/2 and t != 1/4".into(),
        ));
    }
    let p = edge_point(t);
    let opts = CellOptions {
        allow_stabilizer: true,
        ..CellOptions::default()
    };
    let report = dirichlet_cell_in(&spec.presentation, &p, Strategy::SafeRadius, &opts)?;
    let f23 = &catalog("F23")?.presentation;
    let mut own = 0;
    for n in &report.neighbors {
        if f23.contains(&n.witness).map_err(CellError::from)? {
            own += 1;
        }
    }
    Ok(SpecialOrbitReport {
        group: spec.name.clone(),
        t: t.clone(),
        point: p,
        stabilizer_order: report.stabilizer_order,
        facet_count: report.facet_count,
        own_orbit: own,
        other_orbit: report.facet_count - own,
        lemma33: check_containment(&report).lemma33,
    })
}

/// Special-orbit cells at `samples` seeded parameters `t = k/denominator`.
pub fn run_special_orbit_experiment(
    group: &str,
    samples: usize,
    seed: u64,
) -> Result<Vec<SpecialOrbitReport>, ExperimentError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    const D: i64 = 1000;
    let mut ts = BTreeSet::new();
    while ts.len() < samples {
        let k = rng.gen_range(1..D / 2);
        if k * 4 != D {
            ts.insert(k);
        }
    }
    ts.into_par_iter()
        .map(|k| special_orbit_cell(group, &rat(k, D)))
        .collect()
}
