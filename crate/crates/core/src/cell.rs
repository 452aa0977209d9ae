//! Dirichlet stereohedra: Voronoi cells of one orbit point, computed exactly.

use std::collections::{BTreeSet, HashSet};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bounds::{Family, RegionFamily};
use crate::catalog::FullGroupSpec;
use crate::group::{GroupError, GroupPresentation, DEFAULT_WORD_BOUND};
use crate::isometry::Isometry;
use crate::lattice::{
    base_subdomain, classify_subdomain, label_of_element, tetra_geometry, LatticeError,
    SubdomainLabel, TetraAddress, TetraKind,
};
use crate::polytope::{
    covered_by_union, locate_point, Builder, Clip, ConvexPolyhedron, GeometryError, Halfspace,
    Location,
};
use crate::rational::{fmt_rational, int, Point3, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CellError {
    #[error("base point has a stabilizer of order {0}")]
    NontrivialStabilizer(usize),
    #[error("candidate set incomplete: {0}")]
    CandidateSetIncomplete(String),
    #[error("{0} is not interior to T^A")]
    NotInBaseSubdomain(Point3),
    #[error("perturbation box of radius {0} leaves T^A")]
    PerturbationTooLarge(String),
    #[error("safe radius did not certify the cell up to radius {0}")]
    RadiusExhausted(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How the candidate orbit points were chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CandidateSource {
    InfluenceRegion(Family),
    /// All orbit points within the radius, which the certificate proved sufficient.
    SafeRadius(Rational),
}

impl Serialize for CandidateSource {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CandidateSource::InfluenceRegion(f) => {
                s.serialize_str(&format!("InfluenceRegion({f:?})"))
            }
            CandidateSource::SafeRadius(r) => {
                s.serialize_str(&format!("SafeRadius({})", fmt_rational(r)))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Strategy<'a> {
    SafeRadius,
    InfluenceRegion(&'a RegionFamily),
}

#[derive(Clone, Debug)]
pub struct CellOptions {
    /// Accept base points with a nontrivial stabilizer.
    pub allow_stabilizer: bool,
    pub initial_radius: Rational,
    pub max_radius: Rational,
}

impl Default for CellOptions {
    fn default() -> Self {
        CellOptions {
            allow_stabilizer: false,
            initial_radius: int(4),
            max_radius: int(64),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Neighbor {
    pub point: Point3,
    /// Subdomain containing the point, when it is interior to one.
    pub label: Option<SubdomainLabel>,
    pub witness: Isometry,
}

#[derive(Clone, Debug, Serialize)]
pub struct StereohedronReport {
    pub group_name: String,
    pub base_point: Point3,
    pub cell: ConvexPolyhedron,
    pub facet_count: usize,
    /// `neighbors[i]` owns facet `i` of `cell`.
    pub neighbors: Vec<Neighbor>,
    pub candidate_source: CandidateSource,
    pub candidates_considered: usize,
    pub stabilizer_order: usize,
}

impl StereohedronReport {
    pub fn neighbor_labels(&self) -> BTreeSet<SubdomainLabel> {
        self.neighbors.iter().filter_map(|n| n.label).collect()
    }
}

pub(crate) struct Cut {
    pub(crate) poly: ConvexPolyhedron,
    pub(crate) owners: Vec<Option<usize>>,
    pub(crate) max_dist2: Rational,
    pub(crate) used: usize,
}

/// Intersects bisectors of `p` against `candidates` (sorted by distance)
/// inside the box of half-width `half`. Stops once the next candidate is at
/// least twice as far as every current vertex, since its bisector can no
/// longer reach the cell.
pub(crate) fn voronoi<T>(
    p: &Point3,
    candidates: &[(Point3, T)],
    half: &Rational,
) -> Result<Cut, CellError> {
    let corner = Point3::new(half.clone(), half.clone(), half.clone());
    let mut b: Builder<Option<usize>> = Builder::cube(&(p - &corner), &(p + &corner), None);
    let four = int(4);
    let mut max_dist2 = b.max_dist2(p);
    let mut used = 0;
    for (i, (q, _)) in candidates.iter().enumerate() {
        if q.dist2(p) >= &four * &max_dist2 {
            break;
        }
        used += 1;
        match b.clip(Halfspace::bisector(p, q)?, Some(i)) {
            Clip::Cut => max_dist2 = b.max_dist2(p),
            Clip::Redundant => {}
            Clip::Empty => unreachable!("p satisfies every bisector strictly"),
        }
    }
    let (poly, owners) = b.finish();
    Ok(Cut {
        poly,
        owners,
        max_dist2,
        used,
    })
}

fn is_interior_to_base_subdomain(p: &Point3) -> bool {
    locate_point(base_subdomain(), p) == Location::Interior
}

/// Neighbour orbit points, excluding `p` itself.
fn orbit_candidates(
    group: &GroupPresentation,
    p: &Point3,
    r2: &Rational,
) -> Result<Vec<(Point3, Isometry)>, CellError> {
    Ok(group
        .orbit_within(p, r2)?
        .into_iter()
        .filter(|(q, _)| q != p)
        .collect())
}

pub fn dirichlet_cell(
    spec: &FullGroupSpec,
    p: &Point3,
    strategy: Strategy,
) -> Result<StereohedronReport, CellError> {
    dirichlet_cell_in(&spec.presentation, p, strategy, &CellOptions::default())
}

pub fn dirichlet_cell_in(
    group: &GroupPresentation,
    p: &Point3,
    strategy: Strategy,
    opts: &CellOptions,
) -> Result<StereohedronReport, CellError> {
    let stabilizer_order = group.stabilizer(p, DEFAULT_WORD_BOUND)?.len();
    if stabilizer_order > 1 && !opts.allow_stabilizer {
        return Err(CellError::NontrivialStabilizer(stabilizer_order));
    }
    let in_base = is_interior_to_base_subdomain(p);
    let (cut, candidates, source) = match strategy {
        Strategy::SafeRadius => {
            let mut r = opts.initial_radius.clone();
            loop {
                let candidates = orbit_candidates(group, p, &(&r * &r))?;
                let cut = voronoi(p, &candidates, &r)?;
                // Certificate: the cell lies in the ball of radius r/2, so no
                // orbit point beyond r can cut it, and no box face survives.
                if int(4) * &cut.max_dist2 <= &r * &r && cut.owners.iter().all(Option::is_some) {
                    break (cut, candidates, CandidateSource::SafeRadius(r));
                }
                r *= int(2);
                if r > opts.max_radius {
                    return Err(CellError::RadiusExhausted(fmt_rational(&opts.max_radius)));
                }
            }
        }
        Strategy::InfluenceRegion(region) => {
            if !in_base {
                return Err(CellError::NotInBaseSubdomain(p.clone()));
            }
            let infl: HashSet<SubdomainLabel> = region.infl_labels.iter().copied().collect();
            let mut candidates = Vec::new();
            for (q, g) in orbit_candidates(group, p, &int(9))? {
                if infl.contains(&label_of_element(&g)?) {
                    candidates.push((q, g));
                }
            }
            let cut = voronoi(p, &candidates, &int(4))?;
            if cut.owners.iter().any(Option::is_none) {
                return Err(CellError::CandidateSetIncomplete(
                    "a bounding-box face survived".into(),
                ));
            }
            if !covered_by_union(&cut.poly, &region.vorext_polytopes()) {
                return Err(CellError::CandidateSetIncomplete(
                    "the cell leaves the extended Voronoi region".into(),
                ));
            }
            (
                cut,
                candidates,
                CandidateSource::InfluenceRegion(region.family),
            )
        }
    };
    let mut neighbors = Vec::with_capacity(cut.owners.len());
    for owner in &cut.owners {
        let (q, g) = &candidates[owner.expect("certified cells have no box faces")];
        let label = if in_base {
            Some(label_of_element(g)?)
        } else {
            classify_subdomain(q).ok()
        };
        neighbors.push(Neighbor {
            point: q.clone(),
            label,
            witness: g.clone(),
        });
    }
    let facet_count = cut.poly.facet_count();
    debug_assert_eq!(
        neighbors
            .iter()
            .map(|n| &n.point)
            .collect::<HashSet<_>>()
            .len(),
        facet_count,
        "distinct neighbours own distinct facets"
    );
    Ok(StereohedronReport {
        group_name: group.name.clone(),
        base_point: p.clone(),
        cell: cut.poly,
        facet_count,
        neighbors,
        candidate_source: source,
        candidates_considered: cut.used,
        stabilizer_order,
    })
}

/// Axis of a rotation: a point on it and a direction, if `g` is a rotation.
pub fn rotation_axis(g: &Isometry) -> Option<(Point3, Point3)> {
    if !g.is_proper() || g.has_identity_linear() {
        return None;
    }
    let k = g.order(6)?;
    let mut point = Point3::zero();
    let mut x = Point3::zero();
    for _ in 0..k {
        x = g.apply(&x);
        point = &point + &x;
    }
    let point = point.scale(&Rational::new(1.into(), (k as i64).into()));
    let rot = Isometry {
        linear: g.linear.clone(),
        translation: Point3::zero(),
    };
    for w in [
        Point3::from_ints(1, 2, 5),
        Point3::from_ints(1, 0, 0),
        Point3::from_ints(0, 1, 0),
        Point3::from_ints(0, 0, 1),
    ] {
        let mut dir = Point3::zero();
        let mut y = w;
        for _ in 0..k {
            dir = &dir + &y;
            y = rot.apply(&y);
        }
        if !dir.is_zero() {
            return Some((point, dir));
        }
    }
    None
}

/// Rotations of the group whose axis meets the closed base tetrahedron.
pub fn rotations_meeting_base(group: &GroupPresentation) -> Result<Vec<Isometry>, CellError> {
    let t = tetra_geometry(&TetraAddress::BASE).polytope;
    let mut out: Vec<Isometry> = group
        .elements_near_identity(1)?
        .into_iter()
        .filter(|g| rotation_axis(g).is_some_and(|(a, u)| t.meets_line(&a, &u)))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Counter-clockwise angular position of `x` about the axis, relative to
/// the reference direction `e1`; comparable exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Angle {
    x: Rational,
    y: Rational,
}

impl Angle {
    fn half(&self) -> u8 {
        if self.y.is_positive() || (self.y.is_zero() && self.x.is_positive()) {
            0
        } else {
            1
        }
    }

    fn is_zero(&self) -> bool {
        self.y.is_zero() && self.x.is_positive()
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Angle {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.half().cmp(&o.half()).then_with(|| {
            // Same half-plane: a precedes b when b is counter-clockwise of a.
            let cross = &self.x * &o.y - &self.y * &o.x;
            Rational::zero().cmp(&cross)
        })
    }
}

/// At most two points of each `⟨ρ⟩`-orbit of neighbours are neighbours, and
/// they are the angularly nearest to `p` on either side of the axis.
pub fn check_rotation_lemma(report: &StereohedronReport, rho: &Isometry) -> bool {
    let Some((a, u)) = rotation_axis(rho) else {
        return false;
    };
    let k = rho.order(6).expect("rotation");
    let proj = |v: &Point3| v - &u.scale(&(v.dot(&u) / u.norm2()));
    let e1 = proj(&(&report.base_point - &a));
    if e1.is_zero() {
        return true;
    }
    let e2 = u.cross(&e1);
    let angle = |x: &Point3| {
        let v = x - &a;
        Angle {
            x: v.dot(&e1),
            y: v.dot(&e2),
        }
    };
    let neighbors: HashSet<&Point3> = report.neighbors.iter().map(|n| &n.point).collect();
    let mut seen: HashSet<Point3> = HashSet::new();
    for n in &report.neighbors {
        if seen.contains(&n.point) {
            continue;
        }
        let mut orbit = vec![n.point.clone()];
        for _ in 1..k {
            let next = rho.apply(orbit.last().expect("nonempty"));
            orbit.push(next);
        }
        seen.extend(orbit.iter().cloned());
        if proj(&(&n.point - &a)).is_zero() {
            continue;
        }
        // When the orbit passes through p itself, p is left out and its two
        // angular neighbours are the candidates.
        let members: Vec<usize> = (0..k).filter(|&i| orbit[i] != report.base_point).collect();
        let angles: Vec<Angle> = orbit.iter().map(angle).collect();
        let ccw = *members
            .iter()
            .min_by(|&&i, &&j| angles[i].cmp(&angles[j]))
            .expect("nonempty");
        // Clockwise nearest: the largest angle, unless one sits at angle zero.
        let cw = match members.iter().find(|&&i| angles[i].is_zero()) {
            Some(&i) => i,
            None => *members
                .iter()
                .max_by(|&&i, &&j| angles[i].cmp(&angles[j]))
                .expect("nonempty"),
        };
        let hits: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&i| neighbors.contains(&orbit[i]))
            .collect();
        if hits.len() > 2 || hits.iter().any(|&i| i != ccw && i != cw) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Containment {
    /// The cell lies in `T ∪ T_1 ∪ … ∪ T_4` with no facet on its boundary.
    pub lemma32: bool,
    /// Every neighbour is interior to one of the fifteen tetrahedra.
    pub lemma33: bool,
}

pub fn check_containment(report: &StereohedronReport) -> Containment {
    let base = tetra_geometry(&TetraAddress::BASE).polytope;
    let neighbors: Vec<ConvexPolyhedron> = (1..=4)
        .map(|i| tetra_geometry(&TetraAddress::neighbor(i)).polytope)
        .collect();
    let five: Vec<ConvexPolyhedron> = std::iter::once(base.clone())
        .chain(neighbors.iter().cloned())
        .collect();
    let cell = &report.cell;
    let inside = cell
        .vertices()
        .iter()
        .all(|v| five.iter().any(|t| locate_point(t, v) != Location::Outside))
        && covered_by_union(cell, &five);
    // The boundary of the union is made of the faces of the T_i not shared
    // with T. A facet lies there when it is supported by such a face.
    let shared: HashSet<Halfspace> = base.halfspaces().iter().map(Halfspace::flipped).collect();
    let on_boundary = |f: usize| {
        let h = &cell.halfspaces()[f];
        let c = cell.facet_centroid(f);
        neighbors.iter().any(|t| {
            t.halfspaces()
                .iter()
                .any(|face| !shared.contains(face) && face == h)
                && locate_point(t, &c) == Location::Boundary
        })
    };
    let no_boundary_facet = !(0..cell.facet_count()).any(on_boundary);
    let fifteen: Vec<ConvexPolyhedron> = TetraKind::complex()
        .into_iter()
        .map(|k| tetra_geometry(&TetraAddress::new(k)).polytope)
        .collect();
    let lemma33 = report.neighbors.iter().all(|n| {
        fifteen
            .iter()
            .any(|t| locate_point(t, &n.point) == Location::Interior)
    });
    Containment {
        lemma32: inside && no_boundary_facet,
        lemma33,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub base_count: usize,
    pub min: usize,
    pub max: usize,
    pub counts: Vec<usize>,
    pub violation: bool,
    /// Perturbed points discarded for having a nontrivial stabilizer.
    pub rejected: usize,
}

/// Facet counts under small perturbations never drop below the count at `p`.
pub fn perturbation_monotonicity_probe(
    spec: &FullGroupSpec,
    p: &Point3,
    trials: usize,
    epsilon: &Rational,
    seed: u64,
) -> Result<ProbeReport, CellError> {
    // The ε-box may cross faces of T^A through p, never the others.
    for h in base_subdomain().halfspaces() {
        let slack = h.slack(p);
        if slack.is_negative() {
            return Err(CellError::NotInBaseSubdomain(p.clone()));
        }
        let n = h.normal();
        let reach = epsilon * (n.x.abs() + n.y.abs() + n.z.abs());
        if slack.is_positive() && slack <= reach {
            return Err(CellError::PerturbationTooLarge(fmt_rational(epsilon)));
        }
    }
    let base = dirichlet_cell(spec, p, Strategy::SafeRadius)?.facet_count;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const STEPS: i64 = 1000;
    let mut counts = Vec::with_capacity(trials);
    let mut rejected = 0;
    while counts.len() < trials {
        let mut d = [0i64; 3];
        for c in &mut d {
            *c = rng.gen_range(-STEPS..=STEPS);
        }
        let shift = Point3::from_frac(d[0], d[1], d[2], STEPS).scale(epsilon);
        let q = p + &shift;
        match dirichlet_cell(spec, &q, Strategy::SafeRadius) {
            Ok(r) => counts.push(r.facet_count),
            Err(CellError::NontrivialStabilizer(_)) => {
                rejected += 1;
                if rejected > 10 * trials + 100 {
                    return Err(CellError::NontrivialStabilizer(0));
                }
            }
            Err(e) => return Err(e),
        }
    }
    let min = counts.iter().copied().min().unwrap_or(base);
    let max = counts.iter().copied().max().unwrap_or(base);
    Ok(ProbeReport {
        base_count: base,
        min,
        max,
        violation: min < base,
        counts,
        rejected,
    })
}
