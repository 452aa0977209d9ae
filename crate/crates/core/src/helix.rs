//! The subgroup `G'` of `P4_232` preserving the vertical axis of `T`, and
//! its double-helix orbits.
//!
//! Work happens in a frame translated so that the centroid of `T` is the
//! origin and the axis is `x = y = 0`; there `v_1 = (0,-1/2,1/4)`,
//! `v_2 = (1/2,0,-1/4)`, `v_3 = (0,1/2,1/4)`, `v_4 = (-1/2,0,-1/4)`.
//! A base point is `p_0 = (α, -β, h)` with `0 < α < β`; it lies in the
//! upper half of `T^A` when `0 < h < 1/4` and in the lower half when
//! `-1/4 < h < 0`. The closed-form orbit holds for either sign.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::catalog::{catalog, CatalogError};
use crate::cell::{voronoi, CellError};
use crate::group::GroupError;
use crate::isometry::Isometry;
use crate::lattice::{classify_subdomain, Letter, SubdomainLabel, TetraAddress, TetraKind};
use crate::polytope::{circumcenter, GeometryError, Halfspace};
use crate::rational::{fmt_rational, int, rat, Point3, Rational};
use crate::sampling::{BasePointSampler, HalfFilter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HelixError {
    #[error("invalid helix parameters: {0}")]
    InvalidParams(String),
    #[error("neighbour set differs from the theorem: extra {extra:?}, missing {missing:?}")]
    TheoremMismatch {
        extra: Vec<String>,
        missing: Vec<String>,
    },
    #[error("box sizes disagree on the neighbour set")]
    BoxDependence,
    #[error("Delaunay tetrahedron {0} has a point inside its circumsphere")]
    NotDelaunay(String),
    #[error("orbit formulas disagree with the group orbit: {0}")]
    OrbitMismatch(String),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HelixParams {
    #[serde(with = "crate::rational::serde_rational")]
    pub alpha: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub beta: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub h: Rational,
}

impl HelixParams {
    pub fn new(alpha: Rational, beta: Rational, h: Rational) -> Result<Self, HelixError> {
        let zero = int(0);
        if !(zero < alpha && alpha < beta) {
            return Err(HelixError::InvalidParams("need 0 < alpha < beta".into()));
        }
        if !(zero < h && h < rat(1, 4)) {
            return Err(HelixError::InvalidParams("need 0 < h < 1/4".into()));
        }
        Ok(HelixParams { alpha, beta, h })
    }

    /// Either half: `0 < |h| < 1/4`.
    pub fn any_half(alpha: Rational, beta: Rational, h: Rational) -> Result<Self, HelixError> {
        let p = Self::new(alpha, beta, h.abs())?;
        Ok(HelixParams { h, ..p })
    }

    /// Parameters of a base point given in ordinary coordinates.
    pub fn from_base_point(p: &Point3) -> Result<Self, HelixError> {
        let s = to_shifted(p);
        Self::any_half(s.x, -s.y, s.z)
    }

    pub fn is_upper(&self) -> bool {
        self.h.is_positive()
    }

    pub fn base_point(&self) -> Point3 {
        to_real(&p_point(self, 0))
    }
}

/// The centroid of `T`, origin of the shifted frame.
pub fn frame_origin() -> Point3 {
    Point3::new(rat(1, 2), int(0), rat(1, 4))
}

pub fn to_real(p: &Point3) -> Point3 {
    p + &frame_origin()
}

pub fn to_shifted(p: &Point3) -> Point3 {
    p - &frame_origin()
}

/// Name of an orbit point: `p_i` or `q_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HelixPoint {
    P(i64),
    Q(i64),
}

impl fmt::Display for HelixPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HelixPoint::P(i) => write!(f, "p_{i}"),
            HelixPoint::Q(i) => write!(f, "q_{i}"),
        }
    }
}

impl Serialize for HelixPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `p_0 … p_3` as listed; the rest follow from `p_{i+4} = q_i + (0,0,1)`,
/// `q_{i+4} = p_i + (0,0,1)` and `q_i = (-x, -y, z)` for `p_i = (x, y, z)`.
pub fn p_point(params: &HelixParams, i: i64) -> Point3 {
    let (a, b, h) = (&params.alpha, &params.beta, &params.h);
    let half = rat(1, 2);
    let base = i.rem_euclid(4);
    let k = i.div_euclid(4);
    let p = match base {
        0 => Point3::new(a.clone(), -b, h.clone()),
        1 => Point3::new(-a, -b, &half - h),
        2 => Point3::new(-b, -a, h + &half),
        _ => Point3::new(-b, a.clone(), int(1) - h),
    };
    // Each step of four adds one unit of height and a half-turn.
    let p = if k.rem_euclid(2) == 1 {
        half_turn(&p)
    } else {
        p
    };
    &p + &Point3::from_ints(0, 0, k)
}

pub fn q_point(params: &HelixParams, i: i64) -> Point3 {
    half_turn(&p_point(params, i))
}

fn half_turn(p: &Point3) -> Point3 {
    Point3::new(-&p.x, -&p.y, p.z.clone())
}

pub fn helix_point(params: &HelixParams, n: HelixPoint) -> Point3 {
    match n {
        HelixPoint::P(i) => p_point(params, i),
        HelixPoint::Q(i) => q_point(params, i),
    }
}

/// Orbit points `p_i, q_i` (shifted frame) with `|z − h| ≤ window`.
pub fn orbit_window(params: &HelixParams, window: &Rational) -> Vec<(Point3, HelixPoint)> {
    let reach = num_traits::ToPrimitive::to_i64(&(window * int(4)).ceil().to_integer())
        .expect("small window")
        + 8;
    let mut out = Vec::new();
    for i in -reach..=reach {
        for n in [HelixPoint::P(i), HelixPoint::Q(i)] {
            let x = helix_point(params, n);
            if (&x.z - &params.h).abs() <= *window {
                out.push((x, n));
            }
        }
    }
    out
}

/// The neighbours the theorem lists for an upper base point.
pub fn theorem_neighbors() -> BTreeSet<HelixPoint> {
    (-4..=4)
        .map(HelixPoint::Q)
        .chain([HelixPoint::P(-1), HelixPoint::P(1)])
        .collect()
}

/// Orbit points that can cut the cell of `p_0`. The cell lies in the slab
/// `|z - h| <= 1` (bisectors with `p_0 ± (0,0,2)`). Points repeat every 2
/// vertically, so in that slab a point with `|z - h| > 2` is strictly
/// farther than its translate and never owns a facet.
fn window_candidates(params: &HelixParams) -> Vec<(Point3, HelixPoint)> {
    let p0 = p_point(params, 0);
    let mut candidates: Vec<(Point3, HelixPoint)> = orbit_window(params, &int(2))
        .into_iter()
        .filter(|(x, _)| *x != p0)
        .collect();
    candidates.sort_by(|a, b| (a.0.dist2(&p0), &a.0).cmp(&(b.0.dist2(&p0), &b.0)));
    candidates
}

/// Vertices of the unbounded cell of `p_0`, by brute force over triples of
/// bisector planes.
pub fn cell_vertices(params: &HelixParams) -> Result<Vec<Point3>, HelixError> {
    let p0 = p_point(params, 0);
    let hs: Vec<Halfspace> = window_candidates(params)
        .iter()
        .map(|(q, _)| Halfspace::bisector(&p0, q))
        .collect::<Result<_, _>>()?;
    let mut out = BTreeSet::new();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let nij = hs[i].normal().cross(&hs[j].normal());
            if nij.is_zero() {
                continue;
            }
            for k in j + 1..hs.len() {
                let det = nij.dot(&hs[k].normal());
                if det.is_zero() {
                    continue;
                }
                let (ni, nj, nk) = (hs[i].normal(), hs[j].normal(), hs[k].normal());
                let x = (&(&nj.cross(&nk).scale(&hs[i].offset())
                    + &nk.cross(&ni).scale(&hs[j].offset()))
                    + &nij.scale(&hs[k].offset()))
                    .scale(&(int(1) / det));
                if hs.iter().all(|h| h.contains(&x)) {
                    out.insert(x);
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// A box half-width holding every vertex of the cell strictly inside. The
/// cell is pointed, so each facet meets such a box in a 2-face.
pub fn certified_half_width(params: &HelixParams) -> Result<Rational, HelixError> {
    let p0 = p_point(params, 0);
    let reach = cell_vertices(params)?
        .iter()
        .map(|v| (v - &p0).max_abs())
        .max()
        .unwrap_or_else(|| int(0));
    Ok(int(2) * reach + int(1))
}

/// Voronoi neighbours of `p_0` inside a box of half-width `half_width`.
pub fn cell_neighbors(
    params: &HelixParams,
    half_width: &Rational,
) -> Result<BTreeSet<HelixPoint>, HelixError> {
    let p0 = p_point(params, 0);
    let candidates = window_candidates(params);
    let cut = voronoi(&p0, &candidates, half_width)?;
    Ok(cut
        .owners
        .iter()
        .flatten()
        .map(|&i| candidates[i].1)
        .collect())
}

/// Neighbours of `p_0` in the certified box, checked against a box twice
/// as large.
pub fn helix_neighbors(params: &HelixParams) -> Result<BTreeSet<HelixPoint>, HelixError> {
    let half = certified_half_width(params)?;
    let near = cell_neighbors(params, &half)?;
    if cell_neighbors(params, &(int(2) * &half))? != near {
        return Err(HelixError::BoxDependence);
    }
    Ok(near)
}

#[derive(Clone, Debug, Serialize)]
pub struct DelaunayCheck {
    pub family: u8,
    pub index: i64,
    pub vertices: [HelixPoint; 4],
    pub center: Point3,
}

/// The three families of Delaunay tetrahedra of the double helix:
/// `{p_{i-1}, q_{i-1}, p_i, q_i}`, `{q_{i-2}, q_{i-1}, p_i, p_{i+1}}` and
/// `{p_{i-2}, p_{i-1}, q_i, q_{i+1}}`, each with an empty circumsphere.
pub fn verify_delaunay_families(
    params: &HelixParams,
    range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<DelaunayCheck>, HelixError> {
    use HelixPoint::{P, Q};
    let orbit = orbit_window(params, &int(6));
    let mut out = Vec::new();
    for i in range {
        let families = [
            (1, [P(i - 1), Q(i - 1), P(i), Q(i)]),
            (2, [Q(i - 2), Q(i - 1), P(i), P(i + 1)]),
            (3, [P(i - 2), P(i - 1), Q(i), Q(i + 1)]),
        ];
        for (family, vs) in families {
            let pts = vs.map(|n| helix_point(params, n));
            let c = circumcenter(&pts[0], &pts[1], &pts[2], &pts[3])?;
            let r2 = c.dist2(&pts[0]);
            let name = || format!("{{{}}}", vs.map(|n| n.to_string()).join(", "));
            if orbit
                .iter()
                .any(|(x, n)| !vs.contains(n) && x.dist2(&c) <= r2)
            {
                return Err(HelixError::NotDelaunay(name()));
            }
            out.push(DelaunayCheck {
                family,
                index: i,
                vertices: vs,
                center: c,
            });
        }
    }
    Ok(out)
}

/// Checks the closed-form orbit against the orbit of the actual group: the
/// elements of `P4_232` that preserve the vertical axis of `T` carry `p_0`
/// exactly onto the formula points.
pub fn verify_orbit_formulas(params: &HelixParams) -> Result<usize, HelixError> {
    let g = catalog("P4_232")?;
    let p0 = params.base_point();
    let r2 = int(4);
    let axis_point = frame_origin();
    let up = Point3::from_ints(0, 0, 1);
    let preserves_axis = |e: &Isometry| {
        let d = e.apply_linear(&up);
        let a = to_shifted(&e.apply(&axis_point));
        (d == up || d == -&up) && a.x == int(0) && a.y == int(0)
    };
    let from_group: BTreeSet<Point3> = g
        .presentation
        .orbit_within(&p0, &r2)?
        .into_iter()
        .filter(|(_, e)| preserves_axis(e))
        .map(|(q, _)| to_shifted(&q))
        .collect();
    let from_formula: BTreeSet<Point3> = orbit_window(params, &int(3))
        .into_iter()
        .map(|(x, _)| x)
        .filter(|x| to_real(x).dist2(&p0) <= r2)
        .collect();
    if from_group != from_formula {
        let extra: Vec<String> = from_group
            .difference(&from_formula)
            .map(|x| x.to_string())
            .collect();
        let missing: Vec<String> = from_formula
            .difference(&from_group)
            .map(|x| x.to_string())
            .collect();
        return Err(HelixError::OrbitMismatch(format!(
            "group only {extra:?}, formula only {missing:?}"
        )));
    }
    Ok(from_group.len())
}

#[derive(Clone, Debug, Serialize)]
pub struct HelixReport {
    pub params: HelixParams,
    pub neighbors: BTreeSet<HelixPoint>,
    pub facet_count: usize,
    /// The theorem's statement says nine facets while its list has eleven.
    pub stated_facet_count: usize,
    /// Subdomain of each neighbour in ordinary coordinates, when interior to one.
    pub labels: BTreeMap<String, Option<SubdomainLabel>>,
    pub delaunay_checks: usize,
    pub orbit_points_matched: usize,
}

pub const STATED_FACET_COUNT: usize = 9;

/// Label of a shifted-frame point in ordinary coordinates.
pub fn label_of(x: &Point3) -> Option<SubdomainLabel> {
    classify_subdomain(&to_real(x)).ok()
}

pub fn verify_helix_theorem(params: &HelixParams) -> Result<HelixReport, HelixError> {
    if !params.is_upper() {
        return Err(HelixError::InvalidParams(
            "the theorem is stated for 0 < h < 1/4".into(),
        ));
    }
    let neighbors = helix_neighbors(params)?;
    let expected = theorem_neighbors();
    if neighbors != expected {
        return Err(HelixError::TheoremMismatch {
            extra: neighbors
                .difference(&expected)
                .map(|n| n.to_string())
                .collect(),
            missing: expected
                .difference(&neighbors)
                .map(|n| n.to_string())
                .collect(),
        });
    }
    let delaunay_checks = verify_delaunay_families(params, -4..=4)?.len();
    let orbit_points_matched = verify_orbit_formulas(params)?;
    let labels = neighbor_labels(params, &neighbors);
    Ok(HelixReport {
        params: params.clone(),
        facet_count: neighbors.len(),
        neighbors,
        stated_facet_count: STATED_FACET_COUNT,
        labels,
        delaunay_checks,
        orbit_points_matched,
    })
}

pub fn neighbor_labels(
    params: &HelixParams,
    neighbors: &BTreeSet<HelixPoint>,
) -> BTreeMap<String, Option<SubdomainLabel>> {
    neighbors
        .iter()
        .map(|n| (n.to_string(), label_of(&helix_point(params, *n))))
        .collect()
}

/// Renames subdomains of `T_13` and `T_24` when passing between halves.
pub fn involution(label: &SubdomainLabel) -> SubdomainLabel {
    use Letter::*;
    let swaps = [(A, E), (B, F), (E, A), (F, B)];
    let other = match (label.tetra.kind, label.tetra.anchor) {
        (TetraKind::NeighborOfNeighbor(1, 3), None) => TetraAddress::neighbor_of_neighbor(2, 4),
        (TetraKind::NeighborOfNeighbor(2, 4), None) => TetraAddress::neighbor_of_neighbor(1, 3),
        _ => return *label,
    };
    match swaps.iter().find(|(x, _)| *x == label.letter) {
        Some((_, y)) => SubdomainLabel::new(other, *y),
        None => *label,
    }
}

/// A base point strictly inside `T^A`, in the requested half.
pub fn reference_params(upper: bool) -> HelixParams {
    let h = if upper { rat(1, 10) } else { rat(-1, 10) };
    HelixParams::any_half(rat(1, 20), rat(1, 10), h).expect("valid")
}

/// Seeded parameters of base points strictly inside `T^A`.
pub fn sample_params(seed: u64, n: usize, half: HalfFilter) -> Vec<HelixParams> {
    BasePointSampler::new(seed, crate::sampling::DEFAULT_DENOMINATOR, half)
        .filter_map(|p| HelixParams::from_base_point(&p).ok())
        .take(n)
        .collect()
}

/// Subdomains of `T_13 ∪ T_24` holding a `G'`-orbit point that is not a
/// `G'`-neighbour. Since `Vor_G(p) ⊆ Vor_{G'}(p)`, the `G`-orbit point in
/// such a subdomain never owns a facet.
pub fn helix_exclusions(half: HalfFilter) -> Result<Vec<SubdomainLabel>, HelixError> {
    let params = match half {
        HalfFilter::Upper => reference_params(true),
        HalfFilter::Lower => reference_params(false),
        HalfFilter::All => return Err(HelixError::InvalidParams("pick a half".into())),
    };
    Ok(exclusions_at(&params)?.into_iter().collect())
}

/// The exclusions for one base point.
pub fn exclusions_at(params: &HelixParams) -> Result<BTreeSet<SubdomainLabel>, HelixError> {
    let neighbors: BTreeSet<SubdomainLabel> = neighbor_labels(params, &helix_neighbors(params)?)
        .into_values()
        .flatten()
        .collect();
    let mut out = BTreeSet::new();
    for (x, _) in orbit_window(params, &int(1)) {
        if let Some(l) = label_of(&x) {
            let long_edge = matches!(
                (l.tetra.kind, l.tetra.anchor),
                (TetraKind::NeighborOfNeighbor(1, 3), None)
                    | (TetraKind::NeighborOfNeighbor(2, 4), None)
            );
            if long_edge && !neighbors.contains(&l) {
                out.insert(l);
            }
        }
    }
    Ok(out)
}

/// Parameters as `"num/den"` strings, for reports.
pub fn params_strings(p: &HelixParams) -> [String; 3] {
    [
        fmt_rational(&p.alpha),
        fmt_rational(&p.beta),
        fmt_rational(&p.h),
    ]
}
