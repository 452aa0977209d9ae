//! Counting machinery: Delone's bound, the `(7 + 4m)s + 3` bound, extended
//! Voronoi regions, influence regions and the refined per-group bounds.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{all_groups, BoundSource, CatalogError, FullGroupSpec};
use crate::cell::{dirichlet_cell, CellError, Strategy};
use crate::group::GroupError;
use crate::helix::{helix_exclusions, HelixError};
use crate::isometry::Isometry;
use crate::lattice::{
    complex_subdomains, label_of_element, sigma, stabilizer_element, subdomain_geometry, Color,
    LatticeError, Letter, SubdomainLabel, TetraAddress, TetraKind,
};
use crate::polytope::{
    covered_by_union, interiors_overlap, Builder, Clip, ConvexPolyhedron, Halfspace,
};
use crate::rational::Point3;
use crate::sampling::{BasePointSampler, HalfFilter, DEFAULT_DENOMINATOR};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("{group} lacks the cutting rotations of the {family:?} region")]
    FamilyMismatch { group: String, family: Family },
    #[error("certificate failure for {subdomain} at sample {sample}: {reason}")]
    CertificateFailure {
        subdomain: String,
        sample: String,
        reason: String,
    },
    #[error("influence region routes disagree on {0}")]
    RouteMismatch(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Helix(#[from] HelixError),
}

/// Delone's bound `2^d (a + 1) − 2` for a stereohedron with `a` aspects.
pub fn delone_bound(d: u32, aspects: u64) -> u64 {
    2u64.pow(d) * (aspects + 1) - 2
}

/// `(7 + 4m)s + 3`.
pub fn first_bound(s: usize, m: usize) -> usize {
    (7 + 4 * m) * s + 3
}

/// Aspects of a full cubic group: `|G/L| = 6 s (1 + m) covol(L)`; the
/// rational covolume is always a power of two times 1/2.
pub fn aspects(spec: &FullGroupSpec) -> u64 {
    let index = crate::rational::int((6 * spec.s * (1 + spec.m)) as i64) * spec.lattice.covolume();
    num_traits::ToPrimitive::to_u64(&index.to_integer()).expect("small index")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// Groups containing the order-4 rotations on the edges `v_1v_3`, `v_2v_4`.
    Order4,
    /// Groups containing the transversal order-2 rotation `ρ_0`.
    TransversalOrder2,
    /// Every full group: `T` and its four neighbours.
    Basic,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Order4, Family::TransversalOrder2, Family::Basic];
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionFamily {
    pub family: Family,
    pub vorext_labels: BTreeSet<SubdomainLabel>,
    /// Empty until [`influence_region`] fills it.
    pub infl_labels: BTreeSet<SubdomainLabel>,
    pub cutting_rotations: Vec<Isometry>,
}

impl RegionFamily {
    pub fn vorext_polytopes(&self) -> Vec<ConvexPolyhedron> {
        self.vorext_labels.iter().map(subdomain_geometry).collect()
    }

    /// Subdomains of `T ∪ T_1 ∪ … ∪ T_4` left out of the extended region.
    pub fn excluded(&self) -> Vec<SubdomainLabel> {
        five_tetra_subdomains()
            .into_iter()
            .filter(|l| !self.vorext_labels.contains(l))
            .collect()
    }

    pub fn without(&self, label: &SubdomainLabel) -> RegionFamily {
        let mut r = self.clone();
        r.vorext_labels.remove(label);
        r.infl_labels.clear();
        r
    }
}

/// The 40 subdomains of `T` and its four neighbours.
pub fn five_tetra_subdomains() -> Vec<SubdomainLabel> {
    std::iter::once(TetraAddress::BASE)
        .chain((1..=4).map(TetraAddress::neighbor))
        .flat_map(|t| Letter::ALL.map(|l| SubdomainLabel::new(t, l)))
        .collect()
}

/// Parses `"T:ABC T_3:AB"` into labels.
fn labels(spec: &str) -> BTreeSet<SubdomainLabel> {
    spec.split_whitespace()
        .flat_map(|part| {
            let (tetra, letters) = part.split_once(':').expect("tetra:letters");
            letters
                .chars()
                .map(move |c| format!("{tetra}^{c}").parse().expect("catalog label"))
        })
        .collect()
}

fn affine(perm: [usize; 3], signs: [i64; 3], t: [i64; 3]) -> Isometry {
    Isometry::signed_permutation(perm, signs, Point3::from_ints(t[0], t[1], t[2]))
}

/// `ρ_0`: the half-turn about the vertical line through the centroid of `T`.
pub fn rho0() -> Isometry {
    affine([0, 1, 2], [-1, -1, 1], [1, 0, 0])
}

/// Order-4 rotation about the edge `v_1 v_3`.
pub fn rho13() -> Isometry {
    sigma().compose(stabilizer_element(Letter::H))
}

/// Order-4 rotation about the edge `v_2 v_4` (the x-axis).
pub fn rho24() -> Isometry {
    affine([0, 2, 1], [1, 1, -1], [0, 0, 0])
}

fn cutting_rotations(family: Family) -> Vec<Isometry> {
    match family {
        Family::Order4 => vec![rho13(), rho24(), rho0()],
        Family::TransversalOrder2 => vec![
            rho0(),
            // Half-turns about v1v3 and v2v4.
            affine([0, 1, 2], [-1, 1, -1], [1, 0, 1]),
            affine([0, 1, 2], [1, -1, -1], [0, 0, 0]),
            // Their conjugates by ρ0 through T4/T2 and T1/T3.
            affine([0, 1, 2], [1, -1, -1], [0, 0, 1]),
            affine([0, 1, 2], [-1, 1, -1], [1, 0, 0]),
        ],
        Family::Basic => Vec::new(),
    }
}

/// The extended Voronoi region of `T^A`, as transcribed, with empty `Infl`.
pub fn vorext(family: Family) -> RegionFamily {
    let vorext_labels = match family {
        Family::Order4 => labels("T:ABCGH T_3:ABGH T_4:ABCD"),
        Family::TransversalOrder2 => labels("T:ABCGH T_1:C T_2:GH T_3:ABCGH T_4:ABCDGH"),
        Family::Basic => five_tetra_subdomains().into_iter().collect(),
    };
    RegionFamily {
        family,
        vorext_labels,
        infl_labels: BTreeSet::new(),
        cutting_rotations: cutting_rotations(family),
    }
}

/// `g(VorExt)` as labels, for `g` in the normalizer.
fn image_labels(
    g: &Isometry,
    vorext: &BTreeSet<SubdomainLabel>,
) -> Result<HashSet<SubdomainLabel>, LatticeError> {
    vorext
        .iter()
        .map(|l| label_of_element(&g.compose(&l.to_subdomain())))
        .collect()
}

/// Fills `infl_labels`: the subdomains `S = g(T^A)` of the fifteen-tetrahedron
/// complex with `g(VorExt)` overlapping `VorExt`.
///
/// Two routes are computed and must agree. Distinct subdomains have disjoint
/// interiors, so overlap is a label-set intersection; the second route tests
/// interiors of the actual polytopes.
pub fn influence_region(region: &RegionFamily) -> Result<RegionFamily, BoundError> {
    let own: HashSet<SubdomainLabel> = region.vorext_labels.iter().copied().collect();
    let own_polys = region.vorext_polytopes();
    let results: Vec<Result<Option<SubdomainLabel>, BoundError>> = complex_subdomains()
        .par_iter()
        .map(|s| {
            let g = s.to_subdomain();
            let image = image_labels(&g, &region.vorext_labels)?;
            let combinatorial = !image.is_disjoint(&own);
            let image_polys: Vec<ConvexPolyhedron> = region
                .vorext_polytopes()
                .iter()
                .map(|p| g.transform_polytope(p))
                .collect();
            let geometric = image_polys
                .iter()
                .any(|a| own_polys.iter().any(|b| interiors_overlap(a, b)));
            if combinatorial != geometric {
                return Err(BoundError::RouteMismatch(s.to_string()));
            }
            Ok(combinatorial.then_some(*s))
        })
        .collect();
    let mut out = region.clone();
    out.infl_labels = BTreeSet::new();
    for r in results {
        if let Some(l) = r? {
            out.infl_labels.insert(l);
        }
    }
    Ok(out)
}

/// Cached region with its influence region computed.
pub fn region(family: Family) -> &'static RegionFamily {
    static CACHE: OnceLock<Vec<RegionFamily>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        Family::ALL
            .iter()
            .map(|f| influence_region(&vorext(*f)).expect("transcribed regions are consistent"))
            .collect()
    });
    &all[Family::ALL
        .iter()
        .position(|f| *f == family)
        .expect("listed")]
}

pub fn type_counts(labels: &BTreeSet<SubdomainLabel>) -> BTreeMap<(Color, Letter), usize> {
    let mut out = BTreeMap::new();
    for c in [Color::Black, Color::White] {
        for l in Letter::ALL {
            out.insert((c, l), 0);
        }
    }
    for label in labels {
        *out.get_mut(&(label.color(), label.letter))
            .expect("all types present") += 1;
    }
    out
}

/// Pairs `(T^x_ij, T^x_ji)` with `|i − j|` odd and both in `Infl`. The
/// three-fold rotation on an edge of `T` cycles `T^x_0 → T^x_ij → T^x_ji`;
/// `T^x_0` lies in the same right-angled wedge as `p`, so it is one of the two
/// angularly nearest points of that rotation orbit and at most one of the
/// pair can be a neighbour. For `x = A` the orbit passes through `p` itself
/// and both are neighbours, so no pair is formed.
pub fn reduction_pairs(region: &RegionFamily) -> Vec<(SubdomainLabel, SubdomainLabel)> {
    let base = SubdomainLabel::base(Letter::A);
    let mut out = Vec::new();
    for a in &region.infl_labels {
        if let (TetraKind::NeighborOfNeighbor(i, j), None) = (a.tetra.kind, a.tetra.anchor) {
            if i < j && (j - i) % 2 == 1 {
                let b = SubdomainLabel::new(TetraAddress::neighbor_of_neighbor(j, i), a.letter);
                if !region.infl_labels.contains(&b) {
                    continue;
                }
                let ga = a.to_subdomain();
                let gb = b.to_subdomain();
                let rho = gb.compose(&ga.inverse());
                debug_assert!(rho.is_proper() && rho.order(3) == Some(3));
                let third = label_of_element(&rho.compose(&gb)).expect("normalizer element");
                if third != base {
                    out.push((*a, b));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeRow {
    pub color: Color,
    pub letter: Letter,
    pub count: usize,
    pub pairs: usize,
    /// One for the base point's own subdomain `T^A`.
    pub base: usize,
    pub bound: usize,
}

impl TypeRow {
    pub fn name(&self) -> String {
        let c = match self.color {
            Color::Black => "black",
            Color::White => "white",
        };
        format!("{c} {}", self.letter)
    }
}

/// The per-type bound column: Infl count, minus one per reduction pair,
/// minus one for `T^A` itself.
pub fn bound_column(region: &RegionFamily) -> Vec<TypeRow> {
    let counts = type_counts(&region.infl_labels);
    let pairs = reduction_pairs(region);
    counts
        .into_iter()
        .map(|((color, letter), count)| {
            let pairs = pairs
                .iter()
                .filter(|(a, _)| a.color() == color && a.letter == letter)
                .count();
            let base = usize::from(color == Color::Black && letter == Letter::A);
            TypeRow {
                color,
                letter,
                count,
                pairs,
                base,
                bound: count - pairs - base,
            }
        })
        .collect()
}

/// Whether the group contains every cutting rotation of the family.
pub fn in_family(spec: &FullGroupSpec, family: Family) -> Result<bool, BoundError> {
    for r in cutting_rotations(family) {
        if !spec.presentation.contains(&r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundLedger {
    pub group_name: String,
    pub family: Family,
    pub subdomain_counts: BTreeMap<String, usize>,
    pub reduction_pairs: Vec<(SubdomainLabel, SubdomainLabel)>,
    pub occupied: Vec<String>,
    pub rows: Vec<TypeRow>,
    /// `"8 + 7 + 6 + 7 = 28"`.
    pub sum: String,
    pub bound_before_refinement: usize,
    /// Subdomains of `T_13 ∪ T_24` that can never hold a neighbour, per half.
    pub helix_exclusions: BTreeMap<String, Vec<SubdomainLabel>>,
    pub bound: usize,
}

pub fn refined_bound(
    spec: &FullGroupSpec,
    region: &RegionFamily,
) -> Result<BoundLedger, BoundError> {
    if !in_family(spec, region.family)? {
        return Err(BoundError::FamilyMismatch {
            group: spec.name.clone(),
            family: region.family,
        });
    }
    let region = if region.infl_labels.is_empty() {
        &influence_region(region)?
    } else {
        region
    };
    let mut rows: Vec<TypeRow> = bound_column(region)
        .into_iter()
        .filter(|r| spec.contains_type(r.color, r.letter))
        .collect();
    // Every family group holds black A and E; list them first.
    rows.sort_by_key(|r| {
        (
            r.color,
            !matches!(r.letter, Letter::A | Letter::E),
            r.letter,
        )
    });
    let before: usize = rows.iter().map(|r| r.bound).sum();
    let parts: Vec<String> = rows.iter().map(|r| r.bound.to_string()).collect();
    let sum = format!("{} = {before}", parts.join(" + "));
    let mut helix = BTreeMap::new();
    let mut bound = before;
    if spec.bound_source == BoundSource::HelixRefinement
        && region.family == Family::TransversalOrder2
    {
        let mut worst = 0;
        for half in [HalfFilter::Upper, HalfFilter::Lower] {
            let excluded: Vec<SubdomainLabel> = helix_exclusions(half)?
                .into_iter()
                .filter(|l| {
                    region.infl_labels.contains(l) && spec.contains_type(l.color(), l.letter)
                })
                .collect();
            worst = worst.max(before - excluded.len());
            helix.insert(format!("{half:?}").to_lowercase(), excluded);
        }
        bound = worst;
    }
    Ok(BoundLedger {
        group_name: spec.name.clone(),
        family: region.family,
        subdomain_counts: type_counts(&region.infl_labels)
            .into_iter()
            .map(|((c, l), n)| {
                (
                    TypeRow {
                        color: c,
                        letter: l,
                        count: 0,
                        pairs: 0,
                        base: 0,
                        bound: 0,
                    }
                    .name(),
                    n,
                )
            })
            .collect(),
        reduction_pairs: reduction_pairs(region),
        occupied: rows.iter().map(TypeRow::name).collect(),
        rows,
        sum,
        bound_before_refinement: before,
        helix_exclusions: helix,
        bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub group: String,
    pub s: usize,
    pub m: usize,
    pub first_bound: usize,
    pub bound: usize,
    pub published: u32,
    pub source: BoundSource,
    pub ledger: Option<BoundLedger>,
}

impl Table1Row {
    pub fn matches(&self) -> bool {
        self.bound as u32 == self.published
    }
}

/// The bound of a group, computed by the method its catalog entry names.
pub fn table1_row(spec: &FullGroupSpec) -> Result<Table1Row, BoundError> {
    let fb = first_bound(spec.s, spec.m);
    let ledger = match spec.bound_source {
        BoundSource::Order4 => Some(refined_bound(spec, region(Family::Order4))?),
        BoundSource::TransversalOrder2 | BoundSource::HelixRefinement => {
            Some(refined_bound(spec, region(Family::TransversalOrder2))?)
        }
        BoundSource::FirstBound | BoundSource::Reflections => None,
    };
    let bound = match (&ledger, spec.bound_source) {
        (Some(l), _) => l.bound.min(fb),
        (None, BoundSource::Reflections) => 8,
        (None, _) => fb,
    };
    Ok(Table1Row {
        group: spec.name.clone(),
        s: spec.s,
        m: spec.m,
        first_bound: fb,
        bound,
        published: spec.published_bound,
        source: spec.bound_source,
        ledger,
    })
}

/// The bound every sampled stereohedron of the group must respect.
pub fn group_bound(spec: &FullGroupSpec) -> Result<usize, BoundError> {
    Ok(table1_row(spec)?.bound)
}

#[derive(Clone, Debug, Serialize)]
pub struct VorExtReport {
    pub family: Family,
    pub samples: usize,
    pub excluded: usize,
    pub wedge_certificates: usize,
    pub cells_checked: usize,
    pub groups: Vec<String>,
}

/// `S` misses the closed `⟨ρ⟩`-Voronoi wedge of `p` up to measure zero, so
/// no Dirichlet cell of `p` in a group containing `ρ` enters `S`.
fn wedge_excludes(s: &ConvexPolyhedron, p: &Point3, rho: &Isometry) -> bool {
    let k = rho.order(6).expect("finite rotation");
    let mut b = Builder::from_polyhedron(s, ());
    let mut q = p.clone();
    for _ in 1..k {
        q = rho.apply(&q);
        let h = Halfspace::bisector(p, &q).expect("distinct points");
        if b.clip(h, ()) == Clip::Empty {
            return true;
        }
    }
    false
}

/// Mechanical check of a transcribed extended Voronoi region: each excluded
/// subdomain is cut off by a wedge certificate of some cutting rotation, and
/// the Dirichlet cells of every group in the family stay inside the region.
pub fn vorext_verify(
    region: &RegionFamily,
    samples: usize,
    seed: u64,
) -> Result<VorExtReport, BoundError> {
    let points: Vec<Point3> = BasePointSampler::new(seed, DEFAULT_DENOMINATOR, HalfFilter::All)
        .take(samples)
        .collect();
    let excluded = region.excluded();
    let excluded_polys: Vec<ConvexPolyhedron> = excluded.iter().map(subdomain_geometry).collect();
    let mut wedge_certificates = 0;
    for p in &points {
        for (label, poly) in excluded.iter().zip(&excluded_polys) {
            if !region
                .cutting_rotations
                .iter()
                .any(|r| wedge_excludes(poly, p, r))
            {
                return Err(BoundError::CertificateFailure {
                    subdomain: label.to_string(),
                    sample: p.to_string(),
                    reason: "no cutting rotation separates it".into(),
                });
            }
            wedge_certificates += 1;
        }
    }
    let mut groups = Vec::new();
    for spec in all_groups().iter().filter(|g| !g.has_reflections) {
        if in_family(spec, region.family)? {
            groups.push(spec);
        }
    }
    let parts = region.vorext_polytopes();
    let jobs: Vec<(&FullGroupSpec, &Point3)> = groups
        .iter()
        .flat_map(|g| points.iter().map(move |p| (*g, p)))
        .collect();
    let outcomes: Vec<Result<(), BoundError>> = jobs
        .par_iter()
        .map(|(g, p)| {
            let cell = match dirichlet_cell(g, p, Strategy::SafeRadius) {
                Ok(r) => r.cell,
                // Sample points with symmetry are not generic; skip them.
                Err(CellError::NontrivialStabilizer(_)) => return Ok(()),
                Err(e) => return Err(e.into()),
            };
            if covered_by_union(&cell, &parts) {
                Ok(())
            } else {
                Err(BoundError::CertificateFailure {
                    subdomain: "VorExt".into(),
                    sample: format!("{} in {}", p, g.name),
                    reason: "the cell escapes the region".into(),
                })
            }
        })
        .collect();
    for o in outcomes {
        o?;
    }
    Ok(VorExtReport {
        family: region.family,
        samples,
        excluded: excluded.len(),
        wedge_certificates,
        cells_checked: jobs.len(),
        groups: groups.iter().map(|g| g.name.clone()).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Table3Row {
    pub s: usize,
    pub m: usize,
    pub bound: usize,
    pub groups: Vec<String>,
}

pub fn table3() -> Vec<Table3Row> {
    let mut out = Vec::new();
    for s in [1, 2, 4, 8] {
        for m in [0, 1] {
            out.push(Table3Row {
                s,
                m,
                bound: first_bound(s, m),
                groups: all_groups()
                    .iter()
                    .filter(|g| g.s == s && g.m == m && !g.has_reflections)
                    .map(|g| g.name.clone())
                    .collect(),
            });
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Tables {
    pub table1: Vec<Table1Row>,
    pub table3: Vec<Table3Row>,
    pub regions: Vec<RegionSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionSummary {
    pub family: Family,
    pub vorext_size: usize,
    pub infl_size: usize,
    pub rows: Vec<TypeRow>,
    pub reduction_pairs: Vec<(SubdomainLabel, SubdomainLabel)>,
}

pub fn emit_tables() -> Result<Tables, BoundError> {
    let table1 = all_groups()
        .iter()
        .filter(|g| !g.has_reflections)
        .map(table1_row)
        .collect::<Result<_, _>>()?;
    let regions = [Family::Order4, Family::TransversalOrder2]
        .into_iter()
        .map(|f| {
            let r = region(f);
            RegionSummary {
                family: f,
                vorext_size: r.vorext_labels.len(),
                infl_size: r.infl_labels.len(),
                rows: bound_column(r),
                reduction_pairs: reduction_pairs(r),
            }
        })
        .collect();
    Ok(Tables {
        table1,
        table3: table3(),
        regions,
    })
}

impl Tables {
    pub fn mismatches(&self) -> Vec<&Table1Row> {
        self.table1.iter().filter(|r| !r.matches()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Bounds for full cubic groups without reflections");
        let _ = writeln!(
            s,
            "{:<14} {:>3} {:>3} {:>6} {:>9} {:>9}  {:<20} sum",
            "group", "s", "m", "first", "computed", "published", "source"
        );
        for r in &self.table1 {
            let sum = r.ledger.as_ref().map(|l| l.sum.clone()).unwrap_or_default();
            let flag = if r.matches() { "" } else { "  MISMATCH" };
            let _ = writeln!(
                s,
                "{:<14} {:>3} {:>3} {:>6} {:>9} {:>9}  {:<20} {}{}",
                r.group,
                r.s,
                r.m,
                r.first_bound,
                r.bound,
                r.published,
                format!("{:?}", r.source),
                sum,
                flag
            );
        }
        let _ = writeln!(s, "\n(7 + 4m)s + 3 over the (s, m) grid");
        for r in &self.table3 {
            let _ = writeln!(
                s,
                "s={} m={} bound={:>3}  {}",
                r.s,
                r.m,
                r.bound,
                r.groups.join(", ")
            );
        }
        for reg in &self.regions {
            let _ = writeln!(
                s,
                "\n{:?} region: |VorExt| = {}, |Infl| = {}",
                reg.family, reg.vorext_size, reg.infl_size
            );
            let _ = writeln!(
                s,
                "{:<8} {:>5} {:>5} {:>5} {:>5}",
                "type", "count", "pairs", "base", "bound"
            );
            for r in &reg.rows {
                let _ = writeln!(
                    s,
                    "{:<8} {:>5} {:>5} {:>5} {:>5}",
                    r.name(),
                    r.count,
                    r.pairs,
                    r.base,
                    r.bound
                );
            }
            let pairs: Vec<String> = reg
                .reduction_pairs
                .iter()
                .map(|(a, b)| format!("({a},{b})"))
                .collect();
            let _ = writeln!(s, "pairs ({}): {}", pairs.len(), pairs.join(" "));
        }
        s
    }
}
