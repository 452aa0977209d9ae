//! The 27 full cubic groups.
//!
//! Each group is determined by the set of fundamental subdomains holding the
//! orbit of a point of `T^A` inside `T` (black letters) and inside the white
//! neighbours `T_i` (white letters). Generators are the three-fold rotations
//! of the odd subgroup plus one normalizer element per occupied letter; the
//! classification data is recomputed from those generators by
//! [`verify_group_spec`].

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::group::{
    bcc_basis, fcc_basis, primitive_basis, GroupError, GroupPresentation, Lattice,
    DEFAULT_WORD_BOUND,
};
use crate::isometry::Isometry;
use crate::lattice::{
    base_centroid, base_subdomain, classify_subdomain, in_normalizer, sigma, stabilizer_element,
    Color, LatticeError, Letter, TetraKind,
};
use crate::rational::{int, Point3};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("{group}: {check}")]
    SpecMismatch { group: String, check: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LatticeKind {
    /// Face-centred: integer vectors with even coordinate sum.
    F,
    /// Primitive: all integer vectors.
    P,
    /// Body-centred: the lattice `I` itself.
    I,
}

impl LatticeKind {
    pub fn basis(self) -> [Point3; 3] {
        match self {
            LatticeKind::F => fcc_basis(),
            LatticeKind::P => primitive_basis(),
            LatticeKind::I => bcc_basis(),
        }
    }

    /// Volume of a fundamental parallelepiped.
    pub fn covolume(self) -> crate::Rational {
        match self {
            LatticeKind::F => int(2),
            LatticeKind::P => int(1),
            LatticeKind::I => crate::rational::rat(1, 2),
        }
    }
}

/// Where a published bound comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundSource {
    /// `(7 + 4m)s + 3` alone.
    FirstBound,
    /// Influence region of the order-4 rotations.
    Order4,
    /// Influence region of the transversal order-2 rotation.
    TransversalOrder2,
    /// Transversal order-2 region with the helix exclusions.
    HelixRefinement,
    /// The classical eight for groups with mirrors.
    Reflections,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullGroupSpec {
    pub name: String,
    pub short_symbol: String,
    pub aliases: Vec<String>,
    pub presentation: GroupPresentation,
    pub s: usize,
    pub m: usize,
    pub has_reflections: bool,
    pub occupied_letters_base: BTreeSet<Letter>,
    pub occupied_letters_neighbor: BTreeSet<Letter>,
    pub lattice: LatticeKind,
    pub published_bound: u32,
    pub bound_source: BoundSource,
}

impl FullGroupSpec {
    /// Occupied `(colour, letter)` pairs.
    pub fn orbit_types(&self) -> Vec<(Color, Letter)> {
        self.occupied_letters_base
            .iter()
            .map(|l| (Color::Black, *l))
            .chain(
                self.occupied_letters_neighbor
                    .iter()
                    .map(|l| (Color::White, *l)),
            )
            .collect()
    }

    pub fn contains_type(&self, color: Color, letter: Letter) -> bool {
        match color {
            Color::Black => self.occupied_letters_base.contains(&letter),
            Color::White => self.occupied_letters_neighbor.contains(&letter),
        }
    }
}

struct Entry {
    name: &'static str,
    short: &'static str,
    aliases: &'static [&'static str],
    black: &'static str,
    white: &'static str,
    reflections: bool,
    bound: u32,
    source: BoundSource,
}

use BoundSource::*;

macro_rules! entry {
    ($name:literal, $short:literal, [$($alias:literal),*], $black:literal, $white:literal, $refl:literal, $bound:literal, $src:ident) => {
        Entry {
            name: $name,
            short: $short,
            aliases: &[$($alias),*],
            black: $black,
            white: $white,
            reflections: $refl,
            bound: $bound,
            source: $src,
        }
    };
}

// Full symbols follow standard notation; the aliases are alternative
// spellings of the same groups in common use.
const ENTRIES: [Entry; 27] = [
    entry!("F23", "F23", [], "A", "", false, 10, FirstBound),
    entry!("F432", "F432", [], "A", "D", false, 14, FirstBound),
    entry!("F2/d-3", "Fd-3", [], "A", "B", false, 14, FirstBound),
    entry!("F-43c", "F-43c", [], "A", "E", false, 14, FirstBound),
    entry!("F-43m", "F-43m", [], "A", "A", true, 8, Reflections),
    entry!("P23", "P23", [], "AE", "", false, 15, TransversalOrder2),
    entry!("F4_132", "F4_132", [], "AB", "", false, 17, FirstBound),
    entry!("F2/m-3", "Fm-3", [], "AD", "", true, 8, Reflections),
    entry!("P432", "P432", [], "AE", "DH", false, 11, Order4),
    entry!("I23", "I23", [], "AE", "CG", false, 21, TransversalOrder2),
    entry!(
        "P2/n-3",
        "Pn-3",
        [],
        "AE",
        "BF",
        false,
        23,
        TransversalOrder2
    ),
    entry!(
        "F4_1/d-32/c",
        "Fd-3c",
        ["F4_1/d-32/n"],
        "AB",
        "EF",
        false,
        25,
        FirstBound
    ),
    entry!("P-43m", "P-43m", [], "AE", "AE", true, 8, Reflections),
    entry!("F4_1/d-32/m", "Fd-3m", [], "AB", "AB", true, 8, Reflections),
    entry!("F4/m-32/m", "Fm-3m", [], "AD", "AD", true, 8, Reflections),
    entry!(
        "F4/m-32/c",
        "Fm-3c",
        ["F4/m-32/n"],
        "AD",
        "EH",
        true,
        8,
        Reflections
    ),
    entry!(
        "P4_232",
        "P4_232",
        [],
        "ABEF",
        "",
        false,
        25,
        HelixRefinement
    ),
    entry!(
        "P-43n",
        "P-43n",
        [],
        "ACEG",
        "",
        false,
        23,
        TransversalOrder2
    ),
    entry!("P2/m-3", "Pm-3", [], "ADEH", "", true, 8, Reflections),
    entry!("I432", "I432", [], "ABEF", "CDGH", false, 22, Order4),
    entry!("P4/n-32/n", "Pn-3n", [], "ACEG", "BDFH", false, 23, Order4),
    entry!(
        "P4_2/n-32/m",
        "Pn-3m",
        ["P4_1/n-32/m"],
        "ABEF",
        "ABEF",
        true,
        8,
        Reflections
    ),
    entry!("I-43m", "I-43m", [], "ACEG", "ACEG", true, 8, Reflections),
    entry!(
        "P4/m-32/m",
        "Pm-3m",
        [],
        "ADEH",
        "ADEH",
        true,
        8,
        Reflections
    ),
    entry!("I2/m-3", "Im-3", [], "ADEH", "BCFG", true, 8, Reflections),
    entry!(
        "P4_2/m-32/n",
        "Pm-3n",
        ["P4/m-32/n"],
        "ABCDEFGH",
        "",
        true,
        8,
        Reflections
    ),
    entry!(
        "I4/m-32/m",
        "Im-3m",
        [],
        "ABCDEFGH",
        "ABCDEFGH",
        true,
        8,
        Reflections
    ),
];

fn letters(s: &str) -> BTreeSet<Letter> {
    s.chars()
        .map(|c| Letter::from_char(c).expect("catalog letter"))
        .collect()
}

/// Rotations of order three generating the odd subgroup.
pub fn odd_subgroup_generators() -> Vec<Isometry> {
    let diag = Isometry::signed_permutation([2, 0, 1], [1, 1, 1], Point3::zero());
    let skew = Isometry::signed_permutation([2, 0, 1], [-1, -1, 1], Point3::zero());
    let shifted = Isometry::about_point(diag.linear.clone(), &Point3::from_ints(1, 0, 0))
        .expect("orthogonal");
    vec![diag, skew, shifted]
}

fn build(entry: &Entry) -> FullGroupSpec {
    let black = letters(entry.black);
    let white = letters(entry.white);
    let mut gens = odd_subgroup_generators();
    for l in &black {
        if *l != Letter::A {
            gens.push(stabilizer_element(*l).clone());
        }
    }
    for l in &white {
        gens.push(sigma().compose(stabilizer_element(*l)));
    }
    let lattice = if !black.contains(&Letter::E) {
        LatticeKind::F
    } else if !white.contains(&Letter::C) {
        LatticeKind::P
    } else {
        LatticeKind::I
    };
    FullGroupSpec {
        name: entry.name.to_string(),
        short_symbol: entry.short.to_string(),
        aliases: entry.aliases.iter().map(|a| a.to_string()).collect(),
        presentation: GroupPresentation::new(entry.name, gens, lattice.basis()),
        s: black.len(),
        m: usize::from(!white.is_empty()),
        has_reflections: entry.reflections,
        occupied_letters_base: black,
        occupied_letters_neighbor: white,
        lattice,
        published_bound: entry.bound,
        bound_source: entry.source,
    }
}

/// All 27 groups in catalogue order.
pub fn all_groups() -> &'static [FullGroupSpec] {
    static ALL: OnceLock<Vec<FullGroupSpec>> = OnceLock::new();
    ALL.get_or_init(|| ENTRIES.iter().map(build).collect())
}

fn normalize_name(name: &str) -> String {
    name.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Looks a group up by full symbol, short symbol or alias; whitespace is
/// ignored, so `"P4_2 32"` works.
pub fn catalog(name: &str) -> Result<&'static FullGroupSpec, CatalogError> {
    let key = normalize_name(name);
    all_groups()
        .iter()
        .find(|g| g.name == key || g.short_symbol == key || g.aliases.contains(&key))
        .ok_or_else(|| CatalogError::UnknownGroup(name.to_string()))
}

/// The fourteen groups without mirrors, whose bounds are computed here.
pub fn groups_without_reflections() -> Vec<&'static FullGroupSpec> {
    all_groups().iter().filter(|g| !g.has_reflections).collect()
}

/// Number of catalogue entries in each `(s, m)` cell.
pub fn sm_grid() -> std::collections::BTreeMap<(usize, usize), usize> {
    let mut out = std::collections::BTreeMap::new();
    for g in all_groups() {
        *out.entry((g.s, g.m)).or_insert(0) += 1;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupVerification {
    pub name: String,
    pub s: usize,
    pub m: usize,
    pub occupied_letters_base: BTreeSet<Letter>,
    pub occupied_letters_neighbor: BTreeSet<Letter>,
    pub point_group_order: usize,
    pub lattice_matches: bool,
    pub has_reflections: bool,
    pub has_inversion: bool,
    pub has_fourfold_rotation: bool,
    pub checks: Vec<(String, bool)>,
}

impl GroupVerification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// Elements of the group whose translation lies within two lattice steps of a coset representative.
fn small_elements(group: &GroupPresentation) -> Result<Vec<Isometry>, GroupError> {
    group.elements_near_identity(2)
}

fn is_mirror(g: &Isometry) -> bool {
    !g.is_proper() && !g.has_identity_linear() && g.compose(g).is_identity() && {
        let tr = &g.linear[0][0] + &g.linear[1][1] + &g.linear[2][2];
        tr.is_one()
    }
}

fn is_fourfold_rotation(g: &Isometry) -> bool {
    g.is_proper() && g.order(4) == Some(4)
}

/// Recomputes `s`, `m`, the occupancy and the symmetry content of `spec`
/// from its generators alone.
pub fn verify_group_spec(spec: &FullGroupSpec) -> Result<GroupVerification, CatalogError> {
    let group = &spec.presentation;
    let table = group.cosets()?;
    let mut checks: Vec<(String, bool)> = Vec::new();

    checks.push((
        "generators normalize the odd subgroup".into(),
        group.generators.iter().all(in_normalizer),
    ));
    group.verify_translation_basis(12)?;
    let expected = Lattice::new(spec.lattice.basis())?;
    let lattice_matches = table.lattice().basis().iter().all(|b| expected.contains(b))
        && expected.basis().iter().all(|b| table.lattice().contains(b));
    checks.push(("translation lattice".into(), lattice_matches));

    // s: the stabilizer of T is the stabilizer of its centroid.
    let c = base_centroid();
    let s = group.stabilizer(&c, DEFAULT_WORD_BOUND)?.len();
    checks.push((format!("s = {s}"), s == spec.s));

    // m: whether some element carries T onto the white neighbour T_4.
    let c4 = sigma().apply(&c);
    let reach = group.orbit_within(&c, &c.dist2(&c4))?;
    let m = usize::from(reach.iter().any(|(q, _)| *q == c4));
    checks.push((format!("m = {m}"), m == spec.m));

    // Occupancy from the orbit of a point interior to T^A.
    let p = base_subdomain().vertex_centroid();
    let orbit = group.orbit_within(&p, &int(4))?;
    let mut base = BTreeSet::new();
    let mut per_neighbor: [BTreeSet<Letter>; 4] = Default::default();
    let mut base_hits = 0;
    let mut neighbor_hits = [0usize; 4];
    for (q, _) in &orbit {
        let label = classify_subdomain(q)?;
        if label.tetra.anchor.is_some() {
            continue;
        }
        match label.tetra.kind {
            TetraKind::Base => {
                base.insert(label.letter);
                base_hits += 1;
            }
            TetraKind::Neighbor(i) => {
                per_neighbor[(i - 1) as usize].insert(label.letter);
                neighbor_hits[(i - 1) as usize] += 1;
            }
            _ => {}
        }
    }
    checks.push((
        "black occupancy".into(),
        base == spec.occupied_letters_base && base_hits == spec.s,
    ));
    let neighbor = per_neighbor[3].clone();
    checks.push((
        "white occupancy, equal in every neighbour".into(),
        per_neighbor
            .iter()
            .all(|n| *n == spec.occupied_letters_neighbor)
            && neighbor_hits.iter().all(|&k| k == spec.s * spec.m),
    ));

    // Orbit density: 6 s (1 + m) points per unit volume.
    let index = table.index();
    let density = int((6 * spec.s * (1 + spec.m)) as i64) * spec.lattice.covolume();
    checks.push((
        format!("point group order {index}"),
        int(index as i64) == density,
    ));

    let elems = small_elements(group)?;
    let has_reflections = elems.iter().any(is_mirror);
    let has_inversion = table.representatives().iter().any(|r| {
        (0..3).all(|i| (0..3).all(|j| r.linear[i][j] == if i == j { -int(1) } else { int(0) }))
    });
    let has_fourfold_rotation = elems.iter().any(is_fourfold_rotation);
    checks.push(("mirrors".into(), has_reflections == spec.has_reflections));
    // Symbol cross-checks: a bar-three means a centre of inversion, a bare
    // four (not a screw, not a roto-inversion) means a proper four-fold axis.
    let name = &spec.name;
    checks.push((
        "inversion matches symbol".into(),
        has_inversion == name.contains("-3"),
    ));
    let bare_four = name
        .char_indices()
        .any(|(i, ch)| ch == '4' && !name[..i].ends_with('-') && !name[i + 1..].starts_with('_'));
    checks.push((
        "four-fold rotation matches symbol".into(),
        has_fourfold_rotation == bare_four,
    ));

    let report = GroupVerification {
        name: spec.name.clone(),
        s,
        m,
        occupied_letters_base: base,
        occupied_letters_neighbor: neighbor,
        point_group_order: index,
        lattice_matches,
        has_reflections,
        has_inversion,
        has_fourfold_rotation,
        checks,
    };
    if let Some((check, _)) = report.checks.iter().find(|(_, ok)| !ok) {
        return Err(CatalogError::SpecMismatch {
            group: spec.name.clone(),
            check: check.clone(),
        });
    }
    Ok(report)
}

/// JSON exchange document for the whole catalogue.
pub fn catalog_json() -> serde_json::Value {
    serde_json::Value::Array(
        all_groups()
            .iter()
            .map(|g| {
                serde_json::json!({
                    "name": g.name,
                    "short_symbol": g.short_symbol,
                    "generators": g.presentation.generators,
                    "translation_basis": g.presentation.translation_basis,
                    "s": g.s,
                    "m": g.m,
                    "has_reflections": g.has_reflections,
                    "occupied_letters_base": g.occupied_letters_base,
                    "occupied_letters_neighbor": g.occupied_letters_neighbor,
                })
            })
            .collect(),
    )
}

/// Rotation elements of the group (proper, non-identity linear part, with an
/// axis) among elements near the identity coset representatives.
pub fn rotations_near(spec: &FullGroupSpec, k: i64) -> Result<Vec<Isometry>, CatalogError> {
    let elems = spec.presentation.elements_near_identity(k)?;
    Ok(elems
        .into_iter()
        .filter(|g| g.is_proper() && !g.has_identity_linear() && g.order(6).is_some())
        .collect())
}
