//! The body-centred cubic lattice `I`, its Delaunay tetrahedra around the base
//! tetrahedron `T`, and the eight fundamental subdomains of each tetrahedron.
//!
//! Letters are intrinsic: the subdomain `U^X` of a tetrahedron `U` is the
//! image of `T^X` under the unique label-preserving isometry `T → U`, where
//! vertex labels are the `F_i` classes.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::group::{invert_matrix, Lattice};
use crate::isometry::{mat_apply, Isometry, Matrix3};
use crate::polytope::{ConvexPolyhedron, Location};
use crate::rational::{det3, int, rat, Point3, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("{0} is not a point of the lattice I")]
    NotInLattice(Point3),
    #[error("{0} is not interior to any fundamental subdomain")]
    OnSubdomainBoundary(Point3),
    #[error("isometry does not map the tessellation to itself")]
    NotInNormalizer,
    #[error("cannot parse subdomain label {0:?}")]
    BadLabel(String),
}

/// The `i ∈ {1,2,3,4}` with `a + b + c − i/2 ∈ 2ℤ`, if `p ∈ I`.
pub fn f_class(p: &Point3) -> Option<u8> {
    let two = int(2);
    let d: Vec<Rational> = p.coords().iter().map(|c| *c * &two).collect();
    if !d.iter().all(|c| c.is_integer()) {
        return None;
    }
    let d: Vec<i64> = d
        .iter()
        .map(|c| c.to_integer().to_i64().expect("small coordinate"))
        .collect();
    let parity = d[0].rem_euclid(2);
    if d.iter().any(|c| c.rem_euclid(2) != parity) {
        return None;
    }
    // 2(a+b+c) − i ≡ 0 mod 4.
    let s = (d[0] + d[1] + d[2]).rem_euclid(4);
    Some(if s == 0 { 4 } else { s as u8 })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LatticePoint {
    pub coords: Point3,
    pub f_class: u8,
}

impl LatticePoint {
    pub fn new(coords: Point3) -> Result<Self, LatticeError> {
        let f = f_class(&coords).ok_or_else(|| LatticeError::NotInLattice(coords.clone()))?;
        Ok(LatticePoint { coords, f_class: f })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl Letter {
    pub const ALL: [Letter; 8] = [
        Letter::A,
        Letter::B,
        Letter::C,
        Letter::D,
        Letter::E,
        Letter::F,
        Letter::G,
        Letter::H,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_char(c: char) -> Option<Letter> {
        Letter::ALL
            .into_iter()
            .find(|l| l.as_char() == c.to_ascii_uppercase())
    }

    pub fn as_char(self) -> char {
        (b'A' + self as u8) as char
    }

    /// The subdomain touching vertex `vertex` and the edge from it to `other`.
    pub fn from_vertex_edge(vertex: u8, other: u8) -> Option<Letter> {
        use Letter::*;
        Some(match (vertex, other) {
            (1, 2) => A,
            (2, 1) => B,
            (2, 3) => C,
            (3, 2) => D,
            (3, 4) => E,
            (4, 3) => F,
            (4, 1) => G,
            (1, 4) => H,
            _ => return None,
        })
    }

    /// Vertex label and the other end of the short edge this letter touches.
    pub fn vertex_edge(self) -> (u8, u8) {
        [
            (1, 2),
            (2, 1),
            (2, 3),
            (3, 2),
            (3, 4),
            (4, 3),
            (4, 1),
            (1, 4),
        ][self.index()]
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TetraKind {
    Base,
    Neighbor(u8),
    NeighborOfNeighbor(u8, u8),
}

impl TetraKind {
    /// The fifteen tetrahedra `T`, `T_i` and `T_ij` (with `T_13 = T_31`, `T_24 = T_42`).
    pub fn complex() -> Vec<TetraKind> {
        let mut out = vec![TetraKind::Base];
        out.extend((1..=4).map(TetraKind::Neighbor));
        for i in 1..=4u8 {
            for j in 1..=4u8 {
                if i != j && !(i.abs_diff(j) == 2 && i > j) {
                    out.push(TetraKind::NeighborOfNeighbor(i, j));
                }
            }
        }
        out
    }

    fn canonical(self) -> TetraKind {
        match self {
            TetraKind::NeighborOfNeighbor(i, j) if i.abs_diff(j) == 2 && i > j => {
                TetraKind::NeighborOfNeighbor(j, i)
            }
            k => k,
        }
    }
}

/// A Delaunay tetrahedron: one of the fifteen, optionally shifted by a vector of `I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TetraAddress {
    pub kind: TetraKind,
    /// Twice the translation, so that half-integer shifts stay integral.
    pub anchor: Option<[i64; 3]>,
}

impl TetraAddress {
    pub const BASE: TetraAddress = TetraAddress {
        kind: TetraKind::Base,
        anchor: None,
    };

    pub fn new(kind: TetraKind) -> Self {
        TetraAddress {
            kind: kind.canonical(),
            anchor: None,
        }
    }

    pub fn neighbor(i: u8) -> Self {
        Self::new(TetraKind::Neighbor(i))
    }

    pub fn neighbor_of_neighbor(i: u8, j: u8) -> Self {
        Self::new(TetraKind::NeighborOfNeighbor(i, j))
    }

    pub fn anchored(kind: TetraKind, twice_shift: [i64; 3]) -> Self {
        TetraAddress {
            kind: kind.canonical(),
            anchor: if twice_shift == [0, 0, 0] {
                None
            } else {
                Some(twice_shift)
            },
        }
    }

    pub fn shift(&self) -> Point3 {
        match self.anchor {
            None => Point3::zero(),
            Some([a, b, c]) => Point3::from_frac(a, b, c, 2),
        }
    }

    pub fn in_complex(&self) -> bool {
        self.anchor.is_none()
    }
}

impl fmt::Display for TetraAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TetraKind::Base => write!(f, "T")?,
            TetraKind::Neighbor(i) => write!(f, "T_{i}")?,
            TetraKind::NeighborOfNeighbor(i, j) => write!(f, "T_{i}{j}")?,
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubdomainLabel {
    pub tetra: TetraAddress,
    pub letter: Letter,
}

impl SubdomainLabel {
    pub fn new(tetra: TetraAddress, letter: Letter) -> Self {
        SubdomainLabel { tetra, letter }
    }

    pub fn base(letter: Letter) -> Self {
        Self::new(TetraAddress::BASE, letter)
    }

    /// The element of the normalizer sending `T^A` onto this subdomain.
    pub fn to_subdomain(&self) -> Isometry {
        tetra_frame(&self.tetra).compose(stabilizer_element(self.letter))
    }

    pub fn color(&self) -> Color {
        tetra_color(&self.tetra)
    }
}

impl fmt::Display for SubdomainLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.tetra, self.letter)?;
        if self.tetra.anchor.is_some() {
            let s = self.tetra.shift();
            write!(f, "+({},{},{})", s.x, s.y, s.z)?;
        }
        Ok(())
    }
}

impl FromStr for SubdomainLabel {
    type Err = LatticeError;

    /// Parses `T^A`, `T_0^A`, `T_3^G`, `T_13^B` and `T_13^B+(0,0,1)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::BadLabel(s.to_string());
        let (main, shift) = match s.split_once('+') {
            Some((m, sh)) => (m, Some(sh)),
            None => (s, None),
        };
        let (tetra, letter) = main.trim().split_once('^').ok_or_else(bad)?;
        let letter = {
            let mut cs = letter.chars();
            let c = cs.next().ok_or_else(bad)?;
            if cs.next().is_some() {
                return Err(bad());
            }
            Letter::from_char(c).ok_or_else(bad)?
        };
        let digits = match tetra.strip_prefix('T').ok_or_else(bad)? {
            "" | "_0" => "",
            rest => rest.strip_prefix('_').ok_or_else(bad)?,
        };
        let ds: Vec<u8> = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .filter(|d| (1..=4).contains(d))
            })
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        let kind = match ds.as_slice() {
            [] => TetraKind::Base,
            [i] => TetraKind::Neighbor(*i),
            [i, j] if i != j => TetraKind::NeighborOfNeighbor(*i, *j),
            _ => return Err(bad()),
        };
        let anchor = match shift {
            None => [0, 0, 0],
            Some(sh) => {
                let p: Point3 = sh.parse().map_err(|_| bad())?;
                let two = int(2);
                let d = p.coords().map(|c| c * &two);
                if !d.iter().all(|c| c.is_integer()) {
                    return Err(bad());
                }
                d.map(|c| c.to_integer().to_i64().expect("small shift"))
            }
        };
        Ok(SubdomainLabel::new(
            TetraAddress::anchored(kind, anchor),
            letter,
        ))
    }
}

impl Serialize for SubdomainLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SubdomainLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A tetrahedron together with its vertices in label order `v_1..v_4`.
#[derive(Clone, Debug)]
pub struct LabeledTetra {
    pub address: TetraAddress,
    pub vertices: [Point3; 4],
    pub polytope: ConvexPolyhedron,
}

fn reflect_in_plane(x: &Point3, a: &Point3, b: &Point3, c: &Point3) -> Point3 {
    let n = (b - a).cross(&(c - a));
    let k = int(2) * (x - a).dot(&n) / n.norm2();
    x - &n.scale(&k)
}

/// Replaces the vertex labelled `i` by its mirror image in the opposite face.
fn flip(vs: &[Point3; 4], i: u8) -> [Point3; 4] {
    let i = (i - 1) as usize;
    let others: Vec<&Point3> = (0..4).filter(|&k| k != i).map(|k| &vs[k]).collect();
    let mut out = vs.clone();
    out[i] = reflect_in_plane(&vs[i], others[0], others[1], others[2]);
    out
}

pub fn base_vertices() -> [Point3; 4] {
    [
        Point3::from_frac(1, -1, 1, 2),
        Point3::from_ints(1, 0, 0),
        Point3::from_frac(1, 1, 1, 2),
        Point3::from_ints(0, 0, 0),
    ]
}

/// Centroid `(1/2, 0, 1/4)` of `T`, which lies on its vertical axis.
pub fn base_centroid() -> Point3 {
    Point3::new(rat(1, 2), int(0), rat(1, 4))
}

/// `T^A`: the part of `T` between the mirror through `v_1 v_3` and its
/// bisector through the midpoint of `v_1 v_2`.
pub fn base_subdomain_vertices() -> [Point3; 4] {
    [
        Point3::from_frac(2, 0, 2, 4),
        Point3::from_frac(2, 0, 0, 4),
        Point3::from_frac(2, -2, 2, 4),
        Point3::from_frac(3, -1, 1, 4),
    ]
}

struct Complex {
    vertices: HashMap<TetraKind, [Point3; 4]>,
    frames: HashMap<TetraKind, Isometry>,
    by_vertex_set: HashMap<[Point3; 4], TetraKind>,
    kinds: Vec<TetraKind>,
    letters: [Isometry; 8],
    sigma: Isometry,
    base_sub: ConvexPolyhedron,
    base_orientation: Rational,
    signed_perms: Vec<Matrix3>,
}

fn sorted(vs: &[Point3; 4]) -> [Point3; 4] {
    let mut s = vs.clone();
    s.sort();
    s
}

fn orientation(vs: &[Point3; 4]) -> Rational {
    det3(&(&vs[1] - &vs[0]), &(&vs[2] - &vs[0]), &(&vs[3] - &vs[0]))
}

/// The affine map sending `src[i]` to `dst[i]`.
pub(crate) fn affine_from_vertices(src: &[Point3; 4], dst: &[Point3; 4]) -> Isometry {
    let cols = |v: &[Point3; 4]| -> Matrix3 {
        std::array::from_fn(|i| std::array::from_fn(|j| (&v[j + 1] - &v[0]).coords()[i].clone()))
    };
    let vinv = invert_matrix(&cols(src)).expect("nondegenerate tetrahedron");
    let w = cols(dst);
    let m: Matrix3 = std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(Rational::zero(), |s, k| s + &w[i][k] * &vinv[k][j]))
    });
    let t = &dst[0] - &mat_apply(&m, &src[0]);
    Isometry::new(m, t).expect("tetrahedra of the tessellation are congruent")
}

fn complex() -> &'static Complex {
    static C: OnceLock<Complex> = OnceLock::new();
    C.get_or_init(|| {
        let base = base_vertices();
        let kinds = TetraKind::complex();
        let mut vertices = HashMap::new();
        for &k in &kinds {
            let vs = match k {
                TetraKind::Base => base.clone(),
                TetraKind::Neighbor(i) => flip(&base, i),
                TetraKind::NeighborOfNeighbor(i, j) => flip(&flip(&base, i), j),
            };
            vertices.insert(k, vs);
        }
        let frames = kinds
            .iter()
            .map(|k| (*k, affine_from_vertices(&base, &vertices[k])))
            .collect();
        let by_vertex_set = kinds.iter().map(|k| (sorted(&vertices[k]), *k)).collect();
        let c = base_centroid();
        let rel = |perm: [usize; 3], signs: [i64; 3]| {
            let m = Isometry::signed_permutation(perm, signs, Point3::zero()).linear;
            Isometry::about_point(m, &c).expect("orthogonal")
        };
        // Images of T^A, turning counter-clockwise about the vertical axis.
        let letters = [
            Isometry::identity(),
            rel([1, 0, 2], [-1, -1, -1]),
            rel([1, 0, 2], [-1, 1, -1]),
            rel([0, 1, 2], [1, -1, 1]),
            rel([0, 1, 2], [-1, -1, 1]),
            rel([1, 0, 2], [1, 1, -1]),
            rel([1, 0, 2], [1, -1, -1]),
            rel([0, 1, 2], [-1, 1, 1]),
        ];
        // Mirror in the plane x + z = 1 through v_1 v_2 v_3.
        let sigma =
            Isometry::signed_permutation([2, 1, 0], [-1, 1, -1], Point3::from_ints(1, 0, 1));
        let base_sub =
            ConvexPolyhedron::simplex(&base_subdomain_vertices()).expect("T^A is a tetrahedron");
        let mut signed_perms = Vec::with_capacity(48);
        for perm in [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ] {
            for s in 0..8 {
                let signs = [0, 1, 2].map(|k| if s >> k & 1 == 1 { -1 } else { 1 });
                signed_perms.push(Isometry::signed_permutation(perm, signs, Point3::zero()).linear);
            }
        }
        Complex {
            base_orientation: orientation(&base),
            vertices,
            frames,
            by_vertex_set,
            kinds,
            letters,
            sigma,
            base_sub,
            signed_perms,
        }
    })
}

/// `T` with vertices `v_1..v_4`, `v_i ∈ F_i`.
pub fn base_tetrahedron() -> LabeledTetra {
    tetra_geometry(&TetraAddress::BASE)
}

pub fn tetra_vertices(addr: &TetraAddress) -> [Point3; 4] {
    let c = complex();
    let vs = &c.vertices[&addr.kind];
    match addr.anchor {
        None => vs.clone(),
        Some(_) => {
            let t = addr.shift();
            let mut out: [Option<Point3>; 4] = Default::default();
            for v in vs {
                let w = v + &t;
                let f = f_class(&w).expect("lattice vertex") as usize;
                out[f - 1] = Some(w);
            }
            out.map(|v| v.expect("each class once"))
        }
    }
}

pub fn tetra_geometry(addr: &TetraAddress) -> LabeledTetra {
    let vertices = tetra_vertices(addr);
    LabeledTetra {
        address: *addr,
        polytope: ConvexPolyhedron::simplex(&vertices)
            .expect("Delaunay tetrahedra are nondegenerate"),
        vertices,
    }
}

pub fn tetra_color(addr: &TetraAddress) -> Color {
    let o = orientation(&tetra_vertices(addr));
    if (o.is_positive()) == complex().base_orientation.is_positive() {
        Color::Black
    } else {
        Color::White
    }
}

/// The label-preserving isometry `T → addr`.
pub fn tetra_frame(addr: &TetraAddress) -> Isometry {
    match addr.anchor {
        None => complex().frames[&addr.kind].clone(),
        Some(_) => affine_from_vertices(&base_vertices(), &tetra_vertices(addr)),
    }
}

/// The symmetry of `T` sending `T^A` to `T^X`.
pub fn stabilizer_element(letter: Letter) -> &'static Isometry {
    &complex().letters[letter.index()]
}

/// The mirror through the face `v_1 v_2 v_3`; it maps `T` onto `T_4` keeping labels.
pub fn sigma() -> &'static Isometry {
    &complex().sigma
}

pub fn base_subdomain() -> &'static ConvexPolyhedron {
    &complex().base_sub
}

pub fn subdomain_geometry(label: &SubdomainLabel) -> ConvexPolyhedron {
    label.to_subdomain().transform_polytope(base_subdomain())
}

/// The 120 subdomains of the fifteen tetrahedra.
pub fn complex_subdomains() -> Vec<SubdomainLabel> {
    complex()
        .kinds
        .iter()
        .flat_map(|k| Letter::ALL.map(|l| SubdomainLabel::new(TetraAddress::new(*k), l)))
        .collect()
}

/// Whether `g` maps `I` onto itself, i.e. lies in the normalizer of the odd subgroup.
pub fn in_normalizer(g: &Isometry) -> bool {
    complex().signed_perms.contains(&g.linear) && f_class(&g.translation).is_some()
}

/// Address of the Delaunay tetrahedron with the given vertex set.
pub fn address_of_vertices(vs: &[Point3; 4]) -> Option<TetraAddress> {
    let c = complex();
    let key = sorted(vs);
    if let Some(k) = c.by_vertex_set.get(&key) {
        return Some(TetraAddress::new(*k));
    }
    for k in &c.kinds {
        let ks = sorted(&c.vertices[k]);
        let t = &key[0] - &ks[0];
        if (0..4).all(|i| key[i] == &ks[i] + &t) {
            let twice = t
                .coords()
                .map(|x| (x * int(2)).to_integer().to_i64().expect("small shift"));
            return Some(TetraAddress::anchored(*k, twice));
        }
    }
    None
}

/// `π(i)`: the label of the image of `v_i`.
pub fn label_permutation(g: &Isometry) -> Option<[u8; 4]> {
    let vs = base_vertices();
    let mut out = [0u8; 4];
    for i in 0..4 {
        out[i] = f_class(&g.apply(&vs[i]))?;
    }
    Some(out)
}

/// The subdomain `g(T^A)` for `g` in the normalizer.
pub fn label_of_element(g: &Isometry) -> Result<SubdomainLabel, LatticeError> {
    let pi = label_permutation(g).ok_or(LatticeError::NotInNormalizer)?;
    let vs = base_vertices().map(|v| g.apply(&v));
    let addr = address_of_vertices(&vs).ok_or(LatticeError::NotInNormalizer)?;
    let letter = Letter::from_vertex_edge(pi[0], pi[1]).ok_or(LatticeError::NotInNormalizer)?;
    Ok(SubdomainLabel::new(addr, letter))
}

fn half_steps(lo: &Rational, hi: &Rational) -> Vec<i64> {
    let two = int(2);
    let a = (lo * &two).ceil().to_integer().to_i64().expect("small");
    let b = (hi * &two).floor().to_integer().to_i64().expect("small");
    (a..=b).collect()
}

/// The normalizer element `g` with `p ∈ int g(T^A)`.
pub fn locate_subdomain(p: &Point3) -> Result<Isometry, LatticeError> {
    let c = complex();
    let h = rat(1, 2);
    let t = rat(3, 4);
    for m in &c.signed_perms {
        // m is orthogonal, so its transpose is its inverse.
        let mt: Matrix3 = std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone()));
        let y = mat_apply(&mt, p);
        let xs = half_steps(&(&y.x - &t), &(&y.x - &h));
        let ys = half_steps(&y.y, &(&y.y + &h));
        let zs = half_steps(&(&y.z - &h), &y.z);
        for &a in &xs {
            for &b in &ys {
                for &cc in &zs {
                    if a.rem_euclid(2) != b.rem_euclid(2) || b.rem_euclid(2) != cc.rem_euclid(2) {
                        continue;
                    }
                    let u = Point3::from_frac(a, b, cc, 2);
                    let z = &y - &u;
                    if crate::polytope::locate_point(&c.base_sub, &z) == Location::Interior {
                        return Ok(Isometry {
                            translation: mat_apply(m, &u),
                            linear: m.clone(),
                        });
                    }
                }
            }
        }
    }
    Err(LatticeError::OnSubdomainBoundary(p.clone()))
}

pub fn classify_subdomain(p: &Point3) -> Result<SubdomainLabel, LatticeError> {
    label_of_element(&locate_subdomain(p)?)
}

/// Every point of `I` in the box `[lo, hi]³` (given in half units).
pub fn lattice_points_in_box(lo: i64, hi: i64) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for a in lo..=hi {
        for b in lo..=hi {
            for c in lo..=hi {
                if a.rem_euclid(2) == b.rem_euclid(2) && b.rem_euclid(2) == c.rem_euclid(2) {
                    out.push(LatticePoint::new(Point3::from_frac(a, b, c, 2)).expect("in I"));
                }
            }
        }
    }
    out
}

/// The translation lattice `F = F_4 − F_4`.
pub fn f_lattice() -> Lattice {
    Lattice::new(crate::group::fcc_basis()).expect("independent")
}
