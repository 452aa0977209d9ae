//! Halfspaces and bounded convex polyhedra over exact rationals.
//!
//! Polytopes are built by incremental clipping. Vertices are kept in
//! homogeneous integer coordinates together with the set of planes they lie
//! on; edges are explicit. A clip never needs a tolerance: every sign is the
//! sign of an exact integer.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{det3, fmt_rational, lcm_denominators, Point3, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("halfspace intersection is unbounded")]
    UnboundedInput,
    #[error("halfspace intersection has empty interior")]
    EmptyOrDegenerate,
    #[error("points are affinely dependent")]
    DegenerateSimplex,
    #[error("halfspace normal is zero")]
    ZeroNormal,
}

/// The closed set `{u : normal·u ≤ offset}`, stored as coprime integers.
///
/// Only positive rescaling is applied when normalising, so the represented set
/// never changes; two halfspaces are equal exactly when their sets are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    a: [BigInt; 3],
    b: BigInt,
}

impl Halfspace {
    pub fn new(normal: [Rational; 3], offset: Rational) -> Result<Self, GeometryError> {
        if normal.iter().all(|c| c.is_zero()) {
            return Err(GeometryError::ZeroNormal);
        }
        let d = lcm_denominators(normal.iter().chain(std::iter::once(&offset)));
        let scale = |r: &Rational| (r * Rational::from_integer(d.clone())).to_integer();
        let a = [scale(&normal[0]), scale(&normal[1]), scale(&normal[2])];
        let b = scale(&offset);
        Ok(Self::from_integers(a, b))
    }

    pub fn from_coefficients(a: i64, b: i64, c: i64, d: i64) -> Result<Self, GeometryError> {
        if a == 0 && b == 0 && c == 0 {
            return Err(GeometryError::ZeroNormal);
        }
        Ok(Self::from_integers(
            [BigInt::from(a), BigInt::from(b), BigInt::from(c)],
            BigInt::from(d),
        ))
    }

    fn from_integers(a: [BigInt; 3], b: BigInt) -> Self {
        let g = a.iter().fold(b.abs(), |g, c| g.gcd(c));
        if g.is_one() || g.is_zero() {
            return Halfspace { a, b };
        }
        Halfspace {
            a: [&a[0] / &g, &a[1] / &g, &a[2] / &g],
            b: &b / &g,
        }
    }

    /// Points at least as close to `p` as to `q`.
    pub fn bisector(p: &Point3, q: &Point3) -> Result<Self, GeometryError> {
        let n = q - p;
        let offset = (q.norm2() - p.norm2()) / Rational::from_integer(BigInt::from(2));
        Self::new(n.to_array(), offset)
    }

    pub fn normal(&self) -> Point3 {
        Point3::new(
            Rational::from_integer(self.a[0].clone()),
            Rational::from_integer(self.a[1].clone()),
            Rational::from_integer(self.a[2].clone()),
        )
    }

    pub fn offset(&self) -> Rational {
        Rational::from_integer(self.b.clone())
    }

    pub fn integer_normal(&self) -> &[BigInt; 3] {
        &self.a
    }

    pub fn integer_offset(&self) -> &BigInt {
        &self.b
    }

    /// `offset − normal·p` in the normalised scaling; positive inside.
    pub fn slack(&self, p: &Point3) -> Rational {
        self.offset() - self.normal().dot(p)
    }

    pub fn contains(&self, p: &Point3) -> bool {
        !self.slack(p).is_negative()
    }

    /// The same plane with the opposite closed side.
    pub fn flipped(&self) -> Halfspace {
        Halfspace {
            a: [-&self.a[0], -&self.a[1], -&self.a[2]],
            b: -&self.b,
        }
    }

    fn side_h(&self, p: &HPoint) -> BigInt {
        &self.a[0] * &p.c[0] + &self.a[1] * &p.c[1] + &self.a[2] * &p.c[2] - &self.b * &p.c[3]
    }

    fn l1_norm(&self) -> BigInt {
        self.a.iter().fold(self.b.abs(), |s, c| s + c.abs())
    }
}

impl Serialize for Halfspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            normal: [String; 3],
            offset: String,
        }
        let n = self.normal();
        Repr {
            normal: [fmt_rational(&n.x), fmt_rational(&n.y), fmt_rational(&n.z)],
            offset: fmt_rational(&self.offset()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Halfspace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            normal: Point3,
            #[serde(with = "crate::rational::serde_rational")]
            offset: Rational,
        }
        let r = Repr::deserialize(d)?;
        Halfspace::new(r.normal.to_array(), r.offset).map_err(serde::de::Error::custom)
    }
}

/// Homogeneous integer point `(x, y, z, w)` with `w > 0` and content 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct HPoint {
    c: [BigInt; 4],
}

impl HPoint {
    fn from_point(p: &Point3) -> Self {
        let d = lcm_denominators(p.coords());
        let s = |r: &Rational| (r * Rational::from_integer(d.clone())).to_integer();
        HPoint {
            c: [s(&p.x), s(&p.y), s(&p.z), d],
        }
    }

    fn normalized(mut c: [BigInt; 4]) -> Self {
        if c[3].is_negative() {
            for v in c.iter_mut() {
                *v = -&*v;
            }
        }
        let g = c.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        if !g.is_one() && !g.is_zero() {
            for v in c.iter_mut() {
                *v = &*v / &g;
            }
        }
        HPoint { c }
    }

    fn to_point(&self) -> Point3 {
        let f = |v: &BigInt| Rational::new(v.clone(), self.c[3].clone());
        Point3::new(f(&self.c[0]), f(&self.c[1]), f(&self.c[2]))
    }
}

#[derive(Clone, Debug)]
struct Vertex {
    h: HPoint,
    tight: Vec<u32>,
}

#[derive(Clone, Debug)]
struct Plane<T> {
    h: Halfspace,
    tag: T,
    alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Clip {
    Cut,
    Redundant,
    Empty,
}

/// Mutable polytope under construction by successive halfspace cuts.
#[derive(Clone, Debug)]
pub(crate) struct Builder<T> {
    planes: Vec<Plane<T>>,
    verts: Vec<Vertex>,
    edges: Vec<[usize; 2]>,
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl<T: Clone> Builder<T> {
    /// Axis-aligned box `[lo, hi]` with every face tagged `tag`.
    pub(crate) fn cube(lo: &Point3, hi: &Point3, tag: T) -> Self {
        let (l, h) = (lo.coords(), hi.coords());
        let mut planes = Vec::new();
        for axis in 0..3 {
            let mut n = [Rational::zero(), Rational::zero(), Rational::zero()];
            n[axis] = Rational::one();
            planes.push(Halfspace::new(n.clone(), h[axis].clone()).expect("unit normal"));
            n[axis] = -Rational::one();
            planes.push(Halfspace::new(n, -l[axis].clone()).expect("unit normal"));
        }
        let mut verts = Vec::new();
        for bits in 0..8u32 {
            let pick = |axis: usize| {
                if bits >> axis & 1 == 1 {
                    h[axis].clone()
                } else {
                    l[axis].clone()
                }
            };
            let tight = (0..3)
                .map(|axis| (2 * axis + (1 - (bits >> axis & 1) as usize)) as u32)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            verts.push(Vertex {
                h: HPoint::from_point(&Point3::new(pick(0), pick(1), pick(2))),
                tight,
            });
        }
        let mut edges = Vec::new();
        for a in 0..8usize {
            for axis in 0..3 {
                let b = a ^ (1 << axis);
                if a < b {
                    edges.push([a, b]);
                }
            }
        }
        Builder {
            planes: planes
                .into_iter()
                .map(|h| Plane {
                    h,
                    tag: tag.clone(),
                    alive: true,
                })
                .collect(),
            verts,
            edges,
        }
    }

    pub(crate) fn from_polyhedron(poly: &ConvexPolyhedron, tag: T) -> Self {
        let mut tight = vec![Vec::new(); poly.vertices.len()];
        for (f, vs) in poly.facet_adjacency.iter().enumerate() {
            for &v in vs {
                tight[v].push(f as u32);
            }
        }
        Builder {
            planes: poly
                .halfspaces
                .iter()
                .map(|h| Plane {
                    h: h.clone(),
                    tag: tag.clone(),
                    alive: true,
                })
                .collect(),
            verts: poly
                .vertices
                .iter()
                .zip(tight)
                .map(|(p, t)| Vertex {
                    h: HPoint::from_point(p),
                    tight: t,
                })
                .collect(),
            edges: poly.edges.clone(),
        }
    }

    /// Largest squared distance from `p` to a current vertex.
    pub(crate) fn max_dist2(&self, p: &Point3) -> Rational {
        self.verts
            .iter()
            .map(|v| v.h.to_point().dist2(p))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub(crate) fn live_tags(&self) -> impl Iterator<Item = &T> {
        self.planes.iter().filter(|p| p.alive).map(|p| &p.tag)
    }

    pub(crate) fn clip(&mut self, h: Halfspace, tag: T) -> Clip {
        if self.planes.iter().any(|p| p.alive && p.h == h) {
            return Clip::Redundant;
        }
        let sides: Vec<BigInt> = self.verts.iter().map(|v| h.side_h(&v.h)).collect();
        if !sides.iter().any(|s| s.is_positive()) {
            return Clip::Redundant;
        }
        if !sides.iter().any(|s| s.is_negative()) {
            return Clip::Empty;
        }
        let id = self.planes.len() as u32;
        self.planes.push(Plane {
            h,
            tag,
            alive: true,
        });

        let mut map = vec![usize::MAX; self.verts.len()];
        let mut verts = Vec::with_capacity(self.verts.len());
        let mut on_h = Vec::new();
        for (i, v) in self.verts.iter().enumerate() {
            if sides[i].is_positive() {
                continue;
            }
            map[i] = verts.len();
            let mut v = v.clone();
            if sides[i].is_zero() {
                v.tight.push(id);
                on_h.push(verts.len());
            }
            verts.push(v);
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for &[u, w] in &self.edges {
            let (su, sw) = (&sides[u], &sides[w]);
            if !su.is_positive() && !sw.is_positive() {
                edges.push([map[u], map[w]]);
            } else if su.is_negative() || sw.is_negative() {
                let (n, p) = if su.is_negative() { (u, w) } else { (w, u) };
                let (sn, sp) = (&sides[n], &sides[p]);
                let (hn, hp) = (&self.verts[n].h, &self.verts[p].h);
                let c = std::array::from_fn(|k| sn * &hp.c[k] - sp * &hn.c[k]);
                let mut tight = intersect_sorted(&self.verts[n].tight, &self.verts[p].tight);
                tight.push(id);
                on_h.push(verts.len());
                edges.push([map[n], verts.len()]);
                verts.push(Vertex {
                    h: HPoint::normalized(c),
                    tight,
                });
            }
        }

        // Edges inside the new facet: pairs of its vertices sharing an old facet.
        let mut by_plane: HashMap<u32, Vec<usize>> = HashMap::new();
        for &v in &on_h {
            for &g in &verts[v].tight {
                if g != id {
                    by_plane.entry(g).or_default().push(v);
                }
            }
        }
        let mut known: HashSet<[usize; 2]> =
            edges.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
        let mut planes_on_h: Vec<_> = by_plane.into_iter().collect();
        planes_on_h.sort();
        for (_, vs) in planes_on_h {
            if vs.len() == 2 {
                let e = [vs[0].min(vs[1]), vs[0].max(vs[1])];
                if known.insert(e) {
                    edges.push(e);
                }
            }
        }

        self.verts = verts;
        self.edges = edges;
        self.prune_planes();
        Clip::Cut
    }

    fn prune_planes(&mut self) {
        let mut count = vec![0usize; self.planes.len()];
        for v in &self.verts {
            for &g in &v.tight {
                count[g as usize] += 1;
            }
        }
        let mut dropped = false;
        for (g, plane) in self.planes.iter_mut().enumerate() {
            if plane.alive && count[g] < 3 {
                plane.alive = false;
                dropped = true;
            }
        }
        if dropped {
            let planes = &self.planes;
            for v in &mut self.verts {
                v.tight.retain(|&g| planes[g as usize].alive);
            }
        }
    }

    /// Freezes the polytope; facets keep insertion order and carry their tags.
    pub(crate) fn finish(self) -> (ConvexPolyhedron, Vec<T>) {
        let alive: Vec<usize> = (0..self.planes.len())
            .filter(|&g| self.planes[g].alive)
            .collect();
        let mut slot = vec![usize::MAX; self.planes.len()];
        for (i, &g) in alive.iter().enumerate() {
            slot[g] = i;
        }
        let vertices: Vec<Point3> = self.verts.iter().map(|v| v.h.to_point()).collect();
        let mut facet_sets = vec![Vec::new(); alive.len()];
        for (vi, v) in self.verts.iter().enumerate() {
            for &g in &v.tight {
                facet_sets[slot[g as usize]].push(vi);
            }
        }
        let halfspaces: Vec<Halfspace> = alive.iter().map(|&g| self.planes[g].h.clone()).collect();
        let tags = alive.iter().map(|&g| self.planes[g].tag.clone()).collect();
        let facet_adjacency = facet_sets
            .iter()
            .zip(&halfspaces)
            .map(|(vs, h)| order_facet(vs, &self.edges, &vertices, h))
            .collect();
        (
            ConvexPolyhedron {
                halfspaces,
                vertices,
                facet_adjacency,
                edges: self.edges,
            },
            tags,
        )
    }
}

/// Cyclic order of a facet's vertices, counter-clockwise seen from outside.
fn order_facet(
    vs: &[usize],
    edges: &[[usize; 2]],
    vertices: &[Point3],
    h: &Halfspace,
) -> Vec<usize> {
    let members: HashSet<usize> = vs.iter().copied().collect();
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &[a, b] in edges {
        if members.contains(&a) && members.contains(&b) {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    let start = *vs.iter().min().expect("facet has vertices");
    let mut cycle = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let nbrs = &adj[&cur];
        debug_assert_eq!(
            nbrs.len(),
            2,
            "facet polygon vertex must have two facet edges"
        );
        let next = if nbrs[0] != prev { nbrs[0] } else { nbrs[1] };
        if next == start {
            break;
        }
        cycle.push(next);
        prev = cur;
        cur = next;
        assert!(cycle.len() <= vs.len(), "facet edges do not form a cycle");
    }
    let (a, b, c) = (
        &vertices[cycle[0]],
        &vertices[cycle[1]],
        &vertices[cycle[2]],
    );
    if (b - a).cross(&(c - a)).dot(&h.normal()).is_negative() {
        cycle[1..].reverse();
    }
    cycle
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

/// A bounded, full-dimensional convex polyhedron with both representations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexPolyhedron {
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Point3>,
    facet_adjacency: Vec<Vec<usize>>,
    #[serde(skip)]
    edges: Vec<[usize; 2]>,
}

impl ConvexPolyhedron {
    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    /// Vertex indices of each facet, cyclically ordered and outward oriented.
    pub fn facet_adjacency(&self) -> &[Vec<usize>] {
        &self.facet_adjacency
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn facet_count(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn halfspace_set(&self) -> BTreeSet<Halfspace> {
        self.halfspaces.iter().cloned().collect()
    }

    pub fn facet_centroid(&self, f: usize) -> Point3 {
        Point3::centroid(self.facet_adjacency[f].iter().map(|&v| &self.vertices[v]))
    }

    pub fn vertex_centroid(&self) -> Point3 {
        Point3::centroid(&self.vertices)
    }

    pub fn bbox(&self) -> (Point3, Point3) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for (l, (h, c)) in [&mut lo.x, &mut lo.y, &mut lo.z].into_iter().zip(
                [&mut hi.x, &mut hi.y, &mut hi.z]
                    .into_iter()
                    .zip(v.coords()),
            ) {
                if c < l {
                    *l = c.clone();
                }
                if c > h {
                    *h = c.clone();
                }
            }
        }
        (lo, hi)
    }

    pub fn volume(&self) -> Rational {
        let o = &self.vertices[0];
        let mut six = Rational::zero();
        for f in &self.facet_adjacency {
            let a = &self.vertices[f[0]];
            for w in f[1..].windows(2) {
                six += det3(
                    &(a - o),
                    &(&self.vertices[w[0]] - o),
                    &(&self.vertices[w[1]] - o),
                );
            }
        }
        six / Rational::from_integer(BigInt::from(6))
    }

    /// Tetrahedron with the given vertices.
    pub fn simplex(points: &[Point3; 4]) -> Result<Self, GeometryError> {
        let vol6 = det3(
            &(&points[1] - &points[0]),
            &(&points[2] - &points[0]),
            &(&points[3] - &points[0]),
        );
        if vol6.is_zero() {
            return Err(GeometryError::DegenerateSimplex);
        }
        let mut hs = Vec::with_capacity(4);
        for skip in 0..4 {
            let f: Vec<&Point3> = (0..4).filter(|&i| i != skip).map(|i| &points[i]).collect();
            let n = (f[1] - f[0]).cross(&(f[2] - f[0]));
            let h = Halfspace::new(n.to_array(), n.dot(f[0]))?;
            hs.push(if h.contains(&points[skip]) {
                h
            } else {
                h.flipped()
            });
        }
        halfspace_intersection(&hs)
    }

    /// Convex hull by brute force over vertex triples; meant for small inputs.
    pub fn hull(points: &[Point3]) -> Result<Self, GeometryError> {
        let mut hs = BTreeSet::new();
        let n = points.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let nrm = (&points[j] - &points[i]).cross(&(&points[k] - &points[i]));
                    if nrm.is_zero() {
                        continue;
                    }
                    let mut pos = false;
                    let mut neg = false;
                    for q in points {
                        let s = nrm.dot(&(q - &points[i]));
                        pos |= s.is_positive();
                        neg |= s.is_negative();
                    }
                    if pos && neg {
                        continue;
                    }
                    let h = Halfspace::new(nrm.to_array(), nrm.dot(&points[i]))?;
                    hs.insert(if pos { h.flipped() } else { h });
                }
            }
        }
        if hs.is_empty() {
            return Err(GeometryError::EmptyOrDegenerate);
        }
        halfspace_intersection(&hs.into_iter().collect::<Vec<_>>())
    }

    /// Whether the closed line `x0 + s·dir` meets the closed polytope.
    pub fn meets_line(&self, x0: &Point3, dir: &Point3) -> bool {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for h in &self.halfspaces {
            let n = h.normal();
            let rate = n.dot(dir);
            let slack = h.slack(x0);
            if rate.is_zero() {
                if slack.is_negative() {
                    return false;
                }
                continue;
            }
            let bound = &slack / &rate;
            if rate.is_positive() {
                if hi.as_ref().is_none_or(|v| &bound < v) {
                    hi = Some(bound);
                }
            } else if lo.as_ref().is_none_or(|v| &bound > v) {
                lo = Some(bound);
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) => l <= h,
            _ => true,
        }
    }

    /// Image under a map given on points and on halfspaces.
    pub(crate) fn map_with(
        &self,
        point: impl Fn(&Point3) -> Point3,
        halfspace: impl Fn(&Halfspace) -> Halfspace,
        reverses_orientation: bool,
    ) -> ConvexPolyhedron {
        let mut facet_adjacency = self.facet_adjacency.clone();
        if reverses_orientation {
            for f in &mut facet_adjacency {
                f[1..].reverse();
            }
        }
        ConvexPolyhedron {
            halfspaces: self.halfspaces.iter().map(halfspace).collect(),
            vertices: self.vertices.iter().map(point).collect(),
            facet_adjacency,
            edges: self.edges.clone(),
        }
    }

    /// OFF mesh text; coordinates are a float rendering for viewers only.
    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        s.push_str(&format!(
            "{} {} {}\n",
            self.vertices.len(),
            self.facet_adjacency.len(),
            self.edges.len()
        ));
        for v in &self.vertices {
            let [x, y, z] = v.to_f64();
            s.push_str(&format!("{x} {y} {z}\n"));
        }
        for f in &self.facet_adjacency {
            s.push_str(&f.len().to_string());
            for v in f {
                s.push_str(&format!(" {v}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Irredundant intersection of closed halfspaces.
pub fn halfspace_intersection(halfspaces: &[Halfspace]) -> Result<ConvexPolyhedron, GeometryError> {
    if halfspaces.is_empty() {
        return Err(GeometryError::UnboundedInput);
    }
    // Any vertex solves a 3×3 integer system, so Hadamard's bound on the
    // numerators keeps every genuine vertex strictly inside this box.
    let norm = halfspaces
        .iter()
        .map(|h| h.l1_norm())
        .max()
        .expect("nonempty");
    let bound = Rational::from_integer(&norm * &norm * &norm + BigInt::one());
    let hi = Point3::new(bound.clone(), bound.clone(), bound.clone());
    let mut b = Builder::cube(&-&hi, &hi, false);
    for h in halfspaces {
        if b.clip(h.clone(), true) == Clip::Empty {
            return Err(GeometryError::EmptyOrDegenerate);
        }
    }
    if b.live_tags().any(|from_input| !from_input) {
        return Err(GeometryError::UnboundedInput);
    }
    Ok(b.finish().0)
}

pub fn locate_point(poly: &ConvexPolyhedron, p: &Point3) -> Location {
    let mut on_boundary = false;
    for h in &poly.halfspaces {
        let s = h.slack(p);
        if s.is_negative() {
            return Location::Outside;
        }
        on_boundary |= s.is_zero();
    }
    if on_boundary {
        Location::Boundary
    } else {
        Location::Interior
    }
}

fn boxes_overlap(a: &(Point3, Point3), b: &(Point3, Point3)) -> bool {
    a.0.coords()
        .into_iter()
        .zip(a.1.coords())
        .zip(b.0.coords().into_iter().zip(b.1.coords()))
        .all(|((alo, ahi), (blo, bhi))| alo < bhi && blo < ahi)
}

/// True iff the intersection of `a` and `b` has nonempty interior.
pub fn interiors_overlap(a: &ConvexPolyhedron, b: &ConvexPolyhedron) -> bool {
    if !boxes_overlap(&a.bbox(), &b.bbox()) {
        return false;
    }
    let mut builder = Builder::from_polyhedron(a, ());
    for h in &b.halfspaces {
        if builder.clip(h.clone(), ()) == Clip::Empty {
            return false;
        }
    }
    true
}

/// The intersection of `a` and `b` when it is full-dimensional.
pub fn intersection(a: &ConvexPolyhedron, b: &ConvexPolyhedron) -> Option<ConvexPolyhedron> {
    if !boxes_overlap(&a.bbox(), &b.bbox()) {
        return None;
    }
    let mut builder = Builder::from_polyhedron(a, ());
    for h in &b.halfspaces {
        if builder.clip(h.clone(), ()) == Clip::Empty {
            return None;
        }
    }
    Some(builder.finish().0)
}

/// Whether `poly` lies inside the union of `parts`, which must have pairwise
/// disjoint interiors: exactly when the pieces cut out by the parts add up
/// to the whole volume.
pub fn covered_by_union(poly: &ConvexPolyhedron, parts: &[ConvexPolyhedron]) -> bool {
    let total = parts
        .iter()
        .filter_map(|q| intersection(poly, q))
        .fold(Rational::zero(), |s, piece| s + piece.volume());
    total == poly.volume()
}

/// The point equidistant from four affinely independent points.
pub fn circumcenter(
    p1: &Point3,
    p2: &Point3,
    p3: &Point3,
    p4: &Point3,
) -> Result<Point3, GeometryError> {
    let two = Rational::from_integer(BigInt::from(2));
    let rows = [p2 - p1, p3 - p1, p4 - p1].map(|r| r.scale(&two));
    let rhs = [p2, p3, p4].map(|q| q.norm2() - p1.norm2());
    let d = det3(&rows[0], &rows[1], &rows[2]);
    if d.is_zero() {
        return Err(GeometryError::DegenerateSimplex);
    }
    // Cramer's rule on the transposed system: columns replaced by rhs.
    let col = |m: &[Point3; 3], c: usize, v: &[Rational; 3]| -> [Point3; 3] {
        std::array::from_fn(|i| {
            let mut r = m[i].to_array();
            r[c] = v[i].clone();
            Point3::from_array(r)
        })
    };
    let solve = |c: usize| {
        let m = col(&rows, c, &rhs);
        det3(&m[0], &m[1], &m[2]) / &d
    };
    Ok(Point3::new(solve(0), solve(1), solve(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    pub(crate) fn unit_cube() -> Vec<Halfspace> {
        vec![
            Halfspace::from_coefficients(1, 0, 0, 1).unwrap(),
            Halfspace::from_coefficients(-1, 0, 0, 0).unwrap(),
            Halfspace::from_coefficients(0, 1, 0, 1).unwrap(),
            Halfspace::from_coefficients(0, -1, 0, 0).unwrap(),
            Halfspace::from_coefficients(0, 0, 1, 1).unwrap(),
            Halfspace::from_coefficients(0, 0, -1, 0).unwrap(),
        ]
    }

    #[test]
    fn normalisation_is_canonical() {
        let a = Halfspace::new([rat(1, 2), rat(-1, 3), int(0)], rat(5, 6)).unwrap();
        let b = Halfspace::from_coefficients(3, -2, 0, 5).unwrap();
        assert_eq!(a, b);
        let c = Halfspace::from_coefficients(6, -4, 0, 10).unwrap();
        assert_eq!(b, c);
        assert_ne!(b, b.flipped());
        assert_eq!(
            Halfspace::new([int(0), int(0), int(0)], int(1)),
            Err(GeometryError::ZeroNormal)
        );
    }

    #[test]
    fn cube_and_redundancy() {
        let cube = halfspace_intersection(&unit_cube()).unwrap();
        assert_eq!(cube.vertices().len(), 8);
        assert_eq!(cube.facet_count(), 6);
        assert_eq!(cube.volume(), int(1));
        let mut hs = unit_cube();
        hs.push(Halfspace::from_coefficients(1, 0, 0, 2).unwrap());
        let again = halfspace_intersection(&hs).unwrap();
        assert_eq!(again.facet_count(), 6);
        assert_eq!(again.halfspace_set(), cube.halfspace_set());
    }

    #[test]
    fn unbounded_and_empty_inputs() {
        let mut hs = unit_cube();
        hs.remove(0);
        assert_eq!(
            halfspace_intersection(&hs),
            Err(GeometryError::UnboundedInput)
        );
        let mut hs = unit_cube();
        hs.push(Halfspace::from_coefficients(1, 0, 0, -1).unwrap());
        assert_eq!(
            halfspace_intersection(&hs),
            Err(GeometryError::EmptyOrDegenerate)
        );
        let mut hs = unit_cube();
        hs.push(Halfspace::from_coefficients(1, 0, 0, 0).unwrap());
        assert_eq!(
            halfspace_intersection(&hs),
            Err(GeometryError::EmptyOrDegenerate)
        );
    }

    #[test]
    fn locate_in_cube() {
        let cube = halfspace_intersection(&unit_cube()).unwrap();
        assert_eq!(
            locate_point(&cube, &Point3::from_frac(1, 1, 1, 2)),
            Location::Interior
        );
        assert_eq!(locate_point(&cube, &Point3::zero()), Location::Boundary);
        assert_eq!(
            locate_point(&cube, &Point3::from_ints(2, 0, 0)),
            Location::Outside
        );
    }

    #[test]
    fn cutting_through_vertices_keeps_structure() {
        // x + y + z <= 1 passes through three cube vertices.
        let mut hs = unit_cube();
        hs.push(Halfspace::from_coefficients(1, 1, 1, 1).unwrap());
        let t = halfspace_intersection(&hs).unwrap();
        assert_eq!(t.vertices().len(), 4);
        assert_eq!(t.facet_count(), 4);
        assert_eq!(t.volume(), rat(1, 6));
        for f in t.facet_adjacency() {
            assert_eq!(f.len(), 3);
        }
    }

    #[test]
    fn circumcenter_of_regular_tetrahedron() {
        let c = circumcenter(
            &Point3::from_ints(0, 0, 0),
            &Point3::from_ints(1, 1, 0),
            &Point3::from_ints(1, 0, 1),
            &Point3::from_ints(0, 1, 1),
        )
        .unwrap();
        assert_eq!(c, Point3::from_frac(1, 1, 1, 2));
        let flat = circumcenter(
            &Point3::from_ints(0, 0, 0),
            &Point3::from_ints(1, 0, 0),
            &Point3::from_ints(0, 1, 0),
            &Point3::from_ints(1, 1, 0),
        );
        assert_eq!(flat, Err(GeometryError::DegenerateSimplex));
    }

    #[test]
    fn hull_matches_halfspaces() {
        let cube = halfspace_intersection(&unit_cube()).unwrap();
        let mut pts = cube.vertices().to_vec();
        pts.push(Point3::from_frac(1, 1, 1, 2));
        let h = ConvexPolyhedron::hull(&pts).unwrap();
        assert_eq!(h.halfspace_set(), cube.halfspace_set());
    }

    #[test]
    fn off_export_shape() {
        let cube = halfspace_intersection(&unit_cube()).unwrap();
        let off = cube.to_off();
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("8 6 12"));
        assert_eq!(off.lines().count(), 2 + 8 + 6);
    }
}
