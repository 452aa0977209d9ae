//! Group presentations, coset tables modulo the translation lattice, orbits
//! and stabilizers.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::isometry::{mat_apply, mat_det, Isometry, Matrix3};
use crate::rational::{int, lcm_denominators, Point3, Rational};

/// Lattices whose shortest vector is below this are treated as non-discrete.
pub const MIN_SEPARATION: (i64, i64) = (1, 1000);

/// Default bound on the breadth-first depth of the coset closure.
pub const DEFAULT_WORD_BOUND: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("generated group is not discrete")]
    NonDiscreteGroup,
    #[error("translation vectors are linearly dependent")]
    DependentBasis,
    #[error("coset closure did not finish within word length {0}")]
    ClosureIncomplete(usize),
    #[error("translation {0} is not reached by words of bounded length")]
    TranslationNotGenerated(Point3),
    #[error("radius must be positive")]
    NonPositiveRadius,
}

fn to_i128(b: &BigInt) -> i128 {
    b.to_i128().expect("lattice arithmetic fits in 128 bits")
}

pub(crate) fn invert_matrix(m: &Matrix3) -> Option<Matrix3> {
    let d = mat_det(m);
    if d.is_zero() {
        return None;
    }
    let c = |i: usize, j: usize| &m[i % 3][j % 3];
    Some(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            // Adjugate entry (i, j) is the cofactor of (j, i).
            (c(j + 1, i + 1) * c(j + 2, i + 2) - c(j + 1, i + 2) * c(j + 2, i + 1)) / &d
        })
    }))
}

/// A full-rank lattice of translations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    basis: [Point3; 3],
    /// Rows map a vector to its coordinates in `basis`.
    inv: Matrix3,
}

impl Lattice {
    pub fn new(basis: [Point3; 3]) -> Result<Self, GroupError> {
        let cols: Matrix3 =
            std::array::from_fn(|i| std::array::from_fn(|j| basis[j].coords()[i].clone()));
        let inv = invert_matrix(&cols).ok_or(GroupError::DependentBasis)?;
        Ok(Lattice { basis, inv })
    }

    /// The lattice spanned by arbitrary rational generators (integer row reduction).
    pub fn from_generators(vectors: &[Point3]) -> Result<Self, GroupError> {
        let d = lcm_denominators(vectors.iter().flat_map(|v| v.coords()));
        let dr = Rational::from_integer(d.clone());
        let mut rows: Vec<[i128; 3]> = vectors
            .iter()
            .map(|v| v.coords().map(|c| to_i128(&(c * &dr).to_integer())))
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        let mut basis = Vec::new();
        for col in 0..3 {
            loop {
                let live: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
                if live.len() <= 1 {
                    if let Some(&i) = live.first() {
                        basis.push(rows.swap_remove(i));
                    }
                    break;
                }
                let piv = *live
                    .iter()
                    .min_by_key(|&&i| rows[i][col].abs())
                    .expect("nonempty");
                let prow = rows[piv];
                for &i in &live {
                    if i != piv {
                        let q = Integer::div_floor(&rows[i][col], &prow[col]);
                        for k in 0..3 {
                            rows[i][k] -= q * prow[k];
                        }
                    }
                }
            }
        }
        if basis.len() != 3 {
            return Err(GroupError::DependentBasis);
        }
        let to_point = |r: &[i128; 3]| {
            Point3::new(
                Rational::new(BigInt::from(r[0]), d.clone()),
                Rational::new(BigInt::from(r[1]), d.clone()),
                Rational::new(BigInt::from(r[2]), d.clone()),
            )
        };
        Lattice::new([
            to_point(&basis[0]),
            to_point(&basis[1]),
            to_point(&basis[2]),
        ])
    }

    pub fn basis(&self) -> &[Point3; 3] {
        &self.basis
    }

    pub fn coords(&self, v: &Point3) -> [Rational; 3] {
        mat_apply(&self.inv, v).to_array()
    }

    pub fn contains(&self, v: &Point3) -> bool {
        self.coords(v).iter().all(|c| c.is_integer())
    }

    pub fn combination(&self, c: [i64; 3]) -> Point3 {
        let mut v = Point3::zero();
        for k in 0..3 {
            if c[k] != 0 {
                v = &v + &self.basis[k].scale(&int(c[k]));
            }
        }
        v
    }

    /// Representative of `v` modulo the lattice with coordinates in `[0, 1)`.
    pub fn reduce(&self, v: &Point3) -> Point3 {
        let c = self.coords(v);
        let shift = c.map(|x| x.floor().to_integer());
        let mut out = v.clone();
        for k in 0..3 {
            if !shift[k].is_zero() {
                out = &out - &self.basis[k].scale(&Rational::from_integer(shift[k].clone()));
            }
        }
        out
    }

    /// Shortest nonzero vector among combinations with coefficients in `[-3, 3]`.
    pub fn short_vector_norm2(&self) -> Rational {
        let mut best: Option<Rational> = None;
        for a in -3..=3 {
            for b in -3..=3 {
                for c in -3..=3 {
                    if (a, b, c) == (0, 0, 0) {
                        continue;
                    }
                    let n = self.combination([a, b, c]).norm2();
                    if best.as_ref().is_none_or(|m| &n < m) {
                        best = Some(n);
                    }
                }
            }
        }
        best.expect("at least one combination")
    }

    /// Every lattice vector `l` with `|d + l|² ≤ r2`.
    pub(crate) fn vectors_near(&self, d: &Point3, r2: &Rational) -> Vec<Point3> {
        let den = lcm_denominators(
            d.coords()
                .into_iter()
                .chain(self.basis.iter().flat_map(|b| b.coords())),
        );
        let dr = Rational::from_integer(den.clone());
        let scale = |c: &Rational| to_i128(&(c * &dr).to_integer());
        let di = d.coords().map(scale);
        let bi: [[i128; 3]; 3] = std::array::from_fn(|k| self.basis[k].coords().map(scale));
        let r2i = to_i128(&(r2 * &dr * &dr).floor().to_integer());
        let radius = {
            let f = r2.to_f64().unwrap_or(0.0).sqrt().ceil() as i64 + 1;
            int(f)
        };
        let center = self.coords(&-d);
        let mut ranges = [(0i64, 0i64); 3];
        for k in 0..3 {
            let l1 = self.inv[k]
                .iter()
                .fold(Rational::zero(), |s, x| s + x.abs());
            let bnd = &l1 * &radius;
            let lo = (&center[k] - &bnd).ceil().to_integer();
            let hi = (&center[k] + &bnd).floor().to_integer();
            ranges[k] = (lo.to_i64().expect("small"), hi.to_i64().expect("small"));
        }
        let mut out = Vec::new();
        for a in ranges[0].0..=ranges[0].1 {
            let va: [i128; 3] = std::array::from_fn(|i| di[i] + a as i128 * bi[0][i]);
            for b in ranges[1].0..=ranges[1].1 {
                let vb: [i128; 3] = std::array::from_fn(|i| va[i] + b as i128 * bi[1][i]);
                for c in ranges[2].0..=ranges[2].1 {
                    let v: [i128; 3] = std::array::from_fn(|i| vb[i] + c as i128 * bi[2][i]);
                    if v.iter().map(|x| x * x).sum::<i128>() <= r2i {
                        out.push(self.combination([a, b, c]));
                    }
                }
            }
        }
        out
    }
}

/// One representative per coset of the translation lattice.
#[derive(Clone, Debug)]
pub struct CosetTable {
    lattice: Lattice,
    reps: Vec<Isometry>,
    depth: usize,
}

impl CosetTable {
    pub fn build(
        generators: &[Isometry],
        basis: &[Point3; 3],
        word_bound: usize,
    ) -> Result<Self, GroupError> {
        let mut translations: Vec<Point3> = basis.to_vec();
        let min = Rational::new(
            BigInt::from(MIN_SEPARATION.0),
            BigInt::from(MIN_SEPARATION.1),
        );
        'restart: for _ in 0..32 {
            let lattice = Lattice::from_generators(&translations)?;
            if lattice.short_vector_norm2() < &min * &min {
                return Err(GroupError::NonDiscreteGroup);
            }
            let normal = |g: Isometry| Isometry {
                translation: lattice.reduce(&g.translation),
                linear: g.linear,
            };
            let mut reps = vec![Isometry::identity()];
            let mut by_linear: HashMap<Matrix3, usize> = HashMap::new();
            by_linear.insert(Isometry::identity().linear, 0);
            let mut frontier = vec![0usize];
            let mut depth = 0;
            while !frontier.is_empty() {
                if depth >= word_bound {
                    return Err(GroupError::ClosureIncomplete(word_bound));
                }
                depth += 1;
                let mut next = Vec::new();
                for &r in &frontier {
                    for g in generators {
                        let e = normal(g.compose(&reps[r]));
                        match by_linear.get(&e.linear) {
                            Some(&i) => {
                                let diff = &e.translation - &reps[i].translation;
                                if !lattice.contains(&diff) {
                                    translations.push(diff);
                                    continue 'restart;
                                }
                            }
                            None => {
                                by_linear.insert(e.linear.clone(), reps.len());
                                next.push(reps.len());
                                reps.push(e);
                            }
                        }
                    }
                }
                frontier = next;
            }
            return Ok(CosetTable {
                lattice,
                reps,
                depth,
            });
        }
        Err(GroupError::NonDiscreteGroup)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn representatives(&self) -> &[Isometry] {
        &self.reps
    }

    /// Number of cosets, i.e. the order of the point group.
    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn contains(&self, g: &Isometry) -> bool {
        self.reps.iter().any(|r| {
            r.linear == g.linear && self.lattice.contains(&(&g.translation - &r.translation))
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub name: String,
    pub generators: Vec<Isometry>,
    pub translation_basis: [Point3; 3],
    #[serde(skip)]
    cosets: OnceLock<Result<CosetTable, GroupError>>,
}

impl GroupPresentation {
    pub fn new(
        name: impl Into<String>,
        generators: Vec<Isometry>,
        translation_basis: [Point3; 3],
    ) -> Self {
        GroupPresentation {
            name: name.into(),
            generators,
            translation_basis,
            cosets: OnceLock::new(),
        }
    }

    /// Pure translation group of a lattice.
    pub fn translations(name: impl Into<String>, basis: [Point3; 3]) -> Self {
        let generators = basis
            .iter()
            .map(|b| Isometry::translation_by(b.clone()))
            .collect();
        Self::new(name, generators, basis)
    }

    pub fn cosets(&self) -> Result<&CosetTable, GroupError> {
        self.cosets
            .get_or_init(|| {
                CosetTable::build(
                    &self.generators,
                    &self.translation_basis,
                    DEFAULT_WORD_BOUND,
                )
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn contains(&self, g: &Isometry) -> Result<bool, GroupError> {
        Ok(self.cosets()?.contains(g))
    }

    /// Checks that each basis vector is a word in the generators of length at
    /// most `word_bound`, searching words whose translations stay short.
    pub fn verify_translation_basis(&self, word_bound: usize) -> Result<(), GroupError> {
        let bound2 = int(16);
        let mut gens = self.generators.clone();
        gens.extend(self.generators.iter().map(Isometry::inverse));
        let mut seen: HashSet<Isometry> = HashSet::new();
        seen.insert(Isometry::identity());
        let mut missing: Vec<Point3> = self.translation_basis.to_vec();
        let mut queue = VecDeque::from([(Isometry::identity(), 0usize)]);
        while let Some((g, len)) = queue.pop_front() {
            if g.has_identity_linear() {
                missing.retain(|t| t != &g.translation);
                if missing.is_empty() {
                    return Ok(());
                }
            }
            if len == word_bound {
                continue;
            }
            for h in &gens {
                let e = h.compose(&g);
                if e.translation.norm2() <= bound2 && seen.insert(e.clone()) {
                    queue.push_back((e, len + 1));
                }
            }
        }
        Err(GroupError::TranslationNotGenerated(missing.swap_remove(0)))
    }

    pub fn orbit_in_ball(
        &self,
        p: &Point3,
        radius: &Rational,
    ) -> Result<Vec<(Point3, Isometry)>, GroupError> {
        if !radius.is_positive() {
            return Err(GroupError::NonPositiveRadius);
        }
        self.orbit_within(p, &(radius * radius))
    }

    /// Orbit points with `|q − p|² ≤ r2`, sorted by distance then coordinates.
    pub fn orbit_within(
        &self,
        p: &Point3,
        r2: &Rational,
    ) -> Result<Vec<(Point3, Isometry)>, GroupError> {
        let table = self.cosets()?;
        let mut found: HashMap<Point3, Isometry> = HashMap::new();
        for rep in &table.reps {
            let q0 = rep.apply(p);
            let d = &q0 - p;
            for l in table.lattice.vectors_near(&d, r2) {
                let q = &q0 + &l;
                found.entry(q).or_insert_with(|| Isometry {
                    linear: rep.linear.clone(),
                    translation: &rep.translation + &l,
                });
            }
        }
        let mut out: Vec<(Rational, Point3, Isometry)> =
            found.into_iter().map(|(q, g)| (q.dist2(p), q, g)).collect();
        out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        Ok(out.into_iter().map(|(_, q, g)| (q, g)).collect())
    }

    /// All elements fixing `p`.
    pub fn stabilizer(&self, p: &Point3, word_bound: usize) -> Result<Vec<Isometry>, GroupError> {
        let table = self.cosets()?;
        if table.depth > word_bound {
            return Err(GroupError::ClosureIncomplete(word_bound));
        }
        let mut out = Vec::new();
        for rep in &table.reps {
            let l = p - &rep.apply(p);
            if table.lattice.contains(&l) {
                out.push(Isometry {
                    linear: rep.linear.clone(),
                    translation: &rep.translation + &l,
                });
            }
        }
        Ok(out)
    }

    /// Elements `rep + l` with lattice coefficients of `l` in `[-k, k]`.
    pub fn elements_near_identity(&self, k: i64) -> Result<Vec<Isometry>, GroupError> {
        let table = self.cosets()?;
        let mut out = Vec::new();
        for rep in &table.reps {
            for a in -k..=k {
                for b in -k..=k {
                    for c in -k..=k {
                        out.push(Isometry {
                            linear: rep.linear.clone(),
                            translation: &rep.translation + &table.lattice.combination([a, b, c]),
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn orbit_in_ball(
    group: &GroupPresentation,
    p: &Point3,
    radius: &Rational,
) -> Result<Vec<(Point3, Isometry)>, GroupError> {
    group.orbit_in_ball(p, radius)
}

pub fn stabilizer(
    group: &GroupPresentation,
    p: &Point3,
    word_bound: usize,
) -> Result<Vec<Isometry>, GroupError> {
    group.stabilizer(p, word_bound)
}

/// Whether the finite set of isometries is closed under composition.
pub fn is_closed(elements: &[Isometry]) -> bool {
    let set: HashSet<&Isometry> = elements.iter().collect();
    elements
        .iter()
        .all(|a| elements.iter().all(|b| set.contains(&a.compose(b))))
}

/// The finite group generated by `gens` (linear parts only are expected).
pub fn closure(gens: &[Isometry], limit: usize) -> Option<Vec<Isometry>> {
    let mut elems = vec![Isometry::identity()];
    let mut seen: HashSet<Isometry> = elems.iter().cloned().collect();
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let e = g.compose(&elems[i]);
            if seen.insert(e.clone()) {
                elems.push(e);
                if elems.len() > limit {
                    return None;
                }
            }
        }
        i += 1;
    }
    Some(elems)
}

pub(crate) fn fcc_basis() -> [Point3; 3] {
    [
        Point3::from_ints(0, 1, 1),
        Point3::from_ints(1, 0, 1),
        Point3::from_ints(1, 1, 0),
    ]
}

pub(crate) fn primitive_basis() -> [Point3; 3] {
    [
        Point3::from_ints(1, 0, 0),
        Point3::from_ints(0, 1, 0),
        Point3::from_ints(0, 0, 1),
    ]
}

pub(crate) fn bcc_basis() -> [Point3; 3] {
    [
        Point3::from_ints(1, 0, 0),
        Point3::from_ints(0, 1, 0),
        Point3::from_frac(1, 1, 1, 2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn fcc_translation_orbit_has_thirteen_points() {
        let g = GroupPresentation::translations("F", fcc_basis());
        let orbit = g.orbit_in_ball(&Point3::zero(), &rat(3, 2)).unwrap();
        assert_eq!(orbit.len(), 13);
        // Oracle: even-sum integer vectors with norm² ≤ 9/4.
        let mut oracle = Vec::new();
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                for z in -2i64..=2 {
                    if (x + y + z).rem_euclid(2) == 0 && 4 * (x * x + y * y + z * z) <= 9 {
                        oracle.push(Point3::from_ints(x, y, z));
                    }
                }
            }
        }
        let mut got: Vec<Point3> = orbit.iter().map(|(q, _)| q.clone()).collect();
        got.sort();
        oracle.sort();
        assert_eq!(got, oracle);
        for (q, w) in &orbit {
            assert_eq!(&w.apply(&Point3::zero()), q);
        }
    }

    #[test]
    fn tiny_radius_gives_only_the_point() {
        let g = GroupPresentation::translations("F", fcc_basis());
        let p = Point3::from_frac(1, 2, 3, 7);
        let orbit = g.orbit_in_ball(&p, &rat(1, 2)).unwrap();
        assert_eq!(orbit.len(), 1);
        assert_eq!(orbit[0].0, p);
        assert_eq!(
            g.orbit_in_ball(&p, &int(0)),
            Err(GroupError::NonPositiveRadius)
        );
    }

    #[test]
    fn lattice_from_redundant_generators() {
        let l = Lattice::from_generators(&[
            Point3::from_ints(2, 0, 0),
            Point3::from_ints(0, 1, 0),
            Point3::from_ints(0, 0, 1),
            Point3::from_frac(1, 1, 1, 2),
            Point3::from_ints(3, 0, 0),
        ])
        .unwrap();
        assert!(l.contains(&Point3::from_ints(1, 0, 0)));
        assert!(l.contains(&Point3::from_frac(1, 1, 1, 2)));
        assert!(!l.contains(&Point3::from_frac(1, 0, 0, 2)));
        assert_eq!(
            l.reduce(&Point3::from_frac(5, 3, -1, 2)),
            l.reduce(&Point3::from_frac(1, 1, 1, 2))
        );
        assert_eq!(
            Lattice::from_generators(&[Point3::from_ints(1, 0, 0), Point3::from_ints(2, 0, 0)]),
            Err(GroupError::DependentBasis)
        );
    }

    #[test]
    fn closure_discovers_missing_translations() {
        // A 3-fold about the body diagonal through (1,0,0) combined with the one
        // through the origin yields (1,-1,0); with only 2Z³ given, the table
        // must enlarge its lattice.
        let c3 = Isometry::signed_permutation([2, 0, 1], [1, 1, 1], Point3::zero());
        let c3b = Isometry::about_point(c3.linear.clone(), &Point3::from_ints(1, 0, 0)).unwrap();
        let basis = [
            Point3::from_ints(2, 0, 0),
            Point3::from_ints(0, 2, 0),
            Point3::from_ints(0, 0, 2),
        ];
        let t = CosetTable::build(&[c3, c3b], &basis, 64).unwrap();
        assert!(t.lattice().contains(&Point3::from_ints(1, -1, 0)));
        assert_eq!(t.index(), 3);
    }
}
