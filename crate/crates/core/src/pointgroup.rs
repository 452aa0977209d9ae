//! Finite point groups and the search for stabilizers that cannot be
//! absorbed by a smaller group.
//!
//! A nontrivial subgroup `H₀ ≤ G₀` is a candidate when no proper subgroup
//! `F₀ < G₀` satisfies `F₀H₀ = G₀`: otherwise an orbit with stabilizer `H₀`
//! would already be a generic orbit of a smaller group.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::isometry::Isometry;
use crate::rational::Point3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointGroupError {
    #[error("the given elements are not closed under composition")]
    NotAGroup,
    #[error("point groups have at most 64 elements here, got {0}")]
    TooLarge(usize),
}

/// A finite linear group with its multiplication table.
#[derive(Clone, Debug)]
pub struct PointGroup {
    elements: Vec<Isometry>,
    table: Vec<Vec<usize>>,
    identity: usize,
}

type Mask = u64;

impl PointGroup {
    /// Takes the linear parts of `elements`, deduplicated.
    pub fn new(elements: &[Isometry]) -> Result<Self, PointGroupError> {
        let mut elems: Vec<Isometry> = Vec::new();
        for g in elements {
            let lin = Isometry {
                linear: g.linear.clone(),
                translation: Point3::zero(),
            };
            if !elems.contains(&lin) {
                elems.push(lin);
            }
        }
        if elems.len() > 64 {
            return Err(PointGroupError::TooLarge(elems.len()));
        }
        let index: HashMap<&Isometry, usize> =
            elems.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut table = vec![vec![0; elems.len()]; elems.len()];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                table[i][j] = *index.get(&a.compose(b)).ok_or(PointGroupError::NotAGroup)?;
            }
        }
        let identity = elems
            .iter()
            .position(Isometry::is_identity)
            .ok_or(PointGroupError::NotAGroup)?;
        Ok(PointGroup {
            elements: elems,
            table,
            identity,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Isometry] {
        &self.elements
    }

    fn full(&self) -> Mask {
        if self.order() == 64 {
            Mask::MAX
        } else {
            (1 << self.order()) - 1
        }
    }

    fn members(&self, m: Mask) -> impl Iterator<Item = usize> + '_ {
        (0..self.order()).filter(move |i| m >> i & 1 == 1)
    }

    fn close(&self, m: Mask) -> Mask {
        let mut m = m | 1 << self.identity;
        loop {
            let mut next = m;
            for a in self.members(m) {
                for b in self.members(m) {
                    next |= 1 << self.table[a][b];
                }
            }
            if next == m {
                return m;
            }
            m = next;
        }
    }

    fn product_set(&self, f: Mask, h: Mask) -> Mask {
        let mut out = 0;
        for a in self.members(f) {
            for b in self.members(h) {
                out |= 1 << self.table[a][b];
            }
        }
        out
    }

    /// Every subgroup, as bitmasks over the element list, sorted by order.
    fn subgroup_masks(&self) -> Vec<Mask> {
        let mut found: BTreeSet<Mask> = BTreeSet::new();
        let mut frontier = vec![self.close(0)];
        found.insert(frontier[0]);
        while let Some(h) = frontier.pop() {
            for g in 0..self.order() {
                if h >> g & 1 == 1 {
                    continue;
                }
                let k = self.close(h | 1 << g);
                if found.insert(k) {
                    frontier.push(k);
                }
            }
        }
        let mut out: Vec<Mask> = found.into_iter().collect();
        out.sort_by_key(|m| (m.count_ones(), *m));
        out
    }

    fn to_elements(&self, m: Mask) -> Vec<Isometry> {
        self.members(m).map(|i| self.elements[i].clone()).collect()
    }

    /// All subgroups, smallest first.
    pub fn subgroups(&self) -> Vec<Vec<Isometry>> {
        self.subgroup_masks()
            .into_iter()
            .map(|m| self.to_elements(m))
            .collect()
    }

    /// Nontrivial `H₀` admitting no proper `F₀` with `F₀H₀ = G₀`.
    pub fn stabilizer_candidates(&self) -> Vec<Vec<Isometry>> {
        let subs = self.subgroup_masks();
        let full = self.full();
        let trivial = 1 << self.identity;
        subs.iter()
            .filter(|&&h| h != trivial)
            .filter(|&&h| {
                !subs
                    .iter()
                    .any(|&f| f != full && self.product_set(f, h) == full)
            })
            .map(|&h| self.to_elements(h))
            .collect()
    }
}

pub fn point_group_stabilizer_candidates(
    point_group: &[Isometry],
) -> Result<Vec<Vec<Isometry>>, PointGroupError> {
    Ok(PointGroup::new(point_group)?.stabilizer_candidates())
}

/// All 48 signed permutation matrices.
pub fn cube_symmetries() -> Vec<Isometry> {
    let mut out = Vec::with_capacity(48);
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
            out.push(Isometry::signed_permutation(perm, signs, Point3::zero()));
        }
    }
    out
}

/// The rotation group `432` of the cube.
pub fn cube_rotations() -> Vec<Isometry> {
    cube_symmetries()
        .into_iter()
        .filter(Isometry::is_proper)
        .collect()
}

/// The group `23`: even permutations with an even number of sign changes.
pub fn tetrahedral_rotations() -> Vec<Isometry> {
    cube_rotations()
        .into_iter()
        .filter(|g| {
            // Cyclic permutations only.
            let image = g.apply_linear(&Point3::from_ints(1, 2, 3));
            let abs: Vec<_> = image
                .coords()
                .iter()
                .map(|c| num_traits::Signed::abs(*c))
                .collect();
            let p = [abs[0].clone(), abs[1].clone(), abs[2].clone()];
            let rots = [[1, 2, 3], [3, 1, 2], [2, 3, 1]];
            rots.iter()
                .any(|r| (0..3).all(|i| p[i] == crate::rational::int(r[i])))
        })
        .collect()
}

/// Whether a linear isometry is an order-2 rotation about a coordinate axis.
pub fn is_coordinate_half_turn(g: &Isometry) -> bool {
    g.is_proper()
        && !g.has_identity_linear()
        && (0..3).all(|i| (0..3).all(|j| (i == j) == !num_traits::Zero::is_zero(&g.linear[i][j])))
}
