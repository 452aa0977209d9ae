//! Affine isometries `x ↦ Mx + t` with rational data.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::polytope::{ConvexPolyhedron, Halfspace};
use crate::rational::{fmt_rational, int, parse_rational, Point3, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsometryError {
    #[error("linear part is not orthogonal")]
    NotOrthogonal,
    #[error("expected 12 rational entries, got {0}")]
    WrongLength(usize),
    #[error("{0}")]
    Parse(String),
}

pub type Matrix3 = [[Rational; 3]; 3];

fn mat_mul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = Rational::zero();
            for k in 0..3 {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    s += &a[i][k] * &b[k][j];
                }
            }
            s
        })
    })
}

fn transpose(a: &Matrix3) -> Matrix3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

fn identity_matrix() -> Matrix3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    })
}

pub fn mat_apply(m: &Matrix3, p: &Point3) -> Point3 {
    let c = p.coords();
    let row = |r: &[Rational; 3]| {
        let mut s = Rational::zero();
        for k in 0..3 {
            if r[k].is_zero() || c[k].is_zero() {
                continue;
            }
            if r[k].is_one() {
                s += c[k];
            } else if (-&r[k]).is_one() {
                s -= c[k];
            } else {
                s += &r[k] * c[k];
            }
        }
        s
    };
    Point3::new(row(&m[0]), row(&m[1]), row(&m[2]))
}

pub fn mat_det(m: &Matrix3) -> Rational {
    let r = |i: usize| Point3::from_array(m[i].clone());
    crate::rational::det3(&r(0), &r(1), &r(2))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Isometry {
    pub linear: Matrix3,
    pub translation: Point3,
}

impl Isometry {
    pub fn new(linear: Matrix3, translation: Point3) -> Result<Self, IsometryError> {
        if mat_mul(&linear, &transpose(&linear)) != identity_matrix() {
            return Err(IsometryError::NotOrthogonal);
        }
        Ok(Isometry {
            linear,
            translation,
        })
    }

    pub fn identity() -> Self {
        Isometry {
            linear: identity_matrix(),
            translation: Point3::zero(),
        }
    }

    pub fn translation_by(t: Point3) -> Self {
        Isometry {
            linear: identity_matrix(),
            translation: t,
        }
    }

    /// Signed permutation: coordinate `i` of the image is `signs[i]·x[perm[i]]`.
    pub fn signed_permutation(perm: [usize; 3], signs: [i64; 3], translation: Point3) -> Self {
        let linear = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                if perm[i] == j {
                    int(signs[i])
                } else {
                    Rational::zero()
                }
            })
        });
        Isometry::new(linear, translation).expect("signed permutations are orthogonal")
    }

    /// The map `x ↦ c + M(x − c)`.
    pub fn about_point(linear: Matrix3, c: &Point3) -> Result<Self, IsometryError> {
        let t = c - &mat_apply(&linear, c);
        Isometry::new(linear, t)
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        &mat_apply(&self.linear, p) + &self.translation
    }

    pub fn apply_linear(&self, v: &Point3) -> Point3 {
        mat_apply(&self.linear, v)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            linear: mat_mul(&self.linear, &other.linear),
            translation: self.apply(&other.translation),
        }
    }

    pub fn inverse(&self) -> Isometry {
        let lt = transpose(&self.linear);
        let t = -&mat_apply(&lt, &self.translation);
        Isometry {
            linear: lt,
            translation: t,
        }
    }

    pub fn det(&self) -> Rational {
        mat_det(&self.linear)
    }

    pub fn is_proper(&self) -> bool {
        self.det().is_positive()
    }

    pub fn is_identity(&self) -> bool {
        self.linear == identity_matrix() && self.translation.is_zero()
    }

    pub fn has_identity_linear(&self) -> bool {
        self.linear == identity_matrix()
    }

    /// Smallest `n ≤ max` with `selfⁿ = id`.
    pub fn order(&self, max: usize) -> Option<usize> {
        let mut g = self.clone();
        for n in 1..=max {
            if g.is_identity() {
                return Some(n);
            }
            g = self.compose(&g);
        }
        None
    }

    pub fn transform_halfspace(&self, h: &Halfspace) -> Halfspace {
        // For orthogonal M the image of {a·x ≤ b} is {(Ma)·y ≤ b + (Ma)·t}.
        let a = mat_apply(&self.linear, &h.normal());
        let b = h.offset() + a.dot(&self.translation);
        Halfspace::new(a.to_array(), b).expect("isometries keep normals nonzero")
    }

    pub fn transform_polytope(&self, poly: &ConvexPolyhedron) -> ConvexPolyhedron {
        poly.map_with(
            |p| self.apply(p),
            |h| self.transform_halfspace(h),
            !self.is_proper(),
        )
    }

    /// The twelve entries `m11 … m33 t1 t2 t3` as `num/den` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.linear
            .iter()
            .flatten()
            .chain(self.translation.coords())
            .map(fmt_rational)
            .collect()
    }

    pub fn from_strings<S: AsRef<str>>(entries: &[S]) -> Result<Self, IsometryError> {
        if entries.len() != 12 {
            return Err(IsometryError::WrongLength(entries.len()));
        }
        let v: Vec<Rational> = entries
            .iter()
            .map(|s| parse_rational(s.as_ref()).map_err(IsometryError::Parse))
            .collect::<Result<_, _>>()?;
        let linear = std::array::from_fn(|i| std::array::from_fn(|j| v[3 * i + j].clone()));
        Isometry::new(
            linear,
            Point3::new(v[9].clone(), v[10].clone(), v[11].clone()),
        )
    }
}

impl Serialize for Isometry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        Isometry::from_strings(&v).map_err(serde::de::Error::custom)
    }
}

pub fn compose(a: &Isometry, b: &Isometry) -> Isometry {
    a.compose(b)
}

pub fn apply(g: &Isometry, p: &Point3) -> Point3 {
    g.apply(p)
}
