//! Exact rational scalars and points.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary precision rational, always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `num/den`, also for integers.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
    let d = BigInt::from_str(d).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::new(n, d))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point3 {
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
}

impl Point3 {
    pub fn new(x: Rational, y: Rational, z: Rational) -> Self {
        Point3 { x, y, z }
    }

    pub fn zero() -> Self {
        Point3::new(Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Point3::new(int(x), int(y), int(z))
    }

    /// `(x/d, y/d, z/d)`.
    pub fn from_frac(x: i64, y: i64, z: i64, d: i64) -> Self {
        Point3::new(rat(x, d), rat(y, d), rat(z, d))
    }

    pub fn from_array(c: [Rational; 3]) -> Self {
        let [x, y, z] = c;
        Point3 { x, y, z }
    }

    pub fn coords(&self) -> [&Rational; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn to_array(&self) -> [Rational; 3] {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn dot(&self, o: &Point3) -> Rational {
        &self.x * &o.x + &self.y * &o.y + &self.z * &o.z
    }

    pub fn cross(&self, o: &Point3) -> Point3 {
        Point3::new(
            &self.y * &o.z - &self.z * &o.y,
            &self.z * &o.x - &self.x * &o.z,
            &self.x * &o.y - &self.y * &o.x,
        )
    }

    pub fn norm2(&self) -> Rational {
        self.dot(self)
    }

    pub fn dist2(&self, o: &Point3) -> Rational {
        (self - o).norm2()
    }

    pub fn scale(&self, k: &Rational) -> Point3 {
        Point3::new(&self.x * k, &self.y * k, &self.z * k)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn midpoint(&self, o: &Point3) -> Point3 {
        (self + o).scale(&rat(1, 2))
    }

    pub fn centroid<'a>(points: impl IntoIterator<Item = &'a Point3>) -> Point3 {
        let mut sum = Point3::zero();
        let mut n = 0i64;
        for p in points {
            sum = &sum + p;
            n += 1;
        }
        assert!(n > 0, "centroid of an empty point set");
        sum.scale(&rat(1, n))
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [
            rational_to_f64(&self.x),
            rational_to_f64(&self.y),
            rational_to_f64(&self.z),
        ]
    }

    pub fn max_abs(&self) -> Rational {
        self.coords()
            .into_iter()
            .map(|c| c.abs())
            .max()
            .expect("three coordinates")
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl FromStr for Point3 {
    type Err = String;

    /// Accepts `x,y,z` with each coordinate an integer or `num/den`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(format!(
                "expected three comma-separated coordinates, got {s:?}"
            ));
        }
        Ok(Point3::new(
            parse_rational(parts[0])?,
            parse_rational(parts[1])?,
            parse_rational(parts[2])?,
        ))
    }
}

impl Serialize for Point3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [
            fmt_rational(&self.x),
            fmt_rational(&self.y),
            fmt_rational(&self.z),
        ]
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y, z] = <[String; 3]>::deserialize(d)?;
        Ok(Point3::new(
            parse_rational(&x).map_err(serde::de::Error::custom)?,
            parse_rational(&y).map_err(serde::de::Error::custom)?,
            parse_rational(&z).map_err(serde::de::Error::custom)?,
        ))
    }
}

impl Add for &Point3 {
    type Output = Point3;
    fn add(self, o: &Point3) -> Point3 {
        Point3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }
}

impl Sub for &Point3 {
    type Output = Point3;
    fn sub(self, o: &Point3) -> Point3 {
        Point3::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }
}

impl Neg for &Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-&self.x, -&self.y, -&self.z)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        &self + &o
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        &self - &o
    }
}

/// Determinant of the 3×3 matrix with the given rows.
pub fn det3(a: &Point3, b: &Point3, c: &Point3) -> Rational {
    a.dot(&b.cross(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_round_trip() {
        for s in ["1/2", "-3/4", "0/1", "7/1"] {
            assert_eq!(fmt_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn point_parsing_and_json() {
        let p: Point3 = "1/2,-1/2, 1/2".parse().unwrap();
        assert_eq!(p, Point3::from_frac(1, -1, 1, 2));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["1/2","-1/2","1/2"]"#);
        let back: Point3 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn cross_and_det() {
        let e1 = Point3::from_ints(1, 0, 0);
        let e2 = Point3::from_ints(0, 1, 0);
        assert_eq!(e1.cross(&e2), Point3::from_ints(0, 0, 1));
        assert_eq!(det3(&e1, &e2, &Point3::from_ints(0, 0, 1)), int(1));
    }
}
