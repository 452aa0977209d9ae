//! Seeded rational base points inside `T^A`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::base_subdomain;
use crate::polytope::{locate_point, Location};
use crate::rational::{rat, Point3};

pub const DEFAULT_DENOMINATOR: i64 = 20_000;

/// Which side of the plane `z = 1/4` (through the midpoints of the edges
/// `v_i v_{i+1}`) the base point must lie on. Upper is the side of `v_1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HalfFilter {
    #[default]
    All,
    Upper,
    Lower,
}

impl HalfFilter {
    pub fn accepts(self, p: &Point3) -> bool {
        let quarter = rat(1, 4);
        match self {
            HalfFilter::All => true,
            HalfFilter::Upper => p.z > quarter,
            HalfFilter::Lower => p.z < quarter,
        }
    }

    pub fn of(p: &Point3) -> HalfFilter {
        let quarter = rat(1, 4);
        if p.z > quarter {
            HalfFilter::Upper
        } else if p.z < quarter {
            HalfFilter::Lower
        } else {
            HalfFilter::All
        }
    }
}

impl std::str::FromStr for HalfFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(HalfFilter::All),
            "upper" => Ok(HalfFilter::Upper),
            "lower" => Ok(HalfFilter::Lower),
            other => Err(format!(
                "unknown half {other:?}, expected upper, lower or all"
            )),
        }
    }
}

/// Stream of grid points interior to `T^A`. `T^A` lies in the box
/// `[1/2, 3/4] × [-1/2, 0] × [0, 1/2]`, so numerators are drawn there and
/// rejected unless strictly inside.
pub struct BasePointSampler {
    rng: ChaCha8Rng,
    denominator: i64,
    filter: HalfFilter,
}

impl BasePointSampler {
    pub fn new(seed: u64, denominator: i64, filter: HalfFilter) -> Self {
        assert!(
            denominator >= 4 && denominator % 4 == 0,
            "denominator must be a positive multiple of 4"
        );
        BasePointSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            denominator,
            filter,
        }
    }
}

impl Iterator for BasePointSampler {
    type Item = Point3;

    fn next(&mut self) -> Option<Point3> {
        let d = self.denominator;
        loop {
            let x = self.rng.gen_range(d / 2..=3 * d / 4);
            let y = self.rng.gen_range(-d / 2..=0);
            let z = self.rng.gen_range(0..=d / 2);
            let p = Point3::from_frac(x, y, z, d);
            if self.filter.accepts(&p) && locate_point(base_subdomain(), &p) == Location::Interior {
                return Some(p);
            }
        }
    }
}
