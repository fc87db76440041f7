//! Lattice points, patches and maps between finite subsets of `Z²`.

mod io;
mod map;
mod patch;

pub use io::{parse_map_file, parse_points_file, write_map_file, write_points_file};
pub use map::{adjacent_pairs, all_pairs, distortion, hat_extend, CandidateMap, DistortionReport, HatMap, LatticeMap, LazyHat, Window};
pub use patch::Patch;

use std::fmt;
use std::ops::{Add, Sub};

use crate::rational::{frac, Rational};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn norm_sq(self) -> i64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist_sq(self, other: Point) -> i64 {
        (self - other).norm_sq()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point of `(1/2)Z²`, stored with doubled coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfPoint {
    x2: i64,
    y2: i64,
}

impl HalfPoint {
    pub const fn from_doubled(x2: i64, y2: i64) -> Self {
        HalfPoint { x2, y2 }
    }

    pub const fn doubled(self) -> (i64, i64) {
        (self.x2, self.y2)
    }

    pub fn x(self) -> Rational {
        frac(self.x2, 2)
    }

    pub fn y(self) -> Rational {
        frac(self.y2, 2)
    }
}

impl From<Point> for HalfPoint {
    fn from(p: Point) -> Self {
        HalfPoint::from_doubled(2 * p.x, 2 * p.y)
    }
}

impl fmt::Display for HalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: i64| {
            if v % 2 == 0 {
                format!("{}", v / 2)
            } else {
                format!("{}/2", v)
            }
        };
        write!(f, "({}, {})", show(self.x2), show(self.y2))
    }
}

/// Separation and covering radius of a Delone set. Subsets of `Z²` with the
/// 2Z-property always admit separation 1; the pair is kept for reporting.
#[derive(Clone, Debug, PartialEq)]
pub struct DeloneParams {
    separation: Rational,
    covering_radius: Rational,
}

impl DeloneParams {
    pub fn new(separation: Rational, covering_radius: Rational) -> Result<Self> {
        use num_traits::Signed;
        if !separation.is_positive() || !covering_radius.is_positive() {
            return Err(Error::OutOfRange("Delone radii must be positive".into()));
        }
        if separation > Rational::from_integer(2.into()) * &covering_radius {
            return Err(Error::OutOfRange("separation exceeds twice the covering radius".into()));
        }
        Ok(DeloneParams { separation, covering_radius })
    }

    pub fn separation(&self) -> &Rational {
        &self.separation
    }

    pub fn covering_radius(&self) -> &Rational {
        &self.covering_radius
    }
}
