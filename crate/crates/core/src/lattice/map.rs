use std::collections::{BTreeMap, HashMap, HashSet};

use super::{HalfPoint, Point};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]` of lattice points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Window {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        assert!(x0 <= x1 && y0 <= y1, "empty window");
        Window { x0, y0, x1, y1 }
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.x0..=self.x1).contains(&p.x) && (self.y0..=self.y1).contains(&p.y)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (self.y0..=self.y1).flat_map(move |y| (self.x0..=self.x1).map(move |x| Point::new(x, y)))
    }

    pub fn len(&self) -> usize {
        ((self.x1 - self.x0 + 1) * (self.y1 - self.y0 + 1)) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Smallest window containing all `points`.
    pub fn bounding(points: impl IntoIterator<Item = Point>) -> Option<Window> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut w = Window::new(first.x, first.y, first.x, first.y);
        for p in it {
            w.x0 = w.x0.min(p.x);
            w.x1 = w.x1.max(p.x);
            w.y0 = w.y0.min(p.y);
            w.y1 = w.y1.max(p.y);
        }
        Some(w)
    }
}

/// Anything that sends lattice points to `(1/2)Z²`. Images are returned with
/// doubled coordinates so all arithmetic stays integral.
pub trait LatticeMap {
    fn image_doubled(&self, p: Point) -> Option<(i64, i64)>;

    fn image_half(&self, p: Point) -> Option<HalfPoint> {
        self.image_doubled(p).map(|(x, y)| HalfPoint::from_doubled(x, y))
    }
}

/// An injective map from a finite subset of a window into `Z²` whose domain
/// has the 2Z-property inside that window.
#[derive(Clone, Debug)]
pub struct CandidateMap {
    window: Window,
    images: BTreeMap<Point, Point>,
}

impl CandidateMap {
    pub fn new(window: Window, images: impl IntoIterator<Item = (Point, Point)>) -> Result<Self> {
        let images: BTreeMap<Point, Point> = images.into_iter().collect();
        for p in images.keys() {
            if !window.contains(*p) {
                return Err(Error::OutsideDomain { x: p.x, y: p.y });
            }
        }
        let mut seen: HashMap<Point, Point> = HashMap::with_capacity(images.len());
        for (&p, &q) in &images {
            if let Some(&prev) = seen.get(&q) {
                return Err(Error::NotInjective { x1: prev.x, y1: prev.y, x2: p.x, y2: p.y });
            }
            seen.insert(q, p);
        }
        let first_even = window.x0 + window.x0.rem_euclid(2);
        for x in (first_even..=window.x1).step_by(2) {
            for y in window.y0..=window.y1 {
                if !images.contains_key(&Point::new(x, y)) {
                    return Err(Error::TwoZViolated { x, y });
                }
            }
        }
        Ok(CandidateMap { window, images })
    }

    /// The map `p ↦ g(p)` on the given domain points.
    pub fn from_fn(window: Window, domain: impl IntoIterator<Item = Point>, g: impl Fn(Point) -> Point) -> Result<Self> {
        Self::new(window, domain.into_iter().map(|p| (p, g(p))))
    }

    pub fn identity(window: Window, domain: impl IntoIterator<Item = Point>) -> Result<Self> {
        Self::from_fn(window, domain, |p| p)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn domain(&self) -> impl Iterator<Item = Point> + '_ {
        self.images.keys().copied()
    }

    pub fn in_domain(&self, p: Point) -> bool {
        self.images.contains_key(&p)
    }

    pub fn get(&self, p: Point) -> Option<Point> {
        self.images.get(&p).copied()
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.images.iter().map(|(a, b)| (*a, *b))
    }

    /// `f(2MN, 0) − f(0, 0)`.
    pub fn baseline(&self, m: i64, n: i64) -> Result<Point> {
        let end = Point::new(2 * m * n, 0);
        let a = self.get(Point::new(0, 0)).ok_or(Error::OutsideDomain { x: 0, y: 0 })?;
        let b = self.get(end).ok_or(Error::OutsideDomain { x: end.x, y: end.y })?;
        Ok(b - a)
    }

    /// Translates domain by `shift` and images by `image_shift`.
    pub fn translated(&self, shift: Point, image_shift: Point) -> Result<Self> {
        let w = self.window;
        let window = Window::new(w.x0 + shift.x, w.y0 + shift.y, w.x1 + shift.x, w.y1 + shift.y);
        Self::new(window, self.iter().map(|(p, q)| (p + shift, q + image_shift)))
    }
}

impl LatticeMap for CandidateMap {
    fn image_doubled(&self, p: Point) -> Option<(i64, i64)> {
        self.get(p).map(|q| (2 * q.x, 2 * q.y))
    }
}

/// The extension of a candidate map to its whole window.
#[derive(Clone, Debug)]
pub struct HatMap {
    window: Window,
    values: HashMap<Point, HalfPoint>,
}

impl HatMap {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, p: Point) -> Option<HalfPoint> {
        self.values.get(&p).copied()
    }
}

impl LatticeMap for HatMap {
    fn image_doubled(&self, p: Point) -> Option<(i64, i64)> {
        self.values.get(&p).map(|h| h.doubled())
    }
}

/// The same extension as [`hat_extend`], evaluated on demand for any map
/// with integer images. No window bound is applied.
#[derive(Clone, Copy, Debug)]
pub struct LazyHat<'a, M>(pub &'a M);

impl<M: LatticeMap> LatticeMap for LazyHat<'_, M> {
    fn image_doubled(&self, p: Point) -> Option<(i64, i64)> {
        self.0
            .image_doubled(p)
            .or_else(|| self.0.image_doubled(p + Point::new(1, 0)).map(|(x, y)| (x - 1, y)))
    }
}

/// Extends `f` to every point of its window: points outside the domain take
/// the image of their right neighbour moved left by one half.
pub fn hat_extend(f: &CandidateMap) -> Result<HatMap> {
    let window = f.window();
    let mut values = HashMap::with_capacity(window.len());
    for p in window.points() {
        let v = match f.get(p) {
            Some(q) => HalfPoint::from(q),
            None => {
                let right = f.get(p + Point::new(1, 0)).ok_or(Error::TwoZViolated { x: p.x, y: p.y })?;
                let (x2, y2) = HalfPoint::from(right).doubled();
                HalfPoint::from_doubled(x2 - 1, y2)
            }
        };
        values.insert(p, v);
    }
    Ok(HatMap { window, values })
}

/// Extremal expansions of a map over a list of pairs. Expansions are
/// generally irrational, so the exact values kept are their squares.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub max_expansion_sq: Rational,
    pub min_expansion_sq: Rational,
    pub max_pair: (Point, Point),
    pub min_pair: (Point, Point),
}

impl DistortionReport {
    /// Square of `max(max_expansion, 1 / min_expansion)`.
    pub fn bilip_constant_sq(&self) -> Rational {
        let inv = self.min_expansion_sq.recip();
        rational::max(self.max_expansion_sq.clone(), inv)
    }

    pub fn max_expansion(&self) -> f64 {
        rational::to_f64(&self.max_expansion_sq).sqrt()
    }

    pub fn min_expansion(&self) -> f64 {
        rational::to_f64(&self.min_expansion_sq).sqrt()
    }

    pub fn bilip_constant(&self) -> f64 {
        rational::to_f64(&self.bilip_constant_sq()).sqrt()
    }

    /// Whether the map is `L`-bi-Lipschitz on the sampled pairs, decided exactly.
    pub fn within(&self, l: &Rational) -> bool {
        self.bilip_constant_sq() <= l * l
    }
}

/// Squared expansion of one pair as `(numerator, denominator)`, both in
/// doubled-coordinate units so the factor 4 cancels.
fn pair_ratio(map: &impl LatticeMap, a: Point, b: Point) -> Result<(i128, i128)> {
    if a == b {
        return Err(Error::DegeneratePair { x: a.x, y: a.y });
    }
    let fa = map.image_doubled(a).ok_or(Error::OutsideDomain { x: a.x, y: a.y })?;
    let fb = map.image_doubled(b).ok_or(Error::OutsideDomain { x: b.x, y: b.y })?;
    let (dx, dy) = ((fa.0 - fb.0) as i128, (fa.1 - fb.1) as i128);
    let num = dx * dx + dy * dy;
    if num == 0 {
        return Err(Error::NotInjective { x1: a.x, y1: a.y, x2: b.x, y2: b.y });
    }
    Ok((num, 4 * a.dist_sq(b) as i128))
}

/// Maximum and minimum expansion of `map` over `pairs`, decided exactly.
pub fn distortion(map: &impl LatticeMap, pairs: &[(Point, Point)]) -> Result<DistortionReport> {
    let (&first, rest) = pairs.split_first().ok_or(Error::EmptyPairs)?;
    let r0 = pair_ratio(map, first.0, first.1)?;
    let (mut hi, mut lo) = ((r0, first), (r0, first));
    for &(a, b) in rest {
        let r = pair_ratio(map, a, b)?;
        if r.0 * hi.0 .1 > hi.0 .0 * r.1 {
            hi = (r, (a, b));
        }
        if r.0 * lo.0 .1 < lo.0 .0 * r.1 {
            lo = (r, (a, b));
        }
    }
    let q = |(n, d): (i128, i128)| Rational::new(n.into(), d.into());
    Ok(DistortionReport {
        max_expansion_sq: q(hi.0),
        min_expansion_sq: q(lo.0),
        max_pair: hi.1,
        min_pair: lo.1,
    })
}

/// All unordered pairs of distinct points.
pub fn all_pairs(points: &[Point]) -> Vec<(Point, Point)> {
    let mut out = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            out.push((a, b));
        }
    }
    out
}

/// Pairs at lattice distance one, taken within `points`.
pub fn adjacent_pairs(points: &[Point]) -> Vec<(Point, Point)> {
    let set: HashSet<Point> = points.iter().copied().collect();
    let mut out = Vec::new();
    for &p in points {
        for step in [Point::new(1, 0), Point::new(0, 1)] {
            if set.contains(&(p + step)) {
                out.push((p, p + step));
            }
        }
    }
    out
}
