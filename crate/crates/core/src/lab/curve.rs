use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::probe::GridSpec;
use crate::lattice::{HalfPoint, LatticeMap, Point};
use crate::rational::{self, int, Rational};
use crate::{Error, Result};

/// A point of the plane with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPoint {
    pub x: Rational,
    pub y: Rational,
}

impl QPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        QPoint { x, y }
    }

    fn sub(&self, o: &QPoint) -> (Rational, Rational) {
        (&self.x - &o.x, &self.y - &o.y)
    }

    pub fn dist_sq(&self, o: &QPoint) -> Rational {
        let (dx, dy) = self.sub(o);
        &dx * &dx + &dy * &dy
    }
}

impl From<HalfPoint> for QPoint {
    fn from(h: HalfPoint) -> Self {
        QPoint::new(h.x(), h.y())
    }
}

impl From<Point> for QPoint {
    fn from(p: Point) -> Self {
        QPoint::new(int(p.x), int(p.y))
    }
}

impl fmt::Display for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", rational::show(&self.x), rational::show(&self.y))
    }
}

/// A polyline. Segment lengths are kept squared; the total is a float.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub vertices: Vec<QPoint>,
    pub closed: bool,
    pub segment_len_sq: Vec<Rational>,
    pub length: f64,
    /// Lengths of the loops removed while making the curve simple.
    pub deleted_loops: Vec<f64>,
}

fn seg_len(a: &QPoint, b: &QPoint) -> f64 {
    rational::to_f64(&a.dist_sq(b)).sqrt()
}

fn path_len(pts: &[&QPoint]) -> f64 {
    pts.windows(2).map(|w| seg_len(w[0], w[1])).sum()
}

impl Curve {
    pub fn new(vertices: Vec<QPoint>, closed: bool) -> Self {
        let n = vertices.len();
        let segs = if closed { n } else { n.saturating_sub(1) };
        let segment_len_sq: Vec<Rational> =
            (0..segs).map(|s| vertices[s].dist_sq(&vertices[(s + 1) % n])).collect();
        let length = segment_len_sq.iter().map(|q| rational::to_f64(q).sqrt()).sum();
        Curve { vertices, closed, segment_len_sq, length, deleted_loops: Vec::new() }
    }

    pub fn segments(&self) -> impl Iterator<Item = (&QPoint, &QPoint)> + '_ {
        let n = self.vertices.len();
        (0..self.segment_len_sq.len()).map(move |s| (&self.vertices[s], &self.vertices[(s + 1) % n]))
    }

    /// True when no two segments meet except consecutive ones at their
    /// shared vertex.
    pub fn is_simple(&self) -> bool {
        find_crossing(&self.vertices, self.closed).is_none()
    }
}

fn cross(o: &QPoint, a: &QPoint, b: &QPoint) -> Rational {
    let (ax, ay) = a.sub(o);
    let (bx, by) = b.sub(o);
    ax * by - ay * bx
}

fn on_segment(p: &QPoint, a: &QPoint, b: &QPoint) -> bool {
    cross(a, b, p).is_zero()
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

/// A common point of segments `ab` and `cd`, if any. Among several common
/// points the one nearest to `a` is returned.
fn intersection(a: &QPoint, b: &QPoint, c: &QPoint, d: &QPoint) -> Option<QPoint> {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    let opposite = |u: &Rational, v: &Rational| (u.is_positive() && v.is_negative()) || (u.is_negative() && v.is_positive());
    if opposite(&d1, &d2) && opposite(&d3, &d4) {
        let t = &d1 / (&d1 - &d2);
        let (dx, dy) = b.sub(a);
        return Some(QPoint::new(&a.x + &t * dx, &a.y + &t * dy));
    }
    [a, b, c, d]
        .into_iter()
        .filter(|p| on_segment(p, a, b) && on_segment(p, c, d))
        .min_by(|p, q| p.dist_sq(a).cmp(&q.dist_sq(a)))
        .cloned()
}

/// A defect of the polyline: two non-consecutive segments that meet, or a
/// consecutive pair that folds back over itself.
#[derive(Debug)]
enum Crossing {
    Pair { a: usize, b: usize, at: QPoint },
    Fold { tip: usize },
}

fn find_crossing(v: &[QPoint], closed: bool) -> Option<Crossing> {
    let n = v.len();
    let segs = if closed { n } else { n.saturating_sub(1) };
    let end = |s: usize| &v[(s + 1) % n];
    let folds = if closed && n > 2 { n } else { n.saturating_sub(2) };
    for a in 0..folds {
        let (p, q, r) = (&v[a], &v[(a + 1) % n], &v[(a + 2) % n]);
        let (ux, uy) = q.sub(p);
        let (wx, wy) = r.sub(q);
        if cross(p, q, r).is_zero() && (ux * wx + uy * wy).is_negative() {
            return Some(Crossing::Fold { tip: (a + 1) % n });
        }
    }
    for a in 0..segs {
        for b in a + 2..segs {
            if closed && a == 0 && b == segs - 1 {
                continue;
            }
            if let Some(at) = intersection(&v[a], end(a), &v[b], end(b)) {
                return Some(Crossing::Pair { a, b, at });
            }
        }
    }
    None
}

fn push_distinct(out: &mut Vec<QPoint>, p: QPoint) {
    if out.last() != Some(&p) {
        out.push(p);
    }
}

/// Removes loops from a closed polyline until it is simple. At each
/// crossing the loop of smaller length is cut out and replaced by the
/// crossing point.
pub fn delete_loops(vertices: Vec<QPoint>) -> Result<Curve> {
    let mut v = vertices;
    v.dedup();
    if v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    let mut deleted = Vec::new();
    while let Some(c) = find_crossing(&v, true) {
        let n = v.len();
        match c {
            Crossing::Fold { tip } => {
                let prev = &v[(tip + n - 1) % n];
                let next = &v[(tip + 1) % n];
                deleted.push(2.0 * seg_len(prev, &v[tip]).min(seg_len(&v[tip], next)));
                v.remove(tip);
            }
            Crossing::Pair { a, b, at } => {
                let inner: Vec<&QPoint> =
                    std::iter::once(&at).chain(&v[a + 1..=b]).chain(std::iter::once(&at)).collect();
                let outer: Vec<&QPoint> = std::iter::once(&at)
                    .chain(&v[b + 1..])
                    .chain(&v[..=a])
                    .chain(std::iter::once(&at))
                    .collect();
                let (li, lo) = (path_len(&inner), path_len(&outer));
                let mut next = Vec::with_capacity(n);
                if li <= lo {
                    deleted.push(li);
                    for p in &v[..=a] {
                        push_distinct(&mut next, p.clone());
                    }
                    push_distinct(&mut next, at);
                    for p in &v[b + 1..] {
                        push_distinct(&mut next, p.clone());
                    }
                } else {
                    deleted.push(lo);
                    push_distinct(&mut next, at);
                    for p in &v[a + 1..=b] {
                        push_distinct(&mut next, p.clone());
                    }
                }
                if next.len() > 1 && next.first() == next.last() {
                    next.pop();
                }
                v = next;
            }
        }
        if v.len() < 3 {
            return Err(Error::DegenerateCurve("loop deletion left fewer than three vertices".into()));
        }
    }
    let mut curve = Curve::new(v, true);
    curve.deleted_loops = deleted;
    Ok(curve)
}

/// Probe points on the boundary of square `k`, counter-clockwise from
/// `x_{0,0}^k`.
pub fn boundary_probes(grid: &GridSpec, k: i64) -> Vec<Point> {
    let p = grid.p;
    let mut ij = Vec::with_capacity(4 * p as usize);
    ij.extend((0..p).map(|i| (i, 0)));
    ij.extend((0..p).map(|j| (p, j)));
    ij.extend((1..=p).rev().map(|i| (i, p)));
    ij.extend((1..=p).rev().map(|j| (0, j)));
    ij.into_iter().map(|(i, j)| grid.point(k, i, j)).collect()
}

/// The closed polyline through the images of consecutive boundary probe
/// points of square `k`, made simple by [`delete_loops`].
///
/// With `l` given, every deleted loop must be at most `2L̂³M/P` long and,
/// when `P ≥ 4L̂⁴`, the result at least `M√2/L̂ − 4L̂³M/P`, where `L̂ = 6L`.
pub fn boundary_curve(fhat: &impl LatticeMap, grid: &GridSpec, k: i64, l: Option<&Rational>) -> Result<Curve> {
    if !(1..=grid.squares()).contains(&k) {
        return Err(Error::OutOfRange(format!("square index {k} outside 1..={}", grid.squares())));
    }
    let images = boundary_probes(grid, k)
        .into_iter()
        .map(|q| fhat.image_half(q).map(QPoint::from).ok_or(Error::OutsideDomain { x: q.x, y: q.y }))
        .collect::<Result<Vec<_>>>()?;
    let curve = delete_loops(images)?;
    if curve.length <= 0.0 {
        return Err(Error::DegenerateCurve("zero length".into()));
    }
    if let Some(l) = l {
        let lh = 6.0 * rational::to_f64(l);
        let (m, p) = (grid.m as f64, grid.p as f64);
        let loop_bound = 2.0 * lh.powi(3) * m / p;
        if let Some(worst) = curve.deleted_loops.iter().copied().find(|&x| x > loop_bound * (1.0 + 1e-12)) {
            return Err(Error::DegenerateCurve(format!("deleted loop of length {worst} exceeds 2L̂³M/P = {loop_bound}")));
        }
        if p >= 4.0 * lh.powi(4) {
            let floor = m * std::f64::consts::SQRT_2 / lh - 4.0 * lh.powi(3) * m / p;
            if curve.length < floor * (1.0 - 1e-12) {
                return Err(Error::DegenerateCurve(format!(
                    "length {} is below the lower bound {floor}",
                    curve.length
                )));
            }
        }
    }
    Ok(curve)
}

/// `25 · T · length`.
pub fn near_curve_bound(curve: &Curve, t: &Rational) -> f64 {
    25.0 * rational::to_f64(t) * curve.length
}

fn scaled(q: &Rational, scale: &BigInt) -> BigInt {
    (q * Rational::from_integer(scale.clone())).to_integer()
}

/// Exact number of lattice points within Euclidean distance `T` of the
/// curve. Requires `length ≥ 4` and `1 ≤ T ≤ length/4`.
pub fn lattice_near_curve_count(curve: &Curve, t: &Rational) -> Result<u64> {
    let tf = rational::to_f64(t);
    if curve.length < 4.0 || *t < int(1) || 4.0 * tf > curve.length {
        return Err(Error::Precondition(format!(
            "need length >= 4 and 1 <= T <= length/4, got length {} and T = {}",
            curve.length,
            rational::show(t)
        )));
    }
    // Scale everything to integers.
    let scale = curve
        .vertices
        .iter()
        .flat_map(|p| [p.x.denom(), p.y.denom()])
        .chain(std::iter::once(t.denom()))
        .fold(BigInt::from(1), |acc, d| acc.lcm(d));
    let to_i = |b: BigInt| b.to_i128().ok_or(Error::Overflow("curve coordinates"));
    let verts: Vec<(i128, i128)> = curve
        .vertices
        .iter()
        .map(|p| Ok((to_i(scaled(&p.x, &scale))?, to_i(scaled(&p.y, &scale))?)))
        .collect::<Result<_>>()?;
    let s = to_i(scale.clone())?;
    let ts = to_i(scaled(t, &scale))?;
    let t_sq = ts.checked_mul(ts).ok_or(Error::Overflow("distance bound"))?;
    let n = verts.len();
    let segs: Vec<((i128, i128), (i128, i128))> = if curve.closed {
        (0..n).map(|i| (verts[i], verts[(i + 1) % n])).collect()
    } else if n == 1 {
        vec![(verts[0], verts[0])]
    } else {
        verts.windows(2).map(|w| (w[0], w[1])).collect()
    };
    let floor_div = |a: i128| a.div_euclid(s);
    let (mut x0, mut y0, mut x1, mut y1) = (i128::MAX, i128::MAX, i128::MIN, i128::MIN);
    for &(x, y) in &verts {
        x0 = x0.min(floor_div(x - ts));
        y0 = y0.min(floor_div(y - ts));
        x1 = x1.max(floor_div(x + ts) + 1);
        y1 = y1.max(floor_div(y + ts) + 1);
    }
    let near = |p: (i128, i128)| -> bool {
        segs.iter().any(|&(a, b)| {
            let d = (b.0 - a.0, b.1 - a.1);
            let w = (p.0 - a.0, p.1 - a.1);
            let along = w.0 * d.0 + w.1 * d.1;
            let len_sq = d.0 * d.0 + d.1 * d.1;
            if along <= 0 || len_sq == 0 {
                w.0 * w.0 + w.1 * w.1 <= t_sq
            } else if along >= len_sq {
                let e = (p.0 - b.0, p.1 - b.1);
                e.0 * e.0 + e.1 * e.1 <= t_sq
            } else {
                let c = w.0 * d.1 - w.1 * d.0;
                c * c <= t_sq * len_sq
            }
        })
    };
    let mut count = 0u64;
    for y in y0..=y1 {
        for x in x0..=x1 {
            count += u64::from(near((x * s, y * s)));
        }
    }
    Ok(count)
}
