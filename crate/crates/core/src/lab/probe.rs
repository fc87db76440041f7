use crate::lattice::{LatticeMap, Point};
use crate::rational::{int, Rational};
use crate::{Error, Result};

/// The rectangle `[0, 2MN] × [0, M]` cut into `2N` squares of side `M`,
/// each probed on a `(P+1) × (P+1)` grid of pitch `M/P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub m: i64,
    pub n: i64,
    pub p: i64,
}

impl GridSpec {
    pub fn new(m: i64, n: i64, p: i64) -> Result<Self> {
        if m < 1 || n < 1 || p < 1 {
            return Err(Error::OutOfRange(format!("M, N, P must be positive, got {m}, {n}, {p}")));
        }
        if m % p != 0 {
            return Err(Error::OutOfRange(format!("P = {p} does not divide M = {m}")));
        }
        Ok(GridSpec { m, n, p })
    }

    /// Probe pitch `M/P`.
    pub fn pitch(&self) -> i64 {
        self.m / self.p
    }

    /// Number of squares, `2N`.
    pub fn squares(&self) -> i64 {
        2 * self.n
    }

    /// `2MN`, the length of the rectangle.
    pub fn length(&self) -> i64 {
        2 * self.m * self.n
    }

    pub fn contains(&self, q: Point) -> bool {
        (0..=self.length()).contains(&q.x) && (0..=self.m).contains(&q.y)
    }

    /// `x_{i,j}^k`; `i` may be `P + 1`.
    pub fn point(&self, k: i64, i: i64, j: i64) -> Point {
        Point::new((k - 1) * self.m + i * self.pitch(), j * self.pitch())
    }

    fn check_square(&self, k: i64, last: i64) -> Result<()> {
        if !(1..=last).contains(&k) {
            return Err(Error::OutOfRange(format!("square index {k} outside 1..={last}")));
        }
        Ok(())
    }
}

/// A probe point with its grid labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probe {
    pub k: i64,
    pub i: i64,
    pub j: i64,
    pub at: Point,
}

/// The `(P+1)²` probe points of square `k`, row by row, followed by the
/// `P + 1` points with `i = P + 1`.
pub fn probe_points(grid: &GridSpec, k: i64) -> Result<Vec<Probe>> {
    grid.check_square(k, grid.squares())?;
    let p = grid.p;
    let mut out = Vec::with_capacity(((p + 1) * (p + 2)) as usize);
    for j in 0..=p {
        for i in 0..=p {
            out.push(Probe { k, i, j, at: grid.point(k, i, j) });
        }
    }
    for j in 0..=p {
        out.push(Probe { k, i: p + 1, j, at: grid.point(k, p + 1, j) });
    }
    Ok(out)
}

fn image(f: &impl LatticeMap, q: Point) -> Result<(i64, i64)> {
    f.image_doubled(q).ok_or(Error::OutsideDomain { x: q.x, y: q.y })
}

fn diff(a: (i64, i64), b: (i64, i64)) -> (i128, i128) {
    ((a.0 - b.0) as i128, (a.1 - b.1) as i128)
}

fn dot(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.0 + a.1 * b.1
}

/// `f(2MN, 0) − f(0, 0)` in doubled coordinates.
fn baseline(f: &impl LatticeMap, grid: &GridSpec) -> Result<(i128, i128)> {
    let v = diff(image(f, Point::new(grid.length(), 0))?, image(f, Point::new(0, 0))?);
    if v == (0, 0) {
        return Err(Error::DegenerateBaseline);
    }
    Ok(v)
}

/// One horizontal step of the probe grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeStep {
    pub probe: Probe,
    /// End point: `x_{i+1,j}^k`, or that point moved right by one when it is
    /// missing from the domain.
    pub target: Point,
    pub shifted: bool,
    /// `(‖f(target) − f(x)‖ / |target − x|)² / (‖v‖ / 2MN)²`.
    pub stretch_sq: Rational,
}

/// All steps `x_{i,j}^k → x_{i+1,j}^k` that start in the domain and end in
/// the rectangle, square by square and row by row. A step from `x_{P,j}^k`
/// is the step from `x_{0,j}^{k+1}` and is visited once.
pub fn probe_steps(f: &impl LatticeMap, grid: &GridSpec) -> Result<Vec<ProbeStep>> {
    let v = baseline(f, grid)?;
    let v_sq = dot(v, v);
    let len = grid.length() as i128;
    let mut out = Vec::new();
    for k in 1..=grid.squares() {
        for j in 0..=grid.p {
            for i in 0..grid.p {
                let x = grid.point(k, i, j);
                let Some(fx) = f.image_doubled(x) else { continue };
                let next = grid.point(k, i + 1, j);
                let (target, shifted) = if f.image_doubled(next).is_some() {
                    (next, false)
                } else {
                    (next + Point::new(1, 0), true)
                };
                if !grid.contains(target) {
                    continue;
                }
                let d = diff(image(f, target)?, fx);
                let span = (target.x - x.x) as i128;
                let stretch_sq = Rational::new((dot(d, d) * len * len).into(), (v_sq * span * span).into());
                out.push(ProbeStep { probe: Probe { k, i, j, at: x }, target, shifted, stretch_sq });
            }
        }
    }
    Ok(out)
}

fn one_plus_sq(lambda: &Rational) -> Rational {
    let s = int(1) + lambda;
    &s * &s
}

/// Probe steps whose expansion exceeds `(1 + λ)` times the mean slope
/// `‖v‖ / 2MN`, with `v = f(2MN, 0) − f(0, 0)`.
pub fn check_no_stretch(f: &impl LatticeMap, grid: &GridSpec, lambda: &Rational) -> Result<Vec<ProbeStep>> {
    let bound = one_plus_sq(lambda);
    Ok(probe_steps(f, grid)?.into_iter().filter(|s| s.stretch_sq > bound).collect())
}

/// Outcome of scanning the squares for regularity.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularSquareResult {
    /// First regular square, if any.
    pub k_star: Option<i64>,
    /// For each `k ∈ [1, 2N−1]`, the least `⟨f̂(x + (M,0)) − f̂(x), v⟩ / M`
    /// over the probe points of square `k`.
    pub min_projection: Vec<Rational>,
    /// `(1 − τ) ‖v‖² / 2MN`.
    pub threshold: Rational,
}

impl RegularSquareResult {
    pub fn is_regular(&self, k: i64) -> bool {
        k >= 1 && self.min_projection.get(k as usize - 1).is_some_and(|m| *m >= self.threshold)
    }
}

/// Scans `k = 1, …, 2N−1` for a square on whose probe points the increment
/// over one square width, projected on `v`, is at least `(1 − τ)‖v‖²/2MN`.
/// `f̂` must be defined on the whole rectangle.
pub fn find_regular_square(fhat: &impl LatticeMap, grid: &GridSpec, tau: &Rational) -> Result<RegularSquareResult> {
    let v = baseline(fhat, grid)?;
    let v_sq = dot(v, v);
    let shift = Point::new(grid.m, 0);
    let mut min_projection = Vec::with_capacity(grid.squares() as usize - 1);
    for k in 1..grid.squares() {
        let mut least: Option<i128> = None;
        for j in 0..=grid.p {
            for i in 0..=grid.p {
                let x = grid.point(k, i, j);
                let proj = dot(diff(image(fhat, x + shift)?, image(fhat, x)?), v);
                least = Some(least.map_or(proj, |m| m.min(proj)));
            }
        }
        let least = least.expect("every square has probe points");
        min_projection.push(Rational::new(least.into(), (4 * grid.m as i128).into()));
    }
    let threshold = (int(1) - tau) * Rational::new((v_sq).into(), (4 * grid.length() as i128).into());
    let k_star = min_projection.iter().position(|m| *m >= threshold).map(|i| i as i64 + 1);
    Ok(RegularSquareResult { k_star, min_projection, threshold })
}

/// Largest `‖(f̂(x + (M,0)) − f̂(x))/M − v/2MN‖` over the probe points of a
/// square, kept squared.
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub max_sq: Rational,
    pub at: Point,
}

impl Deviation {
    pub fn value(&self) -> f64 {
        crate::rational::to_f64(&self.max_sq).sqrt()
    }

    pub fn within(&self, eps: &Rational) -> bool {
        self.max_sq <= eps * eps
    }
}

pub fn coarse_derivative_deviation(fhat: &impl LatticeMap, grid: &GridSpec, k_star: i64) -> Result<Deviation> {
    grid.check_square(k_star, grid.squares() - 1)?;
    let v = baseline(fhat, grid)?;
    let shift = Point::new(grid.m, 0);
    let two_n = grid.squares() as i128;
    let mut best: Option<(i128, Point)> = None;
    for j in 0..=grid.p {
        for i in 0..=grid.p {
            let x = grid.point(k_star, i, j);
            let d = diff(image(fhat, x + shift)?, image(fhat, x)?);
            let e = (two_n * d.0 - v.0, two_n * d.1 - v.1);
            let e_sq = dot(e, e);
            if best.is_none_or(|(b, _)| e_sq > b) {
                best = Some((e_sq, x));
            }
        }
    }
    let (num, at) = best.expect("square has probe points");
    let len = grid.length() as i128;
    Ok(Deviation { max_sq: Rational::new(num.into(), (4 * len * len).into()), at })
}

/// `τ = ε² / 9L²`, at which the deviation bound equals `ε`.
pub fn tau_for_epsilon(eps: &Rational, l: &Rational) -> Rational {
    eps * eps / (int(9) * l * l)
}

/// Points of `domain` in the lower-left corner `[(k−1)M, kM − 1] × [0, M − 1]`.
pub fn corner_count(domain: impl Fn(Point) -> bool, grid: &GridSpec, k: i64) -> Result<u64> {
    grid.check_square(k, grid.squares())?;
    let x0 = (k - 1) * grid.m;
    let mut count = 0;
    for y in 0..grid.m {
        for x in x0..x0 + grid.m {
            count += u64::from(domain(Point::new(x, y)));
        }
    }
    Ok(count)
}

/// Corner counts of squares `k` and `k + 1` together with the densities
/// they are claimed to separate.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGap {
    pub k: i64,
    pub counts: (u64, u64),
    pub d: Rational,
    pub d_prime: Rational,
}

/// First probe step, in square-then-row order, whose expansion is at least
/// `(1 + λ)` times the mean slope, given a density gap between two
/// consecutive squares. `None` means `f` breaks one of the hypotheses that
/// force such a step.
pub fn expanding_pair_search(
    f: &impl LatticeMap,
    grid: &GridSpec,
    lambda: &Rational,
    gap: &DensityGap,
) -> Result<Option<ProbeStep>> {
    grid.check_square(gap.k, grid.squares() - 1)?;
    let area = int(grid.m * grid.m);
    let dense = |c: u64| Rational::from_integer(c.into()) >= &gap.d * &area;
    let sparse = |c: u64| Rational::from_integer(c.into()) <= &gap.d_prime * &area;
    let (a, b) = gap.counts;
    if !((dense(a) && sparse(b)) || (sparse(a) && dense(b))) {
        return Err(Error::Precondition(format!(
            "squares {} and {} hold {a} and {b} corner points; no density gap between {} and {} at M = {}",
            gap.k,
            gap.k + 1,
            crate::rational::show(&gap.d),
            crate::rational::show(&gap.d_prime),
            grid.m
        )));
    }
    let bound = one_plus_sq(lambda);
    Ok(probe_steps(f, grid)?.into_iter().find(|s| s.stretch_sq >= bound))
}
