use crate::lattice::{Point, Window};
use crate::rational::Rational;
use crate::{Error, Result};

/// Largest point set accepted by [`brute_force_min_bilip`].
pub const ORACLE_MAX_POINTS: usize = 8;

/// Optimal injection found by exhaustive search.
#[derive(Clone, Debug, PartialEq)]
pub struct BilipOptimum {
    /// Square of the least bi-Lipschitz constant.
    pub l_star_sq: Rational,
    /// Image of each input point, in input order.
    pub images: Vec<Point>,
}

impl BilipOptimum {
    pub fn l_star(&self) -> f64 {
        crate::rational::to_f64(&self.l_star_sq).sqrt()
    }
}

/// `max(e, 1/e)` for a squared expansion `num/den`, as a fraction.
fn distortion_sq(num: i128, den: i128) -> (i128, i128) {
    if num >= den {
        (num, den)
    } else {
        (den, num)
    }
}

fn less(a: (i128, i128), b: (i128, i128)) -> bool {
    a.0 * b.1 < b.0 * a.1
}

struct Search<'a> {
    points: &'a [Point],
    targets: Vec<Point>,
    used: Vec<bool>,
    chosen: Vec<usize>,
    best: Option<((i128, i128), Vec<usize>)>,
}

impl Search<'_> {
    fn run(&mut self, worst: (i128, i128)) {
        let depth = self.chosen.len();
        if depth == self.points.len() {
            if self.best.as_ref().is_none_or(|(b, _)| less(worst, *b)) {
                self.best = Some((worst, self.chosen.clone()));
            }
            return;
        }
        let p = self.points[depth];
        for t in 0..self.targets.len() {
            if self.used[t] {
                continue;
            }
            let q = self.targets[t];
            let mut w = worst;
            for (prev, &ti) in self.chosen.iter().enumerate() {
                let num = q.dist_sq(self.targets[ti]) as i128;
                let den = p.dist_sq(self.points[prev]) as i128;
                let d = distortion_sq(num, den);
                if less(w, d) {
                    w = d;
                }
            }
            if let Some((b, _)) = &self.best {
                if !less(w, *b) {
                    continue;
                }
            }
            self.used[t] = true;
            self.chosen.push(t);
            self.run(w);
            self.chosen.pop();
            self.used[t] = false;
        }
    }
}

/// Least bi-Lipschitz constant over all injections of `points` into the
/// lattice points of `target`, by exhaustive search with pruning. Among
/// optimal injections the lexicographically least image list is returned,
/// targets being ordered by `(x, y)`.
pub fn brute_force_min_bilip(points: &[Point], target: Window) -> Result<BilipOptimum> {
    if points.len() > ORACLE_MAX_POINTS {
        return Err(Error::OutOfRange(format!(
            "oracle takes at most {ORACLE_MAX_POINTS} points, got {}",
            points.len()
        )));
    }
    if points.is_empty() {
        return Err(Error::EmptyPairs);
    }
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].contains(a) {
            return Err(Error::DegeneratePair { x: a.x, y: a.y });
        }
    }
    if target.len() < points.len() {
        return Err(Error::BoxTooSmall { points: points.len(), targets: target.len() });
    }
    let mut targets: Vec<Point> = target.points().collect();
    targets.sort();
    let mut s = Search {
        points,
        used: vec![false; targets.len()],
        targets,
        chosen: Vec::with_capacity(points.len()),
        best: None,
    };
    s.run((1, 1));
    let ((num, den), idx) = s.best.expect("box holds enough targets");
    Ok(BilipOptimum {
        l_star_sq: Rational::new(num.into(), den.into()),
        images: idx.into_iter().map(|t| s.targets[t]).collect(),
    })
}
