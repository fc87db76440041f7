use num_traits::ToPrimitive;

use crate::hierarchy::{Arrangement, HierarchySpec, LevelSpec};
use crate::lattice::{Patch, Point};
use crate::matrix::TransitionMatrix;
use crate::{Error, Result};

/// First-level patches on `[0, p1−1]²`. Patch `i0` is the full square
/// without its top-right cell; every other patch `k` holds the even
/// columns, the bottom row and the marker cell `(1, k)`, with `k` 1-based.
pub fn build_initial_patches_v(p1: usize, k1: usize, i0: usize) -> Result<Vec<Patch>> {
    if p1 < 4 || p1 % 2 == 1 {
        return Err(Error::OutOfRange(format!("p1 must be even and at least 4, got {p1}")));
    }
    if k1 < 3 || i0 >= k1 {
        return Err(Error::OutOfRange(format!("need k1 >= 3 and i0 < k1, got k1 = {k1}, i0 = {i0}")));
    }
    if (0..k1).any(|k| k != i0 && k + 1 >= p1) {
        return Err(Error::OutOfRange(format!("k1 too large for p1: marker rows run past {}", p1 - 1)));
    }
    let origin = Point::new(0, 0);
    Ok((0..k1)
        .map(|k| {
            if k == i0 {
                Patch::from_fn(p1, p1, origin, |x, y| !(x == p1 - 1 && y == p1 - 1))
            } else {
                Patch::from_fn(p1, p1, origin, |x, y| x % 2 == 0 || y == 0 || (x == 1 && y == k + 1))
            }
        })
        .collect())
}

/// Which of the two separating patches fills a cell of the bottom stripe.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StripeRule {
    /// `j_n` where `⌊s·p_{n+1}/r_n⌋` is even, `s ∈ [−l−1, l]` the horizontal
    /// grid offset.
    #[default]
    Literal,
    /// Alternating runs of `r_n` columns, starting with `j_n` at the left edge.
    FigureBlocks,
}

impl StripeRule {
    /// True when column `c` (0-based from the left) of the stripe holds `j_n`.
    pub fn primary(self, c: usize, l: usize, r: usize, p_next: u128) -> bool {
        match self {
            StripeRule::Literal => {
                let s = c as i128 - (l as i128 + 1);
                (s * p_next as i128).div_euclid(r as i128) % 2 == 0
            }
            StripeRule::FigureBlocks => (c / r).is_multiple_of(2),
        }
    }
}

/// Parameters of one level step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelStep {
    pub l: usize,
    pub r: usize,
    /// Patch ids placed in the stripe.
    pub j: usize,
    pub j_prime: usize,
    pub rule: StripeRule,
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a larger successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Grids for the next level, one per column of `a`.
///
/// Every grid is `2(l+1)` cells wide, holds patch 0 in its top-right cell,
/// fills its bottom `r` rows with `j` and `j'` as the stripe rule says, and
/// fills the remaining cells so that patch `i` occurs exactly `a(i, k)`
/// times. The free cells take the `k`-th lexicographic rearrangement of the
/// remaining ids, laid out from the top-right free cell backwards, so grids
/// with equal columns still differ in their lowest free cells.
pub fn level_arrangements(a: &TransitionMatrix, p_n: usize, step: LevelStep) -> Result<Vec<Arrangement>> {
    let g = 2 * (step.l + 1);
    let ids = a.rows();
    if step.l == 0 || step.r == 0 || step.r >= g {
        return Err(Error::OutOfRange(format!("need l >= 1 and 1 <= r < {g}, got l = {}, r = {}", step.l, step.r)));
    }
    if step.j == 0 || step.j_prime == 0 || step.j >= ids || step.j_prime >= ids || step.j == step.j_prime {
        return Err(Error::OutOfRange("stripe ids must be distinct and different from patch 1".into()));
    }
    let p_next = (g * p_n) as u128;
    let primary: Vec<bool> = (0..g).map(|c| step.rule.primary(c, step.l, step.r, p_next)).collect();
    let n_primary = primary.iter().filter(|&&b| b).count() * step.r;
    let n_secondary = g * step.r - n_primary;
    let mut out = Vec::with_capacity(a.cols());
    for k in 0..a.cols() {
        let mut need: Vec<usize> = (0..ids)
            .map(|i| a.get(i, k).to_integer().to_usize().ok_or(Error::Overflow("matrix entry")))
            .collect::<Result<_>>()?;
        if need.iter().sum::<usize>() != g * g {
            return Err(Error::Precondition(format!("column {} of the matrix does not sum to {}", k + 1, g * g)));
        }
        if need[0] != 1 {
            return Err(Error::Precondition(format!("column {} must hold patch 1 exactly once", k + 1)));
        }
        need[0] = 0;
        for (id, used) in [(step.j, n_primary), (step.j_prime, n_secondary)] {
            if need[id] < used {
                return Err(Error::Infeasible(format!(
                    "column {}: the stripe needs {used} copies of patch {} but the matrix allows {}",
                    k + 1,
                    id + 1,
                    need[id]
                )));
            }
            need[id] -= used;
        }
        let mut seq: Vec<usize> = need.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c)).collect();
        for _ in 0..k {
            if !next_permutation(&mut seq) {
                return Err(Error::Infeasible(format!("too few rearrangements to make {} distinct patches", a.cols())));
            }
        }
        let mut grid = Arrangement::uniform(g, g, 0);
        let mut free = Vec::with_capacity(seq.len());
        for row in 0..g {
            for c in 0..g {
                if row < step.r {
                    grid.set(row, c, if primary[c] { step.j } else { step.j_prime });
                } else if !(row == g - 1 && c == g - 1) {
                    free.push((row, c));
                }
            }
        }
        for (&(row, c), &id) in free.iter().rev().zip(&seq) {
            grid.set(row, c, id);
        }
        out.push(grid);
    }
    Ok(out)
}

/// Adds one level built by [`level_arrangements`] on top of `spec`.
pub fn build_level_v(spec: &mut HierarchySpec, a: &TransitionMatrix, step: LevelStep) -> Result<()> {
    let top = spec.depth();
    if a.rows() != spec.patch_count(top)? {
        return Err(Error::Precondition(format!(
            "matrix has {} rows but level {top} has {} patches",
            a.rows(),
            spec.patch_count(top)?
        )));
    }
    let p_n = spec.dims(top)?.0;
    let arrangements = level_arrangements(a, p_n, step)?;
    spec.push_level(LevelSpec { arrangements, anchor: (step.l + 1, step.l + 1), anchored: false })
}
