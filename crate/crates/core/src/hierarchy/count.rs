use std::collections::HashMap;

use super::HierarchySpec;
use crate::lattice::Patch;
use crate::matrix::TransitionMatrix;
use crate::rational::Rational;
use crate::{Error, Result};

/// How occurrences of a needle are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OccurrenceMode {
    /// Only at the cells of the arrangement grid whose level matches the needle size.
    BlockAligned,
    /// At every translate lying inside the support.
    Sliding,
}

fn add(a: u128, b: u128) -> Result<u128> {
    a.checked_add(b).ok_or(Error::Overflow("occurrence count"))
}

/// Exact sliding counts of one needle, memoized per `(level, id)` and per
/// tuple of adjacent child ids.
///
/// A translate is attributed to the child cell holding its lower-left cell.
/// Translates that leave that cell cross into the right neighbour, the upper
/// neighbour or both; those are counted on thin bands cut from the children,
/// and the band counts depend only on the neighbouring ids.
pub struct SlidingCounter<'a> {
    spec: &'a HierarchySpec,
    needle: &'a Patch,
    whole: HashMap<(usize, usize), u128>,
    horizontal: HashMap<(usize, usize, usize), u128>,
    vertical: HashMap<(usize, usize, usize), u128>,
    corner: HashMap<(usize, [usize; 4]), u128>,
}

impl<'a> SlidingCounter<'a> {
    pub fn new(spec: &'a HierarchySpec, needle: &'a Patch) -> Self {
        SlidingCounter {
            spec,
            needle,
            whole: HashMap::new(),
            horizontal: HashMap::new(),
            vertical: HashMap::new(),
            corner: HashMap::new(),
        }
    }

    pub fn count(&mut self, n: usize, id: usize) -> Result<u128> {
        self.spec.check_id(n, id)?;
        if let Some(&c) = self.whole.get(&(n, id)) {
            return Ok(c);
        }
        let (nw, nh) = (self.needle.width(), self.needle.height());
        let (w, h) = self.spec.dims(n)?;
        let value = if nw > w || nh > h {
            0
        } else if n == 1 || {
            let (cw, ch) = self.spec.dims(n - 1)?;
            nw > cw || nh > ch
        } {
            self.spec.materialize(n, id)?.count_translates(self.needle) as u128
        } else {
            let a = self.spec.arrangement(n, id)?.clone();
            let mut total = 0u128;
            for r in 0..a.rows() {
                for c in 0..a.cols() {
                    let here = a.get(r, c);
                    total = add(total, self.count(n - 1, here)?)?;
                    let right = (c + 1 < a.cols()).then(|| a.get(r, c + 1));
                    let up = (r + 1 < a.rows()).then(|| a.get(r + 1, c));
                    if let Some(right) = right.filter(|_| nw > 1) {
                        total = add(total, self.horizontal(n - 1, here, right)?)?;
                    }
                    if let Some(up) = up.filter(|_| nh > 1) {
                        total = add(total, self.vertical(n - 1, here, up)?)?;
                    }
                    if let (Some(right), Some(up)) = (right, up) {
                        if nw > 1 && nh > 1 {
                            let diag = a.get(r + 1, c + 1);
                            total = add(total, self.corner(n - 1, [here, right, up, diag])?)?;
                        }
                    }
                }
            }
            total
        };
        self.whole.insert((n, id), value);
        Ok(value)
    }

    /// Translates starting in `left` within `nw − 1` columns of its right
    /// edge and staying below its top by the needle height.
    fn horizontal(&mut self, n: usize, left: usize, right: usize) -> Result<u128> {
        if let Some(&c) = self.horizontal.get(&(n, left, right)) {
            return Ok(c);
        }
        let (nw, nh) = (self.needle.width(), self.needle.height());
        let (cw, ch) = self.spec.dims(n)?;
        let k = nw - 1;
        let mut band = Patch::empty(2 * k, ch, Default::default());
        band.blit(&self.spec.extract(n, left, cw - k, 0, k, ch)?, 0, 0, k, ch, 0, 0);
        band.blit(&self.spec.extract(n, right, 0, 0, k, ch)?, 0, 0, k, ch, k, 0);
        let c = band.count_translates_at(self.needle, 0..k, 0..ch - nh + 1) as u128;
        self.horizontal.insert((n, left, right), c);
        Ok(c)
    }

    fn vertical(&mut self, n: usize, low: usize, high: usize) -> Result<u128> {
        if let Some(&c) = self.vertical.get(&(n, low, high)) {
            return Ok(c);
        }
        let (nw, nh) = (self.needle.width(), self.needle.height());
        let (cw, ch) = self.spec.dims(n)?;
        let k = nh - 1;
        let mut band = Patch::empty(cw, 2 * k, Default::default());
        band.blit(&self.spec.extract(n, low, 0, ch - k, cw, k)?, 0, 0, cw, k, 0, 0);
        band.blit(&self.spec.extract(n, high, 0, 0, cw, k)?, 0, 0, cw, k, 0, k);
        let c = band.count_translates_at(self.needle, 0..cw - nw + 1, 0..k) as u128;
        self.vertical.insert((n, low, high), c);
        Ok(c)
    }

    /// Ids are lower-left, lower-right, upper-left, upper-right.
    fn corner(&mut self, n: usize, ids: [usize; 4]) -> Result<u128> {
        if let Some(&c) = self.corner.get(&(n, ids)) {
            return Ok(c);
        }
        let (kx, ky) = (self.needle.width() - 1, self.needle.height() - 1);
        let (cw, ch) = self.spec.dims(n)?;
        let mut band = Patch::empty(2 * kx, 2 * ky, Default::default());
        let pieces = [
            (ids[0], cw - kx, ch - ky, 0, 0),
            (ids[1], 0, ch - ky, kx, 0),
            (ids[2], cw - kx, 0, 0, ky),
            (ids[3], 0, 0, kx, ky),
        ];
        for (id, sx, sy, dx, dy) in pieces {
            band.blit(&self.spec.extract(n, id, sx, sy, kx, ky)?, 0, 0, kx, ky, dx, dy);
        }
        let c = band.count_translates_at(self.needle, 0..kx, 0..ky) as u128;
        self.corner.insert((n, ids), c);
        Ok(c)
    }
}

/// Block counts of level-`m` ids inside higher patches, memoized.
pub struct BlockCounter<'a> {
    spec: &'a HierarchySpec,
    m: usize,
    memo: HashMap<(usize, usize), Vec<u128>>,
}

impl<'a> BlockCounter<'a> {
    pub fn new(spec: &'a HierarchySpec, m: usize) -> Result<Self> {
        spec.check_level(m)?;
        Ok(BlockCounter { spec, m, memo: HashMap::new() })
    }

    /// Entry `i` is the number of grid cells of level `m` holding patch `i`
    /// inside patch `(n, id)`.
    pub fn counts(&mut self, n: usize, id: usize) -> Result<Vec<u128>> {
        self.spec.check_id(n, id)?;
        if n < self.m {
            return Err(Error::Precondition(format!("level {n} lies below level {}", self.m)));
        }
        if let Some(v) = self.memo.get(&(n, id)) {
            return Ok(v.clone());
        }
        let k = self.spec.patch_count(self.m)?;
        let mut out = vec![0u128; k];
        if n == self.m {
            out[id] = 1;
        } else {
            let a = self.spec.arrangement(n, id)?.clone();
            let mut by_child: HashMap<usize, u128> = HashMap::new();
            for &c in a.cells() {
                *by_child.entry(c).or_default() += 1;
            }
            for (child, times) in by_child {
                for (o, v) in out.iter_mut().zip(self.counts(n - 1, child)?) {
                    let add_v = v.checked_mul(times).ok_or(Error::Overflow("block count"))?;
                    *o = add(*o, add_v)?;
                }
            }
        }
        self.memo.insert((n, id), out.clone());
        Ok(out)
    }
}

impl HierarchySpec {
    /// Occurrences of `needle` in patch `(n, id)`.
    ///
    /// Sliding counts never expand more than the lowest level whose children
    /// are smaller than the needle. Block-aligned counts require the needle
    /// to have the size of some level `m ≤ n` and count the grid cells of
    /// that level whose patch equals the needle cell for cell.
    pub fn count_occurrences(&self, needle: &Patch, n: usize, id: usize, mode: OccurrenceMode) -> Result<u128> {
        self.check_id(n, id)?;
        let (w, h) = self.dims(n)?;
        if needle.width() > w || needle.height() > h {
            return Err(Error::NeedleTooLarge {
                needle_w: needle.width(),
                needle_h: needle.height(),
                target_w: w,
                target_h: h,
            });
        }
        match mode {
            OccurrenceMode::Sliding => SlidingCounter::new(self, needle).count(n, id),
            OccurrenceMode::BlockAligned => {
                let m = (1..=n)
                    .rev()
                    .find(|&m| self.dims(m).map(|d| d == (needle.width(), needle.height())).unwrap_or(false))
                    .ok_or(Error::NeedleNotALevel(needle.width()))?;
                let matching = self.matching_ids(needle, m)?;
                let counts = BlockCounter::new(self, m)?.counts(n, id)?;
                matching.iter().try_fold(0u128, |acc, &i| add(acc, counts[i]))
            }
        }
    }

    /// Ids of level `m` whose patch equals `needle` cell for cell.
    pub fn matching_ids(&self, needle: &Patch, m: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..self.patch_count(m)? {
            if self.materialize(m, i)?.same_cells(needle) {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Exact block densities: entry `(i, j)` is the share of level-`m` grid
    /// cells of patch `(n, j)` holding patch `i`.
    pub fn block_frequency_matrix(&self, m: usize, n: usize) -> Result<TransitionMatrix> {
        if m >= n {
            return Err(Error::Precondition(format!("need m < n, got m = {m}, n = {n}")));
        }
        self.check_level(n)?;
        let total = self.area(n)? / self.area(m)?;
        let mut counter = BlockCounter::new(self, m)?;
        let (km, kn) = (self.patch_count(m)?, self.patch_count(n)?);
        let mut out = TransitionMatrix::zeros(km, kn);
        for j in 0..kn {
            for (i, c) in counter.counts(n, j)?.into_iter().enumerate() {
                out.set(i, j, Rational::new(c.into(), total.into()));
            }
        }
        Ok(out)
    }

    /// Integer block counts between consecutive levels: entry `(i, j)` is the
    /// number of cells of patch `(n + 1, j)` holding patch `(n, i)`.
    pub fn count_matrix(&self, n: usize) -> Result<TransitionMatrix> {
        let level = self.level(n + 1)?;
        let k = self.patch_count(n)?;
        let mut out = TransitionMatrix::zeros(k, level.arrangements.len());
        for (j, a) in level.arrangements.iter().enumerate() {
            for i in 0..k {
                out.set(i, j, Rational::from_integer((a.count(i) as i64).into()));
            }
        }
        Ok(out)
    }
}
