//! Nested patch hierarchies described by arrangement grids.
//!
//! Level 1 holds concrete patches. A patch of level `n ≥ 2` is a grid of
//! level-`(n−1)` patch ids; its support is the disjoint union of the child
//! supports. Patch ids are 0-based in this API and 1-based in text formats.

mod count;
mod dhs;
mod repetitivity;

pub use count::{BlockCounter, OccurrenceMode, SlidingCounter};
pub use repetitivity::{estimate_repetitivity, naive_repetitivity_holds, Repetitivity};

use std::fmt;

use crate::lattice::{Patch, Point};
use crate::{Error, Result};

/// Environment variable overriding the materialization cap (in cells).
pub const CAP_ENV: &str = "DELONE_MEMORY_CAP";

/// Default materialization cap: 2^28 cells.
pub const DEFAULT_CAP: u128 = 1 << 28;

pub fn default_cap() -> u128 {
    std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
}

/// A `rows × cols` grid of child ids, row 0 at the bottom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrangement {
    rows: usize,
    cols: usize,
    cells: Vec<usize>,
}

impl Arrangement {
    pub fn new(rows: usize, cols: usize, cells: Vec<usize>) -> Result<Self> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(Error::InvalidHierarchy(format!(
                "arrangement {rows}x{cols} needs {} cells, got {}",
                rows * cols,
                cells.len()
            )));
        }
        Ok(Arrangement { rows, cols, cells })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> usize) -> Self {
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                cells.push(f(r, c));
            }
        }
        Arrangement { rows, cols, cells }
    }

    pub fn uniform(rows: usize, cols: usize, id: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| id)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, id: usize) {
        self.cells[row * self.cols + col] = id;
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn count(&self, id: usize) -> usize {
        self.cells.iter().filter(|&&c| c == id).count()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.cells.contains(&id)
    }
}

/// One level above the base: its arrangements, the cell that the previous
/// frame occupies inside the new frame, and whether patch 0 must reproduce
/// the previous patch 0 in that cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    pub arrangements: Vec<Arrangement>,
    pub anchor: (usize, usize),
    pub anchored: bool,
}

/// The square (or rectangle) `F_n` of a level, in absolute coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frame {
    pub level: usize,
    pub origin: Point,
    pub width: usize,
    pub height: usize,
}

impl Frame {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.origin.x
            && p.y >= self.origin.y
            && p.x < self.origin.x + self.width as i64
            && p.y < self.origin.y + self.height as i64
    }

    pub fn includes(&self, other: &Frame) -> bool {
        other.origin.x >= self.origin.x
            && other.origin.y >= self.origin.y
            && other.origin.x + other.width as i64 <= self.origin.x + self.width as i64
            && other.origin.y + other.height as i64 <= self.origin.y + self.height as i64
    }
}

#[derive(Clone, Debug)]
pub struct HierarchySpec {
    base: Vec<Patch>,
    levels: Vec<LevelSpec>,
    cap: u128,
}

impl HierarchySpec {
    /// Starts a hierarchy from its level-1 patches, which must share a support size.
    pub fn new(base: Vec<Patch>) -> Result<Self> {
        let first = base.first().ok_or_else(|| Error::InvalidHierarchy("no level-1 patches".into()))?;
        let (w, h) = (first.width(), first.height());
        if let Some(i) = base.iter().position(|p| p.width() != w || p.height() != h) {
            return Err(Error::InvalidHierarchy(format!("level-1 patch {} has a different support", i + 1)));
        }
        Ok(HierarchySpec { base, levels: Vec::new(), cap: default_cap() })
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    /// Appends a level. Grids must all have the same shape and the anchor
    /// must lie inside them; child ids are checked lazily.
    pub fn push_level(&mut self, level: LevelSpec) -> Result<()> {
        let first = level
            .arrangements
            .first()
            .ok_or_else(|| Error::InvalidHierarchy(format!("level {} has no patches", self.depth() + 1)))?;
        let (rows, cols) = (first.rows, first.cols);
        if level.arrangements.iter().any(|a| a.rows != rows || a.cols != cols) {
            return Err(Error::InvalidHierarchy(format!(
                "level {} mixes arrangement shapes",
                self.depth() + 1
            )));
        }
        if level.anchor.0 >= rows || level.anchor.1 >= cols {
            return Err(Error::InvalidHierarchy(format!(
                "anchor {:?} outside the {rows}x{cols} grid at level {}",
                level.anchor,
                self.depth() + 1
            )));
        }
        self.levels.push(level);
        Ok(())
    }

    /// Number of levels, counting the base as level 1.
    pub fn depth(&self) -> usize {
        1 + self.levels.len()
    }

    pub fn base(&self) -> &[Patch] {
        &self.base
    }

    /// Level `n ≥ 2`.
    pub fn level(&self, n: usize) -> Result<&LevelSpec> {
        self.check_level(n)?;
        if n == 1 {
            return Err(Error::Precondition("level 1 is given by patches, not arrangements".into()));
        }
        Ok(&self.levels[n - 2])
    }

    pub fn levels(&self) -> &[LevelSpec] {
        &self.levels
    }

    /// Number of patches at level `n`.
    pub fn patch_count(&self, n: usize) -> Result<usize> {
        self.check_level(n)?;
        Ok(if n == 1 { self.base.len() } else { self.levels[n - 2].arrangements.len() })
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.depth() {
            return Err(Error::NoSuchLevel { level: n, depth: self.depth() });
        }
        Ok(())
    }

    pub(crate) fn check_id(&self, n: usize, id: usize) -> Result<()> {
        if id >= self.patch_count(n)? {
            return Err(Error::NoSuchPatch { level: n, id: id + 1 });
        }
        Ok(())
    }

    pub fn arrangement(&self, n: usize, id: usize) -> Result<&Arrangement> {
        let level = self.level(n)?;
        level.arrangements.get(id).ok_or(Error::NoSuchPatch { level: n, id: id + 1 })
    }

    /// Width and height of every level-`n` patch.
    pub fn dims(&self, n: usize) -> Result<(usize, usize)> {
        self.check_level(n)?;
        let (mut w, mut h) = (self.base[0].width(), self.base[0].height());
        for l in &self.levels[..n - 1] {
            let a = &l.arrangements[0];
            w = w.checked_mul(a.cols).ok_or(Error::Overflow("frame width"))?;
            h = h.checked_mul(a.rows).ok_or(Error::Overflow("frame height"))?;
        }
        Ok((w, h))
    }

    /// Cells in one level-`n` patch, without overflow.
    pub fn area(&self, n: usize) -> Result<u128> {
        self.check_level(n)?;
        let mut a = (self.base[0].width() * self.base[0].height()) as u128;
        for l in &self.levels[..n - 1] {
            let g = &l.arrangements[0];
            a = a.checked_mul((g.rows * g.cols) as u128).ok_or(Error::Overflow("frame area"))?;
        }
        Ok(a)
    }

    pub fn frame(&self, n: usize) -> Result<Frame> {
        let (width, height) = self.dims(n)?;
        let mut origin = self.base[0].origin();
        for (i, l) in self.levels[..n - 1].iter().enumerate() {
            let (w, h) = self.dims(i + 1)?;
            origin = Point::new(origin.x - (l.anchor.1 * w) as i64, origin.y - (l.anchor.0 * h) as i64);
        }
        Ok(Frame { level: n, origin, width, height })
    }

    /// Offsets of the level-`(n−1)` frames tiling the level-`n` frame.
    pub fn placements(&self, n: usize) -> Result<Vec<Point>> {
        let a = &self.level(n)?.arrangements[0];
        let frame = self.frame(n)?;
        let (w, h) = self.dims(n - 1)?;
        let mut out = Vec::with_capacity(a.rows * a.cols);
        for r in 0..a.rows {
            for c in 0..a.cols {
                out.push(Point::new(frame.origin.x + (c * w) as i64, frame.origin.y + (r * h) as i64));
            }
        }
        Ok(out)
    }

    fn check_cap(&self, cells: u128) -> Result<()> {
        if cells > self.cap {
            return Err(Error::CapExceeded { required: cells, cap: self.cap });
        }
        Ok(())
    }

    /// Expands a patch to its full bitset, placed at its level's frame.
    pub fn materialize(&self, n: usize, id: usize) -> Result<Patch> {
        self.check_id(n, id)?;
        self.check_cap(self.area(n)?)?;
        let (w, h) = self.dims(n)?;
        let mut p = self.extract(n, id, 0, 0, w, h)?;
        p = p.with_origin(self.frame(n)?.origin);
        if n == 1 && self.base[id].is_full_boundary_flagged() {
            p = p.flag_full_boundary()?;
        }
        Ok(p)
    }

    /// The `w×h` rectangle at local `(x0, y0)` of patch `(n, id)`, built
    /// without expanding the rest of the patch.
    pub fn extract(&self, n: usize, id: usize, x0: usize, y0: usize, w: usize, h: usize) -> Result<Patch> {
        self.check_id(n, id)?;
        self.check_cap((w as u128) * (h as u128))?;
        let (pw, ph) = self.dims(n)?;
        if x0 + w > pw || y0 + h > ph || w == 0 || h == 0 {
            return Err(Error::Precondition(format!(
                "rectangle {w}x{h} at ({x0}, {y0}) outside a {pw}x{ph} patch"
            )));
        }
        let frame = self.frame(n)?;
        let mut out = Patch::empty(w, h, Point::new(frame.origin.x + x0 as i64, frame.origin.y + y0 as i64));
        self.fill(n, id, x0, y0, w, h, &mut out, 0, 0)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(&self, n: usize, id: usize, x0: usize, y0: usize, w: usize, h: usize, out: &mut Patch, dx: usize, dy: usize) -> Result<()> {
        if n == 1 {
            let p = self.base.get(id).ok_or(Error::NoSuchPatch { level: 1, id: id + 1 })?;
            out.blit(p, x0, y0, w, h, dx, dy);
            return Ok(());
        }
        let a = self.arrangement(n, id)?;
        let (cw, ch) = self.dims(n - 1)?;
        let (c0, c1) = (x0 / cw, (x0 + w - 1) / cw);
        let (r0, r1) = (y0 / ch, (y0 + h - 1) / ch);
        for r in r0..=r1 {
            let ylo = (r * ch).max(y0);
            let yhi = ((r + 1) * ch).min(y0 + h);
            for c in c0..=c1 {
                let xlo = (c * cw).max(x0);
                let xhi = ((c + 1) * cw).min(x0 + w);
                let child = a.get(r, c);
                self.check_id(n - 1, child)?;
                self.fill(n - 1, child, xlo - c * cw, ylo - r * ch, xhi - xlo, yhi - ylo, out, dx + xlo - x0, dy + ylo - y0)?;
            }
        }
        Ok(())
    }

    /// Number of level-1 blocks of each base id inside `(n, id)`.
    pub fn base_block_counts(&self, n: usize, id: usize) -> Result<Vec<u128>> {
        BlockCounter::new(self, 1)?.counts(n, id)
    }

    /// Occupied cells of `(n, id)`, computed from block counts.
    pub fn occupied(&self, n: usize, id: usize) -> Result<u128> {
        let counts = self.base_block_counts(n, id)?;
        let mut total: u128 = 0;
        for (c, p) in counts.iter().zip(&self.base) {
            let add = c.checked_mul(p.count_ones() as u128).ok_or(Error::Overflow("occupied cells"))?;
            total = total.checked_add(add).ok_or(Error::Overflow("occupied cells"))?;
        }
        Ok(total)
    }

    /// Checks the nesting scheme level by level.
    pub fn validate_scheme(&self) -> SchemeReport {
        let mut checks = Vec::new();
        checks.push(self.check_f1());
        checks.push(self.check_f2());
        checks.push(self.check_f3());
        checks.push(self.check_f4());
        checks.push(self.check_f5());
        checks.push(self.check_f6());
        SchemeReport { checks }
    }

    fn check_f1(&self) -> SchemeCheck {
        for n in 1..=self.depth() {
            let f = match self.frame(n) {
                Ok(f) => f,
                Err(e) => return SchemeCheck::fail("F1", e.to_string()),
            };
            if !f.contains(Point::new(0, 0)) {
                return SchemeCheck::fail("F1", format!("frame of level {n} at {} misses the origin", f.origin));
            }
            if n > 1 {
                let prev = self.frame(n - 1).expect("lower frame");
                if !f.includes(&prev) {
                    return SchemeCheck::fail("F1", format!("frame of level {} is not inside level {n}", n - 1));
                }
            }
        }
        SchemeCheck::pass("F1")
    }

    /// Finite stand-in for exhaustion of the plane: every level must extend
    /// the previous frame on all four sides.
    fn check_f2(&self) -> SchemeCheck {
        for (i, l) in self.levels.iter().enumerate() {
            let a = &l.arrangements[0];
            let (r, c) = l.anchor;
            if r == 0 || c == 0 || r + 1 == a.rows || c + 1 == a.cols {
                return SchemeCheck::fail(
                    "F2",
                    format!("level {} does not extend level {} on every side (anchor {r},{c})", i + 2, i + 1),
                );
            }
        }
        SchemeCheck::pass("F2")
    }

    fn check_f3(&self) -> SchemeCheck {
        for n in 2..=self.depth() {
            let (w, h) = match (self.dims(n), self.dims(n - 1)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return SchemeCheck::fail("F3", e.to_string()),
            };
            let a = &self.levels[n - 2].arrangements[0];
            if w.0 != h.0 * a.cols || w.1 != h.1 * a.rows {
                return SchemeCheck::fail("F3", format!("level {n} frame is not tiled by level {} frames", n - 1));
            }
        }
        SchemeCheck::pass("F3")
    }

    fn check_f4(&self) -> SchemeCheck {
        for (i, l) in self.levels.iter().enumerate() {
            let below = self.patch_count(i + 1).expect("level exists");
            for (k, a) in l.arrangements.iter().enumerate() {
                if let Some(pos) = a.cells.iter().position(|&c| c >= below) {
                    return SchemeCheck::fail(
                        "F4",
                        format!(
                            "level {} patch {} cell ({}, {}) refers to missing id {}",
                            i + 2,
                            k + 1,
                            pos / a.cols,
                            pos % a.cols,
                            a.cells[pos] + 1
                        ),
                    );
                }
            }
        }
        SchemeCheck::pass("F4")
    }

    fn check_f5(&self) -> SchemeCheck {
        for (i, l) in self.levels.iter().enumerate() {
            let below = self.patch_count(i + 1).expect("level exists");
            for (k, a) in l.arrangements.iter().enumerate() {
                if let Some(j) = (0..below).find(|&j| !a.contains(j)) {
                    return SchemeCheck::fail(
                        "F5",
                        format!("level {} patch {} contains no copy of level {} patch {}", i + 2, k + 1, i + 1, j + 1),
                    );
                }
            }
        }
        SchemeCheck::pass("F5")
    }

    fn check_f6(&self) -> SchemeCheck {
        if !self.levels.iter().any(|l| l.anchored) {
            return SchemeCheck { property: "F6", status: CheckStatus::NotRequired };
        }
        for (i, l) in self.levels.iter().enumerate().filter(|(_, l)| l.anchored) {
            let (r, c) = l.anchor;
            let got = l.arrangements[0].get(r, c);
            if got != 0 {
                return SchemeCheck::fail(
                    "F6",
                    format!("level {} patch 1 holds patch {} at anchor ({r}, {c})", i + 2, got + 1),
                );
            }
        }
        SchemeCheck::pass("F6")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail(String),
    NotRequired,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeCheck {
    pub property: &'static str,
    pub status: CheckStatus,
}

impl SchemeCheck {
    pub(crate) fn pass(property: &'static str) -> Self {
        SchemeCheck { property, status: CheckStatus::Pass }
    }

    pub(crate) fn fail(property: &'static str, witness: String) -> Self {
        SchemeCheck { property, status: CheckStatus::Fail(witness) }
    }

    pub fn passed(&self) -> bool {
        !matches!(self.status, CheckStatus::Fail(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeReport {
    pub checks: Vec<SchemeCheck>,
}

impl SchemeReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(SchemeCheck::passed)
    }

    pub fn get(&self, property: &str) -> Option<&SchemeCheck> {
        self.checks.iter().find(|c| c.property == property)
    }
}

impl fmt::Display for SchemeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.status {
                CheckStatus::Pass => writeln!(f, "{}\tpass", c.property)?,
                CheckStatus::NotRequired => writeln!(f, "{}\tnot required", c.property)?,
                CheckStatus::Fail(w) => writeln!(f, "{}\tFAIL\t{w}", c.property)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Two 2×2 base patches and two levels of 3×3 grids.
    pub(crate) fn small_spec() -> HierarchySpec {
        let a = Patch::from_rows_top_down(&["10", "11"], Point::new(-1, -1)).unwrap();
        let b = Patch::full(2, 2, Point::new(-1, -1));
        let mut spec = HierarchySpec::new(vec![a, b]).unwrap();
        for _ in 0..2 {
            let one = Arrangement::from_fn(3, 3, |r, c| usize::from(r == 0 && c == 1));
            let two = Arrangement::from_fn(3, 3, |r, c| usize::from(!(r == 0 && c == 0)));
            spec.push_level(LevelSpec { arrangements: vec![one, two], anchor: (1, 1), anchored: true }).unwrap();
        }
        spec
    }

    #[test]
    fn frames_are_nested_and_centered() {
        let spec = small_spec();
        assert_eq!(spec.dims(3).unwrap(), (18, 18));
        let f = spec.frame(3).unwrap();
        assert_eq!(f.origin, Point::new(-1 - 2 - 6, -1 - 2 - 6));
        assert!(spec.validate_scheme().all_passed(), "{}", spec.validate_scheme());
    }

    #[test]
    fn materialize_matches_block_counts() {
        let spec = small_spec();
        for n in 1..=3 {
            for id in 0..2 {
                let p = spec.materialize(n, id).unwrap();
                assert_eq!(p.count_ones() as u128, spec.occupied(n, id).unwrap());
                assert_eq!(p.area() as u128, spec.area(n).unwrap());
            }
        }
    }

    #[test]
    fn extract_agrees_with_materialize() {
        let spec = small_spec();
        let full = spec.materialize(3, 1).unwrap();
        let part = spec.extract(3, 1, 3, 5, 11, 7).unwrap();
        assert!(part.same_cells(&full.sub_patch(3, 5, 11, 7)));
    }

    #[test]
    fn cap_is_enforced() {
        let spec = small_spec().with_cap(100);
        match spec.materialize(3, 0) {
            Err(Error::CapExceeded { required, cap }) => assert_eq!((required, cap), (324, 100)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scheme_violations_are_reported() {
        let mut spec = small_spec();
        spec.levels[1].arrangements[1] = Arrangement::uniform(3, 3, 1);
        let report = spec.validate_scheme();
        assert!(!report.get("F5").unwrap().passed());
        let mut spec = small_spec();
        spec.levels[0].arrangements[0].set(1, 1, 1);
        assert!(!spec.validate_scheme().get("F6").unwrap().passed());
        let mut spec = small_spec();
        spec.levels[0].arrangements[0].set(2, 2, 7);
        assert!(!spec.validate_scheme().get("F4").unwrap().passed());
        assert!(matches!(spec.materialize(2, 0), Err(Error::NoSuchPatch { .. })));
    }
}
