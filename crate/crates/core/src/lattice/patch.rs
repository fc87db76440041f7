use std::fmt::Write as _;

use bitvec::prelude::*;

use super::Point;
use crate::rational::Rational;
use crate::{Error, Result};

type Bits = BitVec<u64, Lsb0>;

/// A finite subset of `Z²` on a rectangular support.
///
/// Cells are stored row-major with row 0 at the bottom; `origin` is the
/// absolute lattice position of local cell `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Patch {
    width: usize,
    height: usize,
    origin: Point,
    bits: Bits,
    full_boundary: bool,
}

impl Patch {
    pub fn empty(width: usize, height: usize, origin: Point) -> Self {
        assert!(width > 0 && height > 0, "patch support must be nonempty");
        Patch { width, height, origin, bits: bitvec![u64, Lsb0; 0; width * height], full_boundary: false }
    }

    pub fn full(width: usize, height: usize, origin: Point) -> Self {
        let mut p = Self::empty(width, height, origin);
        p.bits.fill(true);
        p.full_boundary = true;
        p
    }

    pub fn from_fn(width: usize, height: usize, origin: Point, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut p = Self::empty(width, height, origin);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    p.set(x, y, true);
                }
            }
        }
        p
    }

    /// Builds a patch from `0`/`1` rows printed top row first.
    pub fn from_rows_top_down(rows: &[&str], origin: Point) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        if height == 0 || width == 0 {
            return Err(Error::parse(0, "empty patch"));
        }
        let mut p = Self::empty(width, height, origin);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::parse(i + 1, format!("row has {} cells, expected {width}", row.len())));
            }
            let y = height - 1 - i;
            for (x, c) in row.bytes().enumerate() {
                match c {
                    b'1' => p.set(x, y, true),
                    b'0' => {}
                    _ => return Err(Error::parse(i + 1, format!("unexpected character {:?}", c as char))),
                }
            }
        }
        Ok(p)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn with_origin(mut self, origin: Point) -> Self {
        self.origin = origin;
        self
    }

    pub fn is_square(&self) -> bool {
        self.width == self.height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        assert!(x < self.width && y < self.height, "cell ({x}, {y}) outside support");
        self.bits.set(y * self.width + x, value);
        if !value {
            self.full_boundary = false;
        }
    }

    /// Membership test in absolute coordinates.
    pub fn contains(&self, p: Point) -> bool {
        let (dx, dy) = (p.x - self.origin.x, p.y - self.origin.y);
        dx >= 0 && dy >= 0 && (dx as usize) < self.width && (dy as usize) < self.height && self.get(dx as usize, dy as usize)
    }

    pub fn in_support(&self, p: Point) -> bool {
        let (dx, dy) = (p.x - self.origin.x, p.y - self.origin.y);
        dx >= 0 && dy >= 0 && (dx as usize) < self.width && (dy as usize) < self.height
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn row(&self, y: usize) -> &BitSlice<u64, Lsb0> {
        &self.bits[y * self.width..(y + 1) * self.width]
    }

    /// Occupied cells in absolute coordinates, bottom row first.
    pub fn points(&self) -> Vec<Point> {
        self.bits
            .iter_ones()
            .map(|i| Point::new(self.origin.x + (i % self.width) as i64, self.origin.y + (i / self.width) as i64))
            .collect()
    }

    pub fn is_full_boundary_flagged(&self) -> bool {
        self.full_boundary
    }

    fn boundary_is_full(&self) -> bool {
        let (w, h) = (self.width, self.height);
        self.row(0).all()
            && self.row(h - 1).all()
            && (0..h).all(|y| self.get(0, y) && self.get(w - 1, y))
    }

    /// Flags the patch as containing its whole boundary, checking the claim.
    pub fn flag_full_boundary(mut self) -> Result<Self> {
        if !self.boundary_is_full() {
            return Err(Error::Precondition("patch boundary is not fully occupied".into()));
        }
        self.full_boundary = true;
        Ok(self)
    }

    /// True iff every support cell whose absolute column is even is occupied.
    pub fn has_2z_property(&self) -> bool {
        let first_even = (self.origin.x.rem_euclid(2)) as usize;
        (first_even..self.width).step_by(2).all(|x| (0..self.height).all(|y| self.get(x, y)))
    }

    /// Density of the `M×M` lower-left corner.
    pub fn corner_density(&self, corner_side: usize) -> Result<Rational> {
        if corner_side == 0 || corner_side > self.width.min(self.height) {
            return Err(Error::CornerExceedsSupport { corner: corner_side, width: self.width, height: self.height });
        }
        let count: usize = (0..corner_side).map(|y| self.row(y)[..corner_side].count_ones()).sum();
        Ok(Rational::new(count.into(), (corner_side * corner_side).into()))
    }

    pub fn density(&self) -> Rational {
        Rational::new(self.count_ones().into(), self.area().into())
    }

    /// The closed square whose lower-left corner is this patch: one extra top
    /// row and right column, both fully occupied.
    pub fn close(&self) -> Patch {
        let (w, h) = (self.width + 1, self.height + 1);
        let mut out = Patch::empty(w, h, self.origin);
        for y in 0..self.height {
            out.bits[y * w..y * w + self.width].copy_from_bitslice(self.row(y));
            out.bits.set(y * w + self.width, true);
        }
        out.bits[(h - 1) * w..].fill(true);
        out.full_boundary = out.boundary_is_full();
        out
    }

    /// Lower-left corner of a closed square: drops the top row and right column.
    pub fn corner(&self) -> Patch {
        self.sub_patch(0, 0, self.width - 1, self.height - 1)
    }

    pub fn sub_patch(&self, x0: usize, y0: usize, w: usize, h: usize) -> Patch {
        assert!(x0 + w <= self.width && y0 + h <= self.height, "sub-patch outside support");
        let mut out = Patch::empty(w, h, Point::new(self.origin.x + x0 as i64, self.origin.y + y0 as i64));
        for y in 0..h {
            let src = (y0 + y) * self.width + x0;
            out.bits[y * w..(y + 1) * w].copy_from_bitslice(&self.bits[src..src + w]);
        }
        out
    }

    /// Copies the `w×h` rectangle of `src` at `(sx, sy)` into `self` at `(dx, dy)`.
    pub fn blit(&mut self, src: &Patch, sx: usize, sy: usize, w: usize, h: usize, dx: usize, dy: usize) {
        assert!(sx + w <= src.width && sy + h <= src.height);
        assert!(dx + w <= self.width && dy + h <= self.height);
        for y in 0..h {
            let s = (sy + y) * src.width + sx;
            let d = (dy + y) * self.width + dx;
            self.bits[d..d + w].copy_from_bitslice(&src.bits[s..s + w]);
        }
        self.full_boundary = false;
    }

    /// Bitwise equality of the cells, ignoring origin and flags.
    pub fn same_cells(&self, other: &Patch) -> bool {
        self.width == other.width && self.height == other.height && self.bits == other.bits
    }

    /// Whether the `needle.width × needle.height` window at local `(x, y)`
    /// equals `needle` cell by cell.
    pub fn window_matches(&self, needle: &Patch, x: usize, y: usize) -> bool {
        let words = needle_words(needle);
        self.window_matches_words(&words, needle.width, x, y)
    }

    fn window_matches_words(&self, words: &[Vec<u64>], nw: usize, x: usize, y: usize) -> bool {
        words.iter().enumerate().all(|(j, row)| {
            let start = (y + j) * self.width + x;
            let seg = &self.bits[start..start + nw];
            seg.chunks(64).zip(row).all(|(c, &w)| c.load_le::<u64>() == w)
        })
    }

    /// Number of translates of `needle` lying fully inside the support whose
    /// cells (occupied and unoccupied) all agree with `needle`.
    pub fn count_translates(&self, needle: &Patch) -> u64 {
        if needle.width > self.width || needle.height > self.height {
            return 0;
        }
        self.count_translates_at(needle, 0..self.width - needle.width + 1, 0..self.height - needle.height + 1)
    }

    /// Like [`Patch::count_translates`], restricted to lower-left positions in
    /// `xs × ys`. Positions whose window leaves the support are skipped.
    pub fn count_translates_at(&self, needle: &Patch, xs: std::ops::Range<usize>, ys: std::ops::Range<usize>) -> u64 {
        let words = needle_words(needle);
        let mut count = 0;
        for y in ys {
            if y + needle.height > self.height {
                break;
            }
            for x in xs.clone() {
                if x + needle.width > self.width {
                    break;
                }
                if self.window_matches_words(&words, needle.width, x, y) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Row words of the `w×h` window at `(x, y)`, suitable as a hash key.
    pub fn window_key(&self, x: usize, y: usize, w: usize, h: usize) -> Vec<u64> {
        let mut key = Vec::with_capacity(h * w.div_ceil(64));
        for j in 0..h {
            let start = (y + j) * self.width + x;
            key.extend(self.bits[start..start + w].chunks(64).map(|c| c.load_le::<u64>()));
        }
        key
    }

    /// `.dpf` text: a header line then rows printed top row first.
    pub fn to_dpf(&self) -> String {
        let mut s = format!("PATCH {} {} {} {}", self.width, self.height, self.origin.x, self.origin.y);
        if self.full_boundary {
            s.push_str(" full_boundary");
        }
        s.push('\n');
        for y in (0..self.height).rev() {
            for x in 0..self.width {
                s.push(if self.get(x, y) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses one `.dpf` block from the front of `lines`, returning the patch
    /// and the number of lines consumed. `first_line` is used in messages.
    pub(crate) fn parse_dpf_lines(lines: &[&str], first_line: usize) -> Result<(Patch, usize)> {
        let header = lines.first().ok_or_else(|| Error::parse(first_line, "missing PATCH header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.first() != Some(&"PATCH") || !(5..=6).contains(&fields.len()) {
            return Err(Error::parse(first_line, "expected `PATCH <w> <h> <ox> <oy> [full_boundary]`"));
        }
        let num = |i: usize| -> Result<i64> {
            fields[i].parse().map_err(|_| Error::parse(first_line, format!("bad number {:?}", fields[i])))
        };
        let (w, h, ox, oy) = (num(1)?, num(2)?, num(3)?, num(4)?);
        if w <= 0 || h <= 0 {
            return Err(Error::parse(first_line, "patch sides must be positive"));
        }
        let flagged = match fields.get(5) {
            None => false,
            Some(&"full_boundary") => true,
            Some(other) => return Err(Error::parse(first_line, format!("unknown flag {other:?}"))),
        };
        let h = h as usize;
        if lines.len() < h + 1 {
            return Err(Error::parse(first_line, format!("expected {h} rows")));
        }
        let rows: Vec<&str> = lines[1..=h].iter().map(|r| r.trim()).collect();
        let patch = Patch::from_rows_top_down(&rows, Point::new(ox, oy)).map_err(|e| match e {
            Error::Parse { line, message } => Error::parse(first_line + line, message),
            e => e,
        })?;
        if patch.width != w as usize {
            return Err(Error::parse(first_line + 1, format!("rows have width {}, header says {w}", patch.width)));
        }
        let patch = if flagged { patch.flag_full_boundary()? } else { patch };
        Ok((patch, h + 1))
    }

    pub fn from_dpf(text: &str) -> Result<Patch> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let first = lines.first().map_or(1, |(i, _)| *i);
        let body: Vec<&str> = lines.iter().map(|(_, l)| *l).collect();
        let (patch, used) = Patch::parse_dpf_lines(&body, first)?;
        if used != body.len() {
            return Err(Error::parse(lines[used].0, "trailing content after patch"));
        }
        Ok(patch)
    }

    /// Plain PBM (`P1`) bitmap, 1 = occupied, top row first.
    pub fn to_pbm(&self) -> String {
        let mut s = format!("P1\n{} {}\n", self.width, self.height);
        for y in (0..self.height).rev() {
            let row: Vec<&str> = (0..self.width).map(|x| if self.get(x, y) { "1" } else { "0" }).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn from_pbm(text: &str, origin: Point) -> Result<Patch> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split_whitespace())
            .flat_map(|t| {
                // P1 allows packed digits without separators
                if t.chars().all(|c| c == '0' || c == '1') && t.len() > 1 {
                    t.chars().map(|c| c.to_string()).collect::<Vec<_>>()
                } else {
                    vec![t.to_string()]
                }
            });
        if tokens.next().as_deref() != Some("P1") {
            return Err(Error::parse(1, "not a P1 bitmap"));
        }
        let mut dim = || -> Result<usize> {
            tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| Error::parse(2, "bad PBM dimensions"))
        };
        let (w, h) = (dim()?, dim()?);
        if w == 0 || h == 0 {
            return Err(Error::parse(2, "empty bitmap"));
        }
        let mut p = Patch::empty(w, h, origin);
        for i in 0..w * h {
            match tokens.next().as_deref() {
                Some("1") => p.set(i % w, h - 1 - i / w, true),
                Some("0") => {}
                _ => return Err(Error::parse(3, "truncated or invalid PBM raster")),
            }
        }
        Ok(p)
    }
}

fn needle_words(needle: &Patch) -> Vec<Vec<u64>> {
    (0..needle.height).map(|y| needle.row(y).chunks(64).map(|c| c.load_le::<u64>()).collect()).collect()
}
