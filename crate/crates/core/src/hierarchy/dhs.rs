//! Text form of a hierarchy:
//!
//! ```text
//! level 1 patches 2
//! PATCH 4 4 -2 -2
//! 1010
//! ...
//! level 2 patches 2 anchor 1 1 anchored
//! arrangement 3 3
//! 1 1 1
//! 1 1 1
//! 1 2 1
//! ```
//!
//! Arrangement rows are printed top row first and hold 1-based ids. The
//! anchor is `<row> <col>` counted from the bottom-left cell, 0-based.

use std::fmt::Write as _;

use super::{Arrangement, HierarchySpec, LevelSpec};
use crate::lattice::Patch;
use crate::{Error, Result};

impl HierarchySpec {
    pub fn to_dhs(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "level 1 patches {}", self.base.len());
        for p in &self.base {
            s.push_str(&p.to_dpf());
        }
        for (i, l) in self.levels.iter().enumerate() {
            let _ = write!(s, "level {} patches {} anchor {} {}", i + 2, l.arrangements.len(), l.anchor.0, l.anchor.1);
            s.push_str(if l.anchored { " anchored\n" } else { "\n" });
            for a in &l.arrangements {
                let _ = writeln!(s, "arrangement {} {}", a.rows(), a.cols());
                for r in (0..a.rows()).rev() {
                    let row: Vec<String> = (0..a.cols()).map(|c| (a.get(r, c) + 1).to_string()).collect();
                    let _ = writeln!(s, "{}", row.join(" "));
                }
            }
        }
        s
    }

    pub fn from_dhs(text: &str) -> Result<HierarchySpec> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let mut pos = 0;
        let mut spec: Option<HierarchySpec> = None;
        while pos < lines.len() {
            let (ln, header) = lines[pos];
            let f: Vec<&str> = header.split_whitespace().collect();
            if f.len() < 4 || f[0] != "level" || f[2] != "patches" {
                return Err(Error::parse(ln, "expected `level <n> patches <k> ...`"));
            }
            let num = |s: &str| -> Result<usize> { s.parse().map_err(|_| Error::parse(ln, format!("bad number {s:?}"))) };
            let (level, k) = (num(f[1])?, num(f[3])?);
            let expected = spec.as_ref().map_or(1, |s| s.depth() + 1);
            if level != expected {
                return Err(Error::parse(ln, format!("expected level {expected}, found {level}")));
            }
            if k == 0 {
                return Err(Error::parse(ln, "a level needs at least one patch"));
            }
            pos += 1;
            if level == 1 {
                if f.len() != 4 {
                    return Err(Error::parse(ln, "level 1 takes no anchor"));
                }
                let mut base = Vec::with_capacity(k);
                for _ in 0..k {
                    let body: Vec<&str> = lines[pos..].iter().map(|(_, l)| *l).collect();
                    let first = lines.get(pos).map_or(ln, |(i, _)| *i);
                    let (p, used) = Patch::parse_dpf_lines(&body, first)?;
                    base.push(p);
                    pos += used;
                }
                spec = Some(HierarchySpec::new(base).map_err(|e| Error::parse(ln, e.to_string()))?);
                continue;
            }
            let (anchor, anchored) = match &f[4..] {
                [] => ((0, 0), false),
                ["anchor", r, c] => ((num(r)?, num(c)?), false),
                ["anchor", r, c, "anchored"] => ((num(r)?, num(c)?), true),
                _ => return Err(Error::parse(ln, "expected `anchor <row> <col> [anchored]`")),
            };
            let mut arrangements = Vec::with_capacity(k);
            for _ in 0..k {
                let (aln, ah) = *lines.get(pos).ok_or_else(|| Error::parse(ln, "missing arrangement"))?;
                let g: Vec<&str> = ah.split_whitespace().collect();
                if g.len() != 3 || g[0] != "arrangement" {
                    return Err(Error::parse(aln, "expected `arrangement <rows> <cols>`"));
                }
                let rows: usize = g[1].parse().map_err(|_| Error::parse(aln, "bad row count"))?;
                let cols: usize = g[2].parse().map_err(|_| Error::parse(aln, "bad column count"))?;
                pos += 1;
                let mut cells = vec![0usize; rows * cols];
                for i in 0..rows {
                    let (rln, row) = *lines.get(pos).ok_or_else(|| Error::parse(aln, "missing arrangement row"))?;
                    let ids: Vec<usize> = row
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
                        .collect::<Option<_>>()
                        .ok_or_else(|| Error::parse(rln, "ids must be positive integers"))?;
                    if ids.len() != cols {
                        return Err(Error::parse(rln, format!("expected {cols} ids, found {}", ids.len())));
                    }
                    let r = rows - 1 - i;
                    cells[r * cols..(r + 1) * cols].copy_from_slice(&ids);
                    pos += 1;
                }
                arrangements.push(Arrangement::new(rows, cols, cells).map_err(|e| Error::parse(aln, e.to_string()))?);
            }
            let s = spec.as_mut().expect("level 1 parsed first");
            s.push_level(LevelSpec { arrangements, anchor, anchored }).map_err(|e| Error::parse(ln, e.to_string()))?;
        }
        spec.ok_or_else(|| Error::parse(1, "empty hierarchy file"))
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::small_spec;
    use super::*;

    #[test]
    fn round_trip() {
        let spec = small_spec();
        let text = spec.to_dhs();
        let back = HierarchySpec::from_dhs(&text).unwrap();
        assert_eq!(back.to_dhs(), text);
        assert_eq!(back.base(), spec.base());
        assert_eq!(back.levels(), spec.levels());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "level 1 patches 1\nPATCH 1 1 0 0\n1\nlevel 3 patches 1\n";
        assert!(matches!(HierarchySpec::from_dhs(text), Err(Error::Parse { line: 4, .. })));
        let text = "level 1 patches 1\nPATCH 1 1 0 0\n1\nlevel 2 patches 1\narrangement 1 2\n1 0\n";
        assert!(matches!(HierarchySpec::from_dhs(text), Err(Error::Parse { line: 6, .. })));
    }
}
