use std::collections::HashMap;

use crate::lattice::Patch;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Repetitivity {
    /// Every `R×R` sub-window contains every `r×r` pattern of the patch.
    Finite(usize),
    /// No `R ≤ side − r` works inside this window.
    WindowTooSmall,
}

/// Pattern id of every `r×r` window, indexed by lower-left position.
fn pattern_ids(patch: &Patch, r: usize) -> (Vec<u32>, usize, usize) {
    let (px, py) = (patch.width() - r + 1, patch.height() - r + 1);
    let mut ids = Vec::with_capacity(px * py);
    let mut table: HashMap<Vec<u64>, u32> = HashMap::new();
    for y in 0..py {
        for x in 0..px {
            let key = patch.window_key(x, y, r, r);
            let next = table.len() as u32;
            ids.push(*table.entry(key).or_insert(next));
        }
    }
    (ids, px, py)
}

/// Whether every `big×big` window contains a position of each pattern,
/// using one prefix-sum table per pattern.
fn all_windows_cover(ids: &[u32], px: usize, py: usize, patterns: u32, span: usize) -> bool {
    // `span` positions per side correspond to an `R = span + r − 1` window
    let mut prefix = vec![0u32; (px + 1) * (py + 1)];
    for pat in 0..patterns {
        for y in 0..py {
            let mut row = 0u32;
            for x in 0..px {
                row += u32::from(ids[y * px + x] == pat);
                prefix[(y + 1) * (px + 1) + x + 1] = prefix[y * (px + 1) + x + 1] + row;
            }
        }
        for y in 0..=py - span {
            for x in 0..=px - span {
                let s = prefix[(y + span) * (px + 1) + x + span] + prefix[y * (px + 1) + x]
                    - prefix[y * (px + 1) + x + span]
                    - prefix[(y + span) * (px + 1) + x];
                if s == 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Smallest `R` such that every `R×R` sub-window of `patch` contains a
/// translate of every `r×r` pattern occurring in `patch`. Patterns match
/// on occupied and unoccupied cells alike.
pub fn estimate_repetitivity(patch: &Patch, r: usize) -> Result<Repetitivity> {
    let side = patch.width().min(patch.height());
    if r == 0 {
        return Err(Error::OutOfRange("pattern size must be positive".into()));
    }
    if 2 * r > side {
        return Ok(Repetitivity::WindowTooSmall);
    }
    let (ids, px, py) = pattern_ids(patch, r);
    let patterns = ids.iter().max().map_or(0, |m| m + 1);
    let max_r = side - r;
    let works = |big: usize| all_windows_cover(&ids, px, py, patterns, big - r + 1);
    if !works(max_r) {
        return Ok(Repetitivity::WindowTooSmall);
    }
    let (mut lo, mut hi) = (r, max_r);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if works(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Repetitivity::Finite(lo))
}

/// Direct check of a candidate `big`: scans each `big×big` window cell by
/// cell for every distinct `r×r` pattern.
pub fn naive_repetitivity_holds(patch: &Patch, r: usize, big: usize) -> bool {
    let mut patterns: Vec<Patch> = Vec::new();
    for y in 0..=patch.height() - r {
        for x in 0..=patch.width() - r {
            let p = patch.sub_patch(x, y, r, r);
            if !patterns.iter().any(|q| q.same_cells(&p)) {
                patterns.push(p);
            }
        }
    }
    for y in 0..=patch.height() - big {
        for x in 0..=patch.width() - big {
            let window = patch.sub_patch(x, y, big, big);
            for p in &patterns {
                let mut found = false;
                'scan: for j in 0..=big - r {
                    for i in 0..=big - r {
                        if (0..r).all(|b| (0..r).all(|a| window.get(i + a, j + b) == p.get(a, b))) {
                            found = true;
                            break 'scan;
                        }
                    }
                }
                if !found {
                    return false;
                }
            }
        }
    }
    true
}
