use std::collections::BTreeSet;

use crate::hierarchy::HierarchySpec;
use crate::lattice::{distortion, LatticeMap, Point};
use crate::rational::{int, Rational};
use crate::{Error, Result};

/// One descent step from a block to the bottom-row child of largest
/// lower-side expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainLink {
    /// Level of the child block.
    pub level: usize,
    pub origin: Point,
    pub side: usize,
    pub expansion_sq: Rational,
    /// `(e_child / e_parent)²`.
    pub ratio_sq: Rational,
    /// Whether the parent level came from an `N = 1` step.
    pub excluded: bool,
    /// Whether the ratio reaches `1 + λ`.
    pub meets_lambda: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainReport {
    pub top_level: usize,
    pub top_expansion_sq: Rational,
    pub links: Vec<ChainLink>,
    /// Product of `ratio_sq` over links that are not excluded.
    pub product_sq: Rational,
    pub l: Rational,
    /// `product > L²`, i.e. `product_sq > L⁴`: the map is not `L`-bi-Lipschitz.
    pub contradiction: bool,
}

impl ChainReport {
    pub fn product(&self) -> f64 {
        crate::rational::to_f64(&self.product_sq).sqrt()
    }
}

fn lower_side_expansion(f: &impl LatticeMap, origin: Point, side: usize) -> Result<Rational> {
    let end = Point::new(origin.x + side as i64, origin.y);
    let report = distortion(f, &[(origin, end)]).map_err(|e| match e {
        Error::OutsideDomain { x, y } => Error::WindowTooSmall(format!("map has no value at ({x}, {y})")),
        other => other,
    })?;
    Ok(report.max_expansion_sq)
}

/// Follows the lower sides of nested blocks from the top level of `spec`
/// down to level 1, comparing the expansion of `f` between the two lower
/// end points of each block with that of its parent.
pub fn expansion_chain_report(
    spec: &HierarchySpec,
    f: &impl LatticeMap,
    lambda: &Rational,
    excluded_levels: &BTreeSet<usize>,
    l: &Rational,
) -> Result<ChainReport> {
    let top = spec.depth();
    let frame = spec.frame(top)?;
    let top_expansion_sq = lower_side_expansion(f, frame.origin, frame.width)?;
    let threshold = (int(1) + lambda) * (int(1) + lambda);
    let mut links = Vec::new();
    let (mut origin, mut parent_e) = (frame.origin, top_expansion_sq.clone());
    for n in (2..=top).rev() {
        let cols = spec.level(n)?.arrangements[0].cols();
        let side = spec.dims(n - 1)?.0;
        let mut best: Option<(Point, Rational)> = None;
        for c in 0..cols {
            let o = Point::new(origin.x + (c * side) as i64, origin.y);
            let e = lower_side_expansion(f, o, side)?;
            if best.as_ref().is_none_or(|(_, b)| e > *b) {
                best = Some((o, e));
            }
        }
        let (o, e) = best.expect("a level has at least one column");
        let ratio_sq = &e / &parent_e;
        links.push(ChainLink {
            level: n - 1,
            origin: o,
            side,
            meets_lambda: ratio_sq >= threshold,
            expansion_sq: e.clone(),
            ratio_sq,
            excluded: excluded_levels.contains(&n),
        });
        origin = o;
        parent_e = e;
    }
    let product_sq = links.iter().filter(|k| !k.excluded).fold(int(1), |acc, k| acc * &k.ratio_sq);
    let l4 = l * l * l * l;
    Ok(ChainReport {
        top_level: top,
        top_expansion_sq,
        contradiction: product_sq > l4,
        links,
        product_sq,
        l: l.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{Arrangement, LevelSpec};
    use crate::lattice::{CandidateMap, Patch, Window};
    use crate::rational::frac;

    fn stack(levels: usize) -> HierarchySpec {
        let mut spec = HierarchySpec::new(vec![Patch::full(4, 4, Point::new(0, 0))]).unwrap();
        for _ in 1..levels {
            let level = LevelSpec { arrangements: vec![Arrangement::uniform(3, 3, 0)], anchor: (0, 0), anchored: false };
            spec.push_level(level).unwrap();
        }
        spec
    }

    fn stretch(x: i64) -> i64 {
        match x {
            ..=4 => 54 * x,
            5..=12 => 216 + 27 * (x - 4),
            13..=36 => 432 + 18 * (x - 12),
            _ => 864 + 12 * (x - 36),
        }
    }

    #[test]
    fn synthetic_stretch_flags() {
        let spec = stack(4);
        let w = Window::new(0, 0, 108, 0);
        let f = CandidateMap::from_fn(w, w.points().collect::<Vec<_>>(), |p| Point::new(stretch(p.x), p.y)).unwrap();
        let r = expansion_chain_report(&spec, &f, &frac(1, 2), &BTreeSet::new(), &int(1)).unwrap();
        assert_eq!(r.links.len(), 3);
        assert!(r.links.iter().all(|k| k.ratio_sq == frac(9, 4) && k.meets_lambda));
        assert_eq!(r.product_sq, frac(729, 64));
        assert!(r.contradiction);
        let skip = expansion_chain_report(&spec, &f, &frac(1, 2), &BTreeSet::from([4]), &int(1)).unwrap();
        assert_eq!(skip.product_sq, frac(81, 16));
    }

    #[test]
    fn identity_does_not_flag() {
        let spec = stack(3);
        let w = Window::new(0, 0, 36, 0);
        let f = CandidateMap::identity(w, w.points().collect::<Vec<_>>()).unwrap();
        let r = expansion_chain_report(&spec, &f, &frac(1, 2), &BTreeSet::new(), &int(1)).unwrap();
        assert!(r.links.iter().all(|k| k.ratio_sq == int(1)));
        assert!(!r.contradiction);
        let short = CandidateMap::identity(Window::new(0, 0, 20, 0), (0..=20).map(|x| Point::new(x, 0))).unwrap();
        assert!(matches!(
            expansion_chain_report(&spec, &short, &frac(1, 2), &BTreeSet::new(), &int(1)),
            Err(Error::WindowTooSmall(_))
        ));
    }
}
