//! Uniquely ergodic variant: after each round of alternating steps the two
//! new patches are mixed in a 3×3 grid, which pulls every transition matrix
//! towards the matrix with all entries `1/2`.

use std::ops::RangeInclusive;

use crate::hierarchy::{Arrangement, HierarchySpec, LevelSpec, OccurrenceMode};
use crate::lattice::Patch;
use crate::matrix::TransitionMatrix;
use crate::nonrect::{build_new_patches, initial_corners, level_densities, StepParams, ToyParams};
use crate::rational::{self, frac, int, Rational};
use crate::{Error, Result};

/// Offset of the product of two matrices `[[1/2+α, 1/2−α], [1/2−α, 1/2+α]]`
/// and the same with `β`: `2αβ`.
pub fn delta_product(alpha: &Rational, beta: &Rational) -> Result<Rational> {
    for v in [alpha, beta] {
        if *v < int(0) || *v > frac(1, 2) {
            return Err(Error::OutOfRange(format!("offset {} is outside [0, 1/2]", rational::show(v))));
        }
    }
    Ok(int(2) * alpha * beta)
}

/// A 2×2 transition matrix `[[1/2+δ, 1/2−δ], [1/2−δ, 1/2+δ]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixMatrix {
    pub delta: Rational,
}

impl MixMatrix {
    pub fn new(delta: Rational) -> Result<Self> {
        if delta < int(0) || delta > frac(1, 2) {
            return Err(Error::OutOfRange(format!("offset {} is outside [0, 1/2]", rational::show(&delta))));
        }
        Ok(MixMatrix { delta })
    }

    /// Reads the offset off a matrix, failing unless it has the symmetric form.
    pub fn from_matrix(m: &TransitionMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::InvalidHierarchy(format!("expected a 2x2 matrix, got {}x{}", m.rows(), m.cols())));
        }
        let half = frac(1, 2);
        let delta = m.get(0, 0) - &half;
        let fits = *m.get(1, 1) == &half + &delta
            && *m.get(0, 1) == &half - &delta
            && *m.get(1, 0) == &half - &delta;
        if !fits {
            return Err(Error::InvalidHierarchy(format!("matrix is not of the form 1/2 ± delta:\n{m}")));
        }
        MixMatrix::new(delta)
    }

    pub fn matrix(&self) -> TransitionMatrix {
        let (hi, lo) = (frac(1, 2) + &self.delta, frac(1, 2) - &self.delta);
        TransitionMatrix::from_rows(vec![vec![hi.clone(), lo.clone()], vec![lo, hi]]).expect("2x2")
    }

    pub fn compose(&self, next: &MixMatrix) -> MixMatrix {
        MixMatrix { delta: delta_product(&self.delta, &next.delta).expect("offsets in range") }
    }
}

/// Grids of the mixing step: patch 1 has patch 2 at the four corners and
/// patch 1 elsewhere, patch 2 the reverse.
pub fn mix_arrangements() -> [Arrangement; 2] {
    let make = |own: usize| Arrangement::from_fn(3, 3, |r, c| if r != 1 && c != 1 { 1 - own } else { own });
    [make(0), make(1)]
}

/// Adds one mixing level on top of `spec` and returns its transition matrix.
pub fn mix_step(spec: &mut HierarchySpec) -> Result<MixMatrix> {
    let top = spec.depth();
    if spec.patch_count(top)? != 2 {
        return Err(Error::Precondition("mixing needs exactly two patches".into()));
    }
    let (w, h) = spec.dims(top)?;
    if w != h {
        return Err(Error::Precondition(format!("mixing needs square patches, got {w}x{h}")));
    }
    spec.push_level(LevelSpec { arrangements: mix_arrangements().to_vec(), anchor: (1, 1), anchored: true })?;
    MixMatrix::from_matrix(&spec.block_frequency_matrix(top, top + 1)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Alternating,
    Mix,
}

/// Transition matrix into one level of a uniquely ergodic build.
#[derive(Clone, Debug, PartialEq)]
pub struct UeStep {
    pub level: usize,
    pub stage: usize,
    pub kind: StepKind,
    pub mix: MixMatrix,
}

#[derive(Clone, Debug)]
pub struct UeBuild {
    pub spec: HierarchySpec,
    pub steps: Vec<UeStep>,
}

impl UeBuild {
    /// Offset bound for the levels `m → n`, composed step by step.
    pub fn certificate(&self, m: usize, n: usize) -> Result<FreqCertificate> {
        if m >= n || n > self.spec.depth() {
            return Err(Error::OutOfRange(format!("need 1 <= m < n <= {}, got {m}, {n}", self.spec.depth())));
        }
        let factors: Vec<Rational> =
            self.steps.iter().filter(|s| s.level > m && s.level <= n).map(|s| s.mix.delta.clone()).collect();
        let mut offset = factors[0].clone();
        for f in &factors[1..] {
            offset = delta_product(&offset, f)?;
        }
        Ok(FreqCertificate { from: m, to: n, offset_bound: offset, factors })
    }

    /// Density every patch converges to: the column sums of every matrix
    /// are 1 and both rows hold the same entries, so the mean is preserved.
    pub fn limit_density(&self) -> Result<Rational> {
        let d = level_densities(&self.spec, 1)?;
        Ok((&d[0] + &d[1]) / int(2))
    }
}

/// Distance of `𝒜^{m→n}` to the matrix with all entries `1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqCertificate {
    pub from: usize,
    pub to: usize,
    pub offset_bound: Rational,
    /// Offsets of the individual steps, bottom to top.
    pub factors: Vec<Rational>,
}

/// Runs `depth` stages, each made of `toy.ell` alternating steps followed by
/// one mixing step, and checks that every transition matrix keeps the
/// `1/2 ± δ` form.
pub fn build_ue_spec(depth: usize, toy: ToyParams) -> Result<UeBuild> {
    if depth == 0 {
        return Err(Error::OutOfRange("depth must be at least 1".into()));
    }
    let mut spec = HierarchySpec::new(initial_corners().to_vec())?;
    let mut steps = Vec::new();
    let params = StepParams::new(toy.m, toy.p_star, toy.n)?;
    for stage in 1..=depth {
        for rec in build_new_patches(&mut spec, params, toy.ell, stage, false)? {
            let mix = MixMatrix::from_matrix(&spec.block_frequency_matrix(rec.level - 1, rec.level)?)?;
            steps.push(UeStep { level: rec.level, stage, kind: StepKind::Alternating, mix });
        }
        let mix = mix_step(&mut spec)?;
        steps.push(UeStep { level: spec.depth(), stage, kind: StepKind::Mix, mix });
    }
    Ok(UeBuild { spec, steps })
}

/// Sliding density of one needle in one patch, with bounds derived from the
/// level below.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqRow {
    pub level: usize,
    pub patch_id: usize,
    pub count: u128,
    pub density: Rational,
    pub bracket_lo: Rational,
    pub bracket_hi: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreqReport {
    pub rows: Vec<FreqRow>,
    /// Per level: largest minus smallest density over the patch ids.
    pub spread: Vec<(usize, Rational)>,
}

/// Translates of `needle` per unit area in each patch of each level in
/// `levels`.
///
/// A level-`n` bracket comes from level `n−1`: translates lying inside one
/// child are counted exactly, and those crossing a child boundary are at
/// most `2ℓ/s` per unit area, `ℓ` the needle side and `s` the child side.
/// Levels whose children are smaller than the needle get the exact value as
/// both bounds.
pub fn frequency_convergence_report(
    spec: &HierarchySpec,
    needle: &Patch,
    levels: RangeInclusive<usize>,
) -> Result<FreqReport> {
    let mut rows = Vec::new();
    let mut spread = Vec::new();
    let ell = needle.width().max(needle.height());
    for n in levels {
        spec.check_level(n)?;
        let (w, h) = spec.dims(n)?;
        if needle.width() > w || needle.height() > h {
            continue;
        }
        let area = spec.area(n)?;
        let below = if n > 1 {
            let (cw, ch) = spec.dims(n - 1)?;
            (needle.width() <= cw && needle.height() <= ch).then_some(cw.min(ch))
        } else {
            None
        };
        let inner: Option<(Vec<u128>, usize)> = match below {
            Some(side) => {
                let counts = (0..spec.patch_count(n - 1)?)
                    .map(|i| spec.count_occurrences(needle, n - 1, i, OccurrenceMode::Sliding))
                    .collect::<Result<Vec<_>>>()?;
                Some((counts, side))
            }
            None => None,
        };
        let mut level_d = Vec::new();
        for id in 0..spec.patch_count(n)? {
            let count = spec.count_occurrences(needle, n, id, OccurrenceMode::Sliding)?;
            let density = Rational::new(count.into(), area.into());
            let (lo, hi) = match &inner {
                Some((counts, side)) => {
                    let a = spec.arrangement(n, id)?;
                    let inside: u128 = counts.iter().enumerate().map(|(i, c)| c * a.count(i) as u128).sum();
                    let lo = Rational::new(inside.into(), area.into());
                    let hi = &lo + frac(2 * ell as i64, *side as i64);
                    (lo, hi)
                }
                None => (density.clone(), density.clone()),
            };
            level_d.push(density.clone());
            rows.push(FreqRow { level: n, patch_id: id, count, density, bracket_lo: lo, bracket_hi: hi });
        }
        let max = level_d.iter().max().cloned().unwrap_or_else(|| int(0));
        let min = level_d.iter().min().cloned().unwrap_or_else(|| int(0));
        spread.push((n, max - min));
    }
    Ok(FreqReport { rows, spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Point;

    #[test]
    fn offsets_compose() {
        assert_eq!(delta_product(&frac(1, 2), &frac(1, 2)).unwrap(), frac(1, 2));
        assert_eq!(delta_product(&int(0), &frac(1, 3)).unwrap(), int(0));
        assert_eq!(delta_product(&frac(1, 18), &frac(1, 18)).unwrap(), frac(1, 162));
        assert!(delta_product(&frac(3, 4), &frac(1, 4)).is_err());
        let (a, b) = (MixMatrix::new(frac(1, 18)).unwrap(), MixMatrix::new(frac(7, 18)).unwrap());
        assert_eq!(MixMatrix::from_matrix(&a.matrix().mul(&b.matrix()).unwrap()).unwrap(), a.compose(&b));
    }

    #[test]
    fn mixing_counts() {
        let [q1, q2] = mix_arrangements();
        assert_eq!((q1.count(0), q1.count(1)), (5, 4));
        assert_eq!((q2.count(0), q2.count(1)), (4, 5));
        let mut spec = HierarchySpec::new(initial_corners().to_vec()).unwrap();
        assert_eq!(mix_step(&mut spec).unwrap().delta, frac(1, 18));
    }

    #[test]
    fn offsets_match_exact_products() {
        let b = build_ue_spec(2, ToyParams::default()).unwrap();
        assert_eq!(b.spec.depth(), 5);
        assert!(b.spec.validate_scheme().all_passed());
        let c = b.certificate(1, 5).unwrap();
        let exact = MixMatrix::from_matrix(&b.spec.block_frequency_matrix(1, 5).unwrap()).unwrap();
        assert_eq!(c.offset_bound, exact.delta);
        assert_eq!(b.limit_density().unwrap(), frac(13, 16));
        let d = level_densities(&b.spec, 5).unwrap();
        let gap = frac(6, 16);
        assert_eq!(d[0], frac(13, 16) - &c.offset_bound * &gap);
        assert_eq!(d[1], frac(13, 16) + &c.offset_bound * &gap);
    }

    #[test]
    fn brackets_hold() {
        let b = build_ue_spec(1, ToyParams::default()).unwrap();
        let dot = Patch::full(1, 1, Point::new(0, 0));
        let r = frequency_convergence_report(&b.spec, &dot, 1..=3).unwrap();
        for row in &r.rows {
            assert!(row.bracket_lo <= row.density && row.density <= row.bracket_hi, "{row:?}");
        }
        assert!(r.spread.windows(2).all(|w| w[1].1 < w[0].1));
    }
}
