use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use super::constants::{bundle_for_gap, n_min, thirds, ConstantBundle};
use crate::hierarchy::{Arrangement, HierarchySpec, LevelSpec};
use crate::lattice::{Patch, Point};
use crate::rational::{self, frac, int, Rational};
use crate::{Error, Result};

/// The two starting squares, closed (boundary included), centered at the origin.
pub fn initial_squares() -> [Patch; 2] {
    let sparse = Patch::from_rows_top_down(&["11111", "10101", "10101", "10101", "11111"], Point::new(-2, -2))
        .and_then(Patch::flag_full_boundary)
        .expect("static patch");
    let full = Patch::full(5, 5, Point::new(-2, -2));
    [sparse, full]
}

/// Lower-left corners of [`initial_squares`]; these tile without overlap.
pub fn initial_corners() -> [Patch; 2] {
    initial_squares().map(|p| p.corner())
}

/// One alternating step: blocks of `m·P*` by `m·P*` copies, `2N+1` of them
/// along the bottom strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StepParams {
    pub m: usize,
    pub p_star: usize,
    pub n: usize,
}

impl StepParams {
    pub fn new(m: usize, p_star: usize, n: usize) -> Result<Self> {
        if m == 0 || m.is_multiple_of(2) {
            return Err(Error::OutOfRange(format!("m must be an odd positive integer, got {m}")));
        }
        if p_star == 0 || n == 0 {
            return Err(Error::OutOfRange("P* and N must be positive".into()));
        }
        Ok(StepParams { m, p_star, n })
    }

    /// Side of one block, in copies of the input patch.
    pub fn block(&self) -> usize {
        self.m * self.p_star
    }

    /// Side of the output grid, in copies of the input patch.
    pub fn grid(&self) -> usize {
        self.block() * (2 * self.n + 1)
    }
}

/// Grids for the two new patches over ids `0` (sparser) and `1` (denser).
///
/// The bottom strip holds `2N+1` blocks; counted from the left, blocks at
/// even positions use the patch's own id and odd positions the other one,
/// so both ends carry the patch's own id. Everything above the strip uses
/// the patch's own id.
pub fn alternating_arrangements(step: StepParams) -> [Arrangement; 2] {
    let (b, g) = (step.block(), step.grid());
    let make = |own: usize| {
        Arrangement::from_fn(g, g, |r, c| if r < b && (c / b) % 2 == 1 { 1 - own } else { own })
    };
    [make(0), make(1)]
}

/// What one application of the alternating step produced.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// Hierarchy level created by this step.
    pub level: usize,
    /// Construction stage (one stage = `ℓ` steps for one value of `L`).
    pub stage: usize,
    pub params: StepParams,
    pub n1_step: bool,
    pub side: usize,
    /// Exact point densities of the two new patches.
    pub densities: [Rational; 2],
}

/// Exact point density of every patch of a level.
pub fn level_densities(spec: &HierarchySpec, level: usize) -> Result<Vec<Rational>> {
    let area = spec.area(level)?;
    (0..spec.patch_count(level)?)
        .map(|id| Ok(Rational::new(spec.occupied(level, id)?.into(), area.into())))
        .collect()
}

fn check_inputs(spec: &HierarchySpec) -> Result<()> {
    let top = spec.depth();
    if spec.patch_count(top)? != 2 {
        return Err(Error::Precondition("the alternating step needs exactly two input patches".into()));
    }
    let (w, h) = spec.dims(top)?;
    if w != h || w % 2 == 1 {
        return Err(Error::Precondition(format!("input patches must be squares of even side, got {w}x{h}")));
    }
    for id in 0..2 {
        let bottom = spec.extract(top, id, 0, 0, w, 1)?;
        let left = spec.extract(top, id, 0, 0, 1, h)?;
        if bottom.count_ones() != w || left.count_ones() != h {
            return Err(Error::Precondition(format!("input patch {} does not contain its boundary", id + 1)));
        }
    }
    let base_w = spec.base()[0].width();
    for (i, p) in spec.base().iter().enumerate() {
        let placed = p.clone().with_origin(spec.frame(1)?.origin);
        if !placed.has_2z_property() || base_w % 2 == 1 {
            return Err(Error::Precondition(format!("base patch {} breaks the 2Z-property", i + 1)));
        }
    }
    let d = level_densities(spec, top)?;
    if d[1] <= d[0] {
        return Err(Error::Precondition("patch 2 must be strictly denser than patch 1".into()));
    }
    Ok(())
}

/// Applies the alternating step `ell` times on top of `spec`, whose top
/// level must consist of two square patches of even side containing their
/// boundary, sparser first.
pub fn build_new_patches(
    spec: &mut HierarchySpec,
    step: StepParams,
    ell: usize,
    stage: usize,
    n1_step: bool,
) -> Result<Vec<StepRecord>> {
    let mut records = Vec::with_capacity(ell);
    for _ in 0..ell {
        check_inputs(spec)?;
        let g = step.grid();
        let anchor = ((g - 1) / 2, (g - 1) / 2);
        let arrangements = alternating_arrangements(step).to_vec();
        spec.push_level(LevelSpec { arrangements, anchor, anchored: true })?;
        let level = spec.depth();
        let d = level_densities(spec, level)?;
        records.push(StepRecord {
            level,
            stage,
            params: step,
            n1_step,
            side: spec.dims(level)?.0,
            densities: [d[0].clone(), d[1].clone()],
        });
    }
    Ok(records)
}

/// Bound sequence `L_1, L_2, …` and the stages run with `N = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LSchedule {
    pub values: Vec<Rational>,
    pub n1_stages: BTreeSet<usize>,
    /// Whether the listed prefix stands for a sequence tending to infinity.
    pub unbounded: bool,
}

impl LSchedule {
    pub fn constant(l: Rational, len: usize) -> Self {
        LSchedule { values: vec![l; len.max(1)], n1_stages: BTreeSet::new(), unbounded: false }
    }

    /// `L_n = n`.
    pub fn linear(len: usize) -> Self {
        LSchedule { values: (1..=len.max(1) as i64).map(int).collect(), n1_stages: BTreeSet::new(), unbounded: true }
    }

    pub fn with_n1_stages(mut self, stages: impl IntoIterator<Item = usize>) -> Self {
        self.n1_stages.extend(stages);
        self
    }

    /// `L` for a 1-based stage; the last value repeats.
    pub fn get(&self, stage: usize) -> &Rational {
        &self.values[(stage.max(1) - 1).min(self.values.len() - 1)]
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::OutOfRange("empty L schedule".into()));
        }
        for w in self.values.windows(2) {
            if w[1] < w[0] {
                return Err(Error::OutOfRange("L schedule must be nondecreasing".into()));
            }
        }
        if self.values[0] < int(1) {
            return Err(Error::OutOfRange("L values must be at least 1".into()));
        }
        Ok(())
    }
}

/// Small hand-picked parameters; structure is checked exactly but the
/// output is not claimed to be non-rectifiable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToyParams {
    pub m: usize,
    pub p_star: usize,
    pub n: usize,
    pub ell: usize,
}

impl Default for ToyParams {
    fn default() -> Self {
        ToyParams { m: 1, p_star: 1, n: 1, ell: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BuildMode {
    Toy(ToyParams),
    /// Constants from the density-gap estimates; only the first
    /// `explicit_steps` steps of the first stage are spelled out.
    Rigorous { explicit_steps: usize },
}

/// One step of a rigorous stage, in exact integers.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicStep {
    pub index: usize,
    pub m: BigUint,
    pub p_star: BigUint,
    pub n: BigUint,
    /// Half the side of the input squares.
    pub half_side: BigUint,
    pub side_after: BigUint,
    pub densities_after: [Rational; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct StagePlan {
    pub stage: usize,
    pub l: Rational,
    pub d1p: Rational,
    pub d2p: Rational,
    pub bundle: ConstantBundle,
    /// Densities entering the stage, when they are known exactly.
    pub densities: Option<[Rational; 2]>,
    pub steps: Vec<SymbolicStep>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigorousPlan {
    pub stages: Vec<StagePlan>,
}

#[derive(Clone, Debug)]
pub struct NonrectBuild {
    /// Present in toy mode only.
    pub spec: Option<HierarchySpec>,
    pub steps: Vec<StepRecord>,
    pub plan: Option<RigorousPlan>,
    pub schedule: LSchedule,
}

impl NonrectBuild {
    /// Hierarchy levels created by `N = 1` steps.
    pub fn n1_levels(&self) -> BTreeSet<usize> {
        self.steps.iter().filter(|s| s.n1_step).map(|s| s.level).collect()
    }
}

fn rigorous_plan(schedule: &LSchedule, depth: usize, d_primes: Option<(Rational, Rational)>, explicit: usize) -> Result<RigorousPlan> {
    let (d1, d2) = (frac(10, 16), int(1));
    let (d1p, d2p) = d_primes.unwrap_or_else(|| thirds(&d1, &d2));
    if !(d2 > d2p && d2p > d1p && d1p > d1) {
        return Err(Error::OutOfRange("need d2 > d2' > d1' > d1 for the starting densities".into()));
    }
    let mut stages = Vec::with_capacity(depth);
    for stage in 1..=depth {
        let l = schedule.get(stage).clone();
        let bundle = bundle_for_gap(&l, &d2p, &d1p)?;
        let mut steps = Vec::new();
        let densities = (stage == 1).then(|| [d1.clone(), d2.clone()]);
        if stage == 1 {
            let (mut a, mut b) = (d1.clone(), d2.clone());
            let mut half_side = BigUint::from(2u32);
            for index in 1..=explicit {
                let twice = BigUint::from(2u32) * &bundle.p0 * &half_side;
                let mut m = Integer::div_ceil(&bundle.m0, &twice).max(BigUint::one());
                if m.is_even() {
                    m += 1u32;
                }
                let n = if schedule.n1_stages.contains(&stage) {
                    BigUint::one()
                } else {
                    n_min(&bundle.n0, &a, &b, &d1p, &d2p)?
                };
                let two_n1 = BigUint::from(2u32) * &n + 1u32;
                let side_after = BigUint::from(2u32) * &half_side * &m * &bundle.p0 * &two_n1;
                let shift = (&b - &a) * rational::big(&n) / rational::big(&(&two_n1 * &two_n1));
                let (na, nb) = (&a + &shift, &b - &shift);
                steps.push(SymbolicStep {
                    index,
                    m,
                    p_star: bundle.p0.clone(),
                    n,
                    half_side: half_side.clone(),
                    side_after: side_after.clone(),
                    densities_after: [na.clone(), nb.clone()],
                });
                a = na;
                b = nb;
                half_side = side_after / 2u32;
            }
        }
        stages.push(StagePlan { stage, l, d1p: d1p.clone(), d2p: d2p.clone(), bundle, densities, steps });
    }
    Ok(RigorousPlan { stages })
}

/// Runs `depth` stages of the construction from the initial corners.
///
/// Toy mode materializes the hierarchy (depth `1 + depth·ℓ`); rigorous mode
/// returns the constant plan only, since its sizes are far beyond memory.
pub fn build_delone_spec(
    schedule: &LSchedule,
    depth: usize,
    mode: &BuildMode,
    d_primes: Option<(Rational, Rational)>,
) -> Result<NonrectBuild> {
    if depth == 0 {
        return Err(Error::OutOfRange("depth must be at least 1".into()));
    }
    schedule.validate()?;
    match mode {
        BuildMode::Rigorous { explicit_steps } => Ok(NonrectBuild {
            spec: None,
            steps: Vec::new(),
            plan: Some(rigorous_plan(schedule, depth, d_primes, *explicit_steps)?),
            schedule: schedule.clone(),
        }),
        BuildMode::Toy(toy) => {
            let mut spec = HierarchySpec::new(initial_corners().to_vec())?;
            let mut steps = Vec::new();
            for stage in 1..=depth {
                let n1 = schedule.n1_stages.contains(&stage);
                let step = StepParams::new(toy.m, toy.p_star, if n1 { 1 } else { toy.n })?;
                steps.extend(build_new_patches(&mut spec, step, toy.ell, stage, n1)?);
            }
            Ok(NonrectBuild { spec: Some(spec), steps, plan: None, schedule: schedule.clone() })
        }
    }
}
