//! Named suites of exact checks over the library, reported row by row.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::choquet::{density_bounds, measure_vectors, patch_cardinality_formula, recursion_residual, ChoquetConfig, Terminal};
use crate::hierarchy::{estimate_repetitivity, naive_repetitivity_holds, HierarchySpec, OccurrenceMode, Repetitivity};
use crate::lab::{
    check_no_stretch, coarse_derivative_deviation, find_regular_square, heuristic_grid_map, lattice_near_curve_count,
    near_curve_bound, Curve, GridSpec, HeuristicOptions, QPoint,
};
use crate::lattice::{all_pairs, distortion, hat_extend, CandidateMap, LatticeMap, Patch, Point, Window};
use crate::nonrect::{
    constant_p0, constants_remark1, constants_remark2, ell_min, expansion_chain_report, initial_squares,
    level_densities, BuildConfig, ChainReport,
};
use crate::rational::{self, frac, int, Rational};
use crate::ue::{build_ue_spec, delta_product, StepKind};
use crate::{Error, Result};

/// Suites accepted by [`run_suite`], besides `all`.
pub const SUITES: [&str; 7] = ["core", "isoper", "ue", "nonrect", "choquet", "hierarchy", "lab"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Random cases per sweep.
    pub trials: usize,
    pub seed: u64,
    /// Construction stages for the builders.
    pub depth: usize,
    /// Hierarchy checked by the `hierarchy` suite instead of a toy build.
    pub spec: Option<HierarchySpec>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { trials: 100, seed: 0, depth: 2, spec: None }
    }
}

struct Rows {
    suite: &'static str,
    rows: Vec<CheckRow>,
}

impl Rows {
    fn push(&mut self, check: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.rows.push(CheckRow { suite: self.suite, check: check.to_string(), passed, detail });
    }
}

/// Runs one suite, or every suite for `all`.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(s, opts)?);
        }
        return Ok(out);
    }
    let suite = SUITES
        .iter()
        .copied()
        .find(|&s| s == name)
        .ok_or_else(|| Error::OutOfRange(format!("unknown suite {name:?}; expected one of {} or all", SUITES.join(", "))))?;
    let mut rows = Rows { suite, rows: Vec::new() };
    match suite {
        "core" => core(&mut rows, opts),
        "isoper" => isoper(&mut rows, opts),
        "ue" => ue(&mut rows, opts),
        "nonrect" => nonrect(&mut rows, opts),
        "choquet" => choquet(&mut rows, opts),
        "hierarchy" => hierarchy(&mut rows, opts),
        _ => lab(&mut rows, opts),
    }
    Ok(rows.rows)
}

pub fn all_passed(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.passed)
}

pub fn to_tsv(rows: &[CheckRow]) -> String {
    let mut out = String::from("suite\tcheck\tstatus\tdetail\n");
    for r in rows {
        let status = if r.passed { "pass" } else { "FAIL" };
        let detail = r.detail.replace(['\t', '\n'], " ");
        let _ = writeln!(out, "{}\t{}\t{status}\t{detail}", r.suite, r.check);
    }
    out
}

/// A random injective map on a window at most `max_side` wide and high
/// whose domain holds every even column: a scaled lattice automorphism,
/// with bounded noise at scale 3.
pub fn random_bilip_map(rng: &mut impl Rng, max_side: i64) -> Result<CandidateMap> {
    let width = 2 * rng.gen_range(1..=(max_side - 1) / 2) + 1;
    let height = rng.gen_range(1..=max_side);
    let window = Window::new(0, 0, width - 1, height - 1);
    let odd_share = rng.gen_range(0.0..1.0);
    let domain: Vec<Point> = window.points().filter(|p| p.x % 2 == 0 || rng.gen_bool(odd_share)).collect();
    let linear: [[i64; 4]; 5] = [[1, 0, 0, 1], [0, -1, 1, 0], [1, 0, 0, -1], [1, 1, 0, 1], [2, 1, 1, 1]];
    let a = linear[rng.gen_range(0..linear.len())];
    let scale = rng.gen_range(1..=3);
    let noise: Vec<Point> = domain
        .iter()
        .map(|_| if scale == 3 { Point::new(rng.gen_range(-1..=1), rng.gen_range(-1..=1)) } else { Point::new(0, 0) })
        .collect();
    let images = domain.iter().zip(&noise).map(|(&p, &e)| {
        let q = Point::new(a[0] * p.x + a[1] * p.y, a[2] * p.x + a[3] * p.y);
        (p, Point::new(scale * q.x, scale * q.y) + e)
    });
    CandidateMap::new(window, images)
}

/// Squared bi-Lipschitz constants of `f` over its domain and of its hat
/// extension over the whole window, both over all pairs.
pub fn hat_constants(f: &CandidateMap) -> Result<(Rational, Rational)> {
    let domain: Vec<Point> = f.domain().collect();
    let l_sq = distortion(f, &all_pairs(&domain))?.bilip_constant_sq();
    let hat = hat_extend(f)?;
    let cells: Vec<Point> = f.window().points().collect();
    let h_sq = distortion(&hat, &all_pairs(&cells))?.bilip_constant_sq();
    Ok((l_sq, h_sq))
}

/// A random closed polygon with half-integer vertices and a tube radius
/// `T` with `1 ≤ T ≤ length/4`.
pub fn random_admissible_curve(rng: &mut impl Rng) -> (Curve, Rational) {
    loop {
        let n = rng.gen_range(3..=8);
        let vertices = (0..n)
            .map(|_| QPoint::new(frac(rng.gen_range(-40..=40), 2), frac(rng.gen_range(-40..=40), 2)))
            .collect();
        let c = Curve::new(vertices, true);
        if c.length < 4.0 {
            continue;
        }
        let t_max = (c.length / 4.0).min(6.0);
        let t = frac(rng.gen_range(4..=(4.0 * t_max).floor() as i64), 4);
        if rational::to_f64(&t) * 4.0 <= c.length {
            return (c, t);
        }
    }
}

fn rng(opts: &VerifyOptions, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn equal<T: PartialEq + std::fmt::Debug>(got: T, want: T) -> Result<(bool, String)> {
    let detail = format!("got {got:?}, expected {want:?}");
    Ok((got == want, detail))
}

fn core(rows: &mut Rows, opts: &VerifyOptions) {
    let [sparse, full] = initial_squares();
    rows.push("corner-density-sparse", sparse.corner_density(4).and_then(|d| equal(rational::show(&d), "5/8".into())));
    rows.push("corner-density-full", full.corner_density(4).and_then(|d| equal(rational::show(&d), "1".into())));
    rows.push(
        "distortion-identity",
        (|| {
            let w = Window::new(0, 0, 5, 5);
            let f = CandidateMap::identity(w, w.points())?;
            let r = distortion(&f, &all_pairs(&w.points().collect::<Vec<_>>()))?;
            equal(rational::show(&r.bilip_constant_sq()), "1".into())
        })(),
    );
    rows.push(
        "distortion-scaling",
        (|| {
            let w = Window::new(0, 0, 4, 3);
            let f = CandidateMap::from_fn(w, w.points(), |p| Point::new(2 * p.x, 2 * p.y))?;
            let r = distortion(&f, &all_pairs(&w.points().collect::<Vec<_>>()))?;
            let (hi, lo) = (rational::show(&r.max_expansion_sq), rational::show(&r.min_expansion_sq));
            Ok((hi == "4" && lo == "4", format!("squared expansions between {lo} and {hi}")))
        })(),
    );
    rows.push(
        "hat-extension-6L",
        (|| {
            let mut rng = rng(opts, 1);
            let mut worst = int(0);
            for _ in 0..opts.trials {
                let f = random_bilip_map(&mut rng, 12)?;
                let (l_sq, h_sq) = hat_constants(&f)?;
                let ratio = h_sq / (int(36) * l_sq);
                if ratio > worst {
                    worst = ratio;
                }
            }
            Ok((worst <= int(1), format!("{} maps, largest hat²/(6L)² = {}", opts.trials, rational::show(&worst))))
        })(),
    );
}

fn isoper(rows: &mut Rows, opts: &VerifyOptions) {
    rows.push(
        "near-curve-count",
        (|| {
            let mut rng = rng(opts, 2);
            let (mut bad, mut worst) = (0usize, 0f64);
            for _ in 0..opts.trials {
                let (c, t) = random_admissible_curve(&mut rng);
                let count = lattice_near_curve_count(&c, &t)?;
                let bound = near_curve_bound(&c, &t);
                worst = worst.max(count as f64 / bound);
                bad += usize::from(count as f64 > bound);
            }
            Ok((bad == 0, format!("{} curves, {bad} violations, largest count/bound = {worst:.4}", opts.trials)))
        })(),
    );
}

fn ue(rows: &mut Rows, opts: &VerifyOptions) {
    let build = match build_ue_spec(opts.depth, Default::default()) {
        Ok(b) => b,
        Err(e) => return rows.push("build", Err(e)),
    };
    rows.push("limit-density", build.limit_density().and_then(|d| equal(rational::show(&d), "13/16".into())));
    rows.push(
        "mix-contraction",
        (|| {
            let mut prev: Option<Rational> = None;
            let mut detail = Vec::new();
            let mut ok = true;
            for n in 2..=build.spec.depth() {
                let off = build.certificate(1, n)?.offset_bound;
                let step = build.steps.iter().find(|s| s.level == n).expect("one step per level");
                if let (Some(p), StepKind::Mix) = (&prev, step.kind) {
                    let ratio = &off / p;
                    ok &= ratio <= frac(1, 9);
                    detail.push(format!("level {n}: {}", rational::show(&ratio)));
                }
                prev = Some(off);
            }
            Ok((ok && !detail.is_empty(), detail.join(", ")))
        })(),
    );
    rows.push(
        "offset-equals-matrix",
        (|| {
            let top = build.spec.depth();
            let exact = build.spec.block_frequency_matrix(1, top)?;
            let half = frac(1, 2);
            let delta = exact.get(0, 0) - &half;
            let cert = build.certificate(1, top)?.offset_bound;
            Ok((delta == cert, format!("matrix offset {}, composed {}", rational::show(&delta), rational::show(&cert))))
        })(),
    );
    rows.push(
        "top-density-bracket",
        (|| {
            let top = build.spec.depth();
            let off = build.certificate(1, top)?.offset_bound;
            let gap = frac(6, 16);
            let (lo, hi) = (frac(13, 16) - &off * &gap, frac(13, 16) + &off * &gap);
            let area = build.spec.area(top)?;
            let mut ok = true;
            for id in 0..2 {
                let d = Rational::new(build.spec.occupied(top, id)?.into(), area.into());
                ok &= lo <= d && d <= hi;
            }
            Ok((ok, format!("bracket [{}, {}]", rational::show(&lo), rational::show(&hi))))
        })(),
    );
    rows.push(
        "delta-product",
        (|| {
            let mut rng = rng(opts, 3);
            let half = frac(1, 2);
            for _ in 0..opts.trials {
                let den = rng.gen_range(1..=1000);
                let a = frac(rng.gen_range(0..=den), 2 * den);
                let b = frac(rng.gen_range(0..=den), 2 * den);
                let m = |d: &Rational| [[&half + d, &half - d], [&half - d, &half + d]];
                let (x, y) = (m(&a), m(&b));
                let prod00 = &x[0][0] * &y[0][0] + &x[0][1] * &y[1][0];
                if prod00 - &half != delta_product(&a, &b)? {
                    return Ok((false, format!("mismatch at {}, {}", rational::show(&a), rational::show(&b))));
                }
            }
            Ok((true, format!("{} pairs", opts.trials)))
        })(),
    );
    rows.push("scheme", Ok(scheme_outcome(&build.spec)));
}

fn scheme_outcome(spec: &HierarchySpec) -> (bool, String) {
    let r = spec.validate_scheme();
    (r.all_passed(), r.to_string().trim_end().replace('\n', "; "))
}

/// Levels of `spec` small enough to materialize, with their ids.
fn small_levels(spec: &HierarchySpec, max_cells: u128) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n in 1..=spec.depth() {
        if spec.area(n).is_ok_and(|a| a <= max_cells) {
            out.extend((0..spec.patch_count(n).unwrap_or(0)).map(|id| (n, id)));
        }
    }
    out
}

/// Recursive counts against a scan of the materialized patch, in both
/// modes, for a level-1 needle and a small sliding needle.
fn counts_agree(spec: &HierarchySpec, max_cells: u128) -> Result<(bool, String)> {
    let first = spec.materialize(1, 0)?;
    let corner = first.sub_patch(0, 0, 2.min(first.width()), 2.min(first.height()));
    let mut checked = 0;
    for (n, id) in small_levels(spec, max_cells) {
        let p = spec.materialize(n, id)?;
        for needle in [&first, &corner] {
            let slide = spec.count_occurrences(needle, n, id, OccurrenceMode::Sliding)?;
            if slide != p.count_translates(needle) as u128 {
                return Ok((false, format!("sliding count differs at level {n} patch {}", id + 1)));
            }
        }
        let aligned = spec.count_occurrences(&first, n, id, OccurrenceMode::BlockAligned)?;
        let (w, h) = (first.width(), first.height());
        let mut scan = 0u128;
        for y in (0..p.height()).step_by(h) {
            for x in (0..p.width()).step_by(w) {
                scan += u128::from(p.sub_patch(x, y, w, h).same_cells(&first));
            }
        }
        if aligned != scan {
            return Ok((false, format!("aligned count differs at level {n} patch {}", id + 1)));
        }
        checked += 1;
    }
    Ok((checked > 0, format!("{checked} patches")))
}

fn nonrect(rows: &mut Rows, opts: &VerifyOptions) {
    let cfg = BuildConfig { depth: opts.depth, ..BuildConfig::default() };
    let spec = match cfg.build().map(|b| b.spec.expect("toy builds are materialized")) {
        Ok(s) => s,
        Err(e) => return rows.push("build", Err(e)),
    };
    rows.push("scheme", Ok(scheme_outcome(&spec)));
    rows.push(
        "densities-separate",
        (|| {
            let mut ok = true;
            for n in 1..=spec.depth() {
                let d = level_densities(&spec, n)?;
                ok &= d[0] < d[1];
            }
            Ok((ok, format!("{} levels", spec.depth())))
        })(),
    );
    rows.push("counts-agree", counts_agree(&spec, 1 << 16));
    rows.push("constants", constants_fixture());
    rows.push("chain-stretch-flagged", chain_controls().map(|(s, _, _)| (s.contradiction, format!("product² = {}", rational::show(&s.product_sq)))));
    rows.push(
        "chain-controls-clear",
        chain_controls().map(|(_, id, per)| {
            (!id.contradiction && !per.contradiction, format!("identity {}, periodic {}", rational::show(&id.product_sq), rational::show(&per.product_sq)))
        }),
    );
    rows.push("chain-heuristic-consistent", chain_heuristic_consistency());
}

fn constants_fixture() -> Result<(bool, String)> {
    let (lambda, m0, n0) = constants_remark1(&int(1), &int(1), 1)?;
    let mut ok = lambda == frac(1, 108) && m0 == 540u32.into() && n0 == 1082u32.into();
    let (lambda, m, n) = constants_remark2(&int(1), &int(1), &int(0))?;
    ok &= lambda == Rational::new(1.into(), 10_000_000_000u64.into())
        && m == 1_000_000_000_000_000u64.into()
        && n == 10_000_000_000u64.into();
    ok &= constant_p0(&int(1), &frac(1, 100))? == 10_800u32.into();
    ok &= ell_min(&int(1), &frac(1, 2))?.0 == 2u32.into();
    Ok((ok, "unit-parameter fixtures".into()))
}

fn stack(levels: usize) -> Result<HierarchySpec> {
    use crate::hierarchy::{Arrangement, LevelSpec};
    let mut spec = HierarchySpec::new(vec![Patch::full(4, 4, Point::new(0, 0))])?;
    for _ in 1..levels {
        spec.push_level(LevelSpec { arrangements: vec![Arrangement::uniform(3, 3, 0)], anchor: (0, 0), anchored: false })?;
    }
    Ok(spec)
}

/// A piecewise linear stretch whose slope drops by `3/2` at every level
/// boundary of a four-level stack of side 108.
fn stretch(x: i64) -> i64 {
    match x {
        ..=4 => 54 * x,
        5..=12 => 216 + 27 * (x - 4),
        13..=36 => 432 + 18 * (x - 12),
        _ => 864 + 12 * (x - 36),
    }
}

/// Chain reports with `λ = 1/2` and `L = 1` for a multi-level stretch, the
/// identity and a period-2 perturbation of doubling.
pub fn chain_controls() -> Result<(ChainReport, ChainReport, ChainReport)> {
    let spec = stack(4)?;
    let w = Window::new(0, 0, 108, 0);
    let none = BTreeSet::new();
    let run = |g: &dyn Fn(Point) -> Point| -> Result<ChainReport> {
        let f = CandidateMap::from_fn(w, w.points(), g)?;
        expansion_chain_report(&spec, &f, &frac(1, 2), &none, &int(1))
    };
    let s = run(&|p| Point::new(stretch(p.x), p.y))?;
    let id = run(&|p| p)?;
    let per = run(&|p| Point::new(2 * p.x + p.x.rem_euclid(2), 2 * p.y))?;
    Ok((s, id, per))
}

/// The chain report of a heuristic map on a toy patch against direct
/// distortion of the same pairs.
fn chain_heuristic_consistency() -> Result<(bool, String)> {
    let small = BuildConfig { depth: 1, ..BuildConfig::default() }.build()?.spec.expect("toy");
    let big = BuildConfig { depth: 2, ..BuildConfig::default() }.build()?.spec.expect("toy");
    let frame = small.frame(small.depth())?;
    let host = big.materialize(big.depth(), 0)?;
    let window = Window::new(
        frame.origin.x,
        frame.origin.y,
        frame.origin.x + frame.width as i64,
        frame.origin.y + frame.height as i64 - 1,
    );
    let points: Vec<Point> = window.points().filter(|&p| host.contains(p)).collect();
    let h = heuristic_grid_map(window, &points, HeuristicOptions::default())?;
    let report = expansion_chain_report(&small, &h.map, &frac(1, 10), &BTreeSet::new(), &int(1))?;
    let mut ok = true;
    for link in &report.links {
        let end = Point::new(link.origin.x + link.side as i64, link.origin.y);
        ok &= distortion(&h.map, &[(link.origin, end)])?.max_expansion_sq == link.expansion_sq;
    }
    let top_end = Point::new(frame.origin.x + frame.width as i64, frame.origin.y);
    ok &= distortion(&h.map, &[(frame.origin, top_end)])?.max_expansion_sq == report.top_expansion_sq;
    Ok((ok, format!("{} links, radius² {}", report.links.len(), h.radius_sq)))
}

fn choquet(rows: &mut Rows, opts: &VerifyOptions) {
    let cfg = ChoquetConfig { depth: (opts.depth + 1).min(3), ..ChoquetConfig::default() };
    let b = match cfg.build() {
        Ok(b) => b,
        Err(e) => return rows.push("build", Err(e)),
    };
    rows.push("K-validation", Ok((b.report.passed(), b.report.to_string().trim_end().replace('\n', "; "))));
    rows.push("scheme", Ok(scheme_outcome(&b.spec)));
    rows.push(
        "counts-match-matrices",
        (|| {
            let mut ok = true;
            for n in 1..b.spec.depth() {
                ok &= b.spec.count_matrix(n)? == b.cs.matrices[n - 1];
            }
            Ok((ok, format!("{} levels", b.spec.depth() - 1)))
        })(),
    );
    rows.push(
        "anchor-cell",
        (|| {
            let mut ok = true;
            for n in 2..=b.spec.depth() {
                for id in 0..b.spec.patch_count(n)? {
                    let a = b.spec.arrangement(n, id)?;
                    ok &= a.get(a.rows() - 1, a.cols() - 1) == 0;
                }
            }
            Ok((ok, "top-right cell holds patch 1".into()))
        })(),
    );
    rows.push(
        "cardinality-formula",
        (|| {
            let n = 2.min(b.spec.depth());
            let mut ok = true;
            for k in 0..b.spec.patch_count(n)? {
                let formula = patch_cardinality_formula(&b.cs, b.witness.i0, n, k)?;
                ok &= formula == (b.spec.occupied(n, k)? as u64).into();
            }
            Ok((ok, format!("level {n}")))
        })(),
    );
    rows.push(
        "measure-recursion",
        (|| {
            let depth = b.cs.matrices.len();
            let mu = measure_vectors(&b.cs, depth, &Terminal::Barycenter)?;
            let r = recursion_residual(&b.cs, &mu)?;
            Ok((r == int(0), format!("residual {}", rational::show(&r))))
        })(),
    );
    rows.push(
        "density-inequalities",
        (|| {
            let (d, dp) = density_bounds(&b.cs.seq.p[0], &b.witness);
            let mut ok = d > dp;
            for n in 2..=b.cs.matrices.len() {
                let (j, jp) = b.witness.columns[n - 2];
                let pn2 = rational::big(&b.cs.seq.q[n - 1]);
                let hi = rational::big(&patch_cardinality_formula(&b.cs, b.witness.i0, n, j)?);
                let lo = rational::big(&patch_cardinality_formula(&b.cs, b.witness.i0, n, jp)?);
                ok &= hi >= &pn2 * &d && &pn2 * &dp >= lo;
            }
            Ok((ok, format!("d = {}, d' = {}", rational::show(&d), rational::show(&dp))))
        })(),
    );
}

fn hierarchy(rows: &mut Rows, opts: &VerifyOptions) {
    let spec = match &opts.spec {
        Some(s) => s.clone(),
        None => match build_ue_spec(1, Default::default()) {
            Ok(b) => b.spec,
            Err(e) => return rows.push("build", Err(e)),
        },
    };
    rows.push("scheme", Ok(scheme_outcome(&spec)));
    rows.push("counts-agree", counts_agree(&spec, 1 << 16));
    rows.push(
        "round-trip",
        HierarchySpec::from_dhs(&spec.to_dhs()).map(|s| (s.to_dhs() == spec.to_dhs(), "descriptor text".into())),
    );
    rows.push(
        "repetitivity",
        (|| {
            let top = small_levels(&spec, 1 << 12).into_iter().map(|(n, _)| n).max().unwrap_or(1);
            let patch = spec.materialize(top, 0)?;
            let mut detail = Vec::new();
            let mut ok = true;
            for r in [1, 2, 4] {
                match estimate_repetitivity(&patch, r)? {
                    Repetitivity::Finite(big) => {
                        ok &= naive_repetitivity_holds(&patch, r, big) && (big == r || !naive_repetitivity_holds(&patch, r, big - 1));
                        detail.push(format!("R({r}) = {big}"));
                    }
                    Repetitivity::WindowTooSmall => detail.push(format!("R({r}) beyond the window")),
                }
            }
            Ok((ok, format!("level {top}: {}", detail.join(", "))))
        })(),
    );
}

fn lab(rows: &mut Rows, opts: &VerifyOptions) {
    let grid = GridSpec::new(4, 2, 2).expect("valid grid");
    let window = Window::new(0, 0, grid.length(), grid.m);
    let identity = CandidateMap::identity(window, window.points()).expect("identity");
    rows.push(
        "identity-predicates",
        (|| {
            let stretched = check_no_stretch(&identity, &grid, &int(0))?.len();
            let regular = find_regular_square(&identity, &grid, &frac(1, 10))?;
            let all_regular = (1..grid.squares()).all(|k| regular.is_regular(k));
            let mut flat = true;
            for k in 1..grid.squares() {
                flat &= coarse_derivative_deviation(&identity, &grid, k)?.max_sq == int(0);
            }
            Ok((stretched == 0 && all_regular && flat, format!("{stretched} stretched steps")))
        })(),
    );
    rows.push(
        "single-stretch-witness",
        (|| {
            let f = CandidateMap::from_fn(window, window.points(), |p| if p.x >= 7 { Point::new(p.x + 2, p.y) } else { p })?;
            let v = check_no_stretch(&f, &grid, &frac(1, 2))?;
            let starts: Vec<Point> = v.iter().map(|s| s.probe.at).collect();
            let want = vec![Point::new(6, 0), Point::new(6, 2), Point::new(6, 4)];
            let ok = starts == want && v.iter().all(|s| s.stretch_sq == frac(1024, 324));
            Ok((ok, format!("{} violations", v.len())))
        })(),
    );
    rows.push(
        "random-maps-defined",
        (|| {
            let mut rng = rng(opts, 4);
            for _ in 0..opts.trials {
                let keep: Vec<Point> = window.points().filter(|p| p.x % 2 == 0 || rng.gen_bool(0.5)).collect();
                let f = CandidateMap::from_fn(window, keep, |p| Point::new(3 * p.x, 3 * p.y))?;
                let hat = hat_extend(&f)?;
                check_no_stretch(&f, &grid, &frac(1, 10))?;
                find_regular_square(&hat, &grid, &frac(1, 10))?;
                if hat.image_doubled(Point::new(grid.length(), grid.m)).is_none() {
                    return Ok((false, "hat misses the far corner".into()));
                }
            }
            Ok((true, format!("{} maps", opts.trials)))
        })(),
    );
}
