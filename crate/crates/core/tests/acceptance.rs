//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//! Every library value is compared against an oracle written here.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use delone_core::choquet::{
    density_bounds, measure_vectors, patch_cardinality_formula, recursion_residual, validate_K, ChoquetBuild,
    ChoquetConfig, StripeRule, Terminal,
};
use delone_core::hierarchy::{estimate_repetitivity, naive_repetitivity_holds, Repetitivity};
use delone_core::lab::*;
use delone_core::lattice::{CandidateMap, LatticeMap, Window};
use delone_core::nonrect::{
    constant_p0, constants_remark1, constants_remark2, ell_min, initial_squares, BuildConfig, LSchedule,
};
use delone_core::rational::{frac, int, show};
use delone_core::ue::{build_ue_spec, delta_product, MixMatrix, StepKind};
use delone_core::verify::{chain_controls, hat_constants, random_admissible_curve, random_bilip_map};
use delone_core::{HierarchySpec, OccurrenceMode, Patch, Point, Rational};
use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Fail(String);

impl From<delone_core::Error> for Fail {
    fn from(e: delone_core::Error) -> Self {
        Fail(format!("error: {e}"))
    }
}

type Outcome = Result<String, Fail>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Fail> {
    if cond {
        Ok(())
    } else {
        Err(Fail(msg()))
    }
}

fn ones(p: &Patch) -> u64 {
    let mut n = 0;
    for y in 0..p.height() {
        for x in 0..p.width() {
            n += u64::from(p.get(x, y));
        }
    }
    n
}

fn scan_density(p: &Patch) -> Rational {
    Rational::new(ones(p).into(), (p.area() as u64).into())
}

fn same(a: &Patch, ax: usize, ay: usize, b: &Patch) -> bool {
    (0..b.height()).all(|y| (0..b.width()).all(|x| a.get(ax + x, ay + y) == b.get(x, y)))
}

fn naive_sliding(hay: &Patch, needle: &Patch) -> u128 {
    if needle.width() > hay.width() || needle.height() > hay.height() {
        return 0;
    }
    let mut n = 0;
    for y in 0..=hay.height() - needle.height() {
        for x in 0..=hay.width() - needle.width() {
            n += u128::from(same(hay, x, y, needle));
        }
    }
    n
}

fn naive_aligned(hay: &Patch, needle: &Patch) -> u128 {
    let (w, h) = (needle.width(), needle.height());
    let mut n = 0;
    for y in (0..hay.height()).step_by(h) {
        for x in (0..hay.width()).step_by(w) {
            n += u128::from(same(hay, x, y, needle));
        }
    }
    n
}

/// Share of the aligned level-`m` tiles of `hay` equal to each needle.
fn tile_frequencies(hay: &Patch, needles: &[Patch]) -> Vec<Rational> {
    let (w, h) = (needles[0].width(), needles[0].height());
    let tiles = (hay.width() / w) * (hay.height() / h);
    needles
        .iter()
        .map(|nd| Rational::new((naive_aligned(hay, nd) as u64).into(), (tiles as u64).into()))
        .collect()
}

fn nonrect_toy(depth: usize) -> Result<HierarchySpec, Fail> {
    let cfg = BuildConfig { depth, schedule: LSchedule::constant(int(1), depth), ..BuildConfig::default() };
    Ok(cfg.build()?.spec.expect("toy builds are materialized"))
}

fn choquet_default() -> Result<ChoquetBuild, Fail> {
    Ok(ChoquetConfig::default().build()?)
}

fn c1_corner_densities() -> Outcome {
    let [sparse, full] = initial_squares();
    let start = Instant::now();
    let ds = sparse.corner_density(4)?;
    let df = full.corner_density(4)?;
    let took = start.elapsed();
    let scan = |p: &Patch| scan_density(&p.sub_patch(0, 0, 4, 4));
    ensure(ds == frac(10, 16) && df == frac(16, 16), || format!("got {} and {}", show(&ds), show(&df)))?;
    ensure(scan(&sparse) == ds && scan(&full) == df, || "corner scan disagrees".into())?;
    ensure(took < Duration::from_millis(1), || format!("took {took:?}"))?;
    Ok(format!("10/16 and 16/16 in {took:?}"))
}

fn c2_limit_density() -> Outcome {
    let start = Instant::now();
    let b = build_ue_spec(3, Default::default())?;
    let top = b.spec.depth();
    let d0 = scan_density(&b.spec.materialize(1, 0)?);
    let d1 = scan_density(&b.spec.materialize(1, 1)?);
    let limit = b.limit_density()?;
    ensure(limit == frac(13, 16) && (&d0 + &d1) / int(2) == limit, || format!("limit {}", show(&limit)))?;
    let off = b.certificate(1, top)?.offset_bound;
    let spread = if d1 > d0 { &d1 - &d0 } else { &d0 - &d1 };
    let (lo, hi) = (&limit - &off * &spread, &limit + &off * &spread);
    let mut shown = Vec::new();
    for id in 0..2 {
        let d = scan_density(&b.spec.materialize(top, id)?);
        ensure(lo <= d && d <= hi, || format!("patch {} density {} outside [{}, {}]", id + 1, show(&d), show(&lo), show(&hi)))?;
        shown.push(show(&d));
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    let (w, _) = b.spec.dims(top)?;
    Ok(format!("13/16; level {top} ({w}x{w}) densities {} within ±{} in {took:.2?}", shown.join(", "), show(&(&off * &spread))))
}

fn c3_contraction() -> Outcome {
    let b = build_ue_spec(3, Default::default())?;
    let level1 = [b.spec.materialize(1, 0)?, b.spec.materialize(1, 1)?];
    let half = frac(1, 2);
    let mut prev: Option<Rational> = None;
    let mut ratios = Vec::new();
    for n in 2..=6 {
        let off = b.certificate(1, n)?.offset_bound;
        let a = b.spec.block_frequency_matrix(1, n)?;
        ensure(MixMatrix::from_matrix(&a)?.delta == off, || format!("level {n}: matrix offset differs from composed offset"))?;
        for k in 0..2 {
            let freq = tile_frequencies(&b.spec.materialize(n, k)?, &level1);
            let want = if k == 0 { [&half + &off, &half - &off] } else { [&half - &off, &half + &off] };
            ensure(freq == want, || format!("level {n} patch {}: tile scan differs from 1/2 ± offset", k + 1))?;
        }
        let step = b.steps.iter().find(|s| s.level == n).expect("one step per level");
        if let (StepKind::Mix, Some(p)) = (step.kind, &prev) {
            let ratio = &off / p;
            ensure(ratio <= frac(1, 9), || format!("level {n}: ratio {}", show(&ratio)))?;
            ratios.push(format!("level {n}: {}", show(&ratio)));
        }
        prev = Some(off);
    }
    ensure(!ratios.is_empty(), || "no mixing step up to level 6".into())?;
    Ok(format!("levels 2..=6 match tile scans; mixing ratios {}", ratios.join(", ")))
}

fn c4_delta_product() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let half = frac(1, 2);
    let m = |d: &Rational| [[&half + d, &half - d], [&half - d, &half + d]];
    for _ in 0..10_000 {
        let (da, db) = (rng.gen_range(1..=10_000i64), rng.gen_range(1..=10_000i64));
        let a = frac(rng.gen_range(0..=da), 2 * da);
        let b = frac(rng.gen_range(0..=db), 2 * db);
        let (x, y) = (m(&a), m(&b));
        let got = delta_product(&a, &b)?;
        let want = m(&got);
        for i in 0..2 {
            for j in 0..2 {
                let e = &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
                ensure(e == want[i][j], || format!("mismatch at {}, {}", show(&a), show(&b)))?;
            }
        }
    }
    Ok("10000 pairs".into())
}

fn ceil_q(q: &Rational) -> BigUint {
    let (n, d) = (q.numer().clone(), q.denom().clone());
    let c: BigInt = (n + &d - BigInt::from(1)) / d;
    c.to_biguint().expect("nonnegative")
}

fn qpow(q: &Rational, e: u32) -> Rational {
    (0..e).fold(int(1), |acc, _| acc * q)
}

fn c5_constants() -> Outcome {
    let r1: [(Rational, Rational, u64); 6] = [
        (int(1), int(1), 1),
        (int(1), frac(1, 2), 3),
        (frac(3, 2), frac(1, 10), 7),
        (int(2), frac(1, 100), 100),
        (int(5), frac(2, 3), 11),
        (frac(7, 4), frac(1, 7), 5184),
    ];
    let mut sets = 0;
    for (l, e, p) in &r1 {
        let (lambda, m0, n0) = constants_remark1(l, e, *p)?;
        let pq = Rational::from_integer((*p).into());
        ensure(lambda == e * e / (int(108) * &pq * l * l), || format!("lambda for {}", show(l)))?;
        ensure(m0 == ceil_q(&(int(108) * &pq * &pq * l * l * (l + int(4)) / (e * e))), || "M0".into())?;
        ensure(n0 == BigUint::from(2u32) + ceil_q(&(int(216) * l * l * &pq * (int(3) * l * l + &pq + int(1)) / (e * e))), || "N0".into())?;
        let (ell, _) = ell_min(l, &lambda)?;
        ensure(ell == ceil_q(&(l * l / &lambda)), || "ell".into())?;
        sets += 1;
    }
    let (lambda, m0, n0) = constants_remark1(&int(1), &int(1), 1)?;
    ensure(lambda == frac(1, 108) && m0 == 540u32.into() && n0 == 1082u32.into(), || "unit fixture".into())?;

    let r2: [(Rational, Rational, Rational); 5] = [
        (int(1), int(1), int(0)),
        (int(1), frac(13, 16), frac(5, 8)),
        (int(2), frac(1, 2), frac(1, 4)),
        (frac(3, 2), frac(9, 10), frac(1, 10)),
        (int(3), frac(11711, 14400), frac(4665647, 5760000)),
    ];
    let ten = |e: u32| qpow(&int(10), e);
    for (l, d, dp) in &r2 {
        let (lambda, m, n) = constants_remark2(l, d, dp)?;
        let g = d - dp;
        ensure(lambda == qpow(&g, 3) / (ten(10) * qpow(l, 7)), || "lambda".into())?;
        ensure(m == ceil_q(&(ten(15) * qpow(l, 11) / qpow(&g, 4))), || "M*".into())?;
        ensure(n == ceil_q(&(ten(10) * qpow(l, 10) / qpow(&g, 4))), || "N*".into())?;
        sets += 1;
    }
    let (lambda, m, n) = constants_remark2(&int(1), &int(1), &int(0))?;
    ensure(lambda == frac(1, 10_000_000_000) && m == ten(15).to_integer().to_biguint().unwrap() && n == 10_000_000_000u64.into(), || "unit gap fixture".into())?;

    let p0: [(Rational, Rational, u64); 5] = [
        (int(1), frac(1, 100), 10_800),
        (int(1), frac(1, 10_000), 1_080_000),
        (int(1), int(1), 5184),
        (int(2), frac(1, 2), 82_944),
        (frac(3, 2), frac(1, 1000), 243_000),
    ];
    for (l, e, want) in &p0 {
        let lh = int(6) * l;
        let a = int(4) * qpow(&lh, 4);
        let b = int(3) * &lh * &lh / e;
        let oracle = ceil_q(if a > b { &a } else { &b });
        let got = constant_p0(l, e)?;
        ensure(got == oracle && got == BigUint::from(*want), || format!("P0({}, {}) = {got}", show(l), show(e)))?;
        sets += 1;
    }

    let ells: [(Rational, Rational, u64); 5] = [
        (int(1), frac(1, 2), 2),
        (int(2), frac(1, 3), 12),
        (frac(3, 2), frac(1, 4), 9),
        (int(3), frac(1, 100), 900),
        (frac(5, 4), frac(1, 1000), 1563),
    ];
    for (l, lambda, want) in &ells {
        let (ell, _) = ell_min(l, lambda)?;
        ensure(ell == BigUint::from(*want), || format!("ell({}, {}) = {ell}", show(l), show(lambda)))?;
        let power = qpow(&(int(1) + lambda), *want as u32);
        ensure(power > l * l, || format!("(1+lambda)^ell <= L^2 at {}", show(l)))?;
        sets += 1;
    }
    Ok(format!("{sets} parameter sets"))
}

/// Squared bi-Lipschitz constant from doubled images over all pairs.
fn pair_constant_sq(pts: &[Point], img: &[(i64, i64)]) -> Rational {
    // max expansion num/den and min expansion num/den, images doubled
    let (mut hi, mut lo): ((i128, i128), (i128, i128)) = ((0, 1), (i128::MAX, 1));
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (dx, dy) = ((img[i].0 - img[j].0) as i128, (img[i].1 - img[j].1) as i128);
            let num = dx * dx + dy * dy;
            let den = 4 * pts[i].dist_sq(pts[j]) as i128;
            if num * hi.1 > hi.0 * den {
                hi = (num, den);
            }
            if lo.0 == i128::MAX || num * lo.1 < lo.0 * den {
                lo = (num, den);
            }
        }
    }
    let max_e = Rational::new(hi.0.into(), hi.1.into());
    let min_e = Rational::new(lo.0.into(), lo.1.into());
    let inv = min_e.recip();
    if max_e > inv {
        max_e
    } else {
        inv
    }
}

fn c6_hat_extension() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = int(0);
    for t in 0..200 {
        let f = random_bilip_map(&mut rng, 20)?;
        let w = f.window();
        ensure(w.x1 - w.x0 < 20 && w.y1 - w.y0 < 20, || "window wider than 20".into())?;
        let dom: Vec<Point> = f.domain().collect();
        let img: Vec<(i64, i64)> = dom.iter().map(|&p| f.get(p).map(|q| (2 * q.x, 2 * q.y)).unwrap()).collect();
        let l_sq = pair_constant_sq(&dom, &img);
        let cells: Vec<Point> = w.points().collect();
        let mut himg = Vec::with_capacity(cells.len());
        for &p in &cells {
            let d = match f.get(p) {
                Some(q) => (2 * q.x, 2 * q.y),
                None => {
                    let q = f.get(p + Point::new(1, 0)).ok_or_else(|| Fail(format!("map {t}: no right neighbour at {p}")))?;
                    (2 * q.x - 1, 2 * q.y)
                }
            };
            himg.push(d);
        }
        let h_sq = pair_constant_sq(&cells, &himg);
        let (lib_l, lib_h) = hat_constants(&f)?;
        ensure(lib_l == l_sq && lib_h == h_sq, || format!("map {t}: library constants differ from the pair scan"))?;
        ensure(h_sq <= int(36) * &l_sq, || format!("map {t}: hat² {} > 36 L² = {}", show(&h_sq), show(&(int(36) * &l_sq))))?;
        let ratio = h_sq / (int(36) * l_sq);
        if ratio > worst {
            worst = ratio;
        }
    }
    Ok(format!("200 maps, largest hat²/(6L)² = {}", show(&worst)))
}

fn naive_near_count(c: &Curve, t: &Rational) -> u64 {
    let n = c.vertices.len();
    let t_sq = t * t;
    let fl = |q: &Rational| -> i64 { q.floor().to_integer().try_into().unwrap() };
    let r: i64 = t.ceil().to_integer().try_into().unwrap();
    let x0 = c.vertices.iter().map(|v| fl(&v.x)).min().unwrap() - r - 1;
    let x1 = c.vertices.iter().map(|v| fl(&v.x)).max().unwrap() + r + 2;
    let y0 = c.vertices.iter().map(|v| fl(&v.y)).min().unwrap() - r - 1;
    let y1 = c.vertices.iter().map(|v| fl(&v.y)).max().unwrap() + r + 2;
    let mut count = 0;
    for x in x0..=x1 {
        for y in y0..=y1 {
            let p = QPoint::new(int(x), int(y));
            let near = (0..n).any(|s| {
                let (a, b) = (&c.vertices[s], &c.vertices[(s + 1) % n]);
                let d = (&b.x - &a.x, &b.y - &a.y);
                let len = &d.0 * &d.0 + &d.1 * &d.1;
                let u = if len == int(0) {
                    int(0)
                } else {
                    (((&p.x - &a.x) * &d.0 + (&p.y - &a.y) * &d.1) / len).max(int(0)).min(int(1))
                };
                let foot = QPoint::new(&a.x + &u * &d.0, &a.y + &u * &d.1);
                p.dist_sq(&foot) <= t_sq
            });
            count += u64::from(near);
        }
    }
    count
}

fn c7_isoperimetric() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0f64;
    for i in 0..1000 {
        let (c, t) = random_admissible_curve(&mut rng);
        let count = lattice_near_curve_count(&c, &t)?;
        let bound = 25.0 * delone_core::rational::to_f64(&t) * c.length;
        ensure(count as f64 <= bound, || format!("curve {i}: {count} > {bound}"))?;
        if i % 20 == 0 {
            ensure(count == naive_near_count(&c, &t), || format!("curve {i}: count differs from the point scan"))?;
        }
        worst = worst.max(count as f64 / bound);
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("1000 curves, largest count/bound {worst:.4}, {took:.2?}"))
}

const MAX_CELLS: u128 = 1 << 24;

fn count_levels(spec: &HierarchySpec) -> Result<usize, Fail> {
    let l1 = spec.materialize(1, 0)?;
    let mut needles = vec![l1.sub_patch(0, 0, 2, 2), l1.sub_patch(1, 1, 3, 2)];
    for i in 0..spec.patch_count(1)? {
        needles.push(spec.materialize(1, i)?);
    }
    if spec.depth() >= 2 {
        let l2 = spec.materialize(2, 0)?;
        needles.push(l2.clone());
        let (w, h) = (l2.width().min(7), l2.height().min(5));
        needles.push(l2.sub_patch(l2.width() - w, 1.min(l2.height() - h), w, h));
    }
    let mut checked = 0;
    for n in 1..=spec.depth() {
        if spec.area(n)? > MAX_CELLS {
            continue;
        }
        for id in 0..spec.patch_count(n)? {
            let hay = spec.materialize(n, id)?;
            for nd in &needles {
                if nd.width() > hay.width() || nd.height() > hay.height() {
                    continue;
                }
                let got = spec.count_occurrences(nd, n, id, OccurrenceMode::Sliding)?;
                ensure(got == naive_sliding(&hay, nd), || format!("sliding count at level {n} patch {}", id + 1))?;
                let is_level = (1..=n).any(|m| spec.dims(m).is_ok_and(|d| d == (nd.width(), nd.height())));
                if is_level {
                    let got = spec.count_occurrences(nd, n, id, OccurrenceMode::BlockAligned)?;
                    ensure(got == naive_aligned(&hay, nd), || format!("aligned count at level {n} patch {}", id + 1))?;
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn c8_oracle_equivalence() -> Outcome {
    let nonrect = nonrect_toy(6)?;
    let ue = build_ue_spec(3, Default::default())?.spec;
    let choquet = choquet_default()?.spec;
    let mut parts = Vec::new();
    for (name, spec) in [("nonrect", &nonrect), ("ue", &ue), ("choquet", &choquet)] {
        let k = count_levels(spec)?;
        let top = (1..=spec.depth()).filter(|&n| spec.area(n).is_ok_and(|a| a <= MAX_CELLS)).max().unwrap_or(0);
        parts.push(format!("{name} {k} patches up to level {top}"));
    }
    Ok(parts.join(", "))
}

fn baseline(f: &impl LatticeMap, g: &GridSpec) -> (Rational, Rational) {
    sub(&half(f, Point::new(g.length(), 0)), &half(f, Point::new(0, 0)))
}

fn half(f: &impl LatticeMap, p: Point) -> (Rational, Rational) {
    let h = f.image_half(p).unwrap();
    (h.x(), h.y())
}

fn sub(a: &(Rational, Rational), b: &(Rational, Rational)) -> (Rational, Rational) {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn norm_sq(v: &(Rational, Rational)) -> Rational {
    &v.0 * &v.0 + &v.1 * &v.1
}

fn naive_stretch(f: &CandidateMap, g: &GridSpec, lambda: &Rational) -> BTreeSet<Point> {
    let v = baseline(f, g);
    let bound = (int(1) + lambda) * (int(1) + lambda) * norm_sq(&v) / int(g.length() * g.length());
    let mut out = BTreeSet::new();
    for k in 1..=g.squares() {
        for i in 0..=g.p {
            for j in 0..=g.p {
                let x = g.point(k, i, j);
                let next = g.point(k, i + 1, j);
                let Some(fx) = f.get(x) else { continue };
                let (y, span) = match f.get(next) {
                    Some(_) => (next, g.pitch()),
                    None => (next + Point::new(1, 0), 1 + g.pitch()),
                };
                let Some(fy) = f.get(y) else { continue };
                if Rational::from_integer(fy.dist_sq(fx).into()) / int(span * span) > bound {
                    out.insert(x);
                }
            }
        }
    }
    out
}

fn naive_regular(fhat: &impl LatticeMap, g: &GridSpec, tau: &Rational) -> (Option<i64>, Vec<Rational>) {
    let v = baseline(fhat, g);
    let threshold = (int(1) - tau) * norm_sq(&v) / int(g.length());
    let mut mins = Vec::new();
    for k in 1..g.squares() {
        let mut least: Option<Rational> = None;
        for i in 0..=g.p {
            for j in 0..=g.p {
                let x = g.point(k, i, j);
                let d = sub(&half(fhat, x + Point::new(g.m, 0)), &half(fhat, x));
                let proj = (&d.0 * &v.0 + &d.1 * &v.1) / int(g.m);
                if least.as_ref().is_none_or(|l| proj < *l) {
                    least = Some(proj);
                }
            }
        }
        mins.push(least.unwrap());
    }
    (mins.iter().position(|m| *m >= threshold).map(|i| i as i64 + 1), mins)
}

fn naive_deviation(fhat: &impl LatticeMap, g: &GridSpec, k: i64) -> Rational {
    let v = baseline(fhat, g);
    let mut best = int(0);
    for i in 0..=g.p {
        for j in 0..=g.p {
            let x = g.point(k, i, j);
            let d = sub(&half(fhat, x + Point::new(g.m, 0)), &half(fhat, x));
            let e = (&d.0 / int(g.m) - &v.0 / int(g.length()), &d.1 / int(g.m) - &v.1 / int(g.length()));
            best = best.max(norm_sq(&e));
        }
    }
    best
}

fn c9_predicates() -> Outcome {
    let g = GridSpec::new(4, 2, 2)?;
    let w = Window::new(0, 0, g.length(), g.m);
    let id = CandidateMap::identity(w, w.points())?;
    let hat = delone_core::lattice::hat_extend(&id)?;
    ensure(check_no_stretch(&id, &g, &int(0))?.is_empty(), || "identity has stretched steps".into())?;
    let reg = find_regular_square(&hat, &g, &frac(1, 10))?;
    ensure((1..g.squares()).all(|k| reg.is_regular(k)), || "identity has an irregular square".into())?;
    for k in 1..g.squares() {
        ensure(coarse_derivative_deviation(&hat, &g, k)?.max_sq == int(0), || format!("identity deviates in square {k}"))?;
    }

    let jump = CandidateMap::from_fn(w, w.points(), |p| if p.x >= 7 { Point::new(p.x + 2, p.y) } else { p })?;
    let v = check_no_stretch(&jump, &g, &frac(1, 2))?;
    let starts: Vec<Point> = v.iter().map(|s| s.probe.at).collect();
    ensure(starts == [Point::new(6, 0), Point::new(6, 2), Point::new(6, 4)], || format!("witness {starts:?}"))?;
    ensure(v.iter().all(|s| s.stretch_sq == frac(1024, 324)), || "witness stretch".into())?;
    ensure(starts.iter().copied().collect::<BTreeSet<_>>() == naive_stretch(&jump, &g, &frac(1, 2)), || "witness scan".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for t in 0..100 {
        let (m, n, p) = [(4, 2, 2), (6, 1, 3), (3, 2, 1), (6, 2, 3)][t % 4];
        let g = GridSpec::new(m, n, p)?;
        let w = Window::new(0, 0, g.length(), g.m);
        let keep: Vec<Point> = w.points().filter(|p| p.x % 2 == 0 || rng.gen_bool(0.5)).collect();
        let noise: Vec<Point> = keep.iter().map(|_| Point::new(rng.gen_range(-1..=1), rng.gen_range(-1..=1))).collect();
        let f = CandidateMap::new(w, keep.iter().zip(&noise).map(|(&p, &e)| (p, Point::new(3 * p.x, 3 * p.y) + e)))?;
        let hat = delone_core::lattice::hat_extend(&f)?;
        for lambda in [int(0), frac(1, 10), frac(1, 2)] {
            let got: BTreeSet<Point> = check_no_stretch(&f, &g, &lambda)?.iter().map(|s| s.probe.at).collect();
            ensure(got == naive_stretch(&f, &g, &lambda), || format!("map {t}: stretched steps differ"))?;
        }
        for tau in [frac(1, 20), frac(1, 4)] {
            let r = find_regular_square(&hat, &g, &tau)?;
            ensure((r.k_star, r.min_projection) == naive_regular(&hat, &g, &tau), || format!("map {t}: regular squares differ"))?;
        }
        for k in 1..g.squares() {
            ensure(coarse_derivative_deviation(&hat, &g, k)?.max_sq == naive_deviation(&hat, &g, k), || format!("map {t}: deviation differs"))?;
        }
    }
    Ok("identity, single-stretch witness and 100 random maps".into())
}

fn c10_choquet_structure() -> Outcome {
    let b = choquet_default()?;
    let spec = &b.spec;
    let strict = validate_K(&b.cs, true);
    for prop in ["K1", "K2", "K3", "K4", "K5", "K6"] {
        ensure(strict.get(prop).is_some_and(|c| c.passed()), || format!("{prop} fails:\n{strict}"))?;
    }
    let k1 = b.cs.matrices[0].rows();
    let cfg = ChoquetConfig::default();
    for n in 1..spec.depth() {
        let (l, r) = (cfg.l[n - 1] as usize, cfg.r[n - 1] as usize);
        let (j, jp) = b.witness.stripe_ids(n, k1).ok_or_else(|| Fail("no stripe ids".into()))?;
        let p_next = spec.dims(n + 1)?.0 as u128;
        let a = &b.cs.matrices[n - 1];
        let lower = spec.patch_count(n)?;
        for k in 0..spec.patch_count(n + 1)? {
            let arr = spec.arrangement(n + 1, k)?;
            let g = arr.rows();
            ensure(arr.get(g - 1, g - 1) == 0, || format!("P1: level {} patch {}", n + 1, k + 1))?;
            for row in 0..r {
                for c in 0..g {
                    let want = if StripeRule::Literal.primary(c, l, r, p_next) { j } else { jp };
                    ensure(arr.get(row, c) == want, || format!("P2: level {} patch {} cell ({row}, {c})", n + 1, k + 1))?;
                }
            }
            ensure(arr.cells().iter().all(|&i| i < lower), || format!("P3: level {} patch {}", n + 1, k + 1))?;
            for i in 0..lower {
                let want = a.get(i, k).to_integer();
                ensure(BigInt::from(arr.cells().iter().filter(|&&c| c == i).count()) == want, || {
                    format!("P4: level {} patch {} id {}", n + 1, k + 1, i + 1)
                })?;
            }
        }
        ensure(spec.count_matrix(n)? == *a, || format!("count matrix at level {n}"))?;
        let hay = spec.materialize(n + 1, 0)?;
        let tiles = tile_frequencies(&hay, &(0..lower).map(|i| spec.materialize(n, i)).collect::<Result<Vec<_>, _>>()?);
        let total: u64 = (0..lower).map(|i| a.get(i, 0).to_integer().try_into().unwrap_or(0u64)).sum();
        for (i, f) in tiles.iter().enumerate() {
            ensure(*f == a.get(i, 0) / int(total as i64), || format!("P4 scan: level {} id {}", n + 1, i + 1))?;
        }
    }
    let top = 2;
    for k in 0..spec.patch_count(top)? {
        let formula = patch_cardinality_formula(&b.cs, b.witness.i0, top, k)?;
        let scan = ones(&spec.materialize(top, k)?);
        ensure(formula == BigUint::from(scan), || format!("cardinality of level 2 patch {}: {formula} vs {scan}", k + 1))?;
    }
    let mu = measure_vectors(&b.cs, b.cs.matrices.len(), &Terminal::Barycenter)?;
    let residual = recursion_residual(&b.cs, &mu)?;
    ensure(residual == int(0), || format!("residual {}", show(&residual)))?;
    let (d, dp) = density_bounds(&b.cs.seq.p[0], &b.witness);
    ensure(d > dp, || "d <= d'".into())?;
    for n in 2..=b.cs.matrices.len() {
        let (j, jp) = b.witness.columns[n - 2];
        let q = Rational::from_integer(BigInt::from(b.cs.seq.q[n - 1].clone()));
        let hi = Rational::from_integer(patch_cardinality_formula(&b.cs, b.witness.i0, n, j)?.into());
        let lo = Rational::from_integer(patch_cardinality_formula(&b.cs, b.witness.i0, n, jp)?.into());
        ensure(hi >= &q * &d && &q * &dp >= lo, || format!("density inequalities at level {n}"))?;
    }
    Ok(format!("P1-P4 on {} levels, K1-K6 strict, residual 0, d = {}, d' = {}", spec.depth() - 1, show(&d), show(&dp)))
}

fn repetitivity_on(name: &str, patch: &Patch) -> Result<String, Fail> {
    let mut found = Vec::new();
    for r in [1, 2, 4] {
        match estimate_repetitivity(patch, r)? {
            Repetitivity::Finite(big) => {
                ensure(naive_repetitivity_holds(patch, r, big), || format!("{name}: R({r}) = {big} fails the scan"))?;
                ensure(big == r || !naive_repetitivity_holds(patch, r, big - 1), || format!("{name}: R({r}) = {big} is not least"))?;
                found.push(format!("R({r}) = {big}"));
            }
            Repetitivity::WindowTooSmall => return Err(Fail(format!("{name}: R({r}) beyond the {}x{} window", patch.width(), patch.height()))),
        }
    }
    Ok(format!("{name} {}x{}: {}", patch.width(), patch.height(), found.join(", ")))
}

/// The first window large enough to exhibit `R(4)`: whole patches level by
/// level, then squares of `k × k` blocks cut from the lower left of the
/// first patch too large to scan.
fn smallest_repetitive_window(name: &str, spec: &HierarchySpec) -> Result<String, Fail> {
    const LIMIT: u128 = 1 << 16;
    for n in 1..=spec.depth() {
        if spec.area(n)? > LIMIT {
            let side = spec.dims(n - 1)?.0;
            for k in 2.. {
                if ((k * side) as u128).pow(2) > LIMIT {
                    break;
                }
                let w = spec.extract(n, 0, 0, 0, k * side, k * side)?;
                if matches!(estimate_repetitivity(&w, 4)?, Repetitivity::Finite(_)) {
                    return Ok(format!("{k}x{k} blocks of level {}, {}", n - 1, repetitivity_on(name, &w)?));
                }
            }
            break;
        }
        let patch = spec.materialize(n, 0)?;
        if matches!(estimate_repetitivity(&patch, 4)?, Repetitivity::Finite(_)) {
            return Ok(format!("level {n}, {}", repetitivity_on(name, &patch)?));
        }
    }
    Err(Fail(format!("{name}: no window up to 2^16 cells contains R(4)")))
}

fn c11_repetitivity() -> Outcome {
    let nonrect = nonrect_toy(4)?;
    let ue = build_ue_spec(2, Default::default())?.spec;
    let choquet = choquet_default()?.spec;
    let parts = [
        smallest_repetitive_window("nonrect", &nonrect)?,
        smallest_repetitive_window("ue", &ue)?,
        smallest_repetitive_window("choquet", &choquet)?,
    ];
    Ok(parts.join("; "))
}

fn c12_chain_controls() -> Outcome {
    let (s, id, per) = chain_controls()?;
    ensure(s.contradiction && s.product_sq == frac(729, 64), || format!("stretch product² {}", show(&s.product_sq)))?;
    ensure(!id.contradiction && id.product_sq == int(1), || "identity flagged".into())?;
    ensure(!per.contradiction && per.product_sq == int(1), || "periodic control flagged".into())?;

    let pts = [Point::new(0, 0), Point::new(2, 0), Point::new(4, 0), Point::new(0, 2), Point::new(2, 2)];
    let r = brute_force_min_bilip(&pts, Window::new(0, 0, 2, 1))?;
    let want = [Point::new(0, 0), Point::new(1, 0), Point::new(2, 0), Point::new(0, 1), Point::new(1, 1)];
    ensure(r.l_star_sq == int(4) && r.images == want, || format!("five points: {} {:?}", show(&r.l_star_sq), r.images))?;
    let row = [Point::new(0, 0), Point::new(2, 0), Point::new(4, 0)];
    let r = brute_force_min_bilip(&row, Window::new(0, 0, 2, 0))?;
    ensure(r.l_star_sq == int(4), || format!("row into row: {}", show(&r.l_star_sq)))?;
    let r = brute_force_min_bilip(&row, Window::new(0, 0, 1, 1))?;
    ensure(r.l_star_sq == int(8), || format!("row into square: {}", show(&r.l_star_sq)))?;
    Ok("stretch product² 729/64 flagged, controls 1; brute-force fixtures 4, 4, 8".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("corner densities", c1_corner_densities),
        ("limit density", c2_limit_density),
        ("offset contraction", c3_contraction),
        ("offset product", c4_delta_product),
        ("constant calculators", c5_constants),
        ("hat extension", c6_hat_extension),
        ("near-curve count", c7_isoperimetric),
        ("recursive counts", c8_oracle_equivalence),
        ("probe predicates", c9_predicates),
        ("prescribed-matrix structure", c10_choquet_structure),
        ("repetitivity", c11_repetitivity),
        ("expansion chains", c12_chain_controls),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(Fail(d)) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} [{:.2?}]", i + 1, start.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
