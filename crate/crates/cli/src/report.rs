use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use delone_core::hierarchy::{estimate_repetitivity, naive_repetitivity_holds, Repetitivity};
use delone_core::lab::{check_no_stretch, coarse_derivative_deviation, find_regular_square, GridSpec};
use delone_core::lattice::{parse_map_file, LazyHat, Window};
use delone_core::rational::show;
use delone_core::ue::frequency_convergence_report;
use delone_core::{CandidateMap, HierarchySpec, Patch, Rational};

use crate::{parse_rational, read, Outcome};

pub fn stats(spec: &HierarchySpec) -> anyhow::Result<String> {
    let mut s = String::from("level\twidth\theight\tpatches\tpatch_id\toccupied\tdensity\n");
    for n in 1..=spec.depth() {
        let (w, h) = spec.dims(n)?;
        let area = spec.area(n)?;
        for id in 0..spec.patch_count(n)? {
            let occ = spec.occupied(n, id)?;
            let d = Rational::new(occ.into(), area.into());
            let _ = writeln!(s, "{n}\t{w}\t{h}\t{}\t{}\t{occ}\t{}", spec.patch_count(n)?, id + 1, show(&d));
        }
    }
    s.push_str(&spec.validate_scheme().to_string());
    Ok(s)
}

pub fn freq(spec: &HierarchySpec, needles: &[Patch], from: usize, to: usize) -> anyhow::Result<String> {
    if from == 0 || from > to {
        bail!("need 1 <= from <= to, got {from} and {to}");
    }
    let mut s = String::from("level\tpatch_id\tneedle_id\tdensity_num\tdensity_den\tbracket_lo\tbracket_hi\n");
    for (k, needle) in needles.iter().enumerate() {
        let r = frequency_convergence_report(spec, needle, from..=to)?;
        for row in &r.rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                row.level,
                row.patch_id + 1,
                k + 1,
                row.density.numer(),
                row.density.denom(),
                show(&row.bracket_lo),
                show(&row.bracket_hi)
            );
        }
    }
    Ok(s)
}

pub fn repetitivity(patch: &Patch, r: usize, check: bool) -> anyhow::Result<Outcome> {
    match estimate_repetitivity(patch, r)? {
        Repetitivity::Finite(big) => {
            println!("r\t{r}\nR\t{big}");
            if check {
                let holds = naive_repetitivity_holds(patch, r, big);
                let least = big == r || !naive_repetitivity_holds(patch, r, big - 1);
                println!("scan\t{}", if holds && least { "confirmed" } else { "MISMATCH" });
                if !(holds && least) {
                    return Ok(Outcome::CheckFailed);
                }
            }
        }
        Repetitivity::WindowTooSmall => println!("r\t{r}\nR\tbeyond the {}x{} window", patch.width(), patch.height()),
    }
    Ok(Outcome::Pass)
}

#[derive(Args, Debug)]
pub struct BilipArgs {
    #[arg(long)]
    map: PathBuf,
    /// Square side M, half the number of squares N, probe count P.
    #[arg(long, num_args = 3, value_names = ["M", "N", "P"])]
    grid: Vec<i64>,
    #[arg(long)]
    lambda: String,
    #[arg(long)]
    tau: Option<String>,
}

pub fn bilip(args: &BilipArgs) -> anyhow::Result<Outcome> {
    let grid = GridSpec::new(args.grid[0], args.grid[1], args.grid[2])?;
    let lambda = parse_rational(&args.lambda)?;
    let pairs = parse_map_file(&read(&args.map)?).with_context(|| format!("parsing {}", args.map.display()))?;
    let window = Window::bounding(pairs.iter().map(|(p, _)| *p)).context("empty map file")?;
    let f = CandidateMap::new(window, pairs)?;
    let fhat = LazyHat(&f);
    let mut s = String::new();
    let _ = writeln!(s, "grid\tM = {}, N = {}, P = {}, length {}", grid.m, grid.n, grid.p, grid.length());
    let stretched = check_no_stretch(&f, &grid, &lambda)?;
    let _ = writeln!(s, "stretched steps\t{} (lambda = {})", stretched.len(), show(&lambda));
    for st in &stretched {
        let p = &st.probe;
        let _ = writeln!(
            s,
            "  k = {}, i = {}, j = {}\t{} -> {}\tstretch^2 = {}",
            p.k,
            p.i,
            p.j,
            p.at,
            st.target,
            show(&st.stretch_sq)
        );
    }
    if let Some(t) = &args.tau {
        let tau = parse_rational(t)?;
        let reg = find_regular_square(&fhat, &grid, &tau)?;
        let regular: Vec<String> = (1..grid.squares()).filter(|&k| reg.is_regular(k)).map(|k| k.to_string()).collect();
        let _ = writeln!(s, "regular squares\t{} (tau = {}, threshold {})", regular.join(" "), show(&tau), show(&reg.threshold));
        for (i, m) in reg.min_projection.iter().enumerate() {
            let dev = coarse_derivative_deviation(&fhat, &grid, i as i64 + 1)?;
            let _ = writeln!(s, "  k = {}\tleast projection {}\tdeviation^2 {} at {}", i + 1, show(m), show(&dev.max_sq), dev.at);
        }
        match reg.k_star {
            Some(k) => {
                let _ = writeln!(s, "first regular square\t{k}");
            }
            None => s.push_str("first regular square\tnone\n"),
        }
    }
    print!("{s}");
    Ok(Outcome::Pass)
}
