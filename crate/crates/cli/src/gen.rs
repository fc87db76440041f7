use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use delone_core::choquet::{density_bounds, ChoquetBuild, ChoquetConfig, MatrixSource};
use delone_core::nonrect::{
    constant_p0, constants_remark1, constants_remark2, density_epsilon, ell_min, BuildConfig, BuildMode, NonrectBuild,
    ToyParams,
};
use delone_core::rational::show;
use delone_core::ue::{build_ue_spec, UeBuild};
use delone_core::Rational;

use crate::{read, write_or_print, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Nonrect,
    Ue,
    Choquet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RunMode {
    Toy,
    Rigorous,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    construction: Construction,
    /// Stages for nonrect and ue, hierarchy levels for choquet.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<RunMode>,
    /// Parameter file: `key = value` lines for nonrect, a simplex file for choquet.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    p_star: Option<usize>,
    #[arg(long)]
    extreme_points: Option<usize>,
    /// Descriptor output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ledger output; stderr when absent.
    #[arg(long)]
    ledger: Option<PathBuf>,
}

impl GenArgs {
    fn overrides(&self) -> bool {
        self.m.is_some() || self.n.is_some() || self.ell.is_some() || self.p_star.is_some()
    }

    fn toy(&self, base: ToyParams) -> ToyParams {
        ToyParams {
            m: self.m.unwrap_or(base.m),
            n: self.n.unwrap_or(base.n),
            ell: self.ell.unwrap_or(base.ell),
            p_star: self.p_star.unwrap_or(base.p_star),
        }
    }
}

pub fn run(args: &GenArgs) -> anyhow::Result<Outcome> {
    let (descriptor, ledger) = match args.construction {
        Construction::Nonrect => {
            let mut cfg = match &args.config {
                Some(p) => BuildConfig::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
                None => BuildConfig::default(),
            };
            if let Some(d) = args.depth {
                cfg.depth = d;
                if cfg.schedule.values.len() < d && !cfg.schedule.unbounded {
                    let last = cfg.schedule.get(cfg.schedule.values.len()).clone();
                    cfg.schedule.values.resize(d, last);
                }
            }
            match args.mode {
                Some(RunMode::Rigorous) => cfg.mode = BuildMode::Rigorous { explicit_steps: 3 },
                Some(RunMode::Toy) if matches!(cfg.mode, BuildMode::Rigorous { .. }) => {
                    cfg.mode = BuildMode::Toy(ToyParams::default())
                }
                _ => {}
            }
            cfg.mode = match cfg.mode {
                BuildMode::Rigorous { .. } if args.overrides() => {
                    bail!("rigorous mode derives m, N, ell and P_star from the constants; drop the overrides")
                }
                BuildMode::Toy(t) => BuildMode::Toy(args.toy(t)),
                other => other,
            };
            let b = cfg.build()?;
            let descriptor = b.spec.as_ref().map(|s| s.to_dhs());
            (descriptor, nonrect_ledger(&b))
        }
        Construction::Ue => {
            if args.mode == Some(RunMode::Rigorous) {
                bail!("the mixing construction has toy mode only");
            }
            let b = build_ue_spec(args.depth.unwrap_or(2), args.toy(ToyParams::default()))?;
            (Some(b.spec.to_dhs()), ue_ledger(&b)?)
        }
        Construction::Choquet => {
            let mut cfg = match &args.config {
                Some(p) => ChoquetConfig::parse(&read(p)?, p.parent())
                    .with_context(|| format!("parsing {}", p.display()))?,
                None => ChoquetConfig::default(),
            };
            if let Some(e) = args.extreme_points {
                cfg.source = MatrixSource::ExtremePoints(e);
            }
            if let Some(d) = args.depth {
                cfg.depth = d;
            }
            if args.overrides() || args.mode.is_some() {
                bail!("choquet takes its parameters from --config and --extreme-points");
            }
            let b = cfg.build()?;
            (Some(b.spec.to_dhs()), choquet_ledger(&b))
        }
    };
    match descriptor {
        Some(d) => write_or_print(args.out.as_deref(), &d)?,
        None if args.out.is_some() => bail!("rigorous mode builds no descriptor; its sizes exceed any memory"),
        None => {}
    }
    match &args.ledger {
        Some(p) => std::fs::write(p, &ledger).with_context(|| format!("writing {}", p.display()))?,
        None => eprint!("{ledger}"),
    }
    Ok(Outcome::Pass)
}

fn nonrect_ledger(b: &NonrectBuild) -> String {
    let mut s = String::from("# alternating-block construction\n");
    let values: Vec<String> = b.schedule.values.iter().map(show).collect();
    let _ = writeln!(s, "L schedule\t{}", values.join(", "));
    if let Some(plan) = &b.plan {
        for st in &plan.stages {
            let k = &st.bundle;
            let _ = writeln!(s, "stage {}\tL = {}", st.stage, show(&st.l));
            let _ = writeln!(s, "  d1' = {}, d2' = {}", show(&st.d1p), show(&st.d2p));
            let _ = writeln!(s, "  lambda = (d - d')^3 / (10^10 L^7)\t{}", show(&k.lambda));
            let _ = writeln!(s, "  M* = ceil(10^15 L^11 / (d - d')^4)\t{}", k.m0);
            let _ = writeln!(s, "  N* = ceil(10^10 L^10 / (d - d')^4)\t{}", k.n0);
            let _ = writeln!(s, "  eps = (d - d') / (40 (2 + 5L))\t{}", show(&k.eps));
            let _ = writeln!(s, "  tau = eps^2 / (9 L^2)\t{}", show(&k.tau));
            let _ = writeln!(s, "  P0 = ceil(max(4 (6L)^4, 3 (6L)^2 / eps))\t{}", k.p0);
            let _ = writeln!(s, "  ell = ceil(L^2 / lambda)\t{}", k.ell);
            for step in &st.steps {
                let _ = writeln!(
                    s,
                    "  step {}\tm = {}, P* = {}, N = {}, side = {}, densities {} and {}",
                    step.index,
                    step.m,
                    step.p_star,
                    step.n,
                    step.side_after,
                    show(&step.densities_after[0]),
                    show(&step.densities_after[1])
                );
            }
        }
    }
    for r in &b.steps {
        let _ = writeln!(
            s,
            "level {}\tstage {}, m = {}, P* = {}, N = {}{}, side = {}, densities {} and {}",
            r.level,
            r.stage,
            r.params.m,
            r.params.p_star,
            r.params.n,
            if r.n1_step { " (repetitivity step)" } else { "" },
            r.side,
            show(&r.densities[0]),
            show(&r.densities[1])
        );
    }
    if let Some(spec) = &b.spec {
        s.push_str(&spec.validate_scheme().to_string());
    }
    s
}

fn ue_ledger(b: &UeBuild) -> anyhow::Result<String> {
    let mut s = String::from("# mixing construction\n");
    for st in &b.steps {
        let _ = writeln!(s, "level {}\tstage {}, {:?}, offset {}", st.level, st.stage, st.kind, show(&st.mix.delta));
    }
    let top = b.spec.depth();
    let cert = b.certificate(1, top)?;
    let _ = writeln!(s, "offset of levels 1 -> {top}\t{}", show(&cert.offset_bound));
    let _ = writeln!(s, "limit density\t{}", show(&b.limit_density()?));
    s.push_str(&b.spec.validate_scheme().to_string());
    Ok(s)
}

fn list<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn choquet_ledger(b: &ChoquetBuild) -> String {
    let mut s = String::from("# prescribed-matrix construction\n");
    let _ = writeln!(s, "p\t{}", list(&b.cs.seq.p));
    let _ = writeln!(s, "q = p^2\t{}", list(&b.cs.seq.q));
    let _ = writeln!(s, "r\t{}", list(&b.cs.seq.r));
    let _ = writeln!(s, "l\t{}", list(&b.cs.seq.l));
    for (n, a) in b.cs.matrices.iter().enumerate() {
        let _ = writeln!(s, "A_{}\n{a}", n + 1);
    }
    s.push_str(&b.report.to_string());
    let w = &b.witness;
    let _ = writeln!(s, "separating row\t{}", w.i0 + 1);
    let cols: Vec<String> = w.columns.iter().map(|(j, jp)| format!("({}, {})", j + 1, jp + 1)).collect();
    let _ = writeln!(s, "separating columns\t{}", cols.join(" "));
    let _ = writeln!(s, "dbar, dbar'\t{}, {}", show(&w.dbar), show(&w.dbar_prime));
    let (d, dp) = density_bounds(&b.cs.seq.p[0], w);
    let _ = writeln!(s, "density bounds d, d'\t{}, {}", show(&d), show(&dp));
    s.push_str(&b.spec.validate_scheme().to_string());
    s
}

/// Constants for `L` with either a tolerance `ε` (and optional `P`) or a
/// density gap `(d, d')`.
pub fn constants_ledger(
    l: &Rational,
    eps: Option<&Rational>,
    p: Option<u64>,
    gap: Option<(&Rational, &Rational)>,
) -> anyhow::Result<String> {
    let mut s = String::new();
    if eps.is_none() && gap.is_none() {
        bail!("give --eps or both --d and --d-prime");
    }
    if let Some(e) = eps {
        let p0 = constant_p0(l, e)?;
        let _ = writeln!(s, "P0 = ceil(max(4 (6L)^4, 3 (6L)^2 / eps))\t{p0}");
        let p = match p {
            Some(p) => p,
            None => u64::try_from(&p0).context("P0 does not fit in 64 bits; pass --p")?,
        };
        let (lambda, m0, n0) = constants_remark1(l, e, p)?;
        let _ = writeln!(s, "P\t{p}");
        let _ = writeln!(s, "lambda = eps^2 / (108 P L^2)\t{}", show(&lambda));
        let _ = writeln!(s, "M0 = ceil(108 P^2 L^2 (L + 4) / eps^2)\t{m0}");
        let _ = writeln!(s, "N0 = 2 + ceil(216 L^2 P (3 L^2 + P + 1) / eps^2)\t{n0}");
        let _ = writeln!(s, "ell = ceil(L^2 / lambda)\t{}", ell_min(l, &lambda)?.0);
    }
    if let Some((d, dp)) = gap {
        let (lambda, m, n) = constants_remark2(l, d, dp)?;
        let _ = writeln!(s, "lambda = (d - d')^3 / (10^10 L^7)\t{}", show(&lambda));
        let _ = writeln!(s, "M* = ceil(10^15 L^11 / (d - d')^4)\t{m}");
        let _ = writeln!(s, "N* = ceil(10^10 L^10 / (d - d')^4)\t{n}");
        let eps = density_epsilon(l, d, dp);
        let _ = writeln!(s, "eps = (d - d') / (40 (2 + 5L))\t{}", show(&eps));
        let _ = writeln!(s, "P0 = ceil(max(4 (6L)^4, 3 (6L)^2 / eps))\t{}", constant_p0(l, &eps)?);
        let _ = writeln!(s, "ell = ceil(L^2 / lambda)\t{}", ell_min(l, &lambda)?.0);
    }
    Ok(s)
}
