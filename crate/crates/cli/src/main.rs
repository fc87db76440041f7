mod gen;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use delone_core::hierarchy::{CAP_ENV, DEFAULT_CAP};
use delone_core::{rational, Error, HierarchySpec, Patch, Rational};

/// Builds, exports and checks nested patch hierarchies of lattice subsets.
#[derive(Parser, Debug)]
#[command(name = "delone", version)]
struct Cli {
    /// Materialization cap in cells; overrides the environment variable.
    #[arg(long, global = true)]
    cap: Option<u128>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a hierarchy and write its descriptor and a ledger of constants.
    Gen(gen::GenArgs),
    /// Write one patch of a descriptor as PBM, points or patch text.
    Export {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        level: usize,
        /// 1-based patch id.
        #[arg(long, default_value_t = 1)]
        id: usize,
        #[arg(long, value_enum, default_value_t = Format::Pbm)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sizes, densities and scheme checks of a descriptor.
    Stats {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Occurrences of a needle patch in the patches of one level.
    Count {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        needle: PathBuf,
        #[arg(long)]
        level: usize,
        /// 1-based patch id; all patches of the level when absent.
        #[arg(long)]
        id: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Sliding)]
        mode: Mode,
    },
    /// Needle densities per level with brackets from the level below, as TSV.
    Freq {
        #[arg(long)]
        spec: PathBuf,
        /// One or more needle patch files.
        #[arg(long, required = true, num_args = 1..)]
        needle: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        from: usize,
        /// Last level; the top level when absent.
        #[arg(long)]
        to: Option<usize>,
    },
    /// Least window side containing every pattern of side r.
    Repetitivity {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, default_value_t = 1)]
        id: usize,
        /// A patch file used instead of a descriptor.
        #[arg(long, conflicts_with = "spec")]
        patch: Option<PathBuf>,
        #[arg(long)]
        r: usize,
        /// Also confirm the result by a direct scan.
        #[arg(long)]
        check: bool,
    },
    /// Scale constants for a bi-Lipschitz bound and a density gap or tolerance.
    Constants {
        #[arg(long)]
        l: String,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        d_prime: Option<String>,
    },
    /// Probe-grid report for a map: stretched steps, regular squares, deviations.
    Bilip(report::BilipArgs),
    /// Run a named check suite and print its results as TSV.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Descriptor checked by the hierarchy suite.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Pbm,
    Points,
    Dpf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Sliding,
    Aligned,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Pass,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let cap = e.chain().any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::CapExceeded { .. })));
            ExitCode::from(if cap { 3 } else { 2 })
        }
    }
}

pub(crate) fn parse_rational(s: &str) -> anyhow::Result<Rational> {
    rational::parse(s).with_context(|| format!("expected a rational a/b, got {s:?}"))
}

pub(crate) fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub(crate) fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cap(cli_cap: Option<u128>) -> u128 {
    cli_cap.unwrap_or_else(|| std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP))
}

fn load_spec(path: &Path, cap: u128) -> anyhow::Result<HierarchySpec> {
    let spec = HierarchySpec::from_dhs(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(spec.with_cap(cap))
}

fn load_patch(path: &Path) -> anyhow::Result<Patch> {
    Patch::from_dpf(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn zero_based(id: usize) -> anyhow::Result<usize> {
    if id == 0 {
        bail!("patch ids are 1-based");
    }
    Ok(id - 1)
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let cap = cap(cli.cap);
    match cli.command {
        Command::Gen(args) => gen::run(&args),
        Command::Export { spec, level, id, format, out } => {
            let spec = load_spec(&spec, cap)?;
            let patch = spec.materialize(level, zero_based(id)?)?;
            let text = match format {
                Format::Pbm => patch.to_pbm(),
                Format::Points => delone_core::lattice::write_points_file(&patch.points()),
                Format::Dpf => patch.to_dpf(),
            };
            write_or_print(out.as_deref(), &text)?;
            Ok(Outcome::Pass)
        }
        Command::Stats { spec } => {
            let spec = load_spec(&spec, cap)?;
            print!("{}", report::stats(&spec)?);
            Ok(Outcome::Pass)
        }
        Command::Count { spec, needle, level, id, mode } => {
            let spec = load_spec(&spec, cap)?;
            let needle = load_patch(&needle)?;
            let mode = match mode {
                Mode::Sliding => delone_core::OccurrenceMode::Sliding,
                Mode::Aligned => delone_core::OccurrenceMode::BlockAligned,
            };
            let ids = match id {
                Some(i) => vec![zero_based(i)?],
                None => (0..spec.patch_count(level)?).collect(),
            };
            println!("level\tpatch_id\tcount");
            for i in ids {
                println!("{level}\t{}\t{}", i + 1, spec.count_occurrences(&needle, level, i, mode)?);
            }
            Ok(Outcome::Pass)
        }
        Command::Freq { spec, needle, from, to } => {
            let spec = load_spec(&spec, cap)?;
            let needles = needle.iter().map(|p| load_patch(p)).collect::<anyhow::Result<Vec<_>>>()?;
            print!("{}", report::freq(&spec, &needles, from, to.unwrap_or(spec.depth()))?);
            Ok(Outcome::Pass)
        }
        Command::Repetitivity { spec, level, id, patch, r, check } => {
            let patch = match (patch, spec) {
                (Some(p), _) => load_patch(&p)?,
                (None, Some(s)) => {
                    let spec = load_spec(&s, cap)?;
                    spec.materialize(level.unwrap_or(spec.depth()), zero_based(id)?)?
                }
                (None, None) => bail!("give --spec or --patch"),
            };
            report::repetitivity(&patch, r, check)
        }
        Command::Constants { l, eps, p, d, d_prime } => {
            let l = parse_rational(&l)?;
            let eps = eps.as_deref().map(parse_rational).transpose()?;
            let d = d.as_deref().map(parse_rational).transpose()?;
            let d_prime = d_prime.as_deref().map(parse_rational).transpose()?;
            print!("{}", gen::constants_ledger(&l, eps.as_ref(), p, d.as_ref().zip(d_prime.as_ref()))?);
            Ok(Outcome::Pass)
        }
        Command::Bilip(args) => report::bilip(&args),
        Command::Verify { suite, spec, trials, seed, depth } => {
            let spec = spec.map(|p| load_spec(&p, cap)).transpose()?;
            let opts = delone_core::verify::VerifyOptions { trials, seed, depth, spec };
            let rows = delone_core::verify::run_suite(&suite, &opts)?;
            print!("{}", delone_core::verify::to_tsv(&rows));
            Ok(if delone_core::verify::all_passed(&rows) { Outcome::Pass } else { Outcome::CheckFailed })
        }
    }
}
