//! Hierarchies whose translation action has a prescribed simplex of
//! invariant measures, given as an inverse limit of integer matrices.

mod level;
mod measure;
mod seq;

use std::path::Path;

use num_traits::ToPrimitive;

pub use level::{build_initial_patches_v, build_level_v, level_arrangements, LevelStep, StripeRule};
pub use measure::{
    cardinality_from_count, density_bounds, find_separating_coordinates, measure_vectors, patch_cardinality_formula,
    recursion_residual, vertex_spread, MeasureVector, SeparationWitness, Terminal,
};
pub use seq::{
    make_finite_dim_matrices, p_sequence, toy_sequences, validate_K, ChoquetSeq, KReport, LevelSize, Sequences,
    SimplexDim,
};

use crate::hierarchy::HierarchySpec;
use crate::matrix::TransitionMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum MatrixSource {
    /// Matrices from [`make_finite_dim_matrices`].
    ExtremePoints(usize),
    Explicit(Vec<TransitionMatrix>),
}

/// Construction parameters, read from a simplex file:
///
/// ```text
/// extreme_points 2        # or: matrices <path>
/// p1 4
/// l 5 49
/// r 1 1
/// depth 3
/// stripe literal          # or: blocks
/// strict false
/// ```
///
/// `depth` counts hierarchy levels, so it is at most one more than the
/// number of matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoquetConfig {
    pub source: MatrixSource,
    pub dim: Option<SimplexDim>,
    pub p1: u64,
    pub l: Vec<u64>,
    pub r: Vec<u64>,
    pub depth: usize,
    pub rule: StripeRule,
    pub strict: bool,
}

impl Default for ChoquetConfig {
    fn default() -> Self {
        ChoquetConfig {
            source: MatrixSource::ExtremePoints(2),
            dim: None,
            p1: 4,
            l: vec![5, 49],
            r: vec![1, 1],
            depth: 3,
            rule: StripeRule::Literal,
            strict: false,
        }
    }
}

/// Integer matrices separated by blank lines, one row per line.
pub fn parse_matrices(text: &str) -> Result<Vec<TransitionMatrix>> {
    let mut out = Vec::new();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let flush = |rows: &mut Vec<Vec<i64>>, out: &mut Vec<TransitionMatrix>, line: usize| -> Result<()> {
        if !rows.is_empty() {
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            out.push(TransitionMatrix::from_int_rows(&refs).map_err(|e| Error::parse(line, e.to_string()))?);
            rows.clear();
        }
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            flush(&mut rows, &mut out, i + 1)?;
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| Error::parse(i + 1, format!("bad integer {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    flush(&mut rows, &mut out, text.lines().count())?;
    if out.is_empty() {
        return Err(Error::parse(1, "no matrices"));
    }
    Ok(out)
}

impl ChoquetConfig {
    /// Parses a simplex file; `matrices <path>` is resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<ChoquetConfig> {
        let mut cfg = ChoquetConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().expect("nonempty line");
            let rest: Vec<&str> = parts.collect();
            let one = || -> Result<&str> {
                match rest.as_slice() {
                    [v] => Ok(v),
                    _ => Err(Error::parse(ln, format!("`{key}` takes one value"))),
                }
            };
            let num = |v: &str| v.parse::<u64>().map_err(|_| Error::parse(ln, format!("bad integer {v:?}")));
            match key {
                "extreme_points" => cfg.source = MatrixSource::ExtremePoints(num(one()?)? as usize),
                "matrices" => {
                    let v = one()?;
                    let path = base.map_or_else(|| Path::new(v).to_path_buf(), |b| b.join(v));
                    let text = std::fs::read_to_string(&path)?;
                    cfg.source = MatrixSource::Explicit(parse_matrices(&text)?);
                }
                "dim" => {
                    cfg.dim = Some(match one()? {
                        "infinite" => SimplexDim::Infinite,
                        v => SimplexDim::Finite(num(v)? as usize),
                    })
                }
                "p1" => cfg.p1 = num(one()?)?,
                "l" => cfg.l = rest.iter().map(|v| num(v)).collect::<Result<_>>()?,
                "r" => cfg.r = rest.iter().map(|v| num(v)).collect::<Result<_>>()?,
                "depth" => cfg.depth = num(one()?)? as usize,
                "stripe" => {
                    cfg.rule = match one()? {
                        "literal" => StripeRule::Literal,
                        "blocks" => StripeRule::FigureBlocks,
                        v => return Err(Error::parse(ln, format!("unknown stripe rule {v:?}"))),
                    }
                }
                "strict" => {
                    cfg.strict = match one()? {
                        "true" => true,
                        "false" => false,
                        v => return Err(Error::parse(ln, format!("expected true or false, got {v:?}"))),
                    }
                }
                _ => return Err(Error::parse(ln, format!("unknown key {key:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn build(&self) -> Result<ChoquetBuild> {
        build_choquet_spec(self)
    }
}

#[derive(Clone, Debug)]
pub struct ChoquetBuild {
    pub cs: ChoquetSeq,
    pub report: KReport,
    pub witness: SeparationWitness,
    pub spec: HierarchySpec,
}

/// Sequences, matrices, separation witness and hierarchy for `cfg`.
pub fn build_choquet_spec(cfg: &ChoquetConfig) -> Result<ChoquetBuild> {
    let seq = toy_sequences(cfg.p1, &cfg.l, &cfg.r)?;
    let matrices = match &cfg.source {
        MatrixSource::ExtremePoints(e) => make_finite_dim_matrices(*e, &LevelSize::from_sequences(&seq)?)?,
        MatrixSource::Explicit(m) => m.clone(),
    };
    let dim = cfg.dim.unwrap_or(match &cfg.source {
        MatrixSource::ExtremePoints(e) => SimplexDim::Finite(*e),
        MatrixSource::Explicit(m) => SimplexDim::Finite(m[0].rows()),
    });
    let cs = ChoquetSeq::new(dim, seq, matrices)?;
    let report = validate_K(&cs, cfg.strict);
    if !report.passed() {
        return Err(Error::Precondition(format!("matrix sequence fails validation:\n{report}")));
    }
    if cfg.depth == 0 || cfg.depth > cs.matrices.len() + 1 {
        return Err(Error::OutOfRange(format!("depth must lie in 1..={}", cs.matrices.len() + 1)));
    }
    let witness = find_separating_coordinates(&cs, cs.matrices.len())?;
    let k1 = cs.matrices[0].rows();
    let p1 = cfg.p1 as usize;
    let mut spec = HierarchySpec::new(build_initial_patches_v(p1, k1, witness.i0)?)?;
    for n in 1..cfg.depth {
        let (j, j_prime) = witness.stripe_ids(n, k1).ok_or(Error::NoSeparation)?;
        let step = LevelStep {
            l: cs.seq.l[n - 1].to_usize().ok_or(Error::Overflow("grid size"))?,
            r: cs.seq.r[n - 1].to_usize().ok_or(Error::Overflow("stripe height"))?,
            j,
            j_prime,
            rule: cfg.rule,
        };
        build_level_v(&mut spec, &cs.matrices[n - 1], step)?;
    }
    Ok(ChoquetBuild { cs, report, witness, spec })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::OccurrenceMode;

    #[test]
    fn toy_build_counts_match_matrices() {
        let cfg = ChoquetConfig { depth: 2, ..ChoquetConfig::default() };
        let b = cfg.build().unwrap();
        let spec = &b.spec;
        assert_eq!(spec.dims(2).unwrap(), (48, 48));
        assert_eq!(spec.count_matrix(1).unwrap(), b.cs.matrices[0]);
        for k in 0..3 {
            let a = spec.arrangement(2, k).unwrap();
            assert_eq!(a.get(11, 11), 0);
            assert_eq!(a.count(0), 1);
            let p = spec.materialize(2, k).unwrap();
            let formula = patch_cardinality_formula(&b.cs, b.witness.i0, 2, k).unwrap();
            assert_eq!(formula, (p.count_ones() as u64).into());
            let first = spec.materialize(1, 0).unwrap();
            assert_eq!(spec.count_occurrences(&first, 2, k, OccurrenceMode::BlockAligned).unwrap(), 1);
        }
        let arr: Vec<_> = (0..3).map(|k| spec.arrangement(2, k).unwrap().clone()).collect();
        assert!(arr[0] != arr[1] && arr[1] != arr[2] && arr[0] != arr[2]);
    }

    #[test]
    fn parses_simplex_file() {
        let cfg = ChoquetConfig::parse("extreme_points 2\np1 4\nl 5\nr 1\ndepth 2\nstripe blocks\n", None).unwrap();
        assert_eq!(cfg.rule, StripeRule::FigureBlocks);
        assert_eq!(cfg.l, vec![5]);
        assert!(ChoquetConfig::parse("colour blue\n", None).is_err());
        let m = parse_matrices("1 1 1\n71 71 71\n72 72 72\n\n1 1\n2 2\n").unwrap();
        assert_eq!((m.len(), m[1].rows()), (2, 2));
    }
}
