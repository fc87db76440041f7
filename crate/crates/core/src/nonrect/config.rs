use super::build::{build_delone_spec, BuildMode, LSchedule, NonrectBuild, ToyParams};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Parameters of a construction run, read from `key=value` lines.
///
/// ```text
/// L_schedule = 1, 2, 3
/// depth = 2
/// mode = toy
/// m = 1
/// N = 1
/// ell = 1
/// P_star = 1
/// N1_steps = 2
/// ```
///
/// `L_schedule` also accepts `linear` (`L_n = n`). `d1p` and `d2p` override
/// the default intermediate densities in rigorous mode.
#[derive(Clone, Debug, PartialEq)]
pub struct BuildConfig {
    pub schedule: LSchedule,
    pub depth: usize,
    pub mode: BuildMode,
    pub d_primes: Option<(Rational, Rational)>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            schedule: LSchedule::constant(rational::int(1), 1),
            depth: 1,
            mode: BuildMode::Toy(ToyParams::default()),
            d_primes: None,
        }
    }
}

impl BuildConfig {
    pub fn parse(text: &str) -> Result<BuildConfig> {
        let mut cfg = BuildConfig::default();
        let mut toy = ToyParams::default();
        let mut rigorous = false;
        let mut linear = false;
        let mut values: Option<Vec<Rational>> = None;
        let mut n1 = Vec::new();
        let (mut d1p, mut d2p) = (None, None);
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::parse(ln, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<usize> { v.parse().map_err(|_| Error::parse(ln, format!("bad integer {v:?}"))) };
            let rat = |v: &str| rational::parse(v).map_err(|e| Error::parse(ln, e.to_string()));
            match key {
                "L_schedule" if value == "linear" => linear = true,
                "L_schedule" => values = Some(value.split(',').map(|v| rat(v.trim())).collect::<Result<_>>()?),
                "depth" => cfg.depth = num(value)?,
                "mode" => {
                    rigorous = match value {
                        "rigorous" => true,
                        "toy" => false,
                        _ => return Err(Error::parse(ln, format!("unknown mode {value:?}"))),
                    }
                }
                "m" => toy.m = num(value)?,
                "N" => toy.n = num(value)?,
                "ell" => toy.ell = num(value)?,
                "P_star" => toy.p_star = num(value)?,
                "d1p" => d1p = Some(rat(value)?),
                "d2p" => d2p = Some(rat(value)?),
                "N1_steps" => {
                    n1 = value
                        .split(',')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .map(num)
                        .collect::<Result<_>>()?
                }
                _ => return Err(Error::parse(ln, format!("unknown key {key:?}"))),
            }
        }
        cfg.schedule = match (linear, values) {
            (true, _) => LSchedule::linear(cfg.depth),
            (false, Some(v)) => LSchedule { values: v, n1_stages: Default::default(), unbounded: false },
            (false, None) => LSchedule::constant(rational::int(1), cfg.depth),
        }
        .with_n1_stages(n1);
        cfg.schedule.validate()?;
        cfg.mode = if rigorous { BuildMode::Rigorous { explicit_steps: 3 } } else { BuildMode::Toy(toy) };
        cfg.d_primes = match (d1p, d2p) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => return Err(Error::OutOfRange("d1p and d2p must be given together".into())),
        };
        Ok(cfg)
    }

    pub fn build(&self) -> Result<NonrectBuild> {
        build_delone_spec(&self.schedule, self.depth, &self.mode, self.d_primes.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn parses_all_keys() {
        let text = "L_schedule = 1, 3/2\ndepth = 2\nmode = toy\nm = 3\nN = 2\nell = 1\nP_star = 1\nN1_steps = 2\n";
        let cfg = BuildConfig::parse(text).unwrap();
        assert_eq!(cfg.schedule.values, vec![int(1), frac(3, 2)]);
        assert!(cfg.schedule.n1_stages.contains(&2));
        assert_eq!(cfg.mode, BuildMode::Toy(ToyParams { m: 3, p_star: 1, n: 2, ell: 1 }));
        let b = cfg.build().unwrap();
        assert_eq!(b.steps.len(), 2);
        assert_eq!(b.steps[1].params.n, 1);
        assert_eq!(b.n1_levels().into_iter().collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(BuildConfig::parse("depth = 1\nfoo = 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(BuildConfig::parse("mode = fast\n"), Err(Error::Parse { line: 1, .. })));
        assert!(BuildConfig::parse("d1p = 1/2\n").is_err());
        let cfg = BuildConfig::parse("mode = rigorous\nL_schedule = linear\ndepth = 3\n").unwrap();
        assert_eq!(cfg.schedule.values.len(), 3);
        assert!(cfg.build().unwrap().plan.is_some());
    }
}
