use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use std::fmt;

use crate::hierarchy::{CheckStatus, SchemeCheck};
use crate::matrix::TransitionMatrix;
use crate::rational::{self, int, Rational};
use crate::{Error, Result};

/// Dimension of the target simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimplexDim {
    Finite(usize),
    Infinite,
}

impl SimplexDim {
    /// Side of the first frame: `max(4, d)`, or 4.
    pub fn p1(self) -> u64 {
        match self {
            SimplexDim::Finite(d) => (d as u64).max(4),
            SimplexDim::Infinite => 4,
        }
    }

    /// Number of first-level patches: `max(3, d)`, or 3.
    pub fn k1(self) -> usize {
        match self {
            SimplexDim::Finite(d) => d.max(3),
            SimplexDim::Infinite => 3,
        }
    }
}

/// Side lengths `p_n`, areas `q_n = p_n²`, stripe heights `r_n` and grid
/// half-widths `l_n`, with `p_{n+1} = 2(l_n + 1)p_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequences {
    pub p: Vec<BigUint>,
    pub q: Vec<BigUint>,
    pub r: Vec<BigUint>,
    pub l: Vec<BigUint>,
}

impl Sequences {
    /// Builds the derived sequences from `p_1..p_{n+1}` and `r_1..r_n`.
    pub fn from_p(p: Vec<BigUint>, r: Vec<BigUint>) -> Result<Sequences> {
        if p.len() < 2 || r.len() + 1 != p.len() {
            return Err(Error::OutOfRange(format!("need n+1 sides and n stripe heights, got {} and {}", p.len(), r.len())));
        }
        let mut l = Vec::with_capacity(r.len());
        for (n, w) in p.windows(2).enumerate() {
            let twice = BigUint::from(2u32) * &w[0];
            let (ratio, rem) = w[1].div_rem(&twice);
            if !rem.is_zero() || ratio < BigUint::from(2u32) {
                return Err(Error::OutOfRange(format!("p_{} = {} is not 2(l+1)p_{} with l >= 1", n + 2, w[1], n + 1)));
            }
            l.push(ratio - 1u32);
        }
        let q = p.iter().map(|v| v * v).collect();
        Ok(Sequences { p, q, r, l })
    }

    /// Number of matrices the sequences support.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Grid side `p_{n+1}/p_n` for a 1-based `n`.
    pub fn grid(&self, n: usize) -> BigUint {
        &self.p[n] / &self.p[n - 1]
    }

    /// `p_{n+1} > ((k−1)p_n²/(k−2))·(r_n/p_n + 1)`, for a 1-based `n`.
    pub fn growth_condition(&self, n: usize, k: usize) -> bool {
        if k < 3 {
            return false;
        }
        let (p, next) = (rational::big(&self.p[n - 1]), rational::big(&self.p[n]));
        let r = rational::big(&self.r[n - 1]);
        let bound = int(k as i64 - 1) * &p * &p / int(k as i64 - 2) * (r / &p + int(1));
        next > bound
    }
}

/// `p_{n+1} = 2·n!·p_n²` and `r_n = n!`, starting from `p_1` of `dim`.
pub fn p_sequence(dim: SimplexDim, n_max: usize) -> Result<Sequences> {
    if n_max == 0 {
        return Err(Error::OutOfRange("n_max must be at least 1".into()));
    }
    let mut p = vec![BigUint::from(dim.p1())];
    let mut r = Vec::with_capacity(n_max);
    let mut fact = BigUint::one();
    for n in 1..=n_max {
        fact *= n as u64;
        let last = p.last().expect("nonempty");
        let next = BigUint::from(2u32) * &fact * last * last;
        p.push(next);
        r.push(fact.clone());
    }
    Sequences::from_p(p, r)
}

/// Sequences from `p_1` and explicit `l_n`, `r_n`.
pub fn toy_sequences(p1: u64, l: &[u64], r: &[u64]) -> Result<Sequences> {
    if l.len() != r.len() {
        return Err(Error::OutOfRange("need one stripe height per grid".into()));
    }
    let mut p = vec![BigUint::from(p1)];
    for &ln in l {
        let last = p.last().expect("nonempty");
        p.push(BigUint::from(2 * (ln + 1)) * last);
    }
    Sequences::from_p(p, r.iter().map(|&v| BigUint::from(v)).collect())
}

/// Sequences together with the integer matrices `A_1, …, A_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoquetSeq {
    pub dim: SimplexDim,
    pub seq: Sequences,
    pub matrices: Vec<TransitionMatrix>,
}

impl ChoquetSeq {
    pub fn new(dim: SimplexDim, seq: Sequences, matrices: Vec<TransitionMatrix>) -> Result<ChoquetSeq> {
        if matrices.is_empty() || matrices.len() > seq.len() {
            return Err(Error::OutOfRange(format!(
                "{} matrices for sequences of length {}",
                matrices.len(),
                seq.len()
            )));
        }
        for (n, w) in matrices.windows(2).enumerate() {
            if w[0].cols() != w[1].rows() {
                return Err(Error::Precondition(format!("A_{} has {} columns but A_{} has {} rows", n + 1, w[0].cols(), n + 2, w[1].rows())));
            }
        }
        for (n, a) in matrices.iter().enumerate() {
            if !a.is_integral() || (0..a.rows()).any(|i| a.row(i).iter().any(|v| *v < int(1))) {
                return Err(Error::Precondition(format!("A_{} must have positive integer entries", n + 1)));
            }
        }
        Ok(ChoquetSeq { dim, seq, matrices })
    }

    /// `k_1, …, k_{n+1}`.
    pub fn k(&self) -> Vec<usize> {
        let mut k: Vec<usize> = self.matrices.iter().map(TransitionMatrix::rows).collect();
        k.push(self.matrices.last().expect("nonempty").cols());
        k
    }

    /// Normalized product `A_1⋯A_n / q_{n+1}`.
    pub fn normalized_product(&self, n: usize) -> Result<TransitionMatrix> {
        let mut prod = self.matrices[0].clone();
        for a in &self.matrices[1..n] {
            prod = prod.mul(a)?;
        }
        Ok(prod.scaled(&rational::big(&self.seq.q[n]).recip()))
    }
}

fn min_lower_rows(a: &TransitionMatrix) -> Rational {
    a.min_entry_in_rows(1..a.rows()).unwrap_or_else(|| int(0))
}

/// Outcome of [`validate_K`]; each check is marked required or advisory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KReport {
    pub checks: Vec<(SchemeCheck, bool)>,
}

impl KReport {
    /// Whether every required check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(c, required)| !required || c.passed())
    }

    pub fn get(&self, property: &str) -> Option<&SchemeCheck> {
        self.checks.iter().map(|(c, _)| c).find(|c| c.property == property)
    }
}

impl fmt::Display for KReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, required) in &self.checks {
            let tag = if *required { "" } else { "\tadvisory" };
            match &c.status {
                CheckStatus::Pass => writeln!(f, "{}\tpass{tag}", c.property)?,
                CheckStatus::NotRequired => writeln!(f, "{}\tnot machine-checkable", c.property)?,
                CheckStatus::Fail(w) => writeln!(f, "{}\tFAIL\t{w}{tag}", c.property)?,
            }
        }
        Ok(())
    }
}

/// Checks K1–K6, the growth condition and `r_n·p_n < p_{n+1}`. With
/// `strict = false` K1, K5, K6 and the value of `p_1` are advisory. K7 is
/// not decidable from finite data and is always listed as such.
#[allow(non_snake_case)]
pub fn validate_K(cs: &ChoquetSeq, strict: bool) -> KReport {
    let k = cs.k();
    let mut checks = Vec::new();

    checks.push(if k[0] != cs.dim.k1() {
        SchemeCheck::fail("K1", format!("k_1 = {}, expected {}", k[0], cs.dim.k1()))
    } else {
        SchemeCheck::pass("K1")
    });
    checks.push(if cs.seq.p[0] != BigUint::from(cs.dim.p1()) {
        SchemeCheck::fail("p1", format!("p_1 = {}, expected {}", cs.seq.p[0], cs.dim.p1()))
    } else {
        SchemeCheck::pass("p1")
    });

    checks.push(match k.iter().position(|&v| v < 3) {
        Some(n) => SchemeCheck::fail("K2", format!("k_{} = {}", n + 1, k[n])),
        None => SchemeCheck::pass("K2"),
    });

    let mut k3 = SchemeCheck::pass("K3");
    'k3: for (n, a) in cs.matrices.iter().enumerate() {
        for j in 0..a.cols() {
            if *a.get(0, j) != int(1) {
                k3 = SchemeCheck::fail("K3", format!("A_{}(1, {}) = {}", n + 1, j + 1, rational::show(a.get(0, j))));
                break 'k3;
            }
        }
    }
    checks.push(k3);

    let mut k4 = SchemeCheck::pass("K4");
    'k4: for (n, a) in cs.matrices.iter().enumerate() {
        let target = rational::big(&cs.seq.q[n + 1]) / rational::big(&cs.seq.q[n]);
        for (j, s) in a.column_sums().iter().enumerate() {
            if *s != target {
                k4 = SchemeCheck::fail(
                    "K4",
                    format!("column {} of A_{} sums to {}, expected {}", j + 1, n + 1, rational::show(s), rational::show(&target)),
                );
                break 'k4;
            }
        }
    }
    checks.push(k4);

    let mut k5 = SchemeCheck::pass("K5");
    let mut k6 = SchemeCheck::pass("K6");
    for (n, a) in cs.matrices.iter().enumerate() {
        let min = min_lower_rows(a);
        if k5.passed() && min < int(k[n + 1] as i64) {
            k5 = SchemeCheck::fail("K5", format!("A_{} has entry {} below k_{} = {}", n + 1, rational::show(&min), n + 2, k[n + 1]));
        }
        let bound = rational::big(&(&cs.seq.r[n] * &cs.seq.p[n + 1]));
        if k6.passed() && min < bound {
            k6 = SchemeCheck::fail(
                "K6",
                format!("A_{} has entry {} below r_{}·p_{} = {}", n + 1, rational::show(&min), n + 1, n + 2, rational::show(&bound)),
            );
        }
    }
    checks.push(k5);
    checks.push(k6);
    checks.push(SchemeCheck { property: "K7", status: CheckStatus::NotRequired });

    let mut growth = SchemeCheck::pass("growth");
    for n in 1..=cs.matrices.len() {
        if !cs.seq.growth_condition(n, k[n - 1]) {
            growth = SchemeCheck::fail("growth", format!("p_{} = {} is too small for k_{} = {}", n + 1, cs.seq.p[n], n, k[n - 1]));
            break;
        }
    }
    checks.push(growth);

    let mut stripe = SchemeCheck::pass("stripe");
    for n in 1..=cs.matrices.len() {
        if &cs.seq.r[n - 1] * &cs.seq.p[n - 1] >= cs.seq.p[n] {
            stripe = SchemeCheck::fail("stripe", format!("r_{n}·p_{n} >= p_{}", n + 1));
            break;
        }
    }
    checks.push(stripe);
    let checks = checks
        .into_iter()
        .map(|c| {
            let required = strict || !matches!(c.property, "K1" | "K5" | "K6" | "p1");
            (c, required)
        })
        .collect();
    KReport { checks }
}

/// Per-level requirements for [`make_finite_dim_matrices`]: the common
/// column sum and the least entry allowed below the first row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelSize {
    pub column_sum: u64,
    pub min_entry: u64,
}

impl LevelSize {
    /// Sizes imposed by the sequences: column sums `q_{n+1}/q_n` and
    /// least entries `r_n·p_{n+1}`.
    pub fn from_sequences(seq: &Sequences) -> Result<Vec<LevelSize>> {
        (1..=seq.len())
            .map(|n| {
                let g = seq.grid(n);
                let sum = (&g * &g).to_u64().ok_or(Error::Overflow("column sum"))?;
                let min = (&seq.r[n - 1] * &seq.p[n]).to_u64().ok_or(Error::Overflow("least entry"))?;
                Ok(LevelSize { column_sum: sum, min_entry: min })
            })
            .collect()
    }
}

/// `(e+1)×(e+1)` matrices for a simplex with `e` extreme points: the first
/// row is all ones, the first two columns coincide, column `j ≥ 2` has its
/// large entry in row `j` and every other entry below the first row equals
/// `max(e+1, min_entry)`.
pub fn make_finite_dim_matrices(e: usize, sizes: &[LevelSize]) -> Result<Vec<TransitionMatrix>> {
    if e < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 extreme points, got {e}")));
    }
    let k = e + 1;
    let mut out = Vec::with_capacity(sizes.len());
    for (n, s) in sizes.iter().enumerate() {
        let small = s.min_entry.max(k as u64);
        let used = 1 + (e as u64 - 1) * small;
        if s.column_sum < used + small {
            return Err(Error::Infeasible(format!(
                "level {}: column sum {} cannot hold {} entries of at least {small} plus the first row",
                n + 1,
                s.column_sum,
                e
            )));
        }
        let big = s.column_sum - used;
        let mut rows = vec![vec![1i64; k]];
        for i in 1..k {
            rows.push((0..k).map(|j| if i == j.max(1) { big as i64 } else { small as i64 }).collect());
        }
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        out.push(TransitionMatrix::from_int_rows(&refs)?);
    }
    Ok(out)
}
