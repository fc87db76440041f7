use num_bigint::BigUint;
use num_traits::{Signed, Zero};

use super::seq::ChoquetSeq;
use crate::matrix::TransitionMatrix;
use crate::rational::{self, int, Rational};
use crate::{Error, Result};

/// Row `i0` of the normalized products `A_1⋯A_n / q_{n+1}` stays at least
/// `dbar` in column `j_{n+1}` and at most `dbar_prime` in column `j'_{n+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationWitness {
    pub i0: usize,
    /// `(j_{n+1}, j'_{n+1})` for `n = 1, 2, …`; ids are 0-based and never 0.
    pub columns: Vec<(usize, usize)>,
    pub dbar: Rational,
    pub dbar_prime: Rational,
}

impl SeparationWitness {
    /// Ids `(j_n, j'_n)` used in the stripe of the step from level `n`.
    /// Level 1 uses `i0` itself when possible, since the first patches
    /// split into `i0` and the rest.
    pub fn stripe_ids(&self, n: usize, k1: usize) -> Option<(usize, usize)> {
        if n >= 2 {
            return self.columns.get(n - 2).copied();
        }
        let j = if self.i0 >= 1 { self.i0 } else { 1 };
        let j_prime = (1..k1).find(|&c| c != j)?;
        Some((j, j_prime))
    }
}

/// Searches rows of `A_1⋯A_n / q_{n+1}`, `n = 1..=depth`, for one whose
/// entries in columns other than the first keep a positive gap at every
/// level.
pub fn find_separating_coordinates(cs: &ChoquetSeq, depth: usize) -> Result<SeparationWitness> {
    if depth == 0 || depth > cs.matrices.len() {
        return Err(Error::OutOfRange(format!("depth must lie in 1..={}", cs.matrices.len())));
    }
    let products: Vec<TransitionMatrix> = (1..=depth).map(|n| cs.normalized_product(n)).collect::<Result<_>>()?;
    let deepest = products.last().expect("depth >= 1");
    if deepest.cols() < 3 {
        return Err(Error::NoSeparation);
    }
    let spread = |m: &TransitionMatrix, i: usize| {
        let row = &m.row(i)[1..];
        row.iter().max().expect("nonempty") - row.iter().min().expect("nonempty")
    };
    let mut best: Option<(usize, Rational)> = None;
    for i in 0..deepest.rows() {
        let s = spread(deepest, i);
        if s.is_positive() && best.as_ref().is_none_or(|(_, b)| s > *b) {
            best = Some((i, s));
        }
    }
    let (i0, _) = best.ok_or(Error::NoSeparation)?;
    let mut columns = Vec::with_capacity(depth);
    let (mut dbar, mut dbar_prime): (Option<Rational>, Option<Rational>) = (None, None);
    for m in &products {
        let row = m.row(i0);
        let j = (1..row.len()).max_by(|&a, &b| row[a].cmp(&row[b]).then(b.cmp(&a))).expect("columns");
        let jp = (1..row.len()).min_by(|&a, &b| row[a].cmp(&row[b]).then(a.cmp(&b))).expect("columns");
        dbar = Some(dbar.map_or(row[j].clone(), |d| d.min(row[j].clone())));
        dbar_prime = Some(dbar_prime.map_or(row[jp].clone(), |d| d.max(row[jp].clone())));
        columns.push((j, jp));
    }
    let (dbar, dbar_prime) = (dbar.expect("depth >= 1"), dbar_prime.expect("depth >= 1"));
    if dbar <= dbar_prime || columns.iter().any(|(j, jp)| j == jp) {
        return Err(Error::NoSeparation);
    }
    Ok(SeparationWitness { i0, columns, dbar, dbar_prime })
}

/// `c·(p1²/2 − p1/2 − 2) + (p_n²/p1²)(p1²/2 + p1/2 + 1)`, the number of
/// points of a level-`n` patch holding `c` copies of the first-level patch
/// `i0`.
pub fn cardinality_from_count(p1: &BigUint, p_n: &BigUint, c: &BigUint) -> BigUint {
    let p1sq = p1 * p1;
    let dense = &p1sq / 2u32 - p1 / 2u32 - 2u32;
    let sparse = &p1sq / 2u32 + p1 / 2u32 + 1u32;
    c * dense + (p_n * p_n) / p1sq * sparse
}

/// Cardinality of patch `k` at level `n`, from the number of copies of
/// patch `i0` given by `A_1⋯A_{n−1}(i0, k)`.
pub fn patch_cardinality_formula(cs: &ChoquetSeq, i0: usize, n: usize, k: usize) -> Result<BigUint> {
    if n == 0 || n > cs.matrices.len() + 1 {
        return Err(Error::OutOfRange(format!("level must lie in 1..={}", cs.matrices.len() + 1)));
    }
    let count = if n == 1 {
        BigUint::from(u32::from(k == i0))
    } else {
        let mut prod = cs.matrices[0].clone();
        for a in &cs.matrices[1..n - 1] {
            prod = prod.mul(a)?;
        }
        let v = prod.get(i0, k).to_integer();
        v.to_biguint().ok_or_else(|| Error::Precondition("negative matrix entry".into()))?
    };
    Ok(cardinality_from_count(&cs.seq.p[0], &cs.seq.p[n - 1], &count))
}

/// Point densities `(d, d')` separating the two families of patches.
pub fn density_bounds(p1: &BigUint, w: &SeparationWitness) -> (Rational, Rational) {
    let p1 = rational::big(p1);
    let p1sq = &p1 * &p1;
    let dense = &p1sq / int(2) - &p1 / int(2) - int(2);
    let sparse = (&p1sq / int(2) + &p1 / int(2) + int(1)) / &p1sq;
    (&w.dbar * &dense + &sparse, &w.dbar_prime * &dense + &sparse)
}

/// Vector `μ_n` of measures of the level-`n` cylinder sets.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureVector {
    pub level: usize,
    pub values: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Terminal {
    /// `e_i / q` for a 0-based `i`.
    Vertex(usize),
    Barycenter,
    Vector(Vec<Rational>),
}

/// Propagates a terminal vector at level `depth + 1` down through
/// `μ_n = A_n μ_{n+1}`.
pub fn measure_vectors(cs: &ChoquetSeq, depth: usize, terminal: &Terminal) -> Result<Vec<MeasureVector>> {
    if depth == 0 || depth > cs.matrices.len() {
        return Err(Error::OutOfRange(format!("depth must lie in 1..={}", cs.matrices.len())));
    }
    let k = cs.matrices[depth - 1].cols();
    let q = rational::big(&cs.seq.q[depth]);
    let top = match terminal {
        Terminal::Vertex(i) if *i < k => (0..k).map(|j| if j == *i { q.recip() } else { int(0) }).collect(),
        Terminal::Vertex(i) => return Err(Error::OutOfRange(format!("vertex {} of a {k}-vertex simplex", i + 1))),
        Terminal::Barycenter => vec![(&q * int(k as i64)).recip(); k],
        Terminal::Vector(v) => {
            let sum: Rational = v.iter().sum();
            if v.len() != k || v.iter().any(Signed::is_negative) || sum * &q != int(1) {
                return Err(Error::OutOfRange("terminal vector lies outside the simplex".into()));
            }
            v.clone()
        }
    };
    let mut out = vec![MeasureVector { level: depth + 1, values: top }];
    for n in (1..=depth).rev() {
        let values = cs.matrices[n - 1].mul_vec(&out.last().expect("nonempty").values)?;
        out.push(MeasureVector { level: n, values });
    }
    out.reverse();
    Ok(out)
}

/// Largest `|μ_n − A_n μ_{n+1}|` over consecutive vectors.
pub fn recursion_residual(cs: &ChoquetSeq, vectors: &[MeasureVector]) -> Result<Rational> {
    let mut worst = Rational::zero();
    for w in vectors.windows(2) {
        let image = cs.matrices[w[0].level - 1].mul_vec(&w[1].values)?;
        for (a, b) in image.iter().zip(&w[0].values) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Largest distance between the level-1 vectors reached from two different
/// vertices, in the sup norm.
pub fn vertex_spread(cs: &ChoquetSeq, depth: usize) -> Result<f64> {
    let k = cs.matrices[depth - 1].cols();
    let firsts: Vec<Vec<Rational>> = (0..k)
        .map(|i| measure_vectors(cs, depth, &Terminal::Vertex(i)).map(|v| v[0].values.clone()))
        .collect::<Result<_>>()?;
    let mut worst = Rational::zero();
    for a in &firsts {
        for b in &firsts {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(rational::to_f64(&worst))
}

#[cfg(test)]
mod tests {
    use super::super::seq::{make_finite_dim_matrices, toy_sequences, LevelSize, SimplexDim};
    use super::*;

    fn toy() -> ChoquetSeq {
        let seq = toy_sequences(4, &[5, 49], &[1, 1]).unwrap();
        let m = make_finite_dim_matrices(2, &LevelSize::from_sequences(&seq).unwrap()).unwrap();
        ChoquetSeq::new(SimplexDim::Finite(2), seq, m).unwrap()
    }

    #[test]
    fn separation_on_two_vertices() {
        let cs = toy();
        let w = find_separating_coordinates(&cs, 2).unwrap();
        assert!(w.dbar > w.dbar_prime);
        assert!(w.columns.iter().all(|&(j, jp)| j >= 1 && jp >= 1 && j != jp));
        let (d, dp) = density_bounds(&cs.seq.p[0], &w);
        assert!(d > dp && dp > int(0) && d < int(1));
        for n in 2..=3 {
            let (j, jp) = w.columns[n - 2];
            let pn2 = rational::big(&cs.seq.q[n - 1]);
            let hi = rational::big(&patch_cardinality_formula(&cs, w.i0, n, j).unwrap());
            let lo = rational::big(&patch_cardinality_formula(&cs, w.i0, n, jp).unwrap());
            assert!(hi >= &pn2 * &d && &pn2 * &d > &pn2 * &dp && &pn2 * &dp >= lo);
        }
    }

    #[test]
    fn constant_columns_do_not_separate() {
        let seq = toy_sequences(4, &[5], &[1]).unwrap();
        let a = TransitionMatrix::from_int_rows(&[&[1, 1, 1], &[71, 71, 71], &[72, 72, 72]]).unwrap();
        let cs = ChoquetSeq::new(SimplexDim::Finite(2), seq, vec![a]).unwrap();
        assert!(matches!(find_separating_coordinates(&cs, 1), Err(Error::NoSeparation)));
        let mu = measure_vectors(&cs, 1, &Terminal::Barycenter).unwrap();
        assert_eq!(mu[0].values, vec![rational::frac(1, 2304), rational::frac(71, 2304), rational::frac(72, 2304)]);
    }

    #[test]
    fn base_cardinalities() {
        let cs = toy();
        assert_eq!(patch_cardinality_formula(&cs, 1, 1, 1).unwrap(), BigUint::from(15u32));
        assert_eq!(patch_cardinality_formula(&cs, 1, 1, 2).unwrap(), BigUint::from(11u32));
    }

    #[test]
    fn measures_satisfy_recursion() {
        let cs = toy();
        let w = find_separating_coordinates(&cs, 2).unwrap();
        for t in [Terminal::Barycenter, Terminal::Vertex(0), Terminal::Vertex(2)] {
            let mu = measure_vectors(&cs, 2, &t).unwrap();
            assert!(recursion_residual(&cs, &mu).unwrap().is_zero());
            let total: Rational = mu[0].values.iter().sum();
            assert_eq!(total * rational::big(&cs.seq.q[0]), int(1));
        }
        let (j, jp) = w.columns[1];
        let a = measure_vectors(&cs, 2, &Terminal::Vertex(j)).unwrap();
        let b = measure_vectors(&cs, 2, &Terminal::Vertex(jp)).unwrap();
        assert!((&a[0].values[w.i0] - &b[0].values[w.i0]).abs() >= &w.dbar - &w.dbar_prime);
        assert!(measure_vectors(&cs, 2, &Terminal::Vector(vec![int(1), int(0), int(0)])).is_err());
    }
}
