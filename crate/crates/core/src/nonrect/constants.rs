use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::rational::{self, int, Rational};
use crate::{Error, Result};

/// The full set of scale constants attached to one bi-Lipschitz bound `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantBundle {
    pub l: Rational,
    pub eps: Rational,
    pub tau: Rational,
    pub lambda: Rational,
    pub p: BigUint,
    pub m0: BigUint,
    pub n0: BigUint,
    pub p0: BigUint,
    pub ell: BigUint,
}

fn check_l(l: &Rational) -> Result<()> {
    if *l < int(1) {
        return Err(Error::OutOfRange(format!("L must be at least 1, got {}", rational::show(l))));
    }
    Ok(())
}

/// Step-regularity constants for `(L, ε, P)`: `(λ, M₀, N₀)` with
/// `λ = ε²/(108PL²)`, `M₀ = ⌈108P²L²(L+4)/ε²⌉` and
/// `N₀ = 2 + ⌈216L²P(3L²+P+1)/ε²⌉`. `ε = 1` is accepted as a limit case.
pub fn constants_remark1(l: &Rational, eps: &Rational, p: u64) -> Result<(Rational, BigUint, BigUint)> {
    check_l(l)?;
    if !rational::is_positive(eps) || *eps > int(1) {
        return Err(Error::OutOfRange(format!("epsilon must lie in (0, 1], got {}", rational::show(eps))));
    }
    if p == 0 {
        return Err(Error::OutOfRange("P must be positive".into()));
    }
    let p = Rational::from_integer(p.into());
    let (l2, e2) = (l * l, eps * eps);
    let lambda = &e2 / (int(108) * &p * &l2);
    let m0 = rational::ceil_u(&(int(108) * &p * &p * &l2 * (l + int(4)) / &e2));
    let n0 = BigUint::from(2u32)
        + rational::ceil_u(&(int(216) * &l2 * &p * (int(3) * &l2 + &p + int(1)) / &e2));
    Ok((lambda, m0, n0))
}

/// Density-gap constants for `(L, d, d')`: `(λ, M*, N*)` with
/// `λ = (d−d')³/(10¹⁰L⁷)`, `M* = ⌈10¹⁵L¹¹/(d−d')⁴⌉`, `N* = ⌈10¹⁰L¹⁰/(d−d')⁴⌉`.
/// `d' = 0` is accepted as a limit case.
pub fn constants_remark2(l: &Rational, d: &Rational, d_prime: &Rational) -> Result<(Rational, BigUint, BigUint)> {
    check_l(l)?;
    if !(*d <= int(1) && d > d_prime && *d_prime >= int(0)) {
        return Err(Error::OutOfRange(format!(
            "need 1 >= d > d' >= 0, got d = {}, d' = {}",
            rational::show(d),
            rational::show(d_prime)
        )));
    }
    let gap = d - d_prime;
    let ten = |e: u32| rational::pow(&int(10), e);
    let lambda = rational::pow(&gap, 3) / (ten(10) * rational::pow(l, 7));
    let m_star = rational::ceil_u(&(ten(15) * rational::pow(l, 11) / rational::pow(&gap, 4)));
    let n_star = rational::ceil_u(&(ten(10) * rational::pow(l, 10) / rational::pow(&gap, 4)));
    Ok((lambda, m_star, n_star))
}

/// `⌈max(4L̂⁴, 3L̂²/ε)⌉` with `L̂ = 6L`.
pub fn constant_p0(l: &Rational, eps: &Rational) -> Result<BigUint> {
    check_l(l)?;
    if !rational::is_positive(eps) {
        return Err(Error::OutOfRange("epsilon must be positive".into()));
    }
    let lh = int(6) * l;
    let a = int(4) * rational::pow(&lh, 4);
    let b = int(3) * &lh * &lh / eps;
    Ok(rational::ceil_u(&rational::max(a, b)))
}

/// How `(1+λ)^ℓ > L²` was confirmed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerCheck {
    /// Exact rational power.
    Exact,
    /// Via `(1+λ)^ℓ ≥ 1 + λℓ`, when the exact power would be too large.
    Bernoulli,
}

/// Exponents up to this size are checked by computing the power exactly.
const EXACT_POWER_LIMIT: u64 = 4096;

/// `ℓ = ⌈L²/λ⌉` together with a confirmation that `(1+λ)^ℓ > L²`.
pub fn ell_min(l: &Rational, lambda: &Rational) -> Result<(BigUint, PowerCheck)> {
    check_l(l)?;
    if !rational::is_positive(lambda) {
        return Err(Error::OutOfRange("lambda must be positive".into()));
    }
    let l2 = l * l;
    let ell = rational::ceil_u(&(&l2 / lambda)).max(BigUint::one());
    let exact = u64::try_from(&ell).ok().filter(|&e| e <= EXACT_POWER_LIMIT && lambda.denom().bits() <= 64);
    let check = match exact {
        Some(e) => {
            let power = rational::pow(&(int(1) + lambda), e as u32);
            if power <= l2 {
                return Err(Error::Infeasible("(1+lambda)^ell does not exceed L^2".into()));
            }
            PowerCheck::Exact
        }
        None => {
            let bound = int(1) + lambda * rational::big(&ell);
            if bound <= l2 {
                return Err(Error::Infeasible("1 + lambda*ell does not exceed L^2".into()));
            }
            PowerCheck::Bernoulli
        }
    };
    Ok((ell, check))
}

/// `N = ⌈2·max(N*/2, 1/(d₂−d₂'), 1/(d₁'−d₁))⌉`.
pub fn n_min(n_star: &BigUint, d1: &Rational, d2: &Rational, d1p: &Rational, d2p: &Rational) -> Result<BigUint> {
    if !(d2 > d2p && d2p > d1p && d1p > d1) {
        return Err(Error::OutOfRange("need d2 > d2' > d1' > d1".into()));
    }
    let half = rational::big(n_star) / int(2);
    let a = (d2 - d2p).recip();
    let b = (d1p - d1).recip();
    let n = rational::ceil_u(&(int(2) * rational::max(half, rational::max(a, b))));
    Ok(if n.is_zero() { BigUint::one() } else { n })
}

/// Default intermediate densities: the points at one and two thirds of `[d₁, d₂]`.
pub fn thirds(d1: &Rational, d2: &Rational) -> (Rational, Rational) {
    let third = (d2 - d1) / int(3);
    (d1 + &third, d2 - &third)
}

/// Density tolerance used to pick `P*` from a density gap:
/// strictly below `(d−d')/(20(2+5L))`.
pub fn density_epsilon(l: &Rational, d: &Rational, d_prime: &Rational) -> Rational {
    (d - d_prime) / (int(40) * (int(2) + int(5) * l))
}

/// All constants attached to one scale of the construction.
pub fn bundle_for_gap(l: &Rational, d: &Rational, d_prime: &Rational) -> Result<ConstantBundle> {
    let (lambda, m_star, n_star) = constants_remark2(l, d, d_prime)?;
    let eps = density_epsilon(l, d, d_prime);
    let p0 = constant_p0(l, &eps)?;
    let (ell, _) = ell_min(l, &lambda)?;
    let tau = &eps * &eps / (int(9) * l * l);
    Ok(ConstantBundle { l: l.clone(), eps, tau, lambda, p: p0.clone(), m0: m_star, n0: n_star, p0, ell })
}
