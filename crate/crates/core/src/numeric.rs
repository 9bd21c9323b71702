//! Exact integer and rational primitives.
//!
//! Every quantity on the verification path is an unbounded integer ([`Nat`])
//! or a reduced fraction ([`Rat`]). Floating point only appears in
//! [`ln_nat`], which feeds the log-scale sharpness report and never a verdict.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Unbounded non-negative integer.
pub type Nat = BigUint;

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(num, den)))
    }

    pub fn from_nats(num: Nat, den: Nat) -> Result<Self> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_nat(value: Nat) -> Self {
        Rat(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.numer().sign() == Sign::Plus
    }

    /// The value as a [`Nat`] when it is a non-negative integer.
    pub fn to_nat(&self) -> Option<Nat> {
        if self.is_integer() {
            self.0.numer().to_biguint()
        } else {
            None
        }
    }

    /// Compares against an integer without allocating a second fraction
    /// reduction: `num/den ? x` iff `num ? x * den`.
    pub fn cmp_nat(&self, x: &Nat) -> Ordering {
        let scaled = BigInt::from(x.clone()) * self.denom();
        self.numer().cmp(&scaled)
    }
}

impl From<Nat> for Rat {
    fn from(value: Nat) -> Self {
        Rat::from_nat(value)
    }
}

impl From<u64> for Rat {
    fn from(value: u64) -> Self {
        Rat::from_nat(Nat::from(value))
    }
}

/// Always `num/den`, including when `den = 1`.
impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat($trait::$method(self.0, rhs.0))
            }
        }

        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

/// `gcd(0, 0) = 0`, so folds over any sequence are total.
pub fn gcd(x: &Nat, y: &Nat) -> Nat {
    x.gcd(y)
}

pub fn lcm(x: &Nat, y: &Nat) -> Result<Nat> {
    if x.is_zero() || y.is_zero() {
        return Err(Error::ZeroLcmOperand);
    }
    Ok(x / gcd(x, y) * y)
}

pub fn factorial(m: u64) -> Nat {
    (2..=m).fold(Nat::one(), |acc, i| acc * i)
}

pub fn pow(base: &Nat, exp: u64) -> Nat {
    let mut result = Nat::one();
    let mut square = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &square;
        }
        e >>= 1;
        if e > 0 {
            square = &square * &square;
        }
    }
    result
}

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing
/// primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(Nat, u64)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(Nat, u64)] {
        &self.pairs
    }

    pub fn product(&self) -> Nat {
        self.pairs
            .iter()
            .fold(Nat::one(), |acc, (p, e)| acc * pow(p, *e))
    }
}

/// Trial division. Intended for the common difference and other small bases,
/// never for an LCM.
pub fn factorize(x: &Nat) -> Result<Factorization> {
    if *x < Nat::from(2u32) {
        return Err(Error::FactorizeTooSmall(x.to_string()));
    }
    let mut pairs = Vec::new();
    let mut rest = x.clone();
    let mut d = 2u64;
    loop {
        let dd = Nat::from(d) * d;
        if dd > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, rem) = rest.div_rem(&Nat::from(d));
            if !rem.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            pairs.push((Nat::from(d), e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        pairs.push((rest, 1));
    }
    Ok(Factorization { pairs })
}

/// p-adic valuation of `x` for a prime `p`; `x` must be nonzero.
fn valuation(p: &Nat, x: &Nat) -> u64 {
    let mut rest = x.clone();
    let mut e = 0;
    loop {
        let (q, rem) = rest.div_rem(p);
        if !rem.is_zero() {
            return e;
        }
        rest = q;
        e += 1;
    }
}

/// Largest `e` with `base^e | x`.
pub fn max_power_dividing(base: &Nat, x: &Nat) -> Result<u64> {
    if *base < Nat::from(2u32) {
        return Err(Error::InvalidBase(base.to_string()));
    }
    if x.is_zero() {
        return Err(Error::ZeroDividend);
    }
    let fac = factorize(base)?;
    Ok(fac
        .pairs()
        .iter()
        .map(|(p, e)| valuation(p, x) / e)
        .min()
        .expect("base >= 2 has a prime factor"))
}

/// Legendre's formula: `v_p(m!) = sum_i floor(m / p^i)`.
pub fn legendre(p: u64, m: u64) -> u64 {
    let mut total = 0;
    let mut q = m;
    while q > 0 {
        q /= p;
        total += q;
    }
    total
}

/// Largest `e` with `base^e | m!`, without forming `m!`.
pub fn max_power_dividing_factorial(base: &Nat, m: u64) -> Result<u64> {
    if *base < Nat::from(2u32) {
        return Err(Error::InvalidBase(base.to_string()));
    }
    let fac = factorize(base)?;
    let mut best = u64::MAX;
    for (p, e) in fac.pairs() {
        // A prime factor larger than m contributes v_p(m!) = 0.
        let v = match p.to_u64() {
            Some(p) => legendre(p, m),
            None => 0,
        };
        best = best.min(v / e);
    }
    Ok(best)
}

/// Natural log of a positive integer from its top 64 bits and bit length.
/// Relative error is at the level of f64 rounding.
pub fn ln_nat(x: &Nat) -> f64 {
    debug_assert!(!x.is_zero());
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("at most 64 bits remain") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` as an f64 with relative error near one ulp; the operands may
/// be far beyond f64 range as long as their quotient is not.
fn ratio_f64(num: &Nat, den: &Nat) -> f64 {
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q = q.to_f64().expect("quotient has about 64 bits");
    q * 2f64.powi(-shift as i32)
}

/// `ln(num / den)` for `num >= den >= 1`, without the cancellation of
/// `ln(num) - ln(den)` when the two are close.
pub fn ln_ratio(num: &Nat, den: &Nat) -> f64 {
    debug_assert!(num >= den && !den.is_zero());
    if num.bits() - den.bits() > 512 {
        return ln_nat(num) - ln_nat(den);
    }
    ratio_f64(&(num - den), den).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&n(12), &n(18)), n(6));
        assert_eq!(gcd(&n(7), &n(0)), n(7));
        assert_eq!(gcd(&n(1), &n(987654)), n(1));
        assert_eq!(gcd(&n(0), &n(0)), n(0));
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm(&n(4), &n(6)).unwrap(), n(12));
        assert_eq!(lcm(&n(5), &n(1)).unwrap(), n(5));
        assert_eq!(lcm(&n(9), &n(9)).unwrap(), n(9));
        assert_eq!(lcm(&n(0), &n(3)), Err(Error::ZeroLcmOperand));
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(factorial(0), n(1));
        assert_eq!(factorial(5), n(120));
        assert_eq!(factorial(8), n(40320));
    }

    #[test]
    fn factorize_examples() {
        let pairs = |x| {
            factorize(&n(x))
                .unwrap()
                .pairs()
                .iter()
                .map(|(p, e)| (p.to_u64().unwrap(), *e))
                .collect::<Vec<_>>()
        };
        assert_eq!(pairs(6), vec![(2, 1), (3, 1)]);
        assert_eq!(pairs(8), vec![(2, 3)]);
        assert_eq!(pairs(13), vec![(13, 1)]);
        assert!(matches!(factorize(&n(1)), Err(Error::FactorizeTooSmall(_))));
        assert!(matches!(factorize(&n(0)), Err(Error::FactorizeTooSmall(_))));
    }

    #[test]
    fn max_power_dividing_examples() {
        assert_eq!(max_power_dividing(&n(2), &n(40320)).unwrap(), 7);
        assert_eq!(max_power_dividing(&n(6), &n(720)).unwrap(), 2);
        assert_eq!(max_power_dividing(&n(5), &n(1)).unwrap(), 0);
        assert!(matches!(
            max_power_dividing(&n(1), &n(8)),
            Err(Error::InvalidBase(_))
        ));
        assert_eq!(max_power_dividing(&n(2), &n(0)), Err(Error::ZeroDividend));
    }

    #[test]
    fn max_power_dividing_factorial_examples() {
        assert_eq!(max_power_dividing_factorial(&n(2), 8).unwrap(), 7);
        assert_eq!(max_power_dividing_factorial(&n(2), 0).unwrap(), 0);
        assert_eq!(max_power_dividing_factorial(&n(6), 6).unwrap(), 2);
        assert!(matches!(
            max_power_dividing_factorial(&n(0), 5),
            Err(Error::InvalidBase(_))
        ));
    }

    #[test]
    fn rat_is_reduced_and_displays_with_denominator() {
        let r = Rat::from_nats(n(90), n(4)).unwrap();
        assert_eq!(r.numer(), &BigInt::from(45));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.to_string(), "45/2");
        assert_eq!(Rat::from(7u64).to_string(), "7/1");
        assert!(Rat::from_nats(n(1), n(0)).is_err());
    }

    #[test]
    fn rat_cmp_nat() {
        let r = Rat::from_nats(n(45), n(2)).unwrap();
        assert_eq!(r.cmp_nat(&n(22)), Ordering::Greater);
        assert_eq!(r.cmp_nat(&n(23)), Ordering::Less);
        assert_eq!(Rat::from(9u64).cmp_nat(&n(9)), Ordering::Equal);
    }

    #[test]
    fn ln_ratio_close_and_far() {
        let big = pow(&n(10), 30);
        let next = &big + 1u32;
        let g = ln_ratio(&next, &big);
        assert!(((g - 1e-30) / 1e-30).abs() < 1e-12, "{g}");
        assert_eq!(ln_ratio(&big, &big), 0.0);
        let g = ln_ratio(&n(1673196525), &n(4251528));
        assert!((g - 5.975212714974295).abs() < 1e-13);
        let huge = pow(&n(3), 2000);
        let g = ln_ratio(&huge, &n(7));
        let expected = 2000.0 * 3f64.ln() - 7f64.ln();
        assert!(((g - expected) / expected).abs() < 1e-13);
    }

    #[test]
    fn ln_nat_matches_f64_and_scales() {
        assert!((ln_nat(&n(1673196525)) - (1673196525f64).ln()).abs() < 1e-12);
        let big = pow(&n(3), 1000);
        let expected = 1000.0 * 3f64.ln();
        assert!(((ln_nat(&big) - expected) / expected).abs() < 1e-13);
    }
}
