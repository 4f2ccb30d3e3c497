//! Dual-mode scalars: exact rationals or binary floats.
//!
//! Arithmetic between two exact values stays exact. Any operation that
//! touches an approximate value produces an approximate value. Certificates
//! derived from approximate values widen their bounds with [`round_up`] /
//! [`round_down`] and [`float_margin`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Number of ulps added when rounding a float bound outward.
pub const ULP_SAFETY: u32 = 4;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    /// The exact rational value of a finite float (every `f64` is dyadic).
    pub fn exact_from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Scalar::Exact)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Approx(x) => *x == 0.0,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Exact(q) => {
                if q.is_positive() {
                    1
                } else if q.is_negative() {
                    -1
                } else {
                    0
                }
            }
            Scalar::Approx(x) => {
                if *x > 0.0 {
                    1
                } else if *x < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Approx(x) => Scalar::Approx(x.abs()),
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Drops exactness; used when a computation leaves the rationals.
    pub fn to_approx(&self) -> Self {
        Scalar::Approx(self.to_f64())
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Exact equality for exact values, absolute tolerance otherwise.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= tol,
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

/// Converts a rational to the nearest float without overflowing on huge
/// numerators or denominators.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale both parts down to a comparable size first.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb.max(db) - 900;
    let n = (q.numer() >> (shift.max(0) as usize)).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> (shift.max(0) as usize)).to_f64().unwrap_or(1.0);
    n / d
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Approx(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                assert!(!b.is_zero(), "exact division by zero");
                Scalar::Exact(a / b)
            }
            _ => Scalar::Approx(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Div<&Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        &self / rhs
    }
}

impl Div<Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.clone().neg()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Approx(x)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

/// Integers and `p/q` strings are exact; anything written with a decimal
/// point or exponent is an approximate float.
impl FromStr for Scalar {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseError::Number(s.to_string()));
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| ParseError::Number(s.into()))?;
            let d: BigInt = d.trim().parse().map_err(|_| ParseError::Number(s.into()))?;
            if d.is_zero() {
                return Err(ParseError::Number(s.into()));
            }
            return Ok(Scalar::Exact(BigRational::new(n, d)));
        }
        if let Ok(n) = t.parse::<BigInt>() {
            return Ok(Scalar::Exact(BigRational::from_integer(n)));
        }
        match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Scalar::Approx(x)),
            _ => Err(ParseError::Number(s.to_string())),
        }
    }
}

/// Exact values print as `p/q` (or an integer); approximate values always
/// carry a decimal point or exponent so they parse back as approximate.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Approx(x) => write!(f, "{x:?}"),
        }
    }
}

pub fn round_up(x: f64) -> f64 {
    (0..ULP_SAFETY).fold(x, |v, _| v.next_up())
}

pub fn round_down(x: f64) -> f64 {
    (0..ULP_SAFETY).fold(x, |v, _| v.next_down())
}

/// Absolute error allowance for float computations at magnitude `scale`
/// after roughly `steps` dependent operations.
pub fn float_margin(scale: f64, steps: usize) -> f64 {
    let steps = steps.max(1) as f64;
    f64::from(ULP_SAFETY) * 8.0 * steps * f64::EPSILON * scale.abs().max(f64::MIN_POSITIVE)
}

fn floor_rat(q: &BigRational) -> BigInt {
    q.numer().div_floor(q.denom())
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]` (Stern-Brocot descent).
pub fn simplest_rational_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let (lo, hi) = if lo <= hi { (lo.clone(), hi.clone()) } else { (hi.clone(), lo.clone()) };
    if lo <= BigRational::zero() && hi >= BigRational::zero() {
        return BigRational::zero();
    }
    if hi < BigRational::zero() {
        return -simplest_rational_between(&-hi, &-lo);
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: BigRational, hi: BigRational) -> BigRational {
    // Iterative continued-fraction expansion; the convergent recurrences
    // rebuild the answer without recursion.
    let (mut lo, mut hi) = (lo, hi);
    let mut terms: Vec<BigInt> = Vec::new();
    loop {
        let fl = floor_rat(&lo);
        let fl_q = BigRational::from_integer(fl.clone());
        if fl_q == lo {
            terms.push(fl);
            break;
        }
        let next = &fl + BigInt::one();
        if BigRational::from_integer(next.clone()) <= hi {
            terms.push(next);
            break;
        }
        terms.push(fl.clone());
        let new_lo = (&hi - &fl_q).recip();
        let new_hi = (&lo - &fl_q).recip();
        lo = new_lo;
        hi = new_hi;
    }
    let mut num = BigInt::one();
    let mut den = BigInt::zero();
    for a in terms.iter().rev() {
        let n = a * &num + &den;
        den = num;
        num = n;
    }
    BigRational::new(num, den)
}

/// Best rational approximation with denominator at most `max_den`.
pub fn rational_approximation(x: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let exact = BigRational::from_float(x)?;
    let max_den = BigInt::from(max_den.max(1));
    let (mut p0, mut q0, mut p1, mut q1) =
        (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    loop {
        let a = floor_rat(&rest);
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    if q1.is_zero() {
        return Some(BigRational::from_integer(floor_rat(&exact)));
    }
    Some(BigRational::new(p1, q1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parse_modes() {
        assert_eq!("3/4".parse::<Scalar>().unwrap(), Scalar::ratio(3, 4));
        assert!("3/4".parse::<Scalar>().unwrap().is_exact());
        assert!("-2".parse::<Scalar>().unwrap().is_exact());
        assert!(!"0.5".parse::<Scalar>().unwrap().is_exact());
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in [Scalar::ratio(-7, 3), Scalar::int(5), Scalar::Approx(0.0), Scalar::Approx(1e-7)] {
            let back: Scalar = s.to_string().parse().unwrap();
            assert_eq!(back.is_exact(), s.is_exact());
            assert_eq!(back, s);
        }
    }

    #[test]
    fn mixed_arithmetic_degrades() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::Approx(0.5);
        assert!((&a * &a).is_exact());
        assert!(!(&a + &b).is_exact());
        assert_eq!(&a + &a, Scalar::ratio(2, 3));
    }

    #[test]
    fn simplest_between() {
        assert_eq!(simplest_rational_between(&q(3, 10), &q(4, 10)), q(1, 3));
        assert_eq!(simplest_rational_between(&q(-1, 10), &q(1, 10)), q(0, 1));
        assert_eq!(simplest_rational_between(&q(-4, 10), &q(-3, 10)), q(-1, 3));
        assert_eq!(simplest_rational_between(&q(7, 2), &q(4, 1)), q(4, 1));
        let s = simplest_rational_between(&q(1000, 2001), &q(1001, 2001));
        assert!(s >= q(1000, 2001) && s <= q(1001, 2001));
    }

    #[test]
    fn approximation_respects_denominator() {
        let r = rational_approximation(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(r, q(355, 113));
        let r = rational_approximation(0.5, 1_000_000).unwrap();
        assert_eq!(r, q(1, 2));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigRational::new(BigInt::from(3) << 2000usize, BigInt::from(7) << 2000usize);
        assert!((rational_to_f64(&big) - 3.0 / 7.0).abs() < 1e-15);
    }
}
