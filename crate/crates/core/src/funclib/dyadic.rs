//! Exact dyadic rationals and closed intervals with dyadic endpoints.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// `mantissa * 2^exponent`, normalized so the mantissa is odd (or zero with exponent 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Dyadic { mantissa, exponent: 0 };
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    /// `value / 2^scale`.
    pub fn from_fixed(value: BigInt, scale: u32) -> Self {
        Self::new(value, -(scale as i64))
    }

    pub fn from_integer(value: BigInt) -> Self {
        Self::new(value, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as usize)
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as usize
        } else {
            self.mantissa.div_floor(&(BigInt::one() << (-self.exponent) as usize))
        }
    }

    /// Mantissa rescaled to `2^-scale` units; exact when `scale >= -exponent`.
    fn at_scale(&self, scale: i64) -> BigInt {
        let shift = self.exponent + scale;
        debug_assert!(shift >= 0);
        &self.mantissa << shift as usize
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        // m 2^e vs p/q  <=>  m q 2^max(e,0) vs p 2^max(-e,0)
        let (mut lhs, mut rhs) = (&self.mantissa * r.denom(), r.numer().clone());
        if self.exponent >= 0 {
            lhs <<= self.exponent as usize;
        } else {
            rhs <<= (-self.exponent) as usize;
        }
        lhs.cmp(&rhs)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let scale = -(self.exponent.min(other.exponent));
        self.at_scale(scale).cmp(&other.at_scale(scale))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            write!(f, "{}", self.floor())
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

/// Closed interval `[lo, hi]` with exactly representable endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        DyadicInterval { lo, hi }
    }

    /// `[lo, hi] / 2^scale`.
    pub fn from_fixed(lo: BigInt, hi: BigInt, scale: u32) -> Self {
        Self::new(Dyadic::from_fixed(lo, scale), Dyadic::from_fixed(hi, scale))
    }

    pub fn point(value: Dyadic) -> Self {
        DyadicInterval {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        self.hi.to_rational() - self.lo.to_rational()
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo.cmp_rational(r) != Ordering::Greater && self.hi.cmp_rational(r) != Ordering::Less
    }

    /// Contains `other` entirely.
    pub fn contains_interval(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Where `r` lies relative to the whole interval, if decided.
    pub fn cmp_rational(&self, r: &Rational) -> Option<Ordering> {
        if self.hi.cmp_rational(r) == Ordering::Less {
            Some(Ordering::Less)
        } else if self.lo.cmp_rational(r) == Ordering::Greater {
            Some(Ordering::Greater)
        } else if self.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// `floor` of every point in the interval, when they all agree.
    pub fn common_floor(&self) -> Option<BigInt> {
        let f = self.lo.floor();
        (self.hi.floor() == f).then_some(f)
    }

    pub fn abs_upper(&self) -> Rational {
        self.lo.to_rational().abs().max(self.hi.to_rational().abs())
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(m.into(), e)
    }

    #[test]
    fn normalizes_mantissa() {
        assert_eq!(d(12, 0), d(3, 2));
        assert_eq!(d(0, 5), d(0, -3));
        assert_eq!(d(12, 0).mantissa(), &BigInt::from(3));
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(d(1, -1) < d(1, 0));
        assert!(d(-3, -2) < d(-1, -1));
        assert_eq!(d(5, -1).cmp(&d(10, -2)), Ordering::Equal);
    }

    #[test]
    fn floor_rounds_down() {
        assert_eq!(d(7, -1).floor(), BigInt::from(3));
        assert_eq!(d(-7, -1).floor(), BigInt::from(-4));
        assert_eq!(d(3, 2).floor(), BigInt::from(12));
    }

    #[test]
    fn rational_comparisons() {
        let third = Rational::new(1.into(), 3.into());
        assert_eq!(d(1, -2).cmp_rational(&third), Ordering::Less);
        assert_eq!(d(3, -3).cmp_rational(&third), Ordering::Greater);
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(d(1, -1).cmp_rational(&half), Ordering::Equal);
    }

    #[test]
    fn interval_decisions() {
        let iv = DyadicInterval::new(d(1, -2), d(3, -2));
        let third = Rational::new(1.into(), 3.into());
        assert_eq!(iv.cmp_rational(&third), None);
        assert_eq!(iv.cmp_rational(&Rational::from_integer(1.into())), Some(Ordering::Less));
        assert!(iv.contains(&third));
        assert_eq!(iv.common_floor(), Some(BigInt::from(0)));
        let p = DyadicInterval::point(d(1, 0));
        assert_eq!(p.cmp_rational(&Rational::from_integer(1.into())), Some(Ordering::Equal));
        assert!(iv.intersects(&DyadicInterval::point(d(1, -1))));
    }
}
