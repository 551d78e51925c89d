use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{AbsTrend, MAX_PRECISION_BITS};
use super::{Derivative, DyadicInterval, EvalError, FunctionSpec, Precision, Rational, Sign, Term};

/// Searches for integer crossings give up beyond this many bits of `x`.
const SEARCH_LIMIT_BITS: u64 = 4096;

/// Enclosure of `f^(k)(x)` together with the fractional precision it was computed at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedValue {
    pub enclosure: DyadicInterval,
    pub frac_bits: u32,
}

/// Rational lower and upper bounds of a certified quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bounds {
    pub fn exact(value: Rational) -> Self {
        Bounds {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn from_interval(iv: &DyadicInterval) -> Self {
        Bounds {
            lo: iv.lo().to_rational(),
            hi: iv.hi().to_rational(),
        }
    }

    pub fn shifted(&self, by: &Rational) -> Self {
        Bounds {
            lo: &self.lo + by,
            hi: &self.hi + by,
        }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            Bounds {
                lo: -self.hi.clone(),
                hi: -self.lo.clone(),
            }
        } else {
            Bounds {
                lo: Rational::zero(),
                hi: self.hi.clone().max(-self.lo.clone()),
            }
        }
    }

    pub fn intersect(&self, other: &Bounds) -> Self {
        Bounds {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    pub fn contains(&self, r: &Rational) -> bool {
        &self.lo <= r && r <= &self.hi
    }
}

/// Outcome of a certified comparison against a rational target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub ordering: Ordering,
    /// Bounds on the compared value that decided the comparison.
    pub bounds: Bounds,
}

/// Certified floor of a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolved {
    pub floor: BigInt,
    pub bounds: Bounds,
}

impl Resolved {
    /// Bounds on the fractional part.
    pub fn frac(&self) -> Bounds {
        self.bounds.shifted(&-Rational::from_integer(self.floor.clone()))
    }
}

/// A sub-interval of `[0, 1]` with independently open or closed ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracWindow {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl FracWindow {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self, EvalError> {
        if lo.is_negative() || lo >= hi || hi > Rational::one() {
            return Err(EvalError::InvalidArgument(format!(
                "window ({lo}, {hi}) must satisfy 0 <= lo < hi <= 1"
            )));
        }
        Ok(FracWindow {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: Rational, hi: Rational) -> Result<Self, EvalError> {
        Self::new(lo, hi, true, false)
    }

    /// `(lo, hi)`
    pub fn open(lo: Rational, hi: Rational) -> Result<Self, EvalError> {
        Self::new(lo, hi, false, false)
    }

    /// `[lo, hi]`
    pub fn closed(lo: Rational, hi: Rational) -> Result<Self, EvalError> {
        Self::new(lo, hi, true, true)
    }

    /// Exact membership test for a known fractional part.
    pub fn contains(&self, r: &Rational) -> bool {
        let above = if self.lo_closed { r >= &self.lo } else { r > &self.lo };
        let below = if self.hi_closed { r <= &self.hi } else { r < &self.hi };
        above && below
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowDecision {
    pub membership: Membership,
    pub floor: BigInt,
    /// Bounds on the fractional part.
    pub frac: Bounds,
}

impl WindowDecision {
    pub fn inside(&self) -> bool {
        self.membership == Membership::Inside
    }
}

fn check_x(x: &BigUint) -> Result<(), EvalError> {
    if x.is_zero() {
        return Err(EvalError::InvalidArgument("x must be >= 1".into()));
    }
    Ok(())
}

/// Enclosure of `x^(p/q)` in units of `2^-scale`, from exact integer roots.
fn power_fixed(x: &BigUint, exponent: &Rational, scale: u32) -> (BigUint, BigUint) {
    let p = exponent.numer().to_i64().expect("exponent numerator fits i64");
    let q = exponent.denom().to_u32().expect("exponent denominator fits u32");
    let shift = scale as usize * q as usize;
    let (root, exact) = if p >= 0 {
        let n = x.pow(p as u32) << shift;
        if q == 1 {
            return (n.clone(), n);
        }
        let r = n.nth_root(q);
        let exact = r.pow(q) == n;
        (r, exact)
    } else {
        let (y, rem) = (BigUint::one() << shift).div_rem(&x.pow(p.unsigned_abs() as u32));
        let r = if q == 1 { y.clone() } else { y.nth_root(q) };
        let exact = rem.is_zero() && (q == 1 || r.pow(q) == y);
        (r, exact)
    };
    let hi = if exact { root.clone() } else { &root + 1u32 };
    (root, hi)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Enclosure of `sum c x^e` with width at most `2^-frac_bits`.
fn enclose(terms: &[Term], x: &BigUint, frac_bits: u32) -> DyadicInterval {
    // each term contributes width <= |c| + 2 units before summing
    let slack: BigInt = terms.iter().map(|t| super::ceil_rational(&t.coeff.abs()) + 2).sum();
    let guard = slack.bits().max(1) as u32;
    let scale = frac_bits + guard;
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    for t in terms {
        let (rl, rh) = power_fixed(x, &t.exponent, scale);
        let (rl, rh) = (BigInt::from(rl), BigInt::from(rh));
        let (a, b) = (t.coeff.numer(), t.coeff.denom());
        let (pl, ph) = if a.is_positive() {
            (a * rl, a * rh)
        } else {
            (a * rh, a * rl)
        };
        lo += pl.div_floor(b);
        hi += div_ceil(&ph, b);
    }
    DyadicInterval::from_fixed(lo, hi, scale)
}

/// Enclosure of `f^(d)(x)` with width at most `2^-frac_bits`.
pub fn eval(
    spec: &FunctionSpec,
    d: Derivative,
    x: &BigUint,
    frac_bits: u32,
    prec: &Precision,
) -> Result<CertifiedValue, EvalError> {
    check_x(x)?;
    if frac_bits == 0 {
        return Err(EvalError::InvalidArgument("frac_bits must be >= 1".into()));
    }
    let cap = prec.cap_bits.min(MAX_PRECISION_BITS);
    if frac_bits > cap {
        return Err(EvalError::PrecisionCapExceeded {
            cap_bits: cap,
            context: format!("evaluating {} at {frac_bits} bits", spec.label()),
        });
    }
    Ok(CertifiedValue {
        enclosure: enclose(spec.derivative_terms(d), x, frac_bits),
        frac_bits,
    })
}

/// Refines the enclosure of `f^(d)(x)` until `decide` returns an answer.
fn refine<T>(
    spec: &FunctionSpec,
    d: Derivative,
    x: &BigUint,
    prec: &Precision,
    what: impl FnOnce() -> String,
    mut decide: impl FnMut(&DyadicInterval) -> Option<T>,
) -> Result<(T, DyadicInterval), EvalError> {
    check_x(x)?;
    let terms = spec.derivative_terms(d);
    let cap = prec.cap_bits.min(MAX_PRECISION_BITS);
    let capped = Precision {
        start_bits: prec.start_bits,
        cap_bits: cap,
    };
    for bits in capped.schedule() {
        let iv = enclose(terms, x, bits);
        if let Some(answer) = decide(&iv) {
            return Ok((answer, iv));
        }
    }
    Err(EvalError::PrecisionCapExceeded {
        cap_bits: cap,
        context: format!("{} for f^({})({x}) with f = {}", what(), d.order(), spec.label()),
    })
}

/// Certified comparison of `f^(d)(x)` with a rational target.
pub fn compare(
    spec: &FunctionSpec,
    d: Derivative,
    x: &BigUint,
    target: &Rational,
    prec: &Precision,
) -> Result<Decision, EvalError> {
    check_x(x)?;
    if let Some(v) = spec.exact_value(d, x) {
        return Ok(Decision {
            ordering: v.cmp(target),
            bounds: Bounds::exact(v),
        });
    }
    let (ordering, iv) = refine(
        spec,
        d,
        x,
        prec,
        || format!("comparing with {target}"),
        |iv| iv.cmp_rational(target),
    )?;
    Ok(Decision {
        ordering,
        bounds: Bounds::from_interval(&iv),
    })
}

/// Certified floor of `f^(d)(x)` with the enclosure that proves it.
pub fn resolve(spec: &FunctionSpec, d: Derivative, x: &BigUint, prec: &Precision) -> Result<Resolved, EvalError> {
    check_x(x)?;
    if let Some(v) = spec.exact_value(d, x) {
        return Ok(Resolved {
            floor: v.floor().to_integer(),
            bounds: Bounds::exact(v),
        });
    }
    let (floor, iv) = refine(
        spec,
        d,
        x,
        prec,
        || "resolving the floor".into(),
        |iv| iv.common_floor(),
    )?;
    Ok(Resolved {
        floor,
        bounds: Bounds::from_interval(&iv),
    })
}

/// `floor(f^(d)(x))`, proved by an enclosure inside `[k, k+1)`.
pub fn floor_exact(spec: &FunctionSpec, d: Derivative, x: &BigUint, prec: &Precision) -> Result<BigInt, EvalError> {
    resolve(spec, d, x, prec).map(|r| r.floor)
}

/// Decides whether the fractional part of `f^(d)(x)` lies in `window`.
pub fn frac_in_window(
    spec: &FunctionSpec,
    d: Derivative,
    x: &BigUint,
    window: &FracWindow,
    prec: &Precision,
) -> Result<WindowDecision, EvalError> {
    let res = resolve(spec, d, x, prec)?;
    let k = Rational::from_integer(res.floor.clone());
    let mut frac = res.frac();

    let lower_ok = if window.lo.is_zero() && window.lo_closed {
        true
    } else {
        let dec = compare(spec, d, x, &(&k + &window.lo), prec)?;
        frac = frac.intersect(&dec.bounds.shifted(&-k.clone()));
        match dec.ordering {
            Ordering::Greater => true,
            Ordering::Equal => window.lo_closed,
            Ordering::Less => false,
        }
    };
    let upper_ok = lower_ok
        && if window.hi.is_one() && !window.hi_closed {
            true
        } else {
            let dec = compare(spec, d, x, &(&k + &window.hi), prec)?;
            frac = frac.intersect(&dec.bounds.shifted(&-k.clone()));
            match dec.ordering {
                Ordering::Less => true,
                Ordering::Equal => window.hi_closed,
                Ordering::Greater => false,
            }
        };
    Ok(WindowDecision {
        membership: if upper_ok {
            Membership::Inside
        } else {
            Membership::Outside
        },
        floor: res.floor,
        frac,
    })
}

/// Decides `|f^(d)(x)| <= bound`, returning bounds on `|f^(d)(x)|`.
pub fn abs_at_most(
    spec: &FunctionSpec,
    d: Derivative,
    x: &BigUint,
    bound: &Rational,
    prec: &Precision,
) -> Result<(bool, Bounds), EvalError> {
    check_x(x)?;
    if let Some(v) = spec.exact_value(d, x) {
        let a = v.abs();
        return Ok((&a <= bound, Bounds::exact(a)));
    }
    let neg = -bound.clone();
    let (ok, iv) = refine(
        spec,
        d,
        x,
        prec,
        || format!("bounding |value| by {bound}"),
        |iv| {
            let hi_ok = iv.hi().cmp_rational(bound) != Ordering::Greater;
            let lo_ok = iv.lo().cmp_rational(&neg) != Ordering::Less;
            if hi_ok && lo_ok {
                Some(true)
            } else if iv.lo().cmp_rational(bound) == Ordering::Greater || iv.hi().cmp_rational(&neg) == Ordering::Less {
                Some(false)
            } else {
                None
            }
        },
    )?;
    Ok((ok, Bounds::from_interval(&iv).abs()))
}

/// Smallest integer `>= lo` where a monotone predicate flips to true.
fn first_true(lo: BigUint, mut pred: impl FnMut(&BigUint) -> Result<bool, EvalError>) -> Result<BigUint, EvalError> {
    if pred(&lo)? {
        return Ok(lo);
    }
    let mut below = lo;
    let mut step = BigUint::one();
    let mut above = loop {
        let probe = &below + &step;
        if probe.bits() > SEARCH_LIMIT_BITS {
            return Err(EvalError::InvalidArgument(format!(
                "target not reached below 2^{SEARCH_LIMIT_BITS}"
            )));
        }
        if pred(&probe)? {
            break probe;
        }
        below = probe;
        step <<= 1;
    };
    while &above - &below > BigUint::one() {
        let mid: BigUint = (&below + &above) >> 1;
        if pred(&mid)? {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(above)
}

/// Smallest integer `x >= lo_hint` with `f^(d)(x) >= target` (or `>` when `strict`).
///
/// Requires `f^(d)` to be certified increasing on `[lo_hint, ∞)`.
pub fn first_at_least(
    spec: &FunctionSpec,
    d: Derivative,
    target: &Rational,
    lo_hint: &BigUint,
    strict: bool,
    prec: &Precision,
) -> Result<BigUint, EvalError> {
    check_x(lo_hint)?;
    let sign = &spec.monotonicity().signs[d.order()];
    if sign.sign != Sign::Positive || &sign.cutoff > lo_hint {
        return Err(EvalError::NotMonotone(format!(
            "f^({}) of {} is not certified increasing from {lo_hint}",
            d.order(),
            spec.label()
        )));
    }
    first_true(lo_hint.clone(), |x| {
        let ord = compare(spec, d, x, target, prec)?.ordering;
        Ok(ord == Ordering::Greater || (!strict && ord == Ordering::Equal))
    })
}

/// Minimal `m >= lo_hint` with `f'(m) >= y`.
pub fn invert_derivative(
    spec: &FunctionSpec,
    y: &Rational,
    lo_hint: &BigUint,
    prec: &Precision,
) -> Result<BigUint, EvalError> {
    first_at_least(spec, Derivative::First, y, lo_hint, false, prec)
}

/// Smallest integer `x0` such that `|f''(x)| <= bound` for every real `x >= x0`.
pub fn second_derivative_threshold(
    spec: &FunctionSpec,
    bound: &Rational,
    prec: &Precision,
) -> Result<BigUint, EvalError> {
    if !bound.is_positive() {
        return Err(EvalError::InvalidArgument("bound must be positive".into()));
    }
    if spec.derivative_terms(Derivative::Second).is_empty() {
        return Ok(BigUint::one());
    }
    let (cutoff, trend) = spec.monotonicity().second_abs_from();
    if !spec.second_derivative_vanishes() || trend != AbsTrend::Decreasing {
        return Err(EvalError::NotMonotone(format!(
            "|f''| of {} does not decrease to 0",
            spec.label()
        )));
    }
    first_true(cutoff, |x| {
        abs_at_most(spec, Derivative::Second, x, bound, prec).map(|(ok, _)| ok)
    })
}

/// Decides `|f''(x)| <= bound` for all real `x` in `[a, b]`, returning bounds on the
/// supremum that decided it.
pub fn second_derivative_bound(
    spec: &FunctionSpec,
    a: &BigUint,
    b: &BigUint,
    bound: &Rational,
    prec: &Precision,
) -> Result<(bool, Bounds), EvalError> {
    check_x(a)?;
    let terms = spec.derivative_terms(Derivative::Second);
    if terms.is_empty() {
        return Ok((Rational::zero() <= *bound, Bounds::exact(Rational::zero())));
    }
    let (cutoff, trend) = spec.monotonicity().second_abs_from();
    if a >= &cutoff {
        let at = match trend {
            AbsTrend::Increasing => b,
            AbsTrend::Decreasing | AbsTrend::Constant => a,
        };
        return abs_at_most(spec, Derivative::Second, at, bound, prec);
    }
    // Below the monotone range: each |c| x^s is monotone, so sum the endpoint maxima.
    let mut sup = Rational::zero();
    for t in terms {
        let single = [Term {
            coeff: t.coeff.abs(),
            exponent: t.exponent.clone(),
        }];
        let ea = enclose(&single, a, prec.start_bits.max(1));
        let eb = enclose(&single, b, prec.start_bits.max(1));
        sup += ea.hi().to_rational().max(eb.hi().to_rational());
    }
    if &sup <= bound {
        return Ok((
            true,
            Bounds {
                lo: Rational::zero(),
                hi: sup,
            },
        ));
    }
    for end in [a, b] {
        let (ok, bounds) = abs_at_most(spec, Derivative::Second, end, bound, prec)?;
        if !ok {
            return Ok((false, bounds));
        }
    }
    Err(EvalError::NotMonotone(format!(
        "cannot bound |f''| of {} on [{a}, {b}] below the monotone cutoff {cutoff}",
        spec.label()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> FunctionSpec {
        s.parse().unwrap()
    }

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn isqrt_u128(v: u128) -> u128 {
        let (mut lo, mut hi) = (0u128, 1u128 << 64);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if mid * mid <= v {
                lo = mid
            } else {
                hi = mid
            }
        }
        lo
    }

    #[test]
    fn eval_exact_power_contains_integer() {
        let s = spec("x^(3/2)");
        let p = Precision::default();
        let v = eval(&s, Derivative::Value, &n(4), 8, &p).unwrap();
        assert!(v.enclosure.contains(&r(8, 1)));
        assert!(v.enclosure.width() <= r(1, 256));
        let d = eval(&s, Derivative::First, &n(4), 8, &p).unwrap();
        assert!(d.enclosure.contains(&r(3, 1)));
        assert!(d.enclosure.width() <= r(1, 256));
    }

    #[test]
    fn eval_sqrt_1000_window() {
        // 3162^2 <= 10^7 < 3163^2, so 31.62 < 1000^(1/2) < 31.63
        assert_eq!(isqrt_u128(10_000_000), 3162);
        let v = eval(&spec("x^(3/2)"), Derivative::Value, &n(10), 30, &Precision::default()).unwrap();
        assert_eq!(v.enclosure.lo().cmp_rational(&r(3162, 100)), Ordering::Greater);
        assert_eq!(v.enclosure.hi().cmp_rational(&r(3163, 100)), Ordering::Less);
        assert!(v.enclosure.width() <= r(1, 1 << 30));
    }

    #[test]
    fn eval_rejects_precision_over_cap() {
        let err = eval(
            &spec("x^(3/2)"),
            Derivative::Value,
            &n(3),
            200,
            &Precision::with_cap(128),
        )
        .unwrap_err();
        assert!(matches!(err, EvalError::PrecisionCapExceeded { cap_bits: 128, .. }));
        assert!(eval(&spec("x"), Derivative::Value, &n(0), 8, &Precision::default()).is_err());
    }

    #[test]
    fn floor_examples() {
        let p = Precision::default();
        assert_eq!(
            floor_exact(&spec("x^(3/2)"), Derivative::Value, &n(10), &p).unwrap(),
            31.into()
        );
        assert_eq!(
            floor_exact(&spec("x^(3/2)"), Derivative::Value, &n(4), &p).unwrap(),
            8.into()
        );
        assert_eq!(
            floor_exact(&spec("2*x"), Derivative::Value, &n(7), &p).unwrap(),
            14.into()
        );
        assert_eq!(
            floor_exact(&spec("x^(3/2)"), Derivative::Second, &n(4), &p).unwrap(),
            0.into()
        );
    }

    #[test]
    fn floor_of_cancelling_terms_hits_cap() {
        // 2^(3/2) - 2 * 2^(1/2) == 0 exactly, but each term is irrational
        let err = floor_exact(
            &spec("x^(3/2) - 2*x^(1/2)"),
            Derivative::Value,
            &n(2),
            &Precision::with_cap(1024),
        )
        .unwrap_err();
        assert!(matches!(err, EvalError::PrecisionCapExceeded { cap_bits: 1024, .. }));
    }

    #[test]
    fn floor_just_below_integer_needs_more_bits() {
        // sqrt(10^40 - 1) = 10^20 - 5e-21 - ..., about 2^-67 below an integer
        let s = spec("x^(1/2)");
        let x: BigUint = BigUint::from(10u32).pow(40) - 1u32;
        let floor = floor_exact(&s, Derivative::Value, &x, &Precision::default()).unwrap();
        assert_eq!(floor, BigInt::from(10u32).pow(20) - 1);
        let err = floor_exact(&s, Derivative::Value, &x, &Precision::with_cap(64)).unwrap_err();
        assert!(matches!(err, EvalError::PrecisionCapExceeded { cap_bits: 64, .. }));
    }

    #[test]
    fn window_examples() {
        let s = spec("x^(3/2)");
        let p = Precision::default();
        let w = FracWindow::closed_open(r(0, 1), r(1, 2)).unwrap();
        assert!(frac_in_window(&s, Derivative::First, &n(4), &w, &p).unwrap().inside());
        // (3/2) sqrt 2 = 2.1213...
        let w = FracWindow::open(r(12, 100), r(13, 100)).unwrap();
        let dec = frac_in_window(&s, Derivative::First, &n(2), &w, &p).unwrap();
        assert!(dec.inside());
        assert_eq!(dec.floor, 2.into());
        let w = FracWindow::open(r(2, 10), r(3, 10)).unwrap();
        assert!(!frac_in_window(&s, Derivative::First, &n(2), &w, &p).unwrap().inside());
    }

    #[test]
    fn window_boundaries_on_exact_path() {
        let s = spec("2*x + 1/3");
        let p = Precision::default();
        let closed = FracWindow::closed(r(1, 3), r(1, 2)).unwrap();
        let open = FracWindow::open(r(1, 3), r(1, 2)).unwrap();
        assert!(frac_in_window(&s, Derivative::Value, &n(5), &closed, &p)
            .unwrap()
            .inside());
        assert!(!frac_in_window(&s, Derivative::Value, &n(5), &open, &p)
            .unwrap()
            .inside());
        assert!(FracWindow::open(r(1, 2), r(1, 3)).is_err());
        assert!(FracWindow::open(r(0, 1), r(3, 2)).is_err());
    }

    #[test]
    fn invert_examples() {
        let s = spec("x^(3/2)");
        let p = Precision::default();
        let one = n(1);
        assert_eq!(invert_derivative(&s, &r(3, 1), &one, &p).unwrap(), n(4));
        assert_eq!(invert_derivative(&s, &r(6, 1), &one, &p).unwrap(), n(16));
        // minimal m with 9m >= 40000
        let oracle = (1u64..).find(|m| 9 * m >= 40_000).unwrap();
        assert_eq!(oracle, 4445);
        assert_eq!(invert_derivative(&s, &r(100, 1), &one, &p).unwrap(), n(oracle));
    }

    #[test]
    fn invert_requires_increasing_derivative() {
        let err = invert_derivative(&spec("2*x"), &r(3, 1), &n(1), &Precision::default());
        assert!(matches!(err, Err(EvalError::NotMonotone(_))));
    }

    #[test]
    fn threshold_examples() {
        let s = spec("x^(3/2)");
        let p = Precision::default();
        assert_eq!(second_derivative_threshold(&s, &r(3, 4), &p).unwrap(), n(1));
        assert_eq!(second_derivative_threshold(&s, &r(3, 8), &p).unwrap(), n(4));
        let bound = Rational::new(1.into(), BigInt::from(400u32).pow(3));
        // (3/4) x^{-1/2} <= 400^{-3}  <=>  x >= (9/16) 400^6
        let oracle = (BigUint::from(400u32).pow(6) * 9u32) / 16u32;
        assert_eq!(oracle, BigUint::from(2304u32) * BigUint::from(10u32).pow(12));
        assert_eq!(second_derivative_threshold(&s, &bound, &p).unwrap(), oracle);
    }

    #[test]
    fn threshold_rejects_growing_second_derivative() {
        let err = second_derivative_threshold(&spec("x^3"), &r(1, 2), &Precision::default());
        assert!(matches!(err, Err(EvalError::NotMonotone(_))));
        assert_eq!(
            second_derivative_threshold(&spec("2*x"), &r(1, 2), &Precision::default()).unwrap(),
            n(1)
        );
    }

    #[test]
    fn second_derivative_interval_bound() {
        let s = spec("x^(3/2)");
        let p = Precision::default();
        // sup on [4, 6] is f''(4) = 3/8
        let (ok, b) = second_derivative_bound(&s, &n(4), &n(6), &r(3, 8), &p).unwrap();
        assert!(ok);
        assert_eq!(b.hi, r(3, 8));
        let (ok, _) = second_derivative_bound(&s, &n(4), &n(6), &r(1, 3), &p).unwrap();
        assert!(!ok);
        let (ok, _) = second_derivative_bound(&spec("x^3"), &n(1), &n(3), &r(17, 1), &p).unwrap();
        assert!(!ok);
        let (ok, _) = second_derivative_bound(&spec("x^3"), &n(1), &n(3), &r(18, 1), &p).unwrap();
        assert!(ok);
    }

    #[test]
    fn bounds_abs() {
        let b = Bounds {
            lo: r(-3, 1),
            hi: r(1, 1),
        }
        .abs();
        assert_eq!(
            b,
            Bounds {
                lo: r(0, 1),
                hi: r(3, 1)
            }
        );
        let b = Bounds {
            lo: r(-3, 1),
            hi: r(-1, 1),
        }
        .abs();
        assert_eq!(
            b,
            Bounds {
                lo: r(1, 1),
                hi: r(3, 1)
            }
        );
    }
}
