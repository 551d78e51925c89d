//! Symbolic description of `f` as a finite sum of rational power terms.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{EvalError, Rational};

/// One term `coeff * x^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    pub exponent: Rational,
}

impl Term {
    fn derivative(&self) -> Option<Term> {
        let coeff = &self.coeff * &self.exponent;
        if coeff.is_zero() {
            return None;
        }
        Some(Term {
            coeff,
            exponent: &self.exponent - Rational::one(),
        })
    }
}

/// Which derivative of `f` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Derivative {
    Value,
    First,
    Second,
}

impl Derivative {
    pub fn order(self) -> usize {
        match self {
            Derivative::Value => 0,
            Derivative::First => 1,
            Derivative::Second => 2,
        }
    }

    pub fn from_order(order: usize) -> Option<Self> {
        match order {
            0 => Some(Derivative::Value),
            1 => Some(Derivative::First),
            2 => Some(Derivative::Second),
            _ => None,
        }
    }
}

/// Sign of a function on `[cutoff, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Eventual sign of one derivative: the sign holds for every real `x >= cutoff`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventualSign {
    pub sign: Sign,
    pub cutoff: BigUint,
}

/// How `|f''|` behaves past [`Monotonicity::second_abs_from`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsTrend {
    Decreasing,
    Increasing,
    Constant,
}

/// Certified monotonicity facts derived term by term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monotonicity {
    /// Eventual signs of f', f'', f'''.
    pub signs: [EventualSign; 3],
}

impl Monotonicity {
    fn derive(terms: &[Vec<Term>; 4]) -> Self {
        Monotonicity {
            signs: [
                eventual_sign(&terms[1]),
                eventual_sign(&terms[2]),
                eventual_sign(&terms[3]),
            ],
        }
    }

    /// First integer from which f' is certified strictly increasing, if any.
    pub fn first_increasing_from(&self) -> Option<&BigUint> {
        (self.signs[1].sign == Sign::Positive).then_some(&self.signs[1].cutoff)
    }

    /// Point past which both f'' and f''' keep a fixed sign, with the resulting trend of |f''|.
    pub fn second_abs_from(&self) -> (BigUint, AbsTrend) {
        let (s2, s3) = (&self.signs[1], &self.signs[2]);
        if s2.sign == Sign::Zero {
            return (BigUint::one(), AbsTrend::Constant);
        }
        let cutoff = s2.cutoff.clone().max(s3.cutoff.clone());
        let trend = match (s2.sign, s3.sign) {
            (_, Sign::Zero) => AbsTrend::Constant,
            (a, b) if a == b => AbsTrend::Increasing,
            _ => AbsTrend::Decreasing,
        };
        (cutoff, trend)
    }
}

/// Sign of `sum d_i x^{s_i}` for large x, with an explicit cutoff.
///
/// Past the cutoff the leading term dominates the sum of the absolute values of the
/// rest: for `x >= 1`, `|sum_{i>0} d_i x^{s_i}| <= x^{s_1} * sum |d_i|`.
fn eventual_sign(terms: &[Term]) -> EventualSign {
    let Some(lead) = terms.first() else {
        return EventualSign {
            sign: Sign::Zero,
            cutoff: BigUint::one(),
        };
    };
    let sign = if lead.coeff.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    };
    let Some(second) = terms.get(1) else {
        return EventualSign {
            sign,
            cutoff: BigUint::one(),
        };
    };
    let tail: Rational = terms[1..].iter().map(|t| t.coeff.abs()).sum();
    let ratio = tail / lead.coeff.abs();
    // smallest integer X with X^(u/v) > ratio, i.e. X^u > ratio^v
    let gap = &lead.exponent - &second.exponent;
    let u = gap.numer().to_u32().expect("exponent gap numerator fits u32");
    let v = gap.denom().to_u32().expect("exponent gap denominator fits u32");
    let pow = num_traits::pow(ratio, v as usize);
    let floor = pow.to_integer().to_biguint().unwrap_or_default();
    let cutoff = floor.nth_root(u) + 1u32;
    EventualSign { sign, cutoff }
}

/// A regular function given as `sum c_i x^{e_i}` with rational `c_i` and `e_i >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSpec {
    terms: Vec<Term>,
    label: String,
    /// Term lists of f, f', f'', f'''.
    derived: [Vec<Term>; 4],
    admissible: bool,
    integer_only: bool,
    monotonicity: Monotonicity,
}

impl FunctionSpec {
    /// Builds a spec from `(coeff, exponent)` pairs. Like exponents are merged and zero
    /// terms dropped; the result is sorted by decreasing exponent.
    pub fn new(terms: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self, EvalError> {
        let mut merged: Vec<Term> = Vec::new();
        for (coeff, exponent) in terms {
            if exponent.is_negative() {
                return Err(EvalError::InvalidSpec(format!("negative exponent {exponent}")));
            }
            match merged.iter_mut().find(|t| t.exponent == exponent) {
                Some(t) => t.coeff += coeff,
                None => merged.push(Term { coeff, exponent }),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        if merged.is_empty() {
            return Err(EvalError::InvalidSpec("function has no nonzero terms".into()));
        }
        merged.sort_by(|a, b| b.exponent.cmp(&a.exponent));

        let d1: Vec<Term> = merged.iter().filter_map(Term::derivative).collect();
        let d2: Vec<Term> = d1.iter().filter_map(Term::derivative).collect();
        let d3: Vec<Term> = d2.iter().filter_map(Term::derivative).collect();
        let derived = [merged.clone(), d1, d2, d3];

        let lead = &merged[0];
        let one = Rational::one();
        let two = Rational::from_integer(BigInt::from(2));
        let admissible = lead.coeff.is_positive() && lead.exponent > one && lead.exponent < two;
        let integer_only = merged.iter().all(|t| t.exponent.is_integer());
        let monotonicity = Monotonicity::derive(&derived);
        let label = render(&merged);
        Ok(FunctionSpec {
            terms: merged,
            label,
            derived,
            admissible,
            integer_only,
            monotonicity,
        })
    }

    /// `c * x^(p/q)`.
    pub fn power(coeff: Rational, p: i64, q: i64) -> Result<Self, EvalError> {
        Self::new([(coeff, Rational::new(p.into(), q.into()))])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Leading term has positive coefficient and exponent in (1, 2), so f'' -> 0 and f' -> ∞.
    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    /// Every exponent is an integer; values are then exact rationals.
    pub fn is_integer_only(&self) -> bool {
        self.integer_only
    }

    pub fn monotonicity(&self) -> &Monotonicity {
        &self.monotonicity
    }

    /// Term list of the given derivative (empty when identically zero).
    pub fn derivative_terms(&self, d: Derivative) -> &[Term] {
        &self.derived[d.order()]
    }

    /// True when every exponent of f'' is negative, so f''(x) -> 0.
    pub fn second_derivative_vanishes(&self) -> bool {
        self.derived[2].iter().all(|t| t.exponent.is_negative())
    }

    /// `factor * f`.
    pub fn scaled(&self, factor: &Rational) -> Result<Self, EvalError> {
        Self::new(self.terms.iter().map(|t| (&t.coeff * factor, t.exponent.clone())))
    }

    /// Exact value of the given derivative at `x`, when it is rational: always for
    /// integer exponents, and for `x^(p/q)` whenever `x` is a perfect `q`-th power.
    pub fn exact_value(&self, d: Derivative, x: &BigUint) -> Option<Rational> {
        let mut acc = Rational::zero();
        for t in self.derivative_terms(d) {
            let q = t.exponent.denom().to_u32()?;
            let base = if q == 1 {
                x.clone()
            } else {
                let r = x.nth_root(q);
                if r.pow(q) != *x {
                    return None;
                }
                r
            };
            let p = t.exponent.numer().to_i64()?;
            let pow = BigInt::from(base.pow(p.unsigned_abs() as u32));
            let value = if p >= 0 {
                Rational::from_integer(pow)
            } else {
                Rational::new(BigInt::one(), pow)
            };
            acc += &t.coeff * value;
        }
        Some(acc)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn render(terms: &[Term]) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let neg = t.coeff.is_negative();
        let mag = t.coeff.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let power = if t.exponent.is_zero() {
            None
        } else if t.exponent.is_one() {
            Some("x".to_string())
        } else if t.exponent.is_integer() {
            Some(format!("x^{}", t.exponent))
        } else {
            Some(format!("x^({})", t.exponent))
        };
        match power {
            None => out.push_str(&mag.to_string()),
            Some(p) if mag.is_one() => out.push_str(&p),
            Some(p) => out.push_str(&format!("{mag}*{p}")),
        }
    }
    out
}

impl FromStr for FunctionSpec {
    type Err = EvalError;

    /// Parses `c1*x^(p1/q1) + c2*x^(p2/q2) + ...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s).parse()
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn err(&self, what: &str) -> EvalError {
        EvalError::InvalidSpec(format!("{what} at position {} in {:?}", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<FunctionSpec, EvalError> {
        if self.chars.is_empty() {
            return Err(self.err("empty function"));
        }
        let mut terms = Vec::new();
        let mut first = true;
        while self.peek().is_some() {
            let negative = self.eat('-');
            if !negative && !self.eat('+') && !first {
                return Err(self.err("expected '+' or '-'"));
            }
            first = false;
            let (mut coeff, exponent) = self.term()?;
            if negative {
                coeff = -coeff;
            }
            terms.push((coeff, exponent));
        }
        FunctionSpec::new(terms)
    }

    fn term(&mut self) -> Result<(Rational, Rational), EvalError> {
        if self.peek() == Some('x') {
            return Ok((Rational::one(), self.power()?));
        }
        let coeff = self.coefficient()?;
        if self.eat('*') || self.peek() == Some('x') {
            Ok((coeff, self.power()?))
        } else {
            Ok((coeff, Rational::zero()))
        }
    }

    fn coefficient(&mut self) -> Result<Rational, EvalError> {
        if self.eat('(') {
            let negative = self.eat('-');
            let r = self.rational()?;
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(if negative { -r } else { r });
        }
        self.rational()
    }

    fn power(&mut self) -> Result<Rational, EvalError> {
        if !self.eat('x') {
            return Err(self.err("expected 'x'"));
        }
        if !self.eat('^') {
            return Ok(Rational::one());
        }
        if self.eat('(') {
            if self.peek() == Some('-') {
                return Err(self.err("negative exponents are not supported"));
            }
            let r = self.rational()?;
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            Ok(r)
        } else {
            Ok(Rational::from_integer(self.integer()?))
        }
    }

    fn rational(&mut self) -> Result<Rational, EvalError> {
        let num = self.integer()?;
        if self.eat('/') {
            let den = self.integer()?;
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    fn integer(&mut self) -> Result<BigInt, EvalError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits parse"))
    }
}

/// `ceil(r)` for a rational.
pub(crate) fn ceil_rational(r: &Rational) -> BigInt {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    if rem.is_zero() {
        q
    } else {
        q + 1
    }
}
