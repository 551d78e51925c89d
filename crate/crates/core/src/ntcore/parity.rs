//! Parity of `floor(x)` read off the fractional part of `x/2`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::NtError;
use crate::funclib::{self, Derivative, EvalError, FracWindow, FunctionSpec, Precision, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// A real number whose floor and whose `{x/2}` can both be decided exactly.
pub trait HalfFraction {
    fn floor(&self) -> Result<BigInt, EvalError>;

    /// Whether `{x/2}` lies in `[0, 1/2)`.
    fn half_frac_in_lower_half(&self) -> Result<bool, EvalError>;
}

fn lower_half() -> FracWindow {
    FracWindow::closed_open(Rational::from_integer(0.into()), Rational::new(1.into(), 2.into()))
        .expect("[0, 1/2) is a valid window")
}

impl HalfFraction for Rational {
    fn floor(&self) -> Result<BigInt, EvalError> {
        Ok(Rational::floor(self).to_integer())
    }

    fn half_frac_in_lower_half(&self) -> Result<bool, EvalError> {
        let half = self / Rational::from_integer(2.into());
        let frac = &half - half.floor();
        Ok(lower_half().contains(&frac))
    }
}

/// `f^(d)(x)` for a function spec, decided with certified enclosures.
pub struct SpecPoint<'a> {
    spec: &'a FunctionSpec,
    half: Option<&'a FunctionSpec>,
    derivative: Derivative,
    x: &'a BigUint,
    precision: &'a Precision,
}

impl<'a> SpecPoint<'a> {
    pub fn new(spec: &'a FunctionSpec, derivative: Derivative, x: &'a BigUint, precision: &'a Precision) -> Self {
        SpecPoint {
            spec,
            half: None,
            derivative,
            x,
            precision,
        }
    }

    /// Reuses a precomputed `f/2` instead of building it on every query.
    pub fn with_half(mut self, half: &'a FunctionSpec) -> Self {
        self.half = Some(half);
        self
    }
}

impl HalfFraction for SpecPoint<'_> {
    fn floor(&self) -> Result<BigInt, EvalError> {
        funclib::floor_exact(self.spec, self.derivative, self.x, self.precision)
    }

    fn half_frac_in_lower_half(&self) -> Result<bool, EvalError> {
        let owned;
        let half = match self.half {
            Some(h) => h,
            None => {
                owned = self.spec.scaled(&Rational::new(BigInt::one(), 2.into()))?;
                &owned
            }
        };
        let dec = funclib::frac_in_window(half, self.derivative, self.x, &lower_half(), self.precision)?;
        Ok(dec.inside())
    }
}

/// Parity of `floor(x)` by the half-fraction criterion, cross-checked against the
/// parity of the resolved floor.
pub fn floor_is_even(x: &impl HalfFraction) -> Result<Parity, NtError> {
    let by_fraction = x.half_frac_in_lower_half()?;
    let by_floor = x.floor()?.is_even();
    if by_fraction != by_floor {
        return Err(NtError::ParityMismatch);
    }
    Ok(if by_floor { Parity::Even } else { Parity::Odd })
}
