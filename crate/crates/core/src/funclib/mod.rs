//! Regular functions `f(x) = sum c_i x^{e_i}` with certified evaluation of f, f', f''.
//!
//! Every real quantity is handled through a dyadic enclosure. Powers `x^(p/q)` are
//! enclosed with exact integer `q`-th roots, so an enclosure collapses to a point
//! whenever the power is itself a dyadic rational. Floors and fractional-part
//! decisions refine precision adaptively and fail loudly at the configured cap.

mod dyadic;
mod eval;
mod spec;

pub use dyadic::{Dyadic, DyadicInterval};
pub use eval::{
    abs_at_most, compare, eval, first_at_least, floor_exact, frac_in_window, invert_derivative, resolve,
    second_derivative_bound, second_derivative_threshold, Bounds, CertifiedValue, Decision, FracWindow, Membership,
    Resolved, WindowDecision,
};
pub use spec::{AbsTrend, Derivative, EventualSign, FunctionSpec, Monotonicity, Sign, Term};

pub(crate) use spec::ceil_rational;

use thiserror::Error;

/// Reduced rational with positive denominator.
pub type Rational = num_rational::BigRational;

/// Largest precision any operation may use.
pub const MAX_PRECISION_BITS: u32 = 1 << 15;

/// Adaptive precision policy: start at `start_bits` fractional bits, double on
/// failure, give up past `cap_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: 64,
            cap_bits: MAX_PRECISION_BITS,
        }
    }
}

impl Precision {
    pub fn with_cap(cap_bits: u32) -> Self {
        Precision {
            start_bits: 64.min(cap_bits),
            cap_bits,
        }
    }

    /// The sequence of precisions tried: start, 2*start, ..., capped.
    pub(crate) fn schedule(&self) -> impl Iterator<Item = u32> {
        let cap = self.cap_bits.max(1);
        let mut next = Some(self.start_bits.clamp(1, cap));
        std::iter::from_fn(move || {
            let cur = next?;
            next = (cur < cap).then(|| cur.saturating_mul(2).min(cap));
            Some(cur)
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("precision cap of {cap_bits} bits exceeded while {context}")]
    PrecisionCapExceeded { cap_bits: u32, context: String },
    #[error("monotonicity cannot be certified: {0}")]
    NotMonotone(String),
    #[error("invalid function: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
