//! Exact integer number theory: coprimality certificates, primorials, primality,
//! the half-fraction parity criterion and the maximum coprime subset oracle.

mod coprime;
mod oracle;
mod parity;
mod primes;

pub use coprime::{coprime_to_all, pairwise_coprime, PairwiseResult};
pub use oracle::{max_coprime_subset, CoprimeSubset, MAX_ORACLE_LEN};
pub use parity::{floor_is_even, HalfFraction, Parity, SpecPoint};
pub use primes::{is_prime, next_prime, primes_up_to, primorial, Primality, Primorial};

use thiserror::Error;

use crate::funclib::EvalError;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum NtError {
    #[error("primorial needs H >= 2, got {0}")]
    PrimorialTooSmall(u64),
    #[error("interval of length {0} exceeds the exact search budget of {MAX_ORACLE_LEN}")]
    IntervalTooLong(usize),
    #[error("parity criteria disagree: half-fraction test contradicts the resolved floor")]
    ParityMismatch,
    #[error(transparent)]
    Eval(#[from] EvalError),
}
