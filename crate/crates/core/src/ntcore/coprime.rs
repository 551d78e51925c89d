use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Outcome of a pairwise coprimality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PairwiseResult {
    AllCoprime,
    /// The lexicographically first pair `(i, j)`, `i < j`, with `gcd > 1`.
    Failure {
        i: usize,
        j: usize,
        #[serde(with = "crate::json::decimal")]
        gcd: BigUint,
    },
}

impl PairwiseResult {
    pub fn is_coprime(&self) -> bool {
        matches!(self, PairwiseResult::AllCoprime)
    }
}

/// Checks that every pair of `values` has gcd 1.
///
/// Each value is tested once against the product of everything after it, so the
/// all-coprime case costs one gcd per element; a hit is then narrowed to its partner.
pub fn pairwise_coprime(values: &[BigInt]) -> PairwiseResult {
    let mags: Vec<BigUint> = values.iter().map(|v| v.magnitude().clone()).collect();
    let mut suffix = vec![BigUint::one(); mags.len() + 1];
    for i in (0..mags.len()).rev() {
        suffix[i] = &suffix[i + 1] * &mags[i];
    }
    for i in 0..mags.len() {
        if mags[i].gcd(&suffix[i + 1]).is_one() {
            continue;
        }
        for j in i + 1..mags.len() {
            let g = mags[i].gcd(&mags[j]);
            if !g.is_one() {
                return PairwiseResult::Failure { i, j, gcd: g };
            }
        }
    }
    PairwiseResult::AllCoprime
}

/// Whether `value` is coprime to every element of `others`.
pub fn coprime_to_all(value: &BigInt, others: &[BigInt]) -> bool {
    others.iter().all(|o| value.gcd(o).is_one())
}
