//! Exact maximum pairwise-coprime subset of a short interval of integers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::NtError;

pub const MAX_ORACLE_LEN: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoprimeSubset {
    pub size: usize,
    #[serde(with = "crate::json::decimal_vec")]
    pub witness: Vec<BigUint>,
}

struct Search {
    conflicts: Vec<u32>,
    best: u32,
}

impl Search {
    fn run(&mut self, candidates: u32, chosen: u32) {
        if chosen.count_ones() + candidates.count_ones() <= self.best.count_ones() {
            return;
        }
        // element with the most conflicts among the remaining candidates
        let mut pick = None;
        let mut most = 0;
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let deg = (self.conflicts[v] & candidates).count_ones();
            if pick.is_none() || deg > most {
                pick = Some(v);
                most = deg;
            }
        }
        let Some(v) = pick else {
            if chosen.count_ones() > self.best.count_ones() {
                self.best = chosen;
            }
            return;
        };
        if most == 0 {
            // remaining candidates are mutually coprime
            let all = chosen | candidates;
            if all.count_ones() > self.best.count_ones() {
                self.best = all;
            }
            return;
        }
        let bit = 1u32 << v;
        self.run(candidates & !self.conflicts[v] & !bit, chosen | bit);
        self.run(candidates & !bit, chosen);
    }
}

/// Largest pairwise-coprime subset of `{a, ..., a + len - 1}`, by branch and bound.
pub fn max_coprime_subset(a: &BigUint, len: usize) -> Result<CoprimeSubset, NtError> {
    if len > MAX_ORACLE_LEN {
        return Err(NtError::IntervalTooLong(len));
    }
    if len == 0 {
        return Ok(CoprimeSubset {
            size: 0,
            witness: Vec::new(),
        });
    }
    let values: Vec<BigUint> = (0..len).map(|i| a + i).collect();
    let mut conflicts = vec![0u32; len];
    for i in 0..len {
        for j in i + 1..len {
            // a common factor of a+i and a+j divides j - i
            if !values[i].gcd(&BigUint::from(j - i)).gcd(&values[j]).is_one() {
                conflicts[i] |= 1 << j;
                conflicts[j] |= 1 << i;
            }
        }
    }
    let all = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
    let mut search = Search { conflicts, best: 0 };
    search.run(all, 0);
    let witness: Vec<BigUint> = (0..len)
        .filter(|i| search.best & (1 << i) != 0)
        .map(|i| values[i].clone())
        .collect();
    Ok(CoprimeSubset {
        size: witness.len(),
        witness,
    })
}
