use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::NtError;

/// Product of all primes `<= h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Primorial {
    pub h: u64,
    #[serde(with = "crate::json::decimal")]
    pub value: BigUint,
}

/// Primes `<= limit`, by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = usize::try_from(limit).expect("sieve limit fits usize");
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub fn primorial(h: u64) -> Result<Primorial, NtError> {
    if h < 2 {
        return Err(NtError::PrimorialTooSmall(h));
    }
    let value = primes_up_to(h).into_iter().fold(BigUint::one(), |acc, p| acc * p);
    Ok(Primorial { h, value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primality {
    Prime,
    /// Passed the strong test with the fixed witness set; not proved above 2^64.
    ProbablePrime,
    Composite,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        self != Primality::Composite
    }
}

// Deterministic for n < 3.3 * 10^24, in particular for all n < 2^64.
const WITNESSES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Miller-Rabin with a fixed witness set: exact below 2^64, probable above.
pub fn is_prime(n: &BigUint) -> Primality {
    if n < &BigUint::from(2u32) {
        return Primality::Composite;
    }
    for &p in &WITNESSES {
        if *n == BigUint::from(p) {
            return Primality::Prime;
        }
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    for &w in &WITNESSES {
        if !strong_probable_prime(n, &BigUint::from(w)) {
            return Primality::Composite;
        }
    }
    if n.to_u64().is_some() {
        Primality::Prime
    } else {
        Primality::ProbablePrime
    }
}

/// Smallest prime (or probable prime) `>= from`.
pub fn next_prime(from: &BigUint) -> (BigUint, Primality) {
    let mut c = from.clone().max(BigUint::from(2u32));
    if c > BigUint::from(2u32) && c.is_even() {
        c += 1u32;
    }
    loop {
        let p = is_prime(&c);
        if p.is_prime() {
            return (c, p);
        }
        c += if c == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
}
