use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regseq_core::funclib::{FunctionSpec, Precision};
use regseq_core::ntcore::primes_up_to;
use regseq_core::seeker::{seek_witness, SeekConfig};
use regseq_core::verifier::{block_offsets, check_conditions, predict_from_floors, verify_block};

fn iroot(v: &BigUint, q: u32) -> BigUint {
    let mut lo = BigUint::zero();
    let mut hi = BigUint::one() << (v.bits() / q as u64 + 1);
    while &lo + 1u32 < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        if mid.pow(q) <= *v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn spec() -> FunctionSpec {
    "x^(3/2)".parse().unwrap()
}

/// Every passing `(n, H)` must give a coprime block equal to its prediction, free of primes `<= H`.
fn assert_sound(f: &FunctionSpec, n: &BigUint, h: u64, prec: &Precision) -> bool {
    let report = check_conditions(f, n, h, prec).unwrap();
    if !report.passed() {
        return false;
    }
    let block = verify_block(f, n, h, prec).unwrap();
    assert!(block.is_coprime(), "n = {n}, H = {h}: {:?}", block.coprimality);
    assert_eq!(
        block.floors,
        predict_from_floors(&report.floor_f, &report.floor_f1, h),
        "n = {n}"
    );
    for p in primes_up_to(h) {
        assert!(
            block.floors.iter().all(|v| !v.is_multiple_of(&BigInt::from(p))),
            "{p} divides a floor at n = {n}"
        );
    }
    true
}

#[test]
fn passing_points_near_witnesses_are_sound() {
    let f = spec();
    let prec = Precision::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for l in 1..=3 {
        let w = seek_witness(&f, l, &SeekConfig::default(), &mut ()).unwrap();
        assert!(assert_sound(&f, &w.n, w.h, &prec));
        let mut passing = 0;
        for _ in 0..300 {
            let step: i64 = match rng.gen_range(0..3) {
                0 => rng.gen_range(-50..=50),
                1 => rng.gen_range(-100_000..=100_000),
                _ => rng.gen_range(-(1i64 << 40)..=(1i64 << 40)),
            };
            let n = (BigInt::from(w.n.clone()) + step).to_biguint().unwrap();
            for h in [w.h, w.h + 1, w.h.saturating_sub(1).max(2)] {
                passing += assert_sound(&f, &n, h, &prec) as u32;
            }
        }
        assert!(passing > 1, "L = {l}: only {passing} perturbed points pass");
    }
}

#[test]
fn prediction_is_arithmetic_progression() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let a = BigInt::from(rng.gen_range(-10i64.pow(12)..10i64.pow(12)));
        let d = BigInt::from(rng.gen_range(-10i64.pow(6)..10i64.pow(6)));
        let h = rng.gen_range(2..40);
        let block = predict_from_floors(&a, &d, h);
        assert_eq!(block.len(), block_offsets(h).len());
        assert_eq!(block[0], &a + &d * BigInt::from(h.div_ceil(2)));
        assert!(block.windows(2).all(|w| &w[1] - &w[0] == d));
    }
}

#[test]
fn h2_blocks_match_naive_evaluator() {
    let f = spec();
    let prec = Precision::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let n: u64 = rng.gen_range(1..=10u64.pow(12));
        let cert = verify_block(&f, &BigUint::from(n), 2, &prec).unwrap();
        let naive: Vec<BigUint> = [1u64, 2]
            .iter()
            .map(|h| iroot(&BigUint::from(n + h).pow(3), 2))
            .collect();
        let expect: Vec<BigInt> = naive.iter().cloned().map(BigInt::from).collect();
        assert_eq!(cert.floors, expect, "n = {n}");
        assert_eq!(cert.is_coprime(), naive[0].gcd(&naive[1]).is_one(), "n = {n}");
        assert_eq!(
            cert.indices().map(|i| i.to_u64().unwrap()).collect::<Vec<_>>(),
            [n + 1, n + 2]
        );
    }
}
