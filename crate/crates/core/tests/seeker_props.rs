use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;
use regseq_core::funclib::{floor_exact, Derivative, FunctionSpec, Precision, Rational};
use regseq_core::ntcore::{floor_is_even, pairwise_coprime, Parity, SpecPoint};
use regseq_core::scanner::density_profile;
use regseq_core::seeker::{
    build_density_set, recheck_witness, seek_even_block, seek_witness, DensityMode, ProofWitness, SeekConfig,
};
use regseq_core::verifier::{verify, BlockCertificate};

fn spec() -> FunctionSpec {
    "x^(3/2)".parse().unwrap()
}

fn floor_at(f: &FunctionSpec, d: Derivative, x: &BigUint) -> BigInt {
    floor_exact(f, d, x, &Precision::default()).unwrap()
}

fn witnesses() -> Vec<ProofWitness> {
    (1..=3)
        .map(|l| seek_witness(&spec(), l, &SeekConfig::default(), &mut ()).unwrap())
        .collect()
}

#[test]
fn witnesses_reverify_from_scratch() {
    let f = spec();
    let prec = Precision::default();
    for w in witnesses() {
        let v = verify(&f, &w.n, w.h, &prec).unwrap();
        assert!(v.report.passed(), "{:?}", v.report.failing());
        assert_eq!(v.report, w.report);
        assert!(v.certificate.is_coprime());
        assert_eq!(v.certificate, w.certificate);
        assert_eq!(w.h, 2 * w.l_requested);
        assert!(w.certificate.floors.len() as u64 > w.l_requested);
    }
}

#[test]
fn witness_internals_are_consistent() {
    let f = spec();
    for w in witnesses() {
        let q_pi = BigInt::from(&w.q * &w.primorial.value);
        assert_eq!(floor_at(&f, Derivative::First, &w.m), q_pi);
        assert_eq!(floor_at(&f, Derivative::First, &w.n0), q_pi);
        assert!(w.m > w.x0);
        assert!(floor_at(&f, Derivative::First, &(&w.m - 1u32)) < q_pi);
        assert!(w.q > BigUint::from(w.h));
        assert_eq!(w.n, &w.n0 + &w.k0);
        assert!(w.b.mod_floor(&BigInt::from(w.primorial.value.clone())).is_one());
        assert!(!w.b.is_multiple_of(&BigInt::from(w.q.clone())));
    }
}

#[test]
fn witness_blocks_follow_the_linear_identity() {
    let f = spec();
    for w in witnesses() {
        let base = floor_at(&f, Derivative::Value, &w.n);
        let slope = floor_at(&f, Derivative::First, &w.n);
        for (&h, fl) in w.certificate.offsets.iter().zip(&w.certificate.floors) {
            assert_eq!(*fl, &base + &slope * BigInt::from(h));
            assert_eq!(*fl, floor_at(&f, Derivative::Value, &(&w.n + h)));
        }
    }
}

#[test]
fn witness_json_roundtrip_rechecks() {
    let f = spec();
    for w in witnesses() {
        let text = serde_json::to_string(&w).unwrap();
        let back: ProofWitness = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
        recheck_witness(&f, &back, &Precision::default()).unwrap();
        let mut forged = back.clone();
        forged.n += 1u32;
        assert!(recheck_witness(&f, &forged, &Precision::default()).is_err());
    }
}

#[test]
fn even_runs_pass_both_parity_tests() {
    let f = spec();
    let half = f.scaled(&Rational::new(1.into(), 2.into())).unwrap();
    let prec = Precision::default();
    for h in 1..=6 {
        let b = seek_even_block(&f, h, &SeekConfig::default(), &mut ()).unwrap();
        assert!(b.run.len() as u64 >= h);
        assert_eq!(b.run.len(), b.floors.len());
        for (x, fl) in b.run.iter().zip(&b.floors) {
            let direct = num_integer::Roots::sqrt(&x.pow(3));
            assert_eq!(BigInt::from(direct), *fl);
            assert!(fl.is_even());
            let pt = SpecPoint::new(&f, Derivative::Value, x, &prec).with_half(&half);
            assert_eq!(floor_is_even(&pt).unwrap(), Parity::Even);
        }
        assert!(b.run.windows(2).all(|w| &w[0] + 1u32 == w[1]));
    }
}

#[test]
fn density_windows_are_fully_selected() {
    let f = spec();
    let plan = build_density_set(&f, &[2, 3, 4, 6], DensityMode::Relaxed, &SeekConfig::default(), &mut ()).unwrap();
    let indices = plan.indices();
    for seg in &plan.segments {
        let lo = &seg.n + seg.h.div_ceil(2);
        let hi = &seg.n + seg.h;
        let mut x = lo.clone();
        while x <= hi {
            assert!(indices.contains(&x), "{x} missing from segment at {}", seg.n);
            x += 1u32;
        }
        let direct = BlockCertificate::compute(&f, &seg.n, seg.offsets.clone(), &Precision::default()).unwrap();
        assert_eq!(direct.floors, seg.floors);
    }
    assert!(pairwise_coprime(&plan.all_floors).is_coprime());
    assert_eq!(density_profile(&plan.indices(), 2), Rational::one());
}
