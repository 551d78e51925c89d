use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{SeekConfig, SeekError, StageTiming, Stages, Tracer};
use crate::funclib::{self, Derivative, FracWindow, FunctionSpec, Precision, Rational};
use crate::ntcore::{next_prime, primorial, Primality, Primorial};
use crate::verifier::{self, BlockCertificate, ConditionReport};

/// Certified bounds recorded while constructing a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessMargins {
    /// Upper bound on `{f'(m)}`.
    #[serde(with = "crate::json::decimal")]
    pub frac_f1_m: Rational,
    #[serde(with = "crate::json::decimal")]
    pub frac_f1_n0_lo: Rational,
    #[serde(with = "crate::json::decimal")]
    pub frac_f1_n0_hi: Rational,
    /// Lower bound on `a_K - a_0`.
    #[serde(with = "crate::json::decimal")]
    pub gap: Rational,
    /// Upper bound on `{a_k0}`.
    #[serde(with = "crate::json::decimal")]
    pub frac_a_k0: Rational,
}

/// A fully verified coprime block together with every intermediate quantity of
/// its construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofWitness {
    pub spec: String,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "L_requested")]
    pub l_requested: u64,
    #[serde(with = "crate::json::decimal")]
    pub q: BigUint,
    pub q_probable: bool,
    pub primorial: Primorial,
    /// Bound on `|f''|` past `x0`.
    #[serde(with = "crate::json::decimal")]
    pub bound: Rational,
    #[serde(with = "crate::json::decimal")]
    pub x0: BigUint,
    #[serde(with = "crate::json::decimal")]
    pub m: BigUint,
    #[serde(with = "crate::json::decimal")]
    pub n0: BigUint,
    #[serde(rename = "K", with = "crate::json::decimal")]
    pub k: BigUint,
    #[serde(with = "crate::json::decimal")]
    pub b: BigInt,
    #[serde(with = "crate::json::decimal")]
    pub k0: BigUint,
    #[serde(with = "crate::json::decimal")]
    pub n: BigUint,
    /// Primes tried, including the successful one.
    pub attempts: u32,
    pub margins: WitnessMargins,
    pub report: ConditionReport,
    pub certificate: BlockCertificate,
    #[serde(default)]
    pub timings: Vec<StageTiming>,
}

fn unit(k: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(k))
}

fn int(v: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v.clone()))
}

fn s(v: impl std::fmt::Display) -> String {
    v.to_string()
}

/// Smallest integer `>= f(x)`.
fn ceil_value(spec: &FunctionSpec, x: &BigUint, prec: &Precision) -> Result<BigInt, SeekError> {
    let r = funclib::resolve(spec, Derivative::Value, x, prec)?;
    let k = Rational::from_integer(r.floor.clone());
    if r.bounds.lo > k {
        return Ok(r.floor + 1);
    }
    Ok(match funclib::compare(spec, Derivative::Value, x, &k, prec)?.ordering {
        Ordering::Greater => r.floor + 1,
        _ => r.floor,
    })
}

/// Lower bound on `f(x + K) - f(x) - K qP`, certified above `2P`.
fn certify_gap(
    spec: &FunctionSpec,
    n0: &BigUint,
    k: &BigUint,
    q_pi: &BigUint,
    pi: &BigUint,
    prec: &Precision,
) -> Result<Rational, SeekError> {
    let shift = int(&(k * q_pi));
    let need = int(&(pi * 2u32));
    let nk = n0 + k;
    for bits in prec.schedule() {
        let e0 = funclib::eval(spec, Derivative::Value, n0, bits, prec)?.enclosure;
        let ek = funclib::eval(spec, Derivative::Value, &nk, bits, prec)?.enclosure;
        let lo = ek.lo().to_rational() - &shift - e0.hi().to_rational();
        let hi = ek.hi().to_rational() - &shift - e0.lo().to_rational();
        if lo > need {
            return Ok(lo);
        }
        if hi <= need {
            return Err(SeekError::miss("gap", format!("a_K - a_0 <= {hi}")));
        }
    }
    Err(funclib::EvalError::PrecisionCapExceeded {
        cap_bits: prec.cap_bits,
        context: "certifying a_K - a_0 > 2P".into(),
    }
    .into())
}

/// Everything fixed before a prime is chosen.
struct Setup<'a> {
    spec: &'a FunctionSpec,
    h: u64,
    primorial: Primorial,
    bound: Rational,
    x0: BigUint,
    base: BigUint,
    prec: &'a Precision,
}

fn attempt(setup: &Setup, q: &BigUint, stages: &mut Stages) -> Result<ProofWitness, SeekError> {
    let Setup { spec, h, prec, .. } = *setup;
    let pi = &setup.primorial.value;
    let q_pi = q * pi;
    let q_pi_int = BigInt::from(q_pi.clone());
    let q_pi_r = int(&q_pi);

    let m = funclib::invert_derivative(spec, &q_pi_r, &setup.base, prec)?;
    let below = &m - 1u32;
    let floor_below = funclib::floor_exact(spec, Derivative::First, &below, prec)?;
    let window_m = FracWindow::closed_open(Rational::zero(), unit(100 * h))?;
    let at_m = funclib::frac_in_window(spec, Derivative::First, &m, &window_m, prec)?;
    if floor_below >= q_pi_int || at_m.floor != q_pi_int {
        return Err(SeekError::miss(
            "bracket",
            format!("floor f'(m-1) = {floor_below}, floor f'(m) = {} at m = {m}", at_m.floor),
        ));
    }
    if !at_m.inside() {
        return Err(SeekError::miss(
            "frac_f1_m",
            format!("{{f'(m)}} >= 1/(100H) at m = {m}"),
        ));
    }
    stages.done(
        "bracket",
        json!({"q": s(q), "m": s(&m), "floor_f1_m_minus_1": s(&floor_below), "frac_f1_m_hi": s(&at_m.frac.hi)}),
    );

    let target = &q_pi_r + unit(6 * h);
    let n0 = funclib::first_at_least(spec, Derivative::First, &target, &m, true, prec)?;
    let window_n0 = FracWindow::open(unit(6 * h), unit(5 * h))?;
    let at_n0 = funclib::frac_in_window(spec, Derivative::First, &n0, &window_n0, prec)?;
    if !at_n0.inside() || at_n0.floor != q_pi_int {
        return Err(SeekError::miss(
            "window",
            format!("f'(n0) outside qP + (1/(6H), 1/(5H)) at n0 = {n0}"),
        ));
    }
    stages.done(
        "window",
        json!({"n0": s(&n0), "frac_f1_lo": s(&at_n0.frac.lo), "frac_f1_hi": s(&at_n0.frac.hi)}),
    );

    let k = BigUint::from(15 * h) * pi;
    let a0_ceil = ceil_value(spec, &n0, prec)?;
    let pi_int = BigInt::from(pi.clone());
    let mut b = &a0_ceil + (BigInt::one() - &a0_ceil).mod_floor(&pi_int);
    if (&b % BigInt::from(q.clone())).is_zero() {
        b += &pi_int;
    }
    let end = &n0 + &k;
    let b_at_k = Rational::from_integer(&b + BigInt::from(&k * &q_pi));
    if funclib::compare(spec, Derivative::Value, &end, &b_at_k, prec)?.ordering != Ordering::Greater {
        return Err(SeekError::miss("congruence", format!("b = {b} is not below a_K")));
    }
    let gap = certify_gap(spec, &n0, &k, &q_pi, pi, prec)?;
    stages.done(
        "congruence",
        json!({"K": s(&k), "ceil_a0": s(&a0_ceil), "b": s(&b), "gap_lo": s(&gap)}),
    );

    // a_k = f(n0 + k) - k qP is increasing in k because f'(n0) > qP.
    let reaches = |j: &BigUint| -> Result<bool, SeekError> {
        let t = Rational::from_integer(&b + BigInt::from(j * &q_pi));
        Ok(funclib::compare(spec, Derivative::Value, &(&n0 + j), &t, prec)?.ordering != Ordering::Less)
    };
    let k0 = if reaches(&BigUint::zero())? {
        BigUint::zero()
    } else {
        let (mut lo, mut hi) = (BigUint::zero(), k.clone());
        while &hi - &lo > BigUint::one() {
            let mid: BigUint = (&lo + &hi) >> 1;
            if reaches(&mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let n = &n0 + &k0;
    let third = FracWindow::closed_open(Rational::zero(), unit(3))?;
    let at_n = funclib::frac_in_window(spec, Derivative::Value, &n, &third, prec)?;
    let shift = BigInt::from(&k0 * &q_pi);
    if at_n.floor != &b + &shift {
        return Err(SeekError::miss(
            "k0",
            format!("floor a_k0 = {} != b", &at_n.floor - &shift),
        ));
    }
    if !at_n.inside() {
        return Err(SeekError::miss("k0", format!("{{a_k0}} >= 1/3 at n = {n}")));
    }
    stages.done(
        "k0",
        json!({"k0": s(&k0), "n": s(&n), "frac_a_k0_hi": s(&at_n.frac.hi)}),
    );

    let v = verifier::verify(spec, &n, h, prec)?;
    if !v.report.passed() {
        return Err(SeekError::miss("conditions", v.report.failing().join(", ")));
    }
    if v.report.floor_f1 != q_pi_int {
        return Err(SeekError::miss(
            "conditions",
            format!("floor f'(n) = {} != qP", v.report.floor_f1),
        ));
    }
    stages.done(
        "verify",
        json!({"floors": v.certificate.floors.iter().map(s).collect::<Vec<_>>(), "coprime": v.certificate.is_coprime()}),
    );

    Ok(ProofWitness {
        spec: spec.label().to_string(),
        h,
        l_requested: h / 2,
        q: q.clone(),
        q_probable: false,
        primorial: setup.primorial.clone(),
        bound: setup.bound.clone(),
        x0: setup.x0.clone(),
        m,
        n0,
        k,
        b,
        k0,
        n,
        attempts: 0,
        margins: WitnessMargins {
            frac_f1_m: at_m.frac.hi,
            frac_f1_n0_lo: at_n0.frac.lo,
            frac_f1_n0_hi: at_n0.frac.hi,
            gap,
            frac_a_k0: at_n.frac.hi,
        },
        report: v.report,
        certificate: v.certificate,
        timings: Vec::new(),
    })
}

/// Witness for `L` pairwise-coprime consecutive floors, built with `H = 2L`.
pub fn seek_witness(
    spec: &FunctionSpec,
    l: u64,
    cfg: &SeekConfig,
    tracer: &mut dyn Tracer,
) -> Result<ProofWitness, SeekError> {
    if l == 0 {
        return Err(SeekError::InvalidArgument("L must be >= 1".into()));
    }
    let mut w = seek_witness_h(spec, 2 * l, None, cfg, tracer)?;
    w.l_requested = l;
    Ok(w)
}

/// Witness block `ceil(H/2) ..= H` past `min_n` (when given).
pub fn seek_witness_h(
    spec: &FunctionSpec,
    h: u64,
    min_n: Option<&BigUint>,
    cfg: &SeekConfig,
    tracer: &mut dyn Tracer,
) -> Result<ProofWitness, SeekError> {
    if !spec.is_admissible() {
        return Err(SeekError::NotAdmissible(spec.label().to_string()));
    }
    if h < 2 {
        return Err(SeekError::InvalidArgument(format!("H must be >= 2, got {h}")));
    }
    let prec = &cfg.precision;
    let mut stages = Stages::new(tracer);
    let primorial = primorial(h)?;
    let pi = primorial.value.clone();
    let scale = BigInt::from(100 * h) * BigInt::from(pi.clone());
    let bound = Rational::new(BigInt::one(), scale.pow(3));
    let x0 = funclib::second_derivative_threshold(spec, &bound, prec)?;
    let mut base: BigUint = &x0 + 1u32;
    if let Some(min) = min_n {
        base = base.max(min.clone());
    }
    stages.done(
        "threshold",
        json!({"H": h, "primorial": s(&pi), "bound": s(&bound), "x0": s(&x0)}),
    );

    let floor_f1 = funclib::floor_exact(spec, Derivative::First, &base, prec)?;
    let floor_f1 = floor_f1.to_biguint().unwrap_or_default();
    let start = (floor_f1 / &pi + 1u32).max(BigUint::from(h + 1));
    let (mut q, mut primality) = next_prime(&start);
    let mut probable = primality == Primality::ProbablePrime;
    stages.done("prime", json!({"q": s(&q), "probable": probable}));

    let setup = Setup {
        spec,
        h,
        primorial,
        bound,
        x0,
        base,
        prec,
    };
    let mut last_stage = String::new();
    for attempt_no in 0..=cfg.retries {
        stages.attempt = attempt_no;
        match attempt(&setup, &q, &mut stages) {
            Ok(mut w) => {
                w.q_probable = probable;
                w.attempts = attempt_no + 1;
                w.timings = stages.finish();
                return Ok(w);
            }
            Err(SeekError::WindowMissed { stage, detail }) => {
                stages.done("miss", json!({"stage": stage, "detail": detail, "q": s(&q)}));
                last_stage = stage;
                (q, primality) = next_prime(&(&q + 1u32));
                probable |= primality == Primality::ProbablePrime;
            }
            Err(e) => return Err(e),
        }
    }
    Err(SeekError::EscalationExhausted {
        attempts: cfg.retries + 1,
        last_stage,
    })
}

/// Re-derives every invariant of a witness from the spec alone.
pub fn recheck_witness(spec: &FunctionSpec, w: &ProofWitness, prec: &Precision) -> Result<(), SeekError> {
    let bad = |what: &str| Err(SeekError::Inconsistent(format!("{what} (n = {})", w.n)));
    let pi = primorial(w.h)?.value;
    if pi != w.primorial.value {
        return bad("primorial");
    }
    if w.k != BigUint::from(15 * w.h) * &pi {
        return bad("K != 15 H P");
    }
    let q_pi = BigInt::from(&w.q * &pi);
    let pi_int = BigInt::from(pi);
    if !w.b.mod_floor(&pi_int).is_one() || (&w.b % BigInt::from(w.q.clone())).is_zero() {
        return bad("b violates its congruences");
    }
    if w.n != &w.n0 + &w.k0 || w.n0 < w.m || w.m <= w.x0 {
        return bad("index ordering");
    }
    let (ok, _) = funclib::abs_at_most(spec, Derivative::Second, &w.x0, &w.bound, prec)?;
    if !ok {
        return bad("|f''(x0)| exceeds the bound");
    }
    for x in [&w.m, &w.n0, &w.n] {
        if funclib::floor_exact(spec, Derivative::First, x, prec)? != q_pi {
            return bad("floor f' != qP");
        }
    }
    if funclib::floor_exact(spec, Derivative::First, &(&w.m - 1u32), prec)? >= q_pi {
        return bad("floor f'(m-1) >= qP");
    }
    let v = verifier::verify(spec, &w.n, w.h, prec)?;
    if !v.report.passed() || !v.certificate.is_coprime() {
        return bad("conditions or coprimality");
    }
    if v.report != w.report || v.certificate != w.certificate {
        return bad("report or certificate differs from a fresh run");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        let cfg = SeekConfig::default();
        let x: FunctionSpec = "x".parse().unwrap();
        assert!(matches!(
            seek_witness(&x, 1, &cfg, &mut ()),
            Err(SeekError::NotAdmissible(_))
        ));
        let f: FunctionSpec = "x^(3/2)".parse().unwrap();
        assert!(matches!(
            seek_witness(&f, 0, &cfg, &mut ()),
            Err(SeekError::InvalidArgument(_))
        ));
    }

    #[test]
    fn witness_for_one_value_pair() {
        let f: FunctionSpec = "x^(3/2)".parse().unwrap();
        let mut events = Vec::new();
        let w = seek_witness(&f, 1, &SeekConfig::default(), &mut events).unwrap();
        assert_eq!(w.h, 2);
        // (3/4) x^(-1/2) <= 400^-3 first holds at ceil((9/16) 400^6)
        let x0 = (BigUint::from(9u32) * BigUint::from(400u32).pow(6)).div_ceil(&BigUint::from(16u32));
        assert_eq!(w.x0, x0);
        assert_eq!(w.k, BigUint::from(60u32));
        assert!(w.report.pass && w.certificate.is_coprime());
        assert!(w.margins.gap > Rational::from_integer(4.into()));
        assert_eq!(w.timings.len(), events.len());
        assert_eq!(events.first().unwrap().stage, "threshold");
        recheck_witness(&f, &w, &Precision::default()).unwrap();
    }

    #[test]
    fn ceil_of_exact_integer() {
        let f: FunctionSpec = "x^(3/2)".parse().unwrap();
        let p = Precision::default();
        assert_eq!(ceil_value(&f, &4u32.into(), &p).unwrap(), BigInt::from(8));
        assert_eq!(ceil_value(&f, &5u32.into(), &p).unwrap(), BigInt::from(12));
    }
}
