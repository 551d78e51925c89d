use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{SeekConfig, SeekError, Stages, Tracer};
use crate::funclib::{self, Derivative, FracWindow, FunctionSpec, Rational};
use crate::ntcore::{floor_is_even, Parity, SpecPoint};
use crate::scanner;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvenMethod {
    /// Located through the window for `(f/2)'`.
    Window,
    /// Found by scanning, for specs outside the admissible class.
    Scan,
}

/// A run of at least `H` consecutive indices whose floors are all even.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvenBlock {
    pub spec: String,
    #[serde(rename = "H")]
    pub h: u64,
    pub method: EvenMethod,
    /// Base index; the run lies in `n .. n + 10H`.
    #[serde(with = "crate::json::decimal")]
    pub n: BigUint,
    /// Membership of `{f(n+h)/2}` in `[0, 1/2)` for each scanned `h`.
    pub indicators: Vec<bool>,
    #[serde(with = "crate::json::decimal_vec")]
    pub run: Vec<BigUint>,
    #[serde(with = "crate::json::decimal_vec")]
    pub floors: Vec<BigInt>,
    #[serde(default)]
    pub timings: Vec<super::StageTiming>,
}

/// Longest run of `true` as `(start, len)`, earliest on ties.
fn longest_run(bits: &[bool]) -> (usize, usize) {
    let (mut best, mut cur_start, mut cur) = ((0, 0), 0, 0);
    for (i, &b) in bits.iter().enumerate() {
        if b {
            if cur == 0 {
                cur_start = i;
            }
            cur += 1;
            if cur > best.1 {
                best = (cur_start, cur);
            }
        } else {
            cur = 0;
        }
    }
    best
}

fn unit(k: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(k))
}

/// Finds `n` with `{f'(n)/2}` in `(1/(6H), 1/(5H))` past the point where
/// `|f''| <= 1/(1000 H^3)`, then returns the longest even run among `n .. n + 10H`.
pub fn seek_even_block(
    spec: &FunctionSpec,
    h: u64,
    cfg: &SeekConfig,
    tracer: &mut dyn Tracer,
) -> Result<EvenBlock, SeekError> {
    if h == 0 {
        return Err(SeekError::InvalidArgument("H must be >= 1".into()));
    }
    let prec = &cfg.precision;
    let mut stages = Stages::new(tracer);
    let half = spec.scaled(&unit(2))?;

    if !spec.is_admissible() {
        let span = (h - 1) as usize;
        let found = scanner::first_match(spec, &BigUint::one(), span, cfg.scan_budget, prec, |_, w| {
            w.iter().all(|f| f.is_even())
        })?;
        let Some((n, _)) = found else {
            return Err(SeekError::RoundFailed {
                round: 1,
                budget: cfg.scan_budget,
            });
        };
        stages.done("scan", json!({"n": n.to_string()}));
        return finish(spec, &half, h, EvenMethod::Scan, n, h, stages, cfg);
    }

    let bound = Rational::new(BigInt::one(), BigInt::from(1000 * h * h * h));
    let x0 = funclib::second_derivative_threshold(spec, &bound, prec)?;
    stages.done("threshold", json!({"bound": bound.to_string(), "x0": x0.to_string()}));

    let window = FracWindow::open(unit(6 * h), unit(5 * h))?;
    let mut j: BigInt = funclib::floor_exact(&half, Derivative::First, &x0, prec)? + 1;
    for attempt in 0..=cfg.retries {
        stages.attempt = attempt;
        let target = Rational::from_integer(j.clone()) + unit(6 * h);
        let n = funclib::first_at_least(&half, Derivative::First, &target, &x0, true, prec)?;
        let dec = funclib::frac_in_window(&half, Derivative::First, &n, &window, prec)?;
        if dec.inside() && dec.floor == j {
            stages.done(
                "window",
                json!({"n": n.to_string(), "frac_lo": dec.frac.lo.to_string(), "frac_hi": dec.frac.hi.to_string()}),
            );
            return finish(spec, &half, h, EvenMethod::Window, n, 10 * h, stages, cfg);
        }
        stages.done("miss", json!({"stage": "window", "j": j.to_string()}));
        j += 1;
    }
    Err(SeekError::EscalationExhausted {
        attempts: cfg.retries + 1,
        last_stage: "window".into(),
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    spec: &FunctionSpec,
    half: &FunctionSpec,
    h: u64,
    method: EvenMethod,
    n: BigUint,
    span: u64,
    mut stages: Stages,
    cfg: &SeekConfig,
) -> Result<EvenBlock, SeekError> {
    let prec = &cfg.precision;
    let mut indicators = Vec::new();
    let mut floors = Vec::new();
    for k in 0..span {
        let x = &n + k;
        let pt = SpecPoint::new(spec, Derivative::Value, &x, prec).with_half(half);
        // floor_is_even checks the half-fraction test against the floor's parity
        indicators.push(floor_is_even(&pt)? == Parity::Even);
        floors.push(funclib::floor_exact(spec, Derivative::Value, &x, prec)?);
    }
    let (start, len) = longest_run(&indicators);
    if (len as u64) < h {
        return Err(SeekError::RunNotFound {
            n: n.to_string(),
            needed: h,
            searched: span,
        });
    }
    let run: Vec<BigUint> = (start..start + len).map(|k| &n + k).collect();
    let floors: Vec<BigInt> = floors[start..start + len].to_vec();
    if floors.iter().any(|f| !f.is_even()) {
        return Err(SeekError::Inconsistent("odd floor inside an even run".into()));
    }
    stages.done(
        "run",
        json!({"start": run[0].to_string(), "len": len, "floors": floors.iter().map(|f| f.to_string()).collect::<Vec<_>>()}),
    );
    Ok(EvenBlock {
        spec: spec.label().to_string(),
        h,
        method,
        n,
        indicators,
        run,
        floors,
        timings: stages.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs() {
        assert_eq!(longest_run(&[false, true, true, false, true, true, true]), (4, 3));
        assert_eq!(longest_run(&[true, true, false, true, true]), (0, 2));
        assert_eq!(longest_run(&[false]).1, 0);
    }

    #[test]
    fn identity_falls_back_to_scan() {
        let x: FunctionSpec = "x".parse().unwrap();
        let b = seek_even_block(&x, 1, &SeekConfig::default(), &mut ()).unwrap();
        assert_eq!(b.method, EvenMethod::Scan);
        assert_eq!(b.run, vec![BigUint::from(2u32)]);
        assert_eq!(b.floors, vec![BigInt::from(2)]);
    }

    #[test]
    fn three_even_floors() {
        let f: FunctionSpec = "x^(3/2)".parse().unwrap();
        let b = seek_even_block(&f, 3, &SeekConfig::default(), &mut ()).unwrap();
        assert_eq!(b.method, EvenMethod::Window);
        assert!(b.run.len() >= 3);
        assert_eq!(b.indicators.len(), 30);
        for (x, fl) in b.run.iter().zip(&b.floors) {
            let direct = num_integer::Roots::sqrt(&x.pow(3));
            assert_eq!(BigInt::from(direct), *fl);
            assert!(fl.is_even());
        }
    }
}
