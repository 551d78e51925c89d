//! Hypothesis checks for the linearization criterion, block prediction, and
//! coprimality certificates.
//!
//! Under the three hypotheses at `(n, H)`
//!
//! * `{f(n)} <= 1/3`, `1/(9H) <= {f'(n)} <= 1/(3H)`, `|f''| <= 1/(10H^2)` on `[n, n+H]`,
//! * `prim(H) | floor(f'(n))`,
//! * `gcd(floor(f(n)), floor(f'(n))) = 1`,
//!
//! the floors `floor(f(n+h))` for integer `h` in `[H/2, H]` equal
//! `floor(f(n)) + h floor(f'(n))` and are pairwise coprime. [`verify`] checks both
//! conclusions against directly computed floors.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funclib::{self, Bounds, Derivative, EvalError, FracWindow, FunctionSpec, Precision, Rational};
use crate::ntcore::{self, pairwise_coprime, NtError, PairwiseResult};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Nt(#[from] NtError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("block prediction requires passing conditions; failed: {}", .0.join(", "))]
    RejectedWithoutConditions(Vec<String>),
    #[error("conditions passed but the block conclusion failed: {0}")]
    CertificateContradiction(String),
    #[error("certificate does not re-verify: {0}")]
    RecheckMismatch(String),
}

/// One decided sub-condition with rational bounds on the quantity it tested.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    #[serde(with = "crate::json::decimal")]
    pub lo: Rational,
    #[serde(with = "crate::json::decimal")]
    pub hi: Rational,
}

impl Check {
    fn new(pass: bool, bounds: Bounds) -> Self {
        Check {
            pass,
            lo: bounds.lo,
            hi: bounds.hi,
        }
    }

    fn exact(pass: bool, value: BigInt) -> Self {
        Self::new(pass, Bounds::exact(Rational::from_integer(value)))
    }
}

/// Hypothesis report at `(n, H)`.
///
/// Bounds: `h1_frac_f` on `{f(n)}`, `h1_frac_f1` on `{f'(n)}`, `h1_second` on
/// `sup |f''|` over `[n, n+H]`, `h2_divisible` is `floor(f'(n)) mod prim(H)`,
/// `h3_gcd` is `gcd(floor(f(n)), floor(f'(n)))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(with = "crate::json::decimal")]
    pub n: BigUint,
    pub pass: bool,
    #[serde(with = "crate::json::decimal")]
    pub floor_f: BigInt,
    #[serde(with = "crate::json::decimal")]
    pub floor_f1: BigInt,
    #[serde(with = "crate::json::decimal")]
    pub primorial: BigUint,
    pub h1_frac_f: Check,
    pub h1_frac_f1: Check,
    pub h1_second: Check,
    pub h2_divisible: Check,
    pub h3_gcd: Check,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.pass
    }

    /// Names of the failing sub-conditions.
    pub fn failing(&self) -> Vec<String> {
        [
            ("h1_frac_f", &self.h1_frac_f),
            ("h1_frac_f1", &self.h1_frac_f1),
            ("h1_second", &self.h1_second),
            ("h2_divisible", &self.h2_divisible),
            ("h3_gcd", &self.h3_gcd),
        ]
        .into_iter()
        .filter(|(_, c)| !c.pass)
        .map(|(name, _)| name.to_string())
        .collect()
    }
}

/// Floors at `start + offsets[i]` and their pairwise coprimality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCertificate {
    #[serde(with = "crate::json::decimal")]
    pub start: BigUint,
    pub offsets: Vec<u64>,
    #[serde(with = "crate::json::decimal_vec")]
    pub floors: Vec<BigInt>,
    pub coprimality: PairwiseResult,
}

impl BlockCertificate {
    /// Direct floors at the given offsets.
    pub fn compute(
        spec: &FunctionSpec,
        start: &BigUint,
        offsets: Vec<u64>,
        prec: &Precision,
    ) -> Result<Self, EvalError> {
        let floors = offsets
            .iter()
            .map(|&h| funclib::floor_exact(spec, Derivative::Value, &(start + h), prec))
            .collect::<Result<Vec<_>, _>>()?;
        let coprimality = pairwise_coprime(&floors);
        Ok(BlockCertificate {
            start: start.clone(),
            offsets,
            floors,
            coprimality,
        })
    }

    pub fn is_coprime(&self) -> bool {
        self.coprimality.is_coprime()
    }

    pub fn indices(&self) -> impl Iterator<Item = BigUint> + '_ {
        self.offsets.iter().map(move |&h| &self.start + h)
    }
}

/// Integer offsets `ceil(H/2) ..= H`.
pub fn block_offsets(h: u64) -> Vec<u64> {
    (h.div_ceil(2)..=h).collect()
}

fn unit_fraction(k: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(k))
}

/// Decides every hypothesis at `(n, H)` with certified bounds.
pub fn check_conditions(
    spec: &FunctionSpec,
    n: &BigUint,
    h: u64,
    prec: &Precision,
) -> Result<ConditionReport, VerifyError> {
    if h < 2 {
        return Err(VerifyError::InvalidArgument(format!("H must be >= 2, got {h}")));
    }
    if n.is_zero() {
        return Err(VerifyError::InvalidArgument("n must be >= 1".into()));
    }
    if !spec.is_admissible() && !spec.is_integer_only() {
        return Err(VerifyError::InvalidArgument(format!(
            "{} is neither admissible nor integer-only",
            spec.label()
        )));
    }
    let zero = Rational::zero();
    let frac_f_window = FracWindow::closed(zero, unit_fraction(3))?;
    let f = funclib::frac_in_window(spec, Derivative::Value, n, &frac_f_window, prec)?;
    let frac_f1_window = FracWindow::closed(unit_fraction(9 * h), unit_fraction(3 * h))?;
    let f1 = funclib::frac_in_window(spec, Derivative::First, n, &frac_f1_window, prec)?;
    let (second_ok, second_bounds) =
        funclib::second_derivative_bound(spec, n, &(n + h), &unit_fraction(10 * h * h), prec)?;

    let primorial = ntcore::primorial(h)?.value;
    let residue = f1.floor.mod_floor(&BigInt::from(primorial.clone()));
    let g = f.floor.gcd(&f1.floor);

    let h1_frac_f = Check::new(f.inside(), f.frac);
    let h1_frac_f1 = Check::new(f1.inside(), f1.frac);
    let h1_second = Check::new(second_ok, second_bounds);
    let h2_divisible = Check::exact(residue.is_zero(), residue);
    let h3_gcd = Check::exact(g.is_one(), g);
    let pass = h1_frac_f.pass && h1_frac_f1.pass && h1_second.pass && h2_divisible.pass && h3_gcd.pass;
    Ok(ConditionReport {
        h,
        n: n.clone(),
        pass,
        floor_f: f.floor,
        floor_f1: f1.floor,
        primorial,
        h1_frac_f,
        h1_frac_f1,
        h1_second,
        h2_divisible,
        h3_gcd,
    })
}

/// `floor_f + h * floor_f1` for `h` in `ceil(H/2) ..= H`.
pub fn predict_from_floors(floor_f: &BigInt, floor_f1: &BigInt, h: u64) -> Vec<BigInt> {
    block_offsets(h)
        .into_iter()
        .map(|k| floor_f + floor_f1 * BigInt::from(k))
        .collect()
}

/// Block predicted by the linearization identity, without evaluating `f(n + h)`.
pub fn predicted_block(spec: &FunctionSpec, n: &BigUint, h: u64, prec: &Precision) -> Result<Vec<BigInt>, VerifyError> {
    let report = check_conditions(spec, n, h, prec)?;
    if !report.passed() {
        return Err(VerifyError::RejectedWithoutConditions(report.failing()));
    }
    Ok(predict_from_floors(&report.floor_f, &report.floor_f1, h))
}

/// Direct floors over `ceil(H/2) ..= H` and their coprimality. Conditions are not needed.
pub fn verify_block(
    spec: &FunctionSpec,
    n: &BigUint,
    h: u64,
    prec: &Precision,
) -> Result<BlockCertificate, VerifyError> {
    if n.is_zero() {
        return Err(VerifyError::InvalidArgument("n must be >= 1".into()));
    }
    Ok(BlockCertificate::compute(spec, n, block_offsets(h), prec)?)
}

/// Report, direct certificate, and (when the report passes) the predicted block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub report: ConditionReport,
    pub certificate: BlockCertificate,
    pub predicted: Option<Vec<BigInt>>,
}

/// Runs [`check_conditions`] and [`verify_block`]. When the conditions pass, the
/// certificate must be all-coprime, match the predicted block, and avoid every
/// prime `<= H`; anything else is reported as [`VerifyError::CertificateContradiction`].
pub fn verify(spec: &FunctionSpec, n: &BigUint, h: u64, prec: &Precision) -> Result<Verification, VerifyError> {
    let report = check_conditions(spec, n, h, prec)?;
    let certificate = verify_block(spec, n, h, prec)?;
    let predicted = if report.passed() {
        let predicted = predict_from_floors(&report.floor_f, &report.floor_f1, h);
        if predicted != certificate.floors {
            return Err(VerifyError::CertificateContradiction(format!(
                "direct floors differ from the linear prediction at n = {n}"
            )));
        }
        if !certificate.is_coprime() {
            return Err(VerifyError::CertificateContradiction(format!(
                "block at n = {n} is not pairwise coprime: {:?}",
                certificate.coprimality
            )));
        }
        if let Some(p) = small_prime_divisor(&certificate.floors, h) {
            return Err(VerifyError::CertificateContradiction(format!(
                "prime {p} <= H divides a block floor at n = {n}"
            )));
        }
        Some(predicted)
    } else {
        None
    };
    Ok(Verification {
        report,
        certificate,
        predicted,
    })
}

/// A prime `p <= h` dividing some value, if any.
pub fn small_prime_divisor(values: &[BigInt], h: u64) -> Option<u64> {
    ntcore::primes_up_to(h)
        .into_iter()
        .find(|&p| values.iter().any(|v| (v % BigInt::from(p)).is_zero()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailingPair {
    pub i: usize,
    pub j: usize,
    #[serde(with = "crate::json::decimal")]
    pub gcd: BigUint,
}

/// Interchange form of a verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub spec: String,
    #[serde(with = "crate::json::decimal")]
    pub n: BigUint,
    #[serde(rename = "H")]
    pub h: u64,
    /// Offset convention of `floors`: `ceil(H/2)..=H`.
    pub offsets: Vec<u64>,
    pub conditions: ConditionReport,
    #[serde(with = "crate::json::decimal_vec")]
    pub floors: Vec<BigInt>,
    pub coprime: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_pair: Option<FailingPair>,
}

impl CertificateDoc {
    pub fn new(spec: &FunctionSpec, v: &Verification) -> Self {
        let failing_pair = match &v.certificate.coprimality {
            PairwiseResult::AllCoprime => None,
            PairwiseResult::Failure { i, j, gcd } => Some(FailingPair {
                i: *i,
                j: *j,
                gcd: gcd.clone(),
            }),
        };
        CertificateDoc {
            spec: spec.label().to_string(),
            n: v.report.n.clone(),
            h: v.report.h,
            offsets: v.certificate.offsets.clone(),
            conditions: v.report.clone(),
            floors: v.certificate.floors.clone(),
            coprime: v.certificate.is_coprime(),
            failing_pair,
        }
    }
}

/// Recomputes a certificate document from its `(spec, n, H)` and compares every claim.
pub fn recheck(doc: &CertificateDoc, prec: &Precision) -> Result<Verification, VerifyError> {
    let spec: FunctionSpec = doc.spec.parse()?;
    let v = verify(&spec, &doc.n, doc.h, prec)?;
    let fresh = CertificateDoc::new(&spec, &v);
    let mismatch = |what: &str| Err(VerifyError::RecheckMismatch(what.to_string()));
    if fresh.offsets != doc.offsets {
        return mismatch("offsets");
    }
    if fresh.floors != doc.floors {
        return mismatch("floors");
    }
    if fresh.coprime != doc.coprime || fresh.failing_pair != doc.failing_pair {
        return mismatch("coprimality");
    }
    if fresh.conditions.failing() != doc.conditions.failing() || fresh.conditions.pass != doc.conditions.pass {
        return mismatch("conditions");
    }
    if fresh.conditions.floor_f != doc.conditions.floor_f || fresh.conditions.floor_f1 != doc.conditions.floor_f1 {
        return mismatch("condition floors");
    }
    Ok(v)
}
