//! Brute-force range scans for coprime and even blocks over the full window
//! `h = 0..=H`, plus the empirical upper Banach density surrogate.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funclib::{self, Derivative, EvalError, FunctionSpec, Precision, Rational};
use crate::ntcore::{floor_is_even, NtError, Parity, SpecPoint};
use crate::verifier::BlockCertificate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    CoprimeBlock,
    EvenBlock,
}

#[derive(Clone, Debug)]
pub struct ScanJob {
    pub spec: FunctionSpec,
    pub n_lo: BigUint,
    pub n_hi: BigUint,
    pub h: usize,
    pub kind: ScanKind,
    pub chunk: usize,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Maximum number of starting indices examined in one call.
    pub budget: Option<u64>,
    pub parallel: bool,
    pub precision: Precision,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: None,
            parallel: true,
            precision: Precision::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanHit {
    CoprimeBlock {
        #[serde(with = "crate::json::decimal")]
        n: BigUint,
        certificate: BlockCertificate,
    },
    EvenBlock {
        #[serde(with = "crate::json::decimal")]
        n: BigUint,
        #[serde(with = "crate::json::decimal_vec")]
        floors: Vec<BigInt>,
    },
}

impl ScanHit {
    pub fn n(&self) -> &BigUint {
        match self {
            ScanHit::CoprimeBlock { n, .. } | ScanHit::EvenBlock { n, .. } => n,
        }
    }

    pub fn floors(&self) -> &[BigInt] {
        match self {
            ScanHit::CoprimeBlock { certificate, .. } => &certificate.floors,
            ScanHit::EvenBlock { floors, .. } => floors,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub kind: ScanKind,
    #[serde(rename = "H")]
    pub h: usize,
    /// Offsets tested at every `n`.
    pub window: String,
    #[serde(with = "crate::json::decimal")]
    pub n_lo: BigUint,
    /// Last starting index examined.
    #[serde(with = "crate::json::decimal")]
    pub n_hi: BigUint,
    pub hits: Vec<ScanHit>,
    /// Count of `n` by the length of the longest qualifying prefix `n, n+1, ...`,
    /// capped at `H + 1`.
    pub histogram: BTreeMap<usize, u64>,
    pub scanned: u64,
}

impl ScanReport {
    fn empty(kind: ScanKind, h: usize, n_lo: BigUint) -> Self {
        ScanReport {
            kind,
            h,
            window: format!("0..={h}"),
            n_hi: n_lo.clone(),
            n_lo,
            hits: Vec::new(),
            histogram: BTreeMap::new(),
            scanned: 0,
        }
    }

    /// Concatenates a report for the range directly after this one.
    pub fn merge(mut self, next: ScanReport) -> Self {
        if next.scanned == 0 {
            return self;
        }
        if self.scanned == 0 {
            return next;
        }
        self.n_hi = next.n_hi;
        self.hits.extend(next.hits);
        for (len, count) in next.histogram {
            *self.histogram.entry(len).or_default() += count;
        }
        self.scanned += next.scanned;
        self
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ScanError {
    #[error("invalid scan job: {0}")]
    InvalidJob(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Nt(#[from] NtError),
    #[error("scan hit at n = {0} does not re-verify")]
    RecheckFailed(BigUint),
    #[error("scan budget exhausted; resume with {cursor}")]
    BudgetExceeded { partial: Box<ScanReport>, cursor: String },
}

/// Parses `a..b` (inclusive) into its endpoints.
pub fn parse_range(text: &str) -> Result<(BigUint, BigUint), ScanError> {
    let bad = || ScanError::InvalidJob(format!("expected a range a..b, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: BigUint = a.trim().parse().map_err(|_| bad())?;
    let b: BigUint = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

impl ScanJob {
    fn validate(&self) -> Result<u64, ScanError> {
        if self.n_lo.is_zero() {
            return Err(ScanError::InvalidJob("n_lo must be >= 1".into()));
        }
        if self.n_lo > self.n_hi {
            return Err(ScanError::InvalidJob(format!(
                "empty range {}..{}",
                self.n_lo, self.n_hi
            )));
        }
        if self.chunk < self.h + 1 {
            return Err(ScanError::InvalidJob(format!(
                "chunk {} must be at least H + 1 = {}",
                self.chunk,
                self.h + 1
            )));
        }
        (&self.n_hi - &self.n_lo + 1u32)
            .to_u64()
            .ok_or_else(|| ScanError::InvalidJob("range length exceeds 2^64".into()))
    }

    /// The job restricted to a resume cursor `a..b`.
    pub fn resume(&self, cursor: &str) -> Result<ScanJob, ScanError> {
        let (n_lo, n_hi) = parse_range(cursor)?;
        Ok(ScanJob {
            n_lo,
            n_hi,
            ..self.clone()
        })
    }
}

fn floors_from(spec: &FunctionSpec, start: &BigUint, len: usize, prec: &Precision) -> Result<Vec<BigInt>, EvalError> {
    let mut x = start.clone();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(funclib::floor_exact(spec, Derivative::Value, &x, prec)?);
        x += 1u32;
    }
    Ok(out)
}

/// `coprime[d - 1][i]` records `gcd(floors[i], floors[i + d]) == 1`.
fn gcd_table(floors: &[BigInt], h: usize) -> Vec<Vec<bool>> {
    (1..=h)
        .map(|d| {
            (0..floors.len().saturating_sub(d))
                .map(|i| floors[i].gcd(&floors[i + d]).is_one())
                .collect()
        })
        .collect()
}

/// Longest `l <= h + 1` such that `floors[i..i + l]` qualifies.
fn prefix_len(kind: ScanKind, floors: &[BigInt], table: &[Vec<bool>], i: usize, h: usize) -> usize {
    let mut len = 0;
    while len <= h {
        let ok = match kind {
            ScanKind::EvenBlock => floors[i + len].is_even(),
            ScanKind::CoprimeBlock => (0..len).all(|j| table[len - j - 1][i + j]),
        };
        if !ok {
            break;
        }
        len += 1;
    }
    len
}

/// Independent re-verification of hits within one chunk.
struct Recheck<'a> {
    job: &'a ScanJob,
    half: FunctionSpec,
    start: &'a BigUint,
    prec: &'a Precision,
    /// Chunk-local indices whose parity is already confirmed.
    even_ok: Vec<bool>,
}

impl Recheck<'_> {
    fn hit(&mut self, i: usize, floors: &[BigInt]) -> Result<ScanHit, ScanError> {
        let n = self.start + i;
        match self.job.kind {
            ScanKind::CoprimeBlock => {
                let offsets = (0..=self.job.h as u64).collect();
                let certificate = BlockCertificate::compute(&self.job.spec, &n, offsets, self.prec)?;
                if !certificate.is_coprime() || certificate.floors != floors {
                    return Err(ScanError::RecheckFailed(n));
                }
                Ok(ScanHit::CoprimeBlock { n, certificate })
            }
            ScanKind::EvenBlock => {
                for (h, floor) in floors.iter().enumerate() {
                    if self.even_ok[i + h] {
                        continue;
                    }
                    let x = &n + h;
                    let pt = SpecPoint::new(&self.job.spec, Derivative::Value, &x, self.prec).with_half(&self.half);
                    if floor_is_even(&pt)? != Parity::Even || !floor.is_even() {
                        return Err(ScanError::RecheckFailed(n));
                    }
                    self.even_ok[i + h] = true;
                }
                Ok(ScanHit::EvenBlock {
                    n,
                    floors: floors.to_vec(),
                })
            }
        }
    }
}

fn scan_chunk(
    job: &ScanJob,
    half: &FunctionSpec,
    start: &BigUint,
    len: usize,
    prec: &Precision,
) -> Result<ScanReport, ScanError> {
    let h = job.h;
    let floors = floors_from(&job.spec, start, len + h, prec)?;
    let table = match job.kind {
        ScanKind::CoprimeBlock => gcd_table(&floors, h),
        ScanKind::EvenBlock => Vec::new(),
    };
    let mut recheck = Recheck {
        job,
        half: half.clone(),
        start,
        prec,
        even_ok: vec![false; floors.len()],
    };
    let mut report = ScanReport::empty(job.kind, h, start.clone());
    for i in 0..len {
        let l = prefix_len(job.kind, &floors, &table, i, h);
        *report.histogram.entry(l).or_default() += 1;
        if l == h + 1 {
            report.hits.push(recheck.hit(i, &floors[i..=i + h])?);
        }
    }
    report.n_hi = start + (len - 1);
    report.scanned = len as u64;
    Ok(report)
}

/// Scans every `n` in `[n_lo, n_hi]`, chunk by chunk, merging in order of `n`.
///
/// With a budget smaller than the range, the scanned prefix is returned inside
/// [`ScanError::BudgetExceeded`] together with the cursor of the remainder.
pub fn scan(job: &ScanJob, opts: &ScanOptions) -> Result<ScanReport, ScanError> {
    let total = job.validate()?;
    let todo = opts.budget.map_or(total, |b| b.min(total));
    let half = job.spec.scaled(&Rational::new(BigInt::one(), 2.into()))?;
    let chunk = job.chunk as u64;
    let starts: Vec<(u64, usize)> = (0..todo.div_ceil(chunk))
        .map(|c| (c * chunk, (todo - c * chunk).min(chunk) as usize))
        .collect();
    let run = |&(off, len): &(u64, usize)| scan_chunk(job, &half, &(&job.n_lo + off), len, &opts.precision);
    let parts: Vec<Result<ScanReport, ScanError>> = if opts.parallel {
        starts.par_iter().map(run).collect()
    } else {
        starts.iter().map(run).collect()
    };
    let mut report = ScanReport::empty(job.kind, job.h, job.n_lo.clone());
    for part in parts {
        report = report.merge(part?);
    }
    if todo < total {
        let next = &job.n_lo + todo;
        return Err(ScanError::BudgetExceeded {
            partial: Box::new(report),
            cursor: format!("{next}..{}", job.n_hi),
        });
    }
    Ok(report)
}

/// First `n >= from` whose floors at `n ..= n + span` satisfy `pred`, examining at
/// most `budget` starting indices. Candidates are evaluated in parallel batches of
/// chunks; the smallest match wins.
pub fn first_match<P>(
    spec: &FunctionSpec,
    from: &BigUint,
    span: usize,
    budget: u64,
    prec: &Precision,
    pred: P,
) -> Result<Option<(BigUint, Vec<BigInt>)>, EvalError>
where
    P: Fn(&BigUint, &[BigInt]) -> bool + Sync,
{
    const CHUNK: u64 = 256;
    let batch = rayon::current_num_threads().max(1) as u64;
    let mut done = 0u64;
    while done < budget {
        let offsets: Vec<u64> = (0..batch)
            .map(|b| done + b * CHUNK)
            .take_while(|&o| o < budget)
            .collect();
        let found: Vec<Option<(BigUint, Vec<BigInt>)>> = offsets
            .par_iter()
            .map(|&off| {
                let len = CHUNK.min(budget - off) as usize;
                let start = from + off;
                let floors = floors_from(spec, &start, len + span, prec)?;
                Ok((0..len).find_map(|i| {
                    let n = &start + i;
                    let window = &floors[i..=i + span];
                    pred(&n, window).then(|| (n, window.to_vec()))
                }))
            })
            .collect::<Result<_, EvalError>>()?;
        if let Some(hit) = found.into_iter().flatten().next() {
            return Ok(Some(hit));
        }
        done += batch * CHUNK;
    }
    Ok(None)
}

/// Largest fraction of any `window` consecutive integers that lie in `set`.
pub fn density_profile(set: &[BigUint], window: u64) -> Rational {
    if window == 0 || set.is_empty() {
        return Rational::zero();
    }
    let mut sorted = set.to_vec();
    sorted.sort();
    sorted.dedup();
    // some optimal window starts at an element of the set
    let mut best = 0usize;
    let mut end = 0;
    for (i, start) in sorted.iter().enumerate() {
        let limit = start + window;
        while end < sorted.len() && sorted[end] < limit {
            end += 1;
        }
        best = best.max(end - i);
    }
    Rational::new(BigInt::from(best), BigInt::from(window))
}
