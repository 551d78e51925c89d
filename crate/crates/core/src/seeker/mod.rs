//! Constructive search for certified witnesses: coprime blocks through the
//! linearization criterion, runs of even floors through the halved function, and
//! finite pairwise-coprime index sets built from successive blocks.

mod density;
mod even;
mod witness;

pub use density::{build_density_set, DensityMode, DensityPlan, Segment, SegmentSource};
pub use even::{seek_even_block, EvenBlock, EvenMethod};
pub use witness::{recheck_witness, seek_witness, seek_witness_h, ProofWitness};

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funclib::{EvalError, Precision};
use crate::ntcore::NtError;
use crate::scanner::ScanError;
use crate::verifier::VerifyError;

pub const DEFAULT_RETRIES: u32 = 25;
pub const DEFAULT_SCAN_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct SeekConfig {
    pub precision: Precision,
    /// Further primes tried after a certified window miss.
    pub retries: u32,
    /// Starting indices a scanner-backed round may examine.
    pub scan_budget: u64,
}

impl Default for SeekConfig {
    fn default() -> Self {
        SeekConfig {
            precision: Precision::default(),
            retries: DEFAULT_RETRIES,
            scan_budget: DEFAULT_SCAN_BUDGET,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SeekError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Nt(#[from] NtError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} is not admissible")]
    NotAdmissible(String),
    #[error("window missed at stage {stage}: {detail}")]
    WindowMissed { stage: String, detail: String },
    #[error("no witness after {attempts} primes; last miss at stage {last_stage}")]
    EscalationExhausted { attempts: u32, last_stage: String },
    #[error("no run of {needed} even floors among h = 0..{searched} at n = {n}")]
    RunNotFound { n: String, needed: u64, searched: u64 },
    #[error("round {round} needs H >= {required} in strict mode, schedule has {given}")]
    StrictInfeasible { round: usize, required: String, given: u64 },
    #[error("round {round} found no qualifying block within {budget} candidates")]
    RoundFailed { round: usize, budget: u64 },
    #[error("internal certificate check failed: {0}")]
    Inconsistent(String),
}

impl SeekError {
    pub(crate) fn miss(stage: &str, detail: impl Into<String>) -> Self {
        SeekError::WindowMissed {
            stage: stage.into(),
            detail: detail.into(),
        }
    }
}

/// One proof stage with the certified quantities it established.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageEvent {
    pub stage: String,
    pub attempt: u32,
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: f64,
}

/// Receives stage events as they are certified.
pub trait Tracer {
    fn event(&mut self, event: StageEvent);
}

impl Tracer for () {
    fn event(&mut self, _: StageEvent) {}
}

impl Tracer for Vec<StageEvent> {
    fn event(&mut self, event: StageEvent) {
        self.push(event);
    }
}

impl<F: FnMut(StageEvent)> Tracer for F {
    fn event(&mut self, event: StageEvent) {
        self(event)
    }
}

/// Stage clock and event sink shared by the seekers.
pub(crate) struct Stages<'a> {
    tracer: &'a mut dyn Tracer,
    timings: Vec<StageTiming>,
    mark: Instant,
    pub attempt: u32,
}

impl<'a> Stages<'a> {
    pub fn new(tracer: &'a mut dyn Tracer) -> Self {
        Stages {
            tracer,
            timings: Vec::new(),
            mark: Instant::now(),
            attempt: 0,
        }
    }

    pub fn done(&mut self, stage: &str, detail: serde_json::Value) {
        let now = Instant::now();
        self.timings.push(StageTiming {
            stage: stage.into(),
            millis: now.duration_since(self.mark).as_secs_f64() * 1e3,
        });
        self.mark = now;
        self.tracer.event(StageEvent {
            stage: stage.into(),
            attempt: self.attempt,
            detail,
        });
    }

    pub fn finish(self) -> Vec<StageTiming> {
        self.timings
    }
}
