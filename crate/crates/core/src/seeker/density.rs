use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{seek_witness, seek_witness_h, SeekConfig, SeekError, StageTiming, Stages, Tracer};
use crate::funclib::FunctionSpec;
use crate::ntcore::{coprime_to_all, pairwise_coprime, PairwiseResult};
use crate::scanner;
use crate::verifier::block_offsets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    /// Every round is a witness, with `H_r` larger than everything selected before.
    Strict,
    /// Later rounds are found by scanning with explicit gcd filtering.
    Relaxed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentSource {
    Witness,
    Scan,
}

/// Selected indices `n + offsets[i]` with their floors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "crate::json::decimal")]
    pub n: BigUint,
    #[serde(rename = "H")]
    pub h: u64,
    pub offsets: Vec<u64>,
    #[serde(with = "crate::json::decimal_vec")]
    pub floors: Vec<BigInt>,
    pub source: SegmentSource,
}

impl Segment {
    pub fn indices(&self) -> Vec<BigUint> {
        self.offsets.iter().map(|&o| &self.n + o).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPlan {
    pub spec: String,
    pub mode: DensityMode,
    pub schedule: Vec<u64>,
    pub segments: Vec<Segment>,
    #[serde(with = "crate::json::decimal_vec")]
    pub all_floors: Vec<BigInt>,
    pub coprimality: PairwiseResult,
    #[serde(default)]
    pub timings: Vec<StageTiming>,
}

impl DensityPlan {
    pub fn indices(&self) -> Vec<BigUint> {
        self.segments.iter().flat_map(Segment::indices).collect()
    }
}

fn scan_round(
    spec: &FunctionSpec,
    round: usize,
    h: u64,
    from: &BigUint,
    selected: &[BigInt],
    cfg: &SeekConfig,
) -> Result<Segment, SeekError> {
    let offsets = block_offsets(h);
    let found = scanner::first_match(spec, from, h as usize, cfg.scan_budget, &cfg.precision, |_, w| {
        let picked: Vec<BigInt> = offsets.iter().map(|&o| w[o as usize].clone()).collect();
        pairwise_coprime(&picked).is_coprime() && picked.iter().all(|f| coprime_to_all(f, selected))
    })?;
    let Some((n, window)) = found else {
        return Err(SeekError::RoundFailed {
            round,
            budget: cfg.scan_budget,
        });
    };
    let floors = offsets.iter().map(|&o| window[o as usize].clone()).collect();
    Ok(Segment {
        n,
        h,
        offsets,
        floors,
        source: SegmentSource::Scan,
    })
}

/// Selects one block per entry of `schedule`, each past the previous one, so that
/// all selected floors are pairwise coprime.
pub fn build_density_set(
    spec: &FunctionSpec,
    schedule: &[u64],
    mode: DensityMode,
    cfg: &SeekConfig,
    tracer: &mut dyn Tracer,
) -> Result<DensityPlan, SeekError> {
    if schedule.is_empty() {
        return Err(SeekError::InvalidArgument("schedule is empty".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SeekError::InvalidArgument(
            "schedule must be strictly increasing".into(),
        ));
    }
    if schedule[0] == 0 {
        return Err(SeekError::InvalidArgument("schedule entries are too small".into()));
    }
    let mut segments: Vec<Segment> = Vec::new();
    let mut selected: Vec<BigInt> = Vec::new();
    let mut timings = Vec::new();

    for (round, &h) in schedule.iter().enumerate() {
        let round = round + 1;
        let segment = match segments.last() {
            None if spec.is_admissible() => {
                let w = seek_witness(spec, h, cfg, &mut ())?;
                timings.extend(w.timings);
                Segment {
                    n: w.n,
                    h: w.h,
                    offsets: w.certificate.offsets,
                    floors: w.certificate.floors,
                    source: SegmentSource::Witness,
                }
            }
            None => scan_round(spec, round, h.max(2), &BigUint::one(), &selected, cfg)?,
            Some(prev) => {
                let from = &prev.n + prev.h + 1u32;
                match mode {
                    DensityMode::Relaxed => scan_round(spec, round, h, &from, &selected, cfg)?,
                    DensityMode::Strict => {
                        let largest = selected.iter().map(|f| f.abs()).max().unwrap_or_default();
                        let required = BigInt::from(prev.h) + largest + 1;
                        if BigInt::from(h) < required {
                            return Err(SeekError::StrictInfeasible {
                                round,
                                required: required.to_string(),
                                given: h,
                            });
                        }
                        let w = seek_witness_h(spec, h, Some(&from), cfg, &mut ())?;
                        timings.extend(w.timings);
                        Segment {
                            n: w.n,
                            h: w.h,
                            offsets: w.certificate.offsets,
                            floors: w.certificate.floors,
                            source: SegmentSource::Witness,
                        }
                    }
                }
            }
        };
        selected.extend(segment.floors.iter().cloned());
        let mut stages = Stages::new(tracer);
        stages.attempt = round as u32;
        stages.done(
            "round",
            json!({
                "round": round,
                "n": segment.n.to_string(),
                "H": segment.h,
                "floors": segment.floors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            }),
        );
        timings.extend(stages.finish());
        segments.push(segment);
    }

    let coprimality = pairwise_coprime(&selected);
    if !coprimality.is_coprime() {
        return Err(SeekError::Inconsistent(format!(
            "selected floors share a factor: {coprimality:?}"
        )));
    }
    Ok(DensityPlan {
        spec: spec.label().to_string(),
        mode,
        schedule: schedule.to_vec(),
        segments,
        all_floors: selected,
        coprimality,
        timings,
    })
}
