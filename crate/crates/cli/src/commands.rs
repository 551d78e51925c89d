use std::io::Write;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use regseq_core::funclib::{self, Derivative, FunctionSpec, Precision, Rational};
use regseq_core::ntcore;
use regseq_core::scanner::{self, ScanError, ScanJob, ScanKind, ScanOptions, ScanReport};
use regseq_core::seeker::{self, DensityMode, SeekConfig, StageEvent, StageTiming};
use regseq_core::verifier::{self, CertificateDoc};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{Command, Kind, Mode};
use crate::config::RunConfig;
use crate::failure::{Failure, EXIT_EXHAUSTED, EXIT_NEGATIVE, EXIT_OK};

/// Everything a subcommand produced, rendered later in the requested format.
pub struct Outcome {
    pub exit: i32,
    /// JSON records, one per output line.
    pub records: Vec<Value>,
    /// CSV rows, header first.
    pub csv: Vec<Vec<String>>,
    pub human: String,
    pub timings: Vec<StageTiming>,
}

impl Outcome {
    fn new(records: Vec<Value>, csv: Vec<Vec<String>>, human: String) -> Self {
        Outcome {
            exit: EXIT_OK,
            records,
            csv,
            human,
            timings: Vec::new(),
        }
    }
}

fn row<const N: usize>(cells: [&dyn ToString; N]) -> Vec<String> {
    cells.iter().map(|c| c.to_string()).collect()
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn approx(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serializes `value` with its `timings` field removed.
fn without_timings(value: &impl Serialize) -> Value {
    let mut v = serde_json::to_value(value).expect("serializable");
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timings");
    }
    v
}

fn parse_n(text: &str, what: &str) -> Result<BigUint, Failure> {
    let n: BigUint = text
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("{what} must be a positive integer, got {text:?}")))?;
    if n.is_zero() {
        return Err(Failure::usage(format!("{what} must be >= 1")));
    }
    Ok(n)
}

fn spec_of(cfg: &RunConfig) -> Result<FunctionSpec, Failure> {
    let text = cfg
        .spec_text
        .as_deref()
        .ok_or_else(|| Failure::usage("--spec is required"))?;
    Ok(text.parse::<FunctionSpec>()?)
}

fn precision(cfg: &RunConfig) -> Precision {
    Precision::with_cap(cfg.precision_cap_bits)
}

fn seek_config(cfg: &RunConfig) -> SeekConfig {
    SeekConfig {
        precision: precision(cfg),
        retries: cfg.retries,
        scan_budget: cfg.budget,
    }
}

pub fn execute(command: &Command, cfg: &RunConfig, err: &mut dyn Write) -> Result<Outcome, Failure> {
    let mut trace = |ev: StageEvent| {
        let _ = writeln!(err, "{}", json!({ "trace": ev }));
    };
    let mut silent = |_: StageEvent| {};
    let tracer: &mut dyn seeker::Tracer = if cfg.trace { &mut trace } else { &mut silent };
    match command {
        Command::Eval { n, range, derivative } => eval(cfg, n.as_deref(), range.as_deref(), *derivative),
        Command::Verify { n, h } => verify(cfg, n, *h),
        Command::Seek { l } => {
            let spec = spec_of(cfg)?;
            let w = seeker::seek_witness(&spec, *l, &seek_config(cfg), tracer)?;
            let human = format!(
                "witness n = {} (H = {}, q = {}, attempts = {})\nfloors {}",
                w.n,
                w.h,
                w.q,
                w.attempts,
                w.certificate
                    .floors
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            let csv = vec![
                header(&["H", "L", "q", "x0", "m", "n0", "K", "b", "k0", "n"]),
                row([&w.h, &w.l_requested, &w.q, &w.x0, &w.m, &w.n0, &w.k, &w.b, &w.k0, &w.n]),
            ];
            let mut out = Outcome::new(vec![without_timings(&w)], csv, human);
            out.timings = w.timings;
            Ok(out)
        }
        Command::Even { h } => {
            let spec = spec_of(cfg)?;
            let b = seeker::seek_even_block(&spec, *h, &seek_config(cfg), tracer)?;
            let mut csv = vec![header(&["index", "floor"])];
            csv.extend(b.run.iter().zip(&b.floors).map(|(i, f)| row([i, f])));
            let human = format!(
                "even run of {} from n = {}: floors {}",
                b.run.len(),
                b.run[0],
                b.floors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ")
            );
            let mut out = Outcome::new(vec![without_timings(&b)], csv, human);
            out.timings = b.timings;
            Ok(out)
        }
        Command::Density { schedule } => {
            let spec = spec_of(cfg)?;
            let mode = match cfg.mode {
                Mode::Strict => DensityMode::Strict,
                Mode::Relaxed => DensityMode::Relaxed,
            };
            let plan = seeker::build_density_set(&spec, schedule, mode, &seek_config(cfg), tracer)?;
            let mut csv = vec![header(&["segment", "n", "H", "index", "floor"])];
            let mut human = String::new();
            for (i, s) in plan.segments.iter().enumerate() {
                for (idx, f) in s.indices().iter().zip(&s.floors) {
                    csv.push(row([&(i + 1), &s.n, &s.h, idx, f]));
                }
                human.push_str(&format!(
                    "segment {}: n = {}, H = {}, {} floors\n",
                    i + 1,
                    s.n,
                    s.h,
                    s.floors.len()
                ));
            }
            human.push_str(&format!("all {} floors pairwise coprime", plan.all_floors.len()));
            let mut out = Outcome::new(vec![without_timings(&plan)], csv, human);
            out.timings = plan.timings;
            Ok(out)
        }
        Command::Scan { h, range, kind, chunk } => scan(cfg, *h, range, *kind, *chunk),
        Command::Oracle { a, len } => {
            let a = parse_n(a, "--a")?;
            let s = ntcore::max_coprime_subset(&a, *len)?;
            let record = json!({
                "a": a.to_string(),
                "len": len,
                "size": s.size,
                "witness": s.witness.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            });
            let mut csv = vec![header(&["value"])];
            csv.extend(s.witness.iter().map(|w| row([w])));
            let human = format!(
                "largest pairwise-coprime subset of [{a}, {a} + {len}) has size {}: {}",
                s.size,
                s.witness.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
            );
            Ok(Outcome::new(vec![record], csv, human))
        }
    }
}

fn eval(cfg: &RunConfig, n: Option<&str>, range: Option<&str>, derivative: Option<usize>) -> Result<Outcome, Failure> {
    let spec = spec_of(cfg)?;
    let prec = precision(cfg);
    let (lo, hi) = match (n, range) {
        (Some(n), None) => {
            let n = parse_n(n, "--n")?;
            (n.clone(), n)
        }
        (None, Some(r)) => scanner::parse_range(r)?,
        _ => return Err(Failure::usage("eval takes exactly one of --n or --range")),
    };
    if lo.is_zero() || lo > hi {
        return Err(Failure::usage(format!("invalid range {lo}..{hi}")));
    }
    if (&hi - &lo).to_u64().is_none_or(|c| c >= cfg.budget) {
        return Err(Failure::usage(format!(
            "range {lo}..{hi} exceeds the budget of {}",
            cfg.budget
        )));
    }
    let orders: Vec<usize> = match derivative {
        Some(d) if d <= 2 => vec![d],
        Some(d) => return Err(Failure::usage(format!("derivative must be 0, 1 or 2, got {d}"))),
        None => vec![0, 1, 2],
    };
    let mut points = Vec::new();
    let mut csv = vec![header(&["n", "derivative", "floor", "frac_lo", "frac_hi"])];
    let mut human = String::new();
    let mut x = lo;
    while x <= hi {
        for &d in &orders {
            let r = funclib::resolve(&spec, Derivative::from_order(d).expect("order <= 2"), &x, &prec)?;
            let frac = r.frac();
            points.push(json!({
                "n": x.to_string(),
                "derivative": d,
                "floor": r.floor.to_string(),
                "frac_lo": frac.lo.to_string(),
                "frac_hi": frac.hi.to_string(),
            }));
            csv.push(row([&x, &d, &r.floor, &frac.lo, &frac.hi]));
            let name = ["f", "f'", "f''"][d];
            human.push_str(&format!(
                "{name}({x}): floor {}, frac ~ {:.6}\n",
                r.floor,
                approx(&frac.lo)
            ));
        }
        x += 1u32;
    }
    let record = json!({"spec": spec.label(), "points": points});
    Ok(Outcome::new(vec![record], csv, human.trim_end().to_string()))
}

fn verify(cfg: &RunConfig, n: &str, h: u64) -> Result<Outcome, Failure> {
    let spec = spec_of(cfg)?;
    let n = parse_n(n, "--n")?;
    let v = verifier::verify(&spec, &n, h, &precision(cfg))?;
    let doc = CertificateDoc::new(&spec, &v);
    let mut csv = vec![header(&["offset", "index", "floor"])];
    for (o, f) in doc.offsets.iter().zip(&doc.floors) {
        csv.push(row([o, &(&n + *o), f]));
    }
    let failing = doc.conditions.failing();
    let human = format!(
        "conditions {} at n = {n}, H = {h}{}\nfloors {} ({})",
        if doc.conditions.pass { "pass" } else { "fail" },
        if failing.is_empty() {
            String::new()
        } else {
            format!(" (failing: {})", failing.join(", "))
        },
        doc.floors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" "),
        if doc.coprime {
            "pairwise coprime"
        } else {
            "not pairwise coprime"
        },
    );
    let mut out = Outcome::new(vec![serde_json::to_value(&doc).expect("serializable")], csv, human);
    if !doc.conditions.pass || !doc.coprime {
        out.exit = EXIT_NEGATIVE;
    }
    Ok(out)
}

fn scan_records(report: &ScanReport, cursor: Option<&str>) -> (Vec<Value>, Vec<Vec<String>>, String) {
    let mut records = Vec::new();
    let mut csv = vec![header(&["n", "floors"])];
    for hit in &report.hits {
        let mut v = serde_json::to_value(hit).expect("serializable");
        v.as_object_mut().expect("object").insert("record".into(), json!("hit"));
        records.push(v);
        let floors: Vec<String> = hit.floors().iter().map(|f| f.to_string()).collect();
        csv.push(vec![hit.n().to_string(), floors.join(" ")]);
    }
    let mut summary = Map::new();
    summary.insert("record".into(), json!("summary"));
    if let Value::Object(obj) = serde_json::to_value(report).expect("serializable") {
        for (k, v) in obj {
            if k != "hits" {
                summary.insert(k, v);
            }
        }
    }
    summary.insert("hit_count".into(), json!(report.hits.len()));
    if let Some(c) = cursor {
        summary.insert("cursor".into(), json!(c));
    }
    records.push(Value::Object(summary));
    let human = format!(
        "scanned {} starting indices in {}..{} (window {}): {} hits{}",
        report.scanned,
        report.n_lo,
        report.n_hi,
        report.window,
        report.hits.len(),
        cursor
            .map(|c| format!("; budget exhausted, resume with --range {c}"))
            .unwrap_or_default()
    );
    (records, csv, human)
}

fn scan(cfg: &RunConfig, h: usize, range: &str, kind: Kind, chunk: Option<usize>) -> Result<Outcome, Failure> {
    let spec = spec_of(cfg)?;
    let (n_lo, n_hi) = scanner::parse_range(range)?;
    let job = ScanJob {
        spec,
        n_lo,
        n_hi,
        h,
        kind: match kind {
            Kind::Coprime => ScanKind::CoprimeBlock,
            Kind::Even => ScanKind::EvenBlock,
        },
        chunk: chunk.unwrap_or(4096.max(h + 1)),
    };
    let opts = ScanOptions {
        budget: Some(cfg.budget),
        parallel: true,
        precision: precision(cfg),
    };
    match scanner::scan(&job, &opts) {
        Ok(report) => {
            let (records, csv, human) = scan_records(&report, None);
            Ok(Outcome::new(records, csv, human))
        }
        Err(ScanError::BudgetExceeded { partial, cursor }) => {
            let (records, csv, human) = scan_records(&partial, Some(&cursor));
            let mut out = Outcome::new(records, csv, human);
            out.exit = EXIT_EXHAUSTED;
            Ok(out)
        }
        Err(e) => Err(e.into()),
    }
}
