use std::io::Write;
use std::path::{Path, PathBuf};

use regseq::failure::{EXIT_EXHAUSTED, EXIT_NEGATIVE, EXIT_OK, EXIT_PRECISION, EXIT_USAGE};
use regseq_core::funclib::{FunctionSpec, Precision};
use regseq_core::seeker::{recheck_witness, ProofWitness};
use regseq_core::verifier::{recheck, CertificateDoc};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn records(&self) -> Vec<Value> {
        self.stdout
            .lines()
            .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad JSON line {l:?}: {e}")))
            .collect()
    }

    fn record(&self) -> Value {
        let mut r = self.records();
        assert_eq!(r.len(), 1, "expected one record in {}", self.stdout);
        r.remove(0)
    }
}

fn run_cfg(args: &[&str], config: Option<PathBuf>) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("regseq").chain(args.iter().copied());
    let code = regseq::run_with_config(argv, config, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_cfg(args, None)
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, v: &Value) {
    let s = schema(schema_name);
    let errors: Vec<String> = s
        .iter_errors(v)
        .map(|e| format!("{e} at {}", e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}\n{v}");
}

#[test]
fn eval_floor_of_ten_to_three_halves() {
    let r = run(&["eval", "--spec", "x^(3/2)", "--n", "10", "--derivative", "0"]);
    assert_eq!(r.code, EXIT_OK);
    let v = r.record();
    assert_valid("eval.schema.json", &v);
    assert_eq!(v["points"][0]["floor"], "31");
}

#[test]
fn eval_range_covers_every_derivative() {
    let r = run(&["eval", "--spec", "x^(3/2)", "--range", "4..6"]);
    assert_eq!(r.code, EXIT_OK);
    let v = r.record();
    assert_valid("eval.schema.json", &v);
    let floors: Vec<&str> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["derivative"] == 0)
        .map(|p| p["floor"].as_str().unwrap())
        .collect();
    assert_eq!(floors, ["8", "11", "14"]);
    assert_eq!(v["points"].as_array().unwrap().len(), 9);
}

#[test]
fn oracle_on_two_three_four() {
    let r = run(&["oracle", "--a", "2", "--len", "3"]);
    assert_eq!(r.code, EXIT_OK);
    let v = r.record();
    assert_valid("oracle.schema.json", &v);
    assert_eq!(v["size"], 2);
    let too_long = run(&["oracle", "--a", "2", "--len", "40"]);
    assert_eq!(too_long.code, EXIT_USAGE);
    assert_valid("error.schema.json", &too_long.record());
}

#[test]
fn verify_reports_failing_divisibility() {
    let r = run(&["verify", "--spec", "x^(3/2)", "--n", "4", "--H", "2"]);
    assert_eq!(r.code, EXIT_NEGATIVE);
    let v = r.record();
    assert_valid("verify.schema.json", &v);
    assert_eq!(v["conditions"]["h2_divisible"]["pass"], false);
    let doc: CertificateDoc = serde_json::from_value(v).unwrap();
    recheck(&doc, &Precision::default()).unwrap();
}

#[test]
fn adversarial_cancellation_hits_the_cap() {
    let r = run(&[
        "eval",
        "--spec",
        "x^(3/2) - 2*x^(1/2)",
        "--n",
        "2",
        "--precision-cap",
        "1024",
    ]);
    assert_eq!(r.code, EXIT_PRECISION);
    let v = r.record();
    assert_valid("error.schema.json", &v);
    assert_eq!(v["error"]["kind"], "precision_cap_exceeded");
    assert!(r.stderr.contains("precision_cap_exceeded"));
}

#[test]
fn seek_output_validates_rechecks_and_is_deterministic() {
    let args = ["seek", "--spec", "x^(3/2)", "--L", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stderr.contains("\"timings\""));
    let v = a.record();
    assert_valid("seek.schema.json", &v);
    assert!(v.get("timings").is_none());
    let mut bad = v.clone();
    bad["n"] = serde_json::json!(5);
    assert!(!schema("seek.schema.json").is_valid(&bad));
    let w: ProofWitness = serde_json::from_value(v).unwrap();
    let spec: FunctionSpec = "x^(3/2)".parse().unwrap();
    recheck_witness(&spec, &w, &Precision::default()).unwrap();
}

#[test]
fn trace_emits_one_line_per_stage() {
    let r = run(&["seek", "--spec", "x^(3/2)", "--L", "1", "--trace"]);
    assert_eq!(r.code, EXIT_OK);
    let stages: Vec<String> = r
        .stderr
        .lines()
        .filter_map(|l| serde_json::from_str::<Value>(l).ok())
        .filter_map(|v| v["trace"]["stage"].as_str().map(str::to_string))
        .collect();
    assert_eq!(
        stages,
        ["threshold", "prime", "bracket", "window", "congruence", "k0", "verify"]
    );
}

#[test]
fn even_and_density_validate() {
    let e = run(&["even", "--spec", "x^(3/2)", "--H", "3"]);
    assert_eq!(e.code, EXIT_OK);
    let v = e.record();
    assert_valid("even.schema.json", &v);
    assert!(v["run"].as_array().unwrap().len() >= 3);

    let d = run(&["density", "--spec", "x^(3/2)", "--schedule", "2,3,4"]);
    assert_eq!(d.code, EXIT_OK);
    let v = d.record();
    assert_valid("density.schema.json", &v);
    assert_eq!(v["coprimality"]["status"], "all_coprime");

    let strict = run(&["density", "--spec", "x^(3/2)", "--schedule", "2,3", "--mode", "strict"]);
    assert_eq!(strict.code, EXIT_NEGATIVE);
}

#[test]
fn scan_streams_hits_then_summary() {
    let r = run(&["scan", "--spec", "x", "--H", "1", "--range", "1..10"]);
    assert_eq!(r.code, EXIT_OK);
    let records = r.records();
    assert_eq!(records.len(), 11);
    for hit in &records[..10] {
        assert_valid("scan_hit.schema.json", hit);
    }
    assert_valid("scan_summary.schema.json", &records[10]);
    assert_eq!(records[10]["hit_count"], 10);
    assert_eq!(records[10]["window"], "0..=1");
}

#[test]
fn scan_budget_prints_resume_cursor() {
    let r = run(&[
        "scan", "--spec", "x^(3/2)", "--H", "2", "--range", "2..200", "--budget", "50",
    ]);
    assert_eq!(r.code, EXIT_EXHAUSTED);
    let summary = r.records().pop().unwrap();
    assert_valid("scan_summary.schema.json", &summary);
    assert_eq!(summary["cursor"], "52..200");
    let rest = run(&["scan", "--spec", "x^(3/2)", "--H", "2", "--range", "52..200"]);
    let full = run(&["scan", "--spec", "x^(3/2)", "--H", "2", "--range", "2..200"]);
    let hits = |r: &Run| {
        r.records()
            .into_iter()
            .filter(|v| v["record"] == "hit")
            .collect::<Vec<_>>()
    };
    let mut joined = hits(&r);
    joined.extend(hits(&rest));
    assert_eq!(joined, hits(&full));
}

#[test]
fn csv_and_human_outputs() {
    let r = run(&[
        "scan", "--spec", "2*x", "--H", "1", "--range", "1..3", "--kind", "even", "--output", "csv",
    ]);
    assert_eq!(r.stdout, "n,floors\n1,2 4\n2,4 6\n3,6 8\n");
    let h = run(&["oracle", "--a", "2", "--len", "3", "--output", "human"]);
    assert!(h.stdout.contains("size 2"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# defaults for this run\nspec = x^(3/2)\noutput = csv").unwrap();
    let path = file.path().to_path_buf();
    let r = run_cfg(&["eval", "--n", "10", "--derivative", "0"], Some(path.clone()));
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.starts_with("n,derivative,floor"));
    let r = run_cfg(
        &["eval", "--n", "10", "--derivative", "0", "--output", "json"],
        Some(path),
    );
    assert_eq!(r.record()["points"][0]["floor"], "31");
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["bogus"]).code, EXIT_USAGE);
    assert_eq!(run(&["eval", "--n", "3"]).code, EXIT_USAGE);
    assert_eq!(run(&["eval", "--spec", "x^(", "--n", "3"]).code, EXIT_USAGE);
    assert_eq!(run(&["seek", "--spec", "x", "--L", "1"]).code, EXIT_USAGE);
    assert_eq!(
        run(&["seek", "--spec", "x^(3/2)", "--L", "1", "--retries", "101"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["eval", "--spec", "x", "--n", "3", "--precision-cap", "40000"]).code,
        EXIT_USAGE
    );
    let help = run(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("oracle"));
}
