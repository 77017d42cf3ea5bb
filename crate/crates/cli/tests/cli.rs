use std::path::PathBuf;
use std::process::Command;
use std::time::Duration;

use regel_cli::bench::{distinguishing_strings, run_bench, BenchConfig};
use regel_cli::e2e::{run_description, run_sketches, E2eConfig};
use regel_cli::{load_dir, RunReport};
use regel_core::automaton::equivalent;
use regel_core::nlp::{Grammar, Model};
use regel_core::regex::{is_match, parse_regex};
use regel_core::sketch::parse_sketch;
use regel_core::synthesis::{is_correct, Examples};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn regel(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_regel")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn synth_prints_results_and_honours_top_k() {
    let (code, out, _) = regel(&["synth", "?{<num>}", "-p", "12345", "-p", "98765", "-n", "1234", "--top-k", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    let r = parse_regex(out.trim()).unwrap();
    assert!(equivalent(&r, &parse_regex("Repeat(<num>,5)").unwrap()).unwrap());
}

#[test]
fn exit_codes() {
    let (code, _, err) = regel(&["synth", "Concat(?{<num>},", "-p", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("offset 16"), "{err}");
    // a positive the sketch cannot produce
    assert_eq!(regel(&["synth", "Repeat(<num>,2)", "-p", "a"]).0, 1);
    assert_eq!(regel(&["synth", "?{<num>}", "-p", "a", "-n", "a"]).0, 2);
    assert_eq!(regel(&["match", "Contains(<,>)", "a,b", "ab"]), (0, "true\ta,b\nfalse\tab\n".into(), String::new()));
    assert_eq!(regel(&["train", "data.jsonl", "--grammar", "/nonexistent/grammar"]).0, 2);
    assert_eq!(regel(&["bogus"]).0, 2);
}

#[test]
fn state_cap_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_regel"))
        .args(["match", "<num>", "1"])
        .env("REGEL_MAX_STATES", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn train_writes_a_model_and_prints_losses() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.txt");
    let data = root().join("data/toy.jsonl");
    let (code, out, _) = regel(&["train", data.to_str().unwrap(), "-o", model.to_str().unwrap(), "--epochs", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("epoch")).count(), 2);
    let m: Model = std::fs::read_to_string(&model).unwrap().parse().unwrap();
    assert!(!m.weights.is_empty());
    let (code, out, _) = regel(&["parse", "contains a comma", "--model", model.to_str().unwrap(), "--limit", "1"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("Contains(?{<,>})\n"), "{out}");
}

fn comma_examples() -> Examples {
    Examples::new(["a,b", "1,", ",x"], ["ab", "1.2", "x;y"]).unwrap()
}

#[test]
fn e2e_is_independent_of_the_pool_size() {
    let (g, m) = (Grammar::demo(), Model::default());
    let ex = comma_examples();
    let run = |parallel| {
        let cfg = E2eConfig { parallel, timeout: Duration::from_secs(60), top_k: 3, ..E2eConfig::default() };
        run_description("contains a comma or a dot", &ex, &g, &m, &cfg)
    };
    let (a, b) = (run(1), run(3));
    assert!(!a.results.is_empty());
    assert_eq!(a.results, b.results);
    for t in &a.results {
        assert!(is_correct(&t.regex, &ex));
        assert!(regel_core::sketch::member(&t.regex, &t.sketch));
    }
}

#[test]
fn e2e_falls_back_to_a_bare_hole_and_respects_a_zero_budget() {
    let cfg = E2eConfig { parallel: 1, top_k: 1, ..E2eConfig::default() };
    let ex = comma_examples();
    let out = run_description("zzz qqq", &ex, &Grammar::demo(), &Model::default(), &cfg);
    assert!(out.fallback);
    assert!(is_correct(&out.results[0].regex, &ex));

    let zero = E2eConfig { timeout: Duration::ZERO, ..cfg };
    let out = run_sketches(vec![parse_sketch("?{<,>}").unwrap()], &ex, &zero);
    assert!(out.results.is_empty() && out.timed_out);
    let (code, out, _) = regel(&["e2e", "contains a comma", "-p", "a,b", "-n", "ab", "--timeout", "0"]);
    assert_eq!((code, out.as_str()), (1, ""));
}

#[test]
fn distinguishing_strings_are_distinct_and_disagree() {
    let a = parse_regex("StartsWith(<hex>)").unwrap();
    let b = parse_regex("RepeatRange(<hex>,2,4)").unwrap();
    let s = distinguishing_strings(&a, &b, 3).unwrap();
    assert_eq!(s.len(), 3);
    assert!(s[0].len() <= s[1].len() && s[1].len() <= s[2].len());
    for x in &s {
        assert_ne!(is_match(&a, x), is_match(&b, x), "{x}");
    }
    assert!(distinguishing_strings(&a, &a, 2).unwrap().is_empty());
}

fn desk_report(timing: bool) -> RunReport {
    let benches = load_dir(&root().join("benchmarks/desk")).unwrap();
    let cfg = BenchConfig { timing, ..BenchConfig::default() };
    run_bench(&benches, &Grammar::demo(), &Model::default(), &cfg)
}

#[test]
fn bench_reports_are_reproducible() {
    let a = serde_json::to_string_pretty(&desk_report(false)).unwrap();
    let b = serde_json::to_string_pretty(&desk_report(false)).unwrap();
    assert_eq!(a, b);
    assert!(!a.contains("\"ms\""));
    let timed = desk_report(true);
    assert!(timed.mean_ms_per_solved.is_some());
}

#[test]
fn bench_cli_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let desk = root().join("benchmarks/desk");
    let (code, out, _) = regel(&["bench", desk.to_str().unwrap(), "--json", json.to_str().unwrap(), "--no-timing"]);
    assert_eq!(code, 0);
    assert!(out.contains("solved per iteration"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["benchmarks"].as_array().unwrap().len(), 10);
}

#[test]
fn benchmarks_without_ground_truth_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let b = r#"{"id": "free", "description": "contains a comma", "positives": ["a,b"], "negatives": ["ab"]}"#;
    std::fs::write(dir.path().join("free.json"), b).unwrap();
    let benches = load_dir(dir.path()).unwrap();
    let r = run_bench(&benches, &Grammar::demo(), &Model::default(), &BenchConfig::default());
    assert_eq!(r.skipped, vec!["free".to_string()]);
    assert!(r.benchmarks.is_empty());

    std::fs::write(dir.path().join("bad.json"), r#"{"id": "bad", "positives": [], "negatives": []}"#).unwrap();
    assert!(load_dir(dir.path()).is_err());
}
