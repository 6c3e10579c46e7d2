mod common;

use common::{check_case, fusion, CASES};
use serde_json::Value;

fn envelope_of(stdout: &str) -> Value {
    let v: Value = serde_json::from_str(stdout).expect("stdout is one JSON document");
    assert_eq!(v["schema"], "fusionlab/1");
    assert!(v["diagnostics"].is_array());
    v
}

#[test]
fn goldens_match_library_and_cli() {
    let failures: Vec<String> = CASES.iter().filter_map(|c| check_case(c).err()).collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn json_is_deterministic() {
    let args = ["freq", "ten_pow_n", "--horizon", "5", "--report", "--json"];
    assert_eq!(fusion(&args).stdout, fusion(&args).stdout);
}

#[test]
fn matrix_entries_are_strings() {
    let run = fusion(&["matrix", "ten_pow_n", "--from", "2", "--to", "3", "--json"]);
    let v = envelope_of(&run.stdout);
    assert_eq!(v["result"]["entries"], serde_json::json!([["1000", "1"], ["1", "1000"]]));
}

#[test]
fn expand_prints_the_word() {
    let run = fusion(&["expand", "thue_morse", "--supertile", "S1", "--level", "3"]);
    assert_eq!((run.code, run.stdout.as_str()), (0, "ABBABAAB\n"));
}

#[test]
fn fibonacci_frequency_of_a() {
    let run = fusion(&["freq", "fibonacci", "--level", "0", "--horizon", "20", "--json"]);
    let v = envelope_of(&run.stdout);
    let a = &v["result"]["intervals"][0];
    assert_eq!(a["label"], "A");
    let (lo, hi) = (a["lo_approx"].as_f64().unwrap(), a["hi_approx"].as_f64().unwrap());
    assert!(lo <= 0.618034 + 1e-6 && 0.618034 - 1e-6 <= hi);
    assert!(hi - lo < 1e-6);
}

#[test]
fn examples_list_and_show() {
    let run = fusion(&["examples"]);
    assert_eq!(run.stdout.lines().count(), 6);
    let run = fusion(&["examples", "--show", "fiblike"]);
    assert!(run.stdout.contains("ispow(3,n)"));
    let run = fusion(&["examples", "--show", "nope", "--json"]);
    assert_eq!(run.code, 1);
    let v = envelope_of(&run.stdout);
    assert_eq!(v["result"], Value::Null);
    assert_eq!(v["diagnostics"][0]["kind"], "unknown_rule");
}

#[test]
fn usage_errors_exit_two_with_an_envelope() {
    let run = fusion(&["matrix", "ten_pow_n", "--json"]);
    assert_eq!(run.code, 2);
    assert_eq!(envelope_of(&run.stdout)["diagnostics"][0]["kind"], "usage");
    let run = fusion(&["frobnicate", "--json"]);
    assert_eq!(run.code, 2);
    envelope_of(&run.stdout);
    let run = fusion(&["matrix", "ten_pow_n", "--from", "x", "--to", "1"]);
    assert_eq!(run.code, 2);
    assert!(run.stdout.is_empty());
}

#[test]
fn domain_errors_exit_one_with_an_envelope() {
    let cases: &[&[&str]] = &[
        &["matrix", "ten_pow_n", "--from", "3", "--to", "1", "--json"],
        &["expand", "fibonacci", "--supertile", "Z", "--level", "2", "--json"],
        &["expand", "fibonacci", "--supertile", "A", "--level", "40", "--max-cells", "1000", "--json"],
        &["admissible", "chair", "--word", "A.B", "--json"],
        &["matrix", "no/such/file.fusion", "--from", "0", "--to", "1", "--json"],
    ];
    for args in cases {
        let run = fusion(args);
        assert_eq!(run.code, 1, "{args:?}");
        let v = envelope_of(&run.stdout);
        assert_eq!(v["result"], Value::Null);
        assert!(!v["diagnostics"].as_array().unwrap().is_empty());
    }
}

#[test]
fn rule_files_take_precedence_and_report_spans() {
    let dir = std::env::temp_dir().join(format!("fusion-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.fusion");
    std::fs::write(&bad, "rule r dim 1\nprototile A\nlevel default:\n  A = A $\n").unwrap();
    let run = fusion(&["parse", bad.to_str().unwrap(), "--json"]);
    assert_eq!(run.code, 1);
    let d = &envelope_of(&run.stdout)["diagnostics"][0];
    assert_eq!((d["span"]["line"].as_u64(), d["span"]["column"].as_u64()), (Some(4), Some(9)));

    let run = fusion(&["parse", bad.to_str().unwrap()]);
    assert!(run.stderr.contains("4:9"));

    let good = dir.join("fibonacci");
    std::fs::write(&good, "rule mine dim 1\nprototile A\nlevel default:\n  A = A A\n").unwrap();
    let run = fusion(&["parse", "--rule", good.to_str().unwrap(), "--json"]);
    assert_eq!(envelope_of(&run.stdout)["result"]["name"], "mine");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn render_writes_files() {
    let dir = std::env::temp_dir().join(format!("fusion-render-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let svg = dir.join("chair.svg");
    let run = fusion(&["render", "chair", "--supertile", "NE", "--level", "2", "--out", svg.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml"));
    assert_eq!(text.matches("<rect").count(), 48);
    let txt = dir.join("chair.txt");
    fusion(&["render", "chair", "--supertile", "SW", "--level", "1", "--out", txt.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&txt).unwrap(), "CC..\nCA..\nAAAB\nAABB\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn two_dimensional_patches_on_the_command_line() {
    let run = fusion(&["admissible", "chair", "--word", "A./AA", "--level", "2", "--json"]);
    assert_eq!(run.code, 0);
    assert_eq!(envelope_of(&run.stdout)["result"]["witness"]["level"], 0);
    let run = fusion(&["patchfreq", "fib2d", "--word", "AA", "--level", "2", "--horizon", "6"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
}
