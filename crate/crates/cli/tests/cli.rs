use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn c2() -> Command {
    let mut c = Command::cargo_bin("c2").unwrap();
    c.current_dir(root()).env_remove("C2_BASE");
    c
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/records.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

/// Runs with json-lines output, checks the exit code and validates every
/// line against the schema.
fn json_lines(args: &[&str], code: i32) -> Vec<Value> {
    let out = c2().args(args).args(["--format", "json-lines"]).assert().code(code).get_output().stdout.clone();
    let v = validator();
    String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| {
            let rec: Value = serde_json::from_str(l).unwrap();
            if let Err(e) = v.validate(&rec) {
                panic!("{l}: {e}");
            }
            rec
        })
        .collect()
}

#[test]
fn empty_file_is_an_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("empty.c2");
    std::fs::write(&f, "").unwrap();
    let recs = json_lines(&["check", f.to_str().unwrap()], 0);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["record"], "summary");
    assert_eq!(recs[0]["items"], 0);
}

#[test]
fn unbound_covariable_is_named_with_its_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.c2");
    std::fs::write(&f, "term t [x:+A] : #\n  = <x | kappa : A>\n").unwrap();
    let out = c2().args(["check", f.to_str().unwrap()]).assert().code(1).get_output().stdout.clone();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("kappa") && text.contains(":2:10:"), "{text}");
    let recs = json_lines(&["check", f.to_str().unwrap()], 1);
    assert_eq!(recs[0]["record"], "parse-error");
    assert_eq!(recs[0]["class"], "scope");
    assert_eq!((recs[0]["line"].as_u64(), recs[0]["column"].as_u64()), (Some(2), Some(10)));
}

#[test]
fn corpus_checks_in_input_order() {
    let recs = json_lines(&["check", "corpus/positive/structural.c2", "corpus/positive/demos.c2"], 0);
    let names: Vec<&str> = recs.iter().filter_map(|r| r["name"].as_str()).collect();
    assert_eq!(names.first(), Some(&"ident_right"));
    assert_eq!(names.last(), Some(&"lafont_right"));
    let again = json_lines(&["check", "corpus/positive/structural.c2", "corpus/positive/demos.c2"], 0);
    assert_eq!(recs, again);
}

#[test]
fn negative_fixture_reports_its_class() {
    let recs = json_lines(&["check", "corpus/negative/type-mismatch.c2"], 1);
    assert_eq!(recs[0]["status"], "error");
    assert_eq!(recs[0]["class"], "type-mismatch");
}

#[test]
fn interp_tables_match_the_walking_arrow() {
    let recs = json_lines(
        &["interp", "corpus/positive/structural.c2", "--decl", "ident_right", "--base", "corpus/bases/mixed.json"],
        0,
    );
    let t = &recs[0]["table"];
    let sizes: Vec<usize> = t["points"].as_array().unwrap().iter().map(|p| p["elements"].as_array().unwrap().len()).collect();
    assert_eq!(sizes, vec![1, 0, 1, 1]);
}

#[test]
fn interp_emits_cells_for_reductions() {
    let recs = json_lines(&["interp", "corpus/positive/reductions.c2", "--decl", "not_step"], 0);
    assert_eq!(recs[0]["record"], "cell");
}

#[test]
fn verify_passes_on_the_corpus() {
    let recs = json_lines(&["verify", "corpus/positive/reductions.c2", "--base", "corpus/bases/mixed.json"], 0);
    assert!(recs.iter().filter(|r| r["record"] == "property").all(|r| r["passed"] == true));
}

#[test]
fn corrupted_category_reports_the_witness() {
    let recs = json_lines(&["verify", "--category", "corpus/cats/broken-assoc.json"], 1);
    assert_eq!(recs[0]["valid"], false);
    assert!(recs[0]["witness"].as_str().unwrap().contains("associative"));
}

#[test]
fn base_from_the_environment() {
    let out = c2()
        .env("C2_BASE", "corpus/bases/discrete2.json")
        .args(["interp", "corpus/positive/structural.c2", "--decl", "ident_right", "--format", "json-lines"])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let first: Value = serde_json::from_str(String::from_utf8(out).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["table"]["points"].as_array().unwrap().len(), 4);
}

#[test]
fn usage_and_io_errors_exit_2() {
    c2().args(["check"]).assert().code(2);
    c2().args(["check", "no/such/file.c2"]).assert().code(2);
    c2().args(["frobnicate"]).assert().code(2);
    c2().args(["interp", "corpus/positive/demos.c2", "--mode", "set"]).assert().code(2);
    c2().args(["interp", "corpus/positive/demos.c2", "--base", "corpus/bases/mixed.json", "--max-objects", "1"])
        .assert()
        .code(2);
}

#[test]
fn span_mode_needs_discrete_bases() {
    c2().args(["interp", "corpus/positive/demos.c2", "--mode", "span", "--base", "corpus/bases/mixed.json"])
        .assert()
        .code(2);
    json_lines(&["interp", "corpus/positive/structural.c2", "--mode", "span", "--base", "corpus/bases/discrete2.json"], 0);
}

#[test]
fn demos() {
    let l = json_lines(&["demo", "lafont"], 0);
    assert_eq!(l[0]["well_typed"], true);
    assert_eq!(l[0]["distinct_reducts"], true);
    let n = json_lines(&["demo", "nondegeneracy"], 0);
    assert_eq!(n[0]["distinct"], true);
    let r = json_lines(&["demo", "rel-collapse", "--pairs", "8", "corpus/positive/reductions.c2"], 0);
    assert_eq!(r[0]["distinct"], 0);
    assert_eq!(r[0]["and_or_coincide"], true);
    let n = json_lines(&["demo", "nondegeneracy", "--pairs", "4", "corpus/positive/reductions.c2"], 0);
    assert_eq!(n[0]["searched"], n[0]["from_corpus"].as_u64().unwrap() + 4);
    // rel needs discrete bases
    c2().args(["demo", "rel-collapse", "--base", "corpus/bases/mixed.json"]).assert().code(2);
    // over the point the witness collapses
    json_lines(&["demo", "nondegeneracy", "--base", "corpus/bases/terminal.json"], 1);
}
