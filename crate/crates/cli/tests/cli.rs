use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_defmatch"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn defmatch")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn four_cycle_gets_a_perfect_matching() {
    let g = fixture("four_cycle.json");
    let out = run(&["match", "--input", path_str(&g), "--K", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["size"], 2);
    assert_eq!(v["K"], 1);
}

#[test]
fn match_output_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    let g = fixture("four_cycle.json");
    let out = run(&["match", "--input", path_str(&g), "--K", "1", "-o", path_str(&m)]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["verify", "--input", path_str(&g), "--input-matching", path_str(&m), "--K", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ok"], true);
    assert_eq!(v["matched_pairs"], 2);
}

#[test]
fn corrupted_matching_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("bad.json");
    // q sends 0 to 3, which p already hits from 1.
    std::fs::write(
        &m,
        r#"[{"piece":0,"word":[["p",1]],"domain":[0,1]},{"piece":0,"word":[["q",1]],"domain":[0]}]"#,
    )
    .unwrap();
    let out = run(&["verify", "--input", path_str(&fixture("four_cycle.json")), "--input-matching", path_str(&m)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let clauses: Vec<&str> = v["violations"].as_array().unwrap().iter().map(|x| x["clause"].as_str().unwrap()).collect();
    assert!(clauses.contains(&"images-overlap"), "{clauses:?}");
}

#[test]
fn short_path_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("half.json");
    std::fs::write(&m, r#"[{"piece":0,"word":[["p",1]],"domain":[0]}]"#).unwrap();
    let out = run(&["verify", "--input", path_str(&fixture("four_cycle.json")), "--input-matching", path_str(&m), "--K", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["ok"], false);
    assert!(v["short_path"].is_array());
}

#[test]
fn hilbert_hotel_is_paradoxical() {
    let out = run(&["tarski", "--preset", "hilbert-hotel"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verdict"], "paradoxical");
    assert_eq!(v["obstruction"]["contradiction"], true);
    assert_eq!(v["leq_zero"].as_array().unwrap().len(), 3);
}

#[test]
fn same_seed_gives_identical_bytes() {
    for args in [
        vec!["--seed", "7", "gen", "--k", "3", "--size", "12", "--pieces", "3"],
        vec!["--seed", "7", "bound", "--k", "2", "--size", "16", "--count", "4"],
        vec!["--seed", "7", "tarski", "--preset", "one-ended-path", "--samples", "20"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn generated_graphs_validate_and_match() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..4 {
        let g = dir.path().join(format!("g{seed}.json"));
        let m = dir.path().join(format!("m{seed}.json"));
        let s = seed.to_string();
        let out = run(&["--seed", &s, "gen", "--k", "3", "--size", "15", "--pieces", "3", "-o", path_str(&g)]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(run(&["validate", "--input", path_str(&g)]).status.code(), Some(0));
        assert_eq!(run(&["match", "--input", path_str(&g), "--K", "2", "-o", path_str(&m)]).status.code(), Some(0));
        let out = run(&["verify", "--input", path_str(&g), "--input-matching", path_str(&m), "--K", "2"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn presets_round_trip_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["four-cycle", "one-ended-path", "hilbert-hotel", "zigzag"] {
        let g = dir.path().join(format!("{name}.json"));
        assert_eq!(run(&["gen", "--preset", name, "-o", path_str(&g)]).status.code(), Some(0));
        let out = run(&["validate", "--input", path_str(&g)]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(json(&out)["valid"], true);
    }
}

#[test]
fn bound_rows_pass() {
    let out = run(&["bound", "--k", "3", "--size", "24", "--m", "3/2", "--count", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("instance,k,m,K,V,M,Y0,y0_bound,berge_bound,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn embedding_of_naturals_into_evens() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("emb.json");
    std::fs::write(
        &input,
        r#"{"universe":{"kind":"affine_nat","generators":[{"kind":"affine","label":"d","a":2,"b":0}]},
            "x":{"T":0,"P":1,"R":[0]},"y":{"T":0,"P":2,"R":[0]}}"#,
    )
    .unwrap();
    let out = run(&["embed", "--input", path_str(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["found"], true);
    assert_eq!(v["witness"]["pieces"][0]["word"][0][0], "d");
}

#[test]
fn cancel_recovers_a_single_copy() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cancel.json");
    let g: Value = serde_json::from_str(&std::fs::read_to_string(fixture("four_cycle.json")).unwrap()).unwrap();
    let body = serde_json::json!({
        "universe": g["universe"],
        "k": 2,
        "a": [0],
        "b": [2],
        // copy t of x is 2x + t, so A is {0, 1} and B is {4, 5}
        "theta": {"source": [0, 1], "target": [4, 5], "pieces": [
            {"set": [0], "word": [["p@0>0", 1]]},
            {"set": [1], "word": [["p@1>1", 1]]}
        ]}
    });
    std::fs::write(&input, body.to_string()).unwrap();
    let out = run(&["cancel", "--input", path_str(&input), "--m", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["Y0"], serde_json::json!([]));
    assert_eq!(v["witness"]["target"], serde_json::json!([2]));
}

#[test]
fn oracle_exports_and_rereads_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("e.txt");
    let g = fixture("four_cycle.json");
    assert_eq!(run(&["oracle", "--input", path_str(&g), "--export", "-o", path_str(&edges)]).status.code(), Some(0));
    let out = run(&["oracle", "--input", path_str(&edges)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["max_matching"], 2);
}

#[test]
fn exit_codes_distinguish_usage_and_resource() {
    assert_eq!(run(&["gen", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["match", "--input", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("path.json");
    assert_eq!(run(&["gen", "--preset", "one-ended-path", "-o", path_str(&g)]).status.code(), Some(0));
    let out = run(&["--cap-sequences", "1", "match", "--input", path_str(&g), "--K", "3"]);
    assert_eq!(out.status.code(), Some(3));
}
