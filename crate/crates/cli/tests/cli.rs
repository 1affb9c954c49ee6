use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nlgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlgame"))
        .args(args)
        .env_remove("NLGAME_NPA_LEVEL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let o = nlgame(args);
    assert!(o.status.success(), "{args:?}: {}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn chsh_report_table() {
    let o = nlgame(&["report", "all", "--game", "chsh", "--npa-level", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let values: Vec<&str> = out
        .lines()
        .filter(|l| l.matches(" | ").count() == 2)
        .skip(1)
        .map(|l| l.rsplit(" | ").next().unwrap().trim())
        .collect();
    assert_eq!(values, ["0.75 (3/4)", "0.853553", "0.853554", "1.0"]);
}

#[test]
fn magic_square_report_table() {
    let out = stdout(&nlgame(&["report", "all", "--game", "magic_square"]));
    assert!(out.contains("0.888889 (8/9)"), "{out}");
    assert_eq!(out.matches("| 1.0\n").count(), 3, "{out}");
    assert!(out.contains("pseudo_telepathy: true"));
}

#[test]
fn report_json_is_byte_stable() {
    let a = nlgame(&["report", "all", "--game", "ghz", "--json"]);
    let b = nlgame(&["report", "all", "--game", "ghz", "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["computations"].as_array().unwrap().len(), 4);
    assert_eq!(v["game"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn classical_json_shape() {
    let v = json_of(&["value", "classical", "--game", "chsh"]);
    assert_eq!(v["value"], "3/4");
    assert_eq!(v["value_float"], 0.75);
    assert_eq!(v["method"], "enumeration");
    assert!(v["witness"]["responses"].is_array());
}

#[test]
fn malformed_weight_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"parties":[{"questions":["0","1"],"answers":["0","1"]},{"questions":["0","1"],"answers":["0","1"]}],
            "pi":[{"q":["0","0"],"w":"1/4"},{"q":["0","1"],"w":"1/4"},{"q":["1","0"],"w":"1/4"},{"q":["1","1"],"w":"1/zero"}],
            "predicate":{"type":"xor","f":[0,0,0,1]}}"#,
    );
    let o = nlgame(&["value", "classical", "--game-file", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("1/zero"), "{}", stderr(&o));
}

#[test]
fn weights_must_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "short.json",
        r#"{"parties":[{"questions":["0"],"answers":["0","1"]},{"questions":["0"],"answers":["0","1"]}],
            "pi":[{"q":["0","0"],"w":"1/2"}],"predicate":{"type":"xor","f":[0]}}"#,
    );
    let o = nlgame(&["value", "classical", "--game-file", &bad]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_flag_exits_one() {
    let o = nlgame(&["value", "classical", "--game", "chsh", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(nlgame(&["value", "classical"]).status.code(), Some(1));
}

#[test]
fn non_convergence_exits_two() {
    let o = nlgame(&["value", "npa", "--game", "chsh", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("residual"));
}

#[test]
fn npa_bases_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = dir.path().join("a.json");
    let d2 = dir.path().join("b.json");
    let tsirelson = 0.5 + 0.5 / 2f64.sqrt();
    for (basis, dump) in [("dichotomic", &d1), ("dichotomic", &d2)] {
        let v = json_of(&[
            "value", "npa", "--game", "chsh", "--level", "1", "--basis", basis,
            "--dump", dump.to_str().unwrap(),
        ]);
        assert!((v["value_float"].as_f64().unwrap() - tsirelson).abs() < 1e-5);
        assert_eq!(v["details"]["basis"], basis);
    }
    assert_eq!(std::fs::read(&d1).unwrap(), std::fs::read(&d2).unwrap());
    let dump: Value = serde_json::from_slice(&std::fs::read(&d1).unwrap()).unwrap();
    assert_eq!(dump["monomials"][0], "I");
}

#[test]
fn npa_level_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_nlgame"))
        .args(["value", "npa", "--game", "chsh"])
        .env("NLGAME_NPA_LEVEL", "2")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["details"]["level"], 2);
    let v = json_of(&["value", "npa", "--game", "chsh"]);
    assert_eq!(v["details"]["level"], 1);
}

#[test]
fn quantum_strategy_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = nonlocal_games::formats::strategy_to_json(&nonlocal_games::quantum::chsh_strategy());
    let path = write(dir.path(), "s.json", &s);
    let v = json_of(&["eval", "quantum", "--game", "chsh", "--strategy", &path]);
    assert_eq!(v["method"], "born-rule");
    assert!((v["value_float"].as_f64().unwrap() - 0.853553390593).abs() < 1e-12);
    let v = json_of(&["eval", "quantum", "--game", "chsh", "--strategy", &path, "--seesaw", "--seed", "3"]);
    assert_eq!(v["method"], "seesaw");
}

#[test]
fn bell_and_membership() {
    let v = json_of(&["bell", "eval", "--functional", "chsh", "--game", "chsh"]);
    assert!((v["value_float"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert_eq!(v["details"]["local_bound"], 2.0);
    assert_eq!(v["details"]["affine_to_game"]["offset"], 0.5);
    let m = json_of(&["membership", "--game", "chsh"]);
    assert_eq!(m["result"], "separated");
    assert!((m["local_bound"].as_f64().unwrap() - 2.0).abs() < 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let beh = write(
        dir.path(),
        "p.json",
        r#"[{"q":["0","0"],"a":["0","0"],"p":1},{"q":["0","1"],"a":["0","0"],"p":1},
            {"q":["1","0"],"a":["0","0"],"p":1},{"q":["1","1"],"a":["0","0"],"p":1}]"#,
    );
    let m = json_of(&["membership", "--game", "chsh", "--behavior", &beh]);
    assert_eq!(m["result"], "in_local");
    let func = write(
        dir.path(),
        "f.json",
        r#"{"alpha":[],"beta":[{"q":["0","0"],"c":1},{"q":["0","1"],"c":1},{"q":["1","0"],"c":1},{"q":["1","1"],"c":-1}]}"#,
    );
    let v = json_of(&["bell", "eval", "--functional", &func, "--game", "chsh", "--behavior", &beh]);
    assert_eq!(v["value_float"], 2.0);
}

#[test]
fn coloring_from_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(
        dir.path(),
        "k3.json",
        r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"],["a","c"]]}"#,
    );
    let v = json_of(&["value", "classical", "--game", "coloring", "--graph", &g, "--colors", "2"]);
    assert_eq!(v["value"], "7/9");
    let v = json_of(&["value", "classical", "--game", "coloring", "--graph", &g, "--colors", "3"]);
    assert_eq!(v["value"], "1");
    let o = nlgame(&["value", "classical", "--game", "coloring", "--colors", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn catalog_and_hardy() {
    let list = json_of(&["catalog", "list", "--json"]);
    let names: Vec<&str> = list.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["chsh", "ghz", "magic_square", "coloring"]);
    let h = json_of(&["hardy", "check"]);
    assert!((h["target"].as_f64().unwrap() - 0.0625).abs() < 1e-9);
    let h = json_of(&["hardy", "optimize", "--restarts", "5", "--seed", "1"]);
    assert!(h["probability"].as_f64().unwrap() >= 0.0625);
}
