use std::path::PathBuf;
use std::process::{Command, Output};

fn giry(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_giry")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn all_is_byte_identical_across_runs() {
    let a = giry(&["all", "--seed", "0"]);
    let b = giry(&["all", "--seed", "0"]);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    // timing goes to stderr only
    assert!(!String::from_utf8_lossy(&a.stdout).contains("wall time"));
    assert!(String::from_utf8_lossy(&a.stderr).contains("wall time"));
}

#[test]
fn worked_distance_pair() {
    let out = giry(&["distance", "--method", "both", "--input", &data("distance_pair.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["values"]["lp"], "1/3");
    assert_eq!(r["values"]["subsets"], "1/3");
    let out = giry(&["distance", "--method", "subsets", "--input", &data("distance_pair.json")]);
    let r = report(&out);
    assert_eq!(r["values"]["subsets"], "1/3");
    assert!(r["values"].get("lp").is_none());
}

#[test]
fn nonadditive_functional_exits_one_with_witness() {
    let out = giry(&["reconstruct", "--input", &data("nonadditive_functional.json")]);
    assert_eq!(out.status.code(), Some(1));
    let w = &report(&out)["checks"][0]["witnesses"][0];
    assert_eq!(w["kind"], "decomposition");
    assert_eq!(w["value"], "1/1");
    assert_eq!(w["sum"], "5/6");

    let out = giry(&["reconstruct", "--mode", "finitely_additive", "--input", &data("nonadditive_functional.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["checks"][0]["witnesses"][0]["kind"], "additivity");
}

#[test]
fn additive_functional_gives_measure() {
    let out = giry(&["reconstruct", "--input", &data("additive_functional.json")]);
    assert_eq!(out.status.code(), Some(0));
    let m = &report(&out)["values"]["measure"];
    assert_eq!(m["weights"]["0"], "2/3");
    assert_eq!(m["weights"]["1"], "1/3");
}

#[test]
fn bad_input_exits_two() {
    let dir = std::env::temp_dir().join(format!("giry-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases = [
        ("version.json", r#"{"format": 2, "algebra": {"points": ["a"], "family": []}}"#),
        ("missing.json", r#"{"algebra": {"points": ["a"], "family": []}}"#),
        ("truncated.json", r#"{"format": 1, "algebra": "#),
        ("range.json", r#"{"format": 1, "algebra": {"points": ["a"], "family": [[4]]}}"#),
        ("rational.json", r#"{"format": 1, "labels": ["a"], "p": ["1/0"], "q": ["1/1"]}"#),
    ];
    for (name, body) in cases {
        let path = dir.join(name);
        std::fs::write(&path, body).unwrap();
        let cmd = if name == "rational.json" { "distance" } else { "laws" };
        let out = giry(&[cmd, "--input", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let out = giry(&["laws", "--cases", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = giry(&["distance", "--method", "simplex"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lipschitz_map_input() {
    let dir = std::env::temp_dir().join(format!("giry-cli-map-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("map.json");
    std::fs::write(
        &path,
        r#"{"format": 1,
            "metric": {"points": ["x", "y"], "dist": [["0/1", "1/10"], ["1/10", "0/1"]]},
            "map": [["1/1", "0/1"], ["0/1", "1/1"]]}"#,
    )
    .unwrap();
    let out = giry(&["distance", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = &report(&out)["values"]["lipschitz"];
    assert_eq!(v["direct"], false);
    assert_eq!(v["subsets"], false);
    assert_eq!(v["witness"]["subset"], serde_json::json!([0]));
}

#[test]
fn text_format_and_output_file() {
    let dir = std::env::temp_dir().join(format!("giry-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.txt");
    let out = giry(&["integrate", "--cases", "20", "--format", "text", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("PASS integrals"));
}
