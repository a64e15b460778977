use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn cdw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdw")).args(args).output().expect("cdw runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn solve_to(dir: &TempDir, graph: &Path, algorithm: &str, extra: &[&str]) -> (PathBuf, Value) {
    let path = dir.path().join(format!("{algorithm}.json"));
    let mut args = vec!["solve", graph.to_str().unwrap(), "-a", algorithm, "-q", "-o", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = cdw(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    (path, doc)
}

fn removed(doc: &Value) -> Vec<[u64; 2]> {
    doc["removed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| [p[0].as_u64().unwrap(), p[1].as_u64().unwrap()])
        .collect()
}

#[test]
fn generate_is_deterministic_per_seed() {
    let a = cdw(&["generate", "--preset", "1a", "--constraints", "5", "--seed", "3", "-q"]);
    let b = cdw(&["generate", "--preset", "1a", "--constraints", "5", "--seed", "3", "-q"]);
    let c = cdw(&["generate", "--preset", "1a", "--constraints", "5", "--seed", "4", "-q"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 100);
    assert_eq!(doc["constraints"].as_array().unwrap().len(), 5);
}

#[test]
fn solve_reproduces_the_fan_example() {
    let dir = TempDir::new().unwrap();
    let graph = fixture("fan-two-constraints.json");

    let (_, bf) = solve_to(&dir, &graph, "brute-force", &[]);
    assert_eq!(bf["utility"], 2.0);
    assert_eq!(bf["original_utility"], 6.0);
    assert_eq!(removed(&bf), vec![[1, 0]]);

    let (_, mc) = solve_to(&dir, &graph, "remove-min-cuts", &[]);
    assert_eq!(mc["utility"], 1.0);
}

#[test]
fn first_edge_loses_everything_on_the_branch() {
    let dir = TempDir::new().unwrap();
    let (_, doc) = solve_to(&dir, &fixture("branch.json"), "remove-first-edge", &[]);
    assert_eq!(doc["utility"], 0.0);
    assert_eq!(removed(&doc), vec![[1, 2]]);
}

#[test]
fn random_solver_repeats_under_a_seed() {
    let graph = fixture("retail.json");
    let run = || cdw(&["solve", graph.to_str().unwrap(), "-a", "remove-random-edge", "--seed", "5", "-q"]);
    let strip = |o: Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["runtime_ms"] = Value::Null;
        v
    };
    assert_eq!(strip(run()), strip(run()));
}

#[test]
fn verify_accepts_round_trip_and_flags_tampering() {
    let dir = TempDir::new().unwrap();
    let graph = fixture("retail.json");
    let g = graph.to_str().unwrap();
    let (sol, doc) = solve_to(&dir, &graph, "remove-min-mc", &[]);
    assert_eq!(code(&cdw(&["verify", g, sol.to_str().unwrap(), "-q"])), 0);

    let write = |name: &str, v: &Value| {
        let p = dir.path().join(name);
        fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
        p
    };

    let mut short = doc.clone();
    short["removed"].as_array_mut().unwrap().pop();
    let p = write("short.json", &short);
    assert_eq!(code(&cdw(&["verify", g, p.to_str().unwrap(), "-q"])), 1);

    let mut inflated = doc.clone();
    inflated["utility"] = Value::from(doc["utility"].as_f64().unwrap() + 1.0);
    let p = write("inflated.json", &inflated);
    assert_eq!(code(&cdw(&["verify", g, p.to_str().unwrap(), "-q"])), 5);

    let other = fixture("branch.json");
    assert_eq!(code(&cdw(&["verify", other.to_str().unwrap(), sol.to_str().unwrap(), "-q"])), 2);

    let mut bogus = doc.clone();
    bogus["removed"].as_array_mut().unwrap().push(serde_json::json!([20, 0]));
    let p = write("bogus.json", &bogus);
    assert_eq!(code(&cdw(&["verify", g, p.to_str().unwrap(), "-q"])), 2);
}

#[test]
fn budgets_exit_with_three() {
    let graph = fixture("retail.json");
    let g = graph.to_str().unwrap();
    assert_eq!(code(&cdw(&["solve", g, "-a", "brute-force", "--candidate-budget", "1", "-q"])), 3);
    assert_eq!(code(&cdw(&["solve", g, "-a", "remove-min-mc", "--path-budget", "1", "-q"])), 3);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&cdw(&["solve", "/nonexistent.json", "-a", "brute-force"])), 2);
    assert_eq!(code(&cdw(&["generate", "--preset", "9z"])), 2);
    assert_eq!(code(&cdw(&["bench", "--preset", "1a", "--constraints", "99"])), 2);
}

#[test]
fn bench_csv_is_byte_identical_without_timing() {
    let args = [
        "bench", "--preset", "1a", "--constraints", "1-3", "--trials", "2", "--seed", "11", "--no-timing", "-q",
    ];
    let a = cdw(&args);
    let b = cdw(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);

    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "dataset,algorithm,n_constraints,n_vertices,path_length,n_paths,trial,seed,runtime_ms,utility_abs,utility_pct,status"
    );
    assert_eq!(lines.count(), 3 * 2 * 5);
}

#[test]
fn bench_artifacts_verify() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("rows.csv");
    let out = cdw(&[
        "bench", "--preset", "1c", "--constraints", "2", "--trials", "2", "-q",
        "--artifacts", dir.path().to_str().unwrap(), "-o", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    let entries = manifest.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for entry in entries {
        let graph = dir.path().join(entry["graph"].as_str().unwrap());
        for sol in entry["solutions"].as_object().unwrap().values() {
            let sol = dir.path().join(sol.as_str().unwrap());
            assert_eq!(code(&cdw(&["verify", graph.to_str().unwrap(), sol.to_str().unwrap(), "-q"])), 0);
        }
    }
}

#[test]
fn presets_lists_every_dataset() {
    let out = cdw(&["presets"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["1a", "1b", "1c", "2", "3"] {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(name)), "{text}");
    }
}

#[test]
fn generate_writes_files_and_tiny_instances() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("g.json");
    let out = cdw(&["generate", "--preset", "1a", "--constraints", "10", "--seed", "1", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 100);

    let out = cdw(&["generate", "--vertices", "5", "--stages", "3", "--constraints", "1", "--seed", "7", "-q"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 5);
    assert_eq!(doc["constraints"].as_array().unwrap().len(), 1);
    let tiny = dir.path().join("tiny.json");
    fs::write(&tiny, &out.stdout).unwrap();
    assert_eq!(code(&cdw(&["solve", tiny.to_str().unwrap(), "-a", "brute-force", "-q"])), 0);
}
