use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ensel::commands::load_matrix;
use ensel::matrix_csv::write_matrix;
use tempfile::TempDir;

fn ensel(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ensel"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SPEC: &str = "n_examples = 200\nn_predictors = 10\nseed = 4\n";

const RUN: &str = r#"
repetitions = 2
checkpoints = [10]

[input.synthetic]
n_examples = 300
n_predictors = 12
seed = 8

[grid]
measures = ["none", "cosine"]
epsilons = [0.01, 0.1, 0.25, 0.5]
"#;

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("spec.toml"), SPEC).unwrap();
    fs::write(dir.path().join("run.toml"), RUN).unwrap();
    dir
}

fn select(dir: &Path) -> PathBuf {
    let out = ensel(
        &[
            "select", "--config", "run.toml", "--out", "res", "--jobs", "2",
        ],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir.join("res/report.json")
}

#[test]
fn generate_writes_expected_shape() {
    let dir = workspace();
    let out = ensel(
        &["generate", "--config", "spec.toml", "--out", "a.csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("N=10"));
    let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 201);
    assert!(lines[0].starts_with("example_id,label,p000,"));
    // Label plus ten predictors after the example id.
    assert!(lines.iter().all(|l| l.split(',').count() == 12));
    assert!(text.ends_with('\n'));
}

#[test]
fn generate_is_reproducible_and_seed_overridable() {
    let dir = workspace();
    for (name, extra) in [("a.csv", None), ("b.csv", None), ("c.csv", Some("99"))] {
        let mut args = vec!["generate", "--config", "spec.toml", "--out", name];
        if let Some(seed) = extra {
            args.extend(["--seed", seed]);
        }
        assert_eq!(code(&ensel(&args, dir.path())), 0);
    }
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_ne!(read("a.csv"), read("c.csv"));
}

#[test]
fn generate_rejects_infeasible_balance() {
    let dir = workspace();
    fs::write(
        dir.path().join("bad.toml"),
        "n_examples = 50\npositive_fraction = 0.0\n",
    )
    .unwrap();
    let out = ensel(
        &["generate", "--config", "bad.toml", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("positive_fraction"),
        "{}",
        stderr(&out)
    );
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn generate_reports_io_failure() {
    let dir = workspace();
    let out = ensel(
        &[
            "generate",
            "--config",
            "spec.toml",
            "--out",
            "missing/dir/a.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn csv_round_trip_is_value_identical() {
    let dir = workspace();
    ensel(
        &["generate", "--config", "spec.toml", "--out", "a.csv"],
        dir.path(),
    );
    let first = fs::read(dir.path().join("a.csv")).unwrap();
    let matrix = load_matrix(&dir.path().join("a.csv")).unwrap();
    let mut again = Vec::new();
    write_matrix(&mut again, &matrix).unwrap();
    assert_eq!(again, first);
}

#[test]
fn select_writes_report_and_curves() {
    let dir = workspace();
    let report = select(dir.path());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["cells"].as_array().unwrap().len(), 8);
    let grid = [0.01, 0.1, 0.25, 0.5];
    for best in json["best_epsilon"].as_array().unwrap() {
        assert!(grid.contains(&best["epsilon"].as_f64().unwrap()));
    }
    for name in [
        "RL_greedy",
        "RL_diversity_cosine",
        "full_ensemble",
        "best_base",
    ] {
        let csv = fs::read_to_string(dir.path().join(format!("res/curves/{name}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("pool_size,mean,stderr,mean_size"));
        assert_eq!(lines.count(), 2, "{name}");
    }
}

#[test]
fn report_matches_published_schema() {
    let dir = workspace();
    let report = select(dir.path());
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let instance: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(&instance)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");

    let mut broken = instance.clone();
    broken["unexpected"] = serde_json::json!(1);
    assert!(!validator.is_valid(&broken));
}

#[test]
fn select_is_byte_reproducible_across_job_counts() {
    let dir = workspace();
    let a = ensel(
        &[
            "select", "--config", "run.toml", "--out", "one", "--jobs", "1",
        ],
        dir.path(),
    );
    let b = ensel(
        &[
            "select", "--config", "run.toml", "--out", "four", "--jobs", "4",
        ],
        dir.path(),
    );
    assert_eq!((code(&a), code(&b)), (0, 0));
    let read = |d: &str| fs::read(dir.path().join(d).join("report.json")).unwrap();
    assert_eq!(read("one"), read("four"));
}

#[test]
fn select_config_errors_exit_2() {
    let dir = workspace();
    fs::write(
        dir.path().join("typo.toml"),
        format!("{RUN}\nrepetitoins = 3\n"),
    )
    .unwrap();
    fs::write(
        dir.path().join("strategy.toml"),
        RUN.replace("[grid]", "[grid]\nstrategies = [\"backtrack\"]"),
    )
    .unwrap();
    fs::write(dir.path().join("eps.toml"), RUN.replace("0.5]", "1.5]")).unwrap();
    for (file, needle) in [
        ("typo.toml", "repetitoins"),
        ("strategy.toml", "RL_backtrack"),
        ("eps.toml", "epsilon"),
        ("absent.toml", "absent.toml"),
    ] {
        let out = ensel(&["select", "--config", file, "--out", "r"], dir.path());
        assert_eq!(code(&out), 2, "{file}: {}", stderr(&out));
        assert!(stderr(&out).contains(needle), "{file}: {}", stderr(&out));
    }
}

#[test]
fn select_runtime_errors_exit_1() {
    let dir = workspace();
    fs::write(
        dir.path().join("broken.csv"),
        "example_id,label,a\n0,1,0.4\n1,0,oops\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("csv.toml"),
        "[input]\ncsv = \"broken.csv\"\n",
    )
    .unwrap();
    let out = ensel(
        &["select", "--config", "csv.toml", "--out", "r"],
        dir.path(),
    );
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stderr(&out).contains("oops"));
}

#[test]
fn select_reads_csv_input() {
    let dir = workspace();
    ensel(
        &["generate", "--config", "spec.toml", "--out", "pool.csv"],
        dir.path(),
    );
    fs::write(
        dir.path().join("csv.toml"),
        "repetitions = 1\n[input]\ncsv = \"pool.csv\"\n[grid]\nepsilons = [0.1]\n",
    )
    .unwrap();
    let out = ensel(
        &["select", "--config", "csv.toml", "--out", "r"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("N=10 predictors, M=200 examples"));
}

#[test]
fn inspect_queries() {
    let dir = workspace();
    select(dir.path());
    let inspect = |q: &str| ensel(&["inspect", "res/report.json", q], dir.path());

    let out = inspect("parsimony");
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("size_ratio@10") && text.contains("perf_ratio@10"));
    assert!(text.contains("RL_diversity_cosine"));

    let out = inspect("curve:RL_diversity_cosine");
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("pool_size,mean,stderr,mean_size"));
    assert!(lines.next().unwrap().starts_with("10,"));

    let out = inspect("path");
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut last = 0;
    for line in text.lines().filter(|l| l.trim_start().starts_with('{')) {
        let set = &line.trim_start()[1..line.trim_start().find('}').unwrap()];
        let size = set.split(',').count();
        assert!(size == last + 1 || size == 1, "{line}");
        last = size;
    }
    assert!(text.contains("START") && text.contains("<- final"));

    for q in ["summary", "baselines"] {
        assert_eq!(code(&inspect(q)), 0, "{q}");
    }

    let out = inspect("nonsense");
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("parsimony") && stderr(&out).contains("curve:<algorithm>"));
    assert_eq!(code(&inspect("curve:RL_nothing")), 2);
    assert_eq!(
        code(&ensel(&["inspect", "nowhere.json", "summary"], dir.path())),
        2
    );
}

#[test]
fn bad_arguments_exit_2() {
    let dir = workspace();
    assert_eq!(code(&ensel(&["select"], dir.path())), 2);
    assert_eq!(code(&ensel(&["frobnicate"], dir.path())), 2);
    assert_eq!(
        code(&ensel(
            &["select", "--config", "run.toml", "--jobs", "many"],
            dir.path()
        )),
        2
    );
}
