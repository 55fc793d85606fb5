//! End-to-end tests of the `brudno` binary: exit codes, verdict lines,
//! diagnostics, and byte-level determinism of the artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_brudno")
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_args(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("spawning the brudno binary")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn classical_run_passes_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "small.toml",
        r#"
kind = "classical-brudno"
description = "small deterministic run"
[source]
type = "bernoulli"
p = [0.7, 0.3]
[run]
n_grid = [64, 128, 256]
per_sequence_seeds = 8
mc_samples = 20
mc_seed = 11
seed = 1000
tolerance_bits = 0.2
per_sequence_tolerance_bits = 0.2
"#,
    );
    let out1 = tmp.path().join("a");
    let out2 = tmp.path().join("b");
    let config_str = config.to_str().unwrap();
    let first = run_args(&["run", "--config", config_str, "--out", out1.to_str().unwrap()]);
    assert!(first.status.success(), "{}", stderr(&first));
    let text = stdout(&first);
    assert!(text.contains("[endpoint] PASS"), "{text}");
    assert!(text.contains("[per-sequence] PASS"), "{text}");

    let second = run_args(&["run", "--config", config_str, "--out", out2.to_str().unwrap()]);
    assert!(second.status.success());

    for file in ["gacs_rate.csv", "per_sequence.csv", "rates.svg"] {
        let a = std::fs::read(out1.join(file)).unwrap();
        let b = std::fs::read(out2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    let mut a: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out1.join("summary.json")).unwrap()).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out2.join("summary.json")).unwrap()).unwrap();
    assert_eq!(a["schema_version"], "1");
    assert!(a["content_hash"].as_str().unwrap().len() == 64);
    a.as_object_mut().unwrap().remove("generated_unix");
    b.as_object_mut().unwrap().remove("generated_unix");
    assert_eq!(a, b, "summaries differ beyond the timestamp");
}

#[test]
fn jobs_flag_does_not_change_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "jobs.toml",
        r#"
kind = "classical-brudno"
[source]
type = "bernoulli"
p = [0.5, 0.5]
[run]
n_grid = [32, 64]
per_sequence_seeds = 6
mc_samples = 10
tolerance_bits = 0.3
per_sequence_tolerance_bits = 0.3
"#,
    );
    let out1 = tmp.path().join("j1");
    let out2 = tmp.path().join("j2");
    let config_str = config.to_str().unwrap();
    let first = run_args(&[
        "run", "--config", config_str, "--out", out1.to_str().unwrap(), "--jobs", "1",
    ]);
    let second = run_args(&[
        "run", "--config", config_str, "--out", out2.to_str().unwrap(), "--jobs", "4",
    ]);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(
        std::fs::read(out1.join("per_sequence.csv")).unwrap(),
        std::fs::read(out2.join("per_sequence.csv")).unwrap(),
        "parallelism changed the sampled trajectories"
    );
}

#[test]
fn seed_override_changes_sampling_but_stays_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "seeds.toml",
        r#"
kind = "classical-brudno"
[source]
type = "bernoulli"
p = [0.7, 0.3]
[run]
n_grid = [32, 64]
per_sequence_seeds = 4
mc_samples = 10
tolerance_bits = 0.5
per_sequence_tolerance_bits = 0.5
"#,
    );
    let config_str = config.to_str().unwrap();
    let outs: Vec<PathBuf> = (0..3).map(|i| tmp.path().join(format!("s{i}"))).collect();
    for (out, seed) in outs.iter().zip(["7", "7", "8"]) {
        let r = run_args(&[
            "run", "--config", config_str, "--out", out.to_str().unwrap(),
            "--seed-override", seed,
        ]);
        assert!(r.status.success(), "{}", stderr(&r));
    }
    let read = |i: usize| std::fs::read(outs[i].join("per_sequence.csv")).unwrap();
    assert_eq!(read(0), read(1), "same override must reproduce bytes");
    assert_ne!(read(0), read(2), "different overrides must change the sample");
}

#[test]
fn quantum_tight_fails_honestly_and_loose_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let tight = write_config(
        tmp.path(),
        "tight.toml",
        r#"
kind = "quantum-brudno"
[state]
type = "diagonal-product"
p = 0.9
[run]
n_grid = [8]
eps = [0.1]
projection_seeds = 5
member_bound_n_max = 4
"#,
    );
    let loose = write_config(
        tmp.path(),
        "loose.toml",
        r#"
kind = "quantum-brudno"
[state]
type = "diagonal-product"
p = 0.9
[run]
n_grid = [8]
eps = [0.5]
projection_seeds = 5
member_bound_n_max = 4
"#,
    );
    let out_t = tmp.path().join("t");
    let out_l = tmp.path().join("l");
    let t = run_args(&[
        "run", "--config", tight.to_str().unwrap(), "--out", out_t.to_str().unwrap(),
    ]);
    assert_eq!(t.status.code(), Some(1), "tight window must fail the run");
    let text = stdout(&t);
    assert!(text.contains("[items-literal] FAIL"), "{text}");
    assert!(text.contains("[items-measured] PASS"), "{text}");

    let l = run_args(&[
        "run", "--config", loose.to_str().unwrap(), "--out", out_l.to_str().unwrap(),
    ]);
    assert_eq!(l.status.code(), Some(0), "{}", stdout(&l));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_l.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_pass"], serde_json::Value::Bool(true));
}

#[test]
fn encoding_and_audit_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let enc = write_config(
        tmp.path(),
        "enc.toml",
        r#"
kind = "encoding-selftest"
[run]
tau_max_len = 10
pair_max_exponent = 10
elementary_trials = 20
seed = 59
"#,
    );
    let audit = write_config(
        tmp.path(),
        "audit.toml",
        r#"
kind = "semimeasure-audit"
[source]
type = "bernoulli"
p = [0.7, 0.3]
[run]
chain_n_max = 8
counting_n_max = 8
counting_c_max = 8
dominance_n_max = 6
"#,
    );
    for (config, out, table) in [
        (&enc, tmp.path().join("enc-out"), "encoding.csv"),
        (&audit, tmp.path().join("audit-out"), "chain.csv"),
    ] {
        let r = run_args(&[
            "run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(r.status.code(), Some(0), "{}\n{}", stdout(&r), stderr(&r));
        assert!(out.join(table).is_file());
        assert!(out.join("summary.json").is_file());
    }
}

#[test]
fn validate_reports_diagnostics_without_running() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = write_config(tmp.path(), "empty.toml", "");
    let r = run_args(&["validate", "--config", empty.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains("kind"), "{}", stdout(&r));

    let over_cap = write_config(
        tmp.path(),
        "cap.toml",
        r#"
kind = "quantum-brudno"
[state]
type = "diagonal-product"
p = 0.9
[family]
member_weight = 0.7
tracial_weight = 0.5
[run]
n_grid = [20]
"#,
    );
    let r = run_args(&["validate", "--config", over_cap.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    let text = stdout(&r);
    assert!(text.contains("cap 12"), "{text}");
    assert!(text.contains("1.2"), "{text}");

    let unknown = write_config(tmp.path(), "unknown.toml", "kind = \"encoding-selftest\"\nwarp = 9\n");
    let r = run_args(&["validate", "--config", unknown.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains("warp"), "{}", stdout(&r));

    let good = write_config(tmp.path(), "good.toml", "kind = \"encoding-selftest\"\n");
    let r = run_args(&["validate", "--config", good.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
}

#[test]
fn rejected_config_exits_2_before_any_work() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(
        tmp.path(),
        "bad.toml",
        r#"
kind = "quantum-brudno"
[state]
type = "diagonal-product"
p = 0.9
[run]
n_grid = [20]
"#,
    );
    let out = tmp.path().join("never");
    let r = run_args(&[
        "run", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("config rejected"), "{}", stderr(&r));
    assert!(!out.exists(), "no artifacts may be written for a rejected config");

    let missing = tmp.path().join("does-not-exist.toml");
    let r = run_args(&["run", "--config", missing.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn list_examples_names_all_bundled_configs() {
    let r = run_args(&["list-examples"]);
    assert!(r.status.success());
    let text = stdout(&r);
    for name in [
        "classical-bernoulli",
        "classical-markov",
        "quantum-brudno",
        "quantum-brudno-loose",
        "encoding-selftest",
        "semimeasure-audit",
        "semimeasure-audit-markov",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn bundled_configs_all_validate() {
    let dir = configs_dir();
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        seen += 1;
        let r = run_args(&["validate", "--config", path.to_str().unwrap()]);
        assert_eq!(r.status.code(), Some(0), "{}: {}", path.display(), stdout(&r));
    }
    assert_eq!(seen, 7, "expected exactly the seven bundled configs");
}
