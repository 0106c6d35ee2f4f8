use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ris-chest"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("cfg.toml");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = r#"
l_h = 8
l_v = 8
m_users = 4
l_act_list = [4, 8]
omp_sparsity = [2]
trials = 3
workers = 1
"#;

#[test]
fn validate_accepts_good_and_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let ok = bin().args(["validate", "--config"]).arg(write_config(dir.path(), SMALL)).output().unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));

    let bad = bin()
        .args(["validate", "--config"])
        .arg(write_config(dir.path(), "m_users = 0\n"))
        .output()
        .unwrap();
    assert!(!bad.status.success());

    let unknown = bin()
        .args(["validate", "--config"])
        .arg(write_config(dir.path(), "no_such_key = 1\n"))
        .output()
        .unwrap();
    assert!(!unknown.status.success());

    let missing = bin().args(["validate", "--config", "/nonexistent/cfg.toml"]).output().unwrap();
    assert!(!missing.status.success());
}

#[test]
fn run_writes_csv_files_and_honors_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let run = |seed: &str| {
        let o = bin()
            .args(["run", "--experiment", "nmse-vs-active", "--workers", "2", "--seed", seed, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out.join("nmse-vs-active_trials.csv")).unwrap()
    };
    let first = run("9");
    assert_eq!(first.lines().count(), 1 + 2 * 3 * 3);
    assert!(first.lines().nth(1).unwrap().contains(",proposed,"));
    assert_eq!(run("9"), first);
    assert_ne!(run("10"), first);
    assert!(out.join("nmse-vs-active_agg.csv").exists());
    let meta = std::fs::read_to_string(out.join("nmse-vs-active_meta.toml")).unwrap();
    assert!(meta.contains("master_seed = 10"));
}

#[test]
fn run_rejects_bad_experiment_and_invalid_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = bin().args(["run", "--experiment", "nmse-vs-distance", "--config"]).arg(&cfg).output().unwrap();
    assert!(!o.status.success());

    let cfg = write_config(dir.path(), "l_act_list = [4]\n");
    let o = bin()
        .args(["run", "--experiment", "nmse-vs-active", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(!dir.path().join("nmse-vs-active_trials.csv").exists());
}
