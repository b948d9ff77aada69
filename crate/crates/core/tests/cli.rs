use std::path::Path;
use std::process::{Command, Output};

use descentlab::harness::output::strip_comments;

fn descentlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_descentlab")).args(args).env_remove("DESCENTLAB_DATA_DIR").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sparse_risk_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "risk.toml",
        "experiment = \"sparse-risk\"\nseed = 5\ntrials = 20\ntest_points = 10\np_step = 20\n",
    );
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let res = descentlab(&["sparse-risk", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let a = std::fs::read(&out_a).unwrap();
    assert_eq!(a, std::fs::read(&out_b).unwrap());
    let text = String::from_utf8(a.clone()).unwrap();
    assert!(text.starts_with("# experiment = \"sparse-risk\"\n# seed = 5\n"));
    let body = String::from_utf8(strip_comments(&a).to_vec()).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("p,analytic_risk,mc_risk,mc_stderr,trials"));
    assert!(lines.next().unwrap().starts_with("0,1.04,"));
    assert_eq!(body.lines().count(), 1 + 6);
}

#[test]
fn band_is_serialised_as_inf() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "band.toml", "d = 12\nn = 5\ntrials = 5\ntest_points = 5\n");
    let res = descentlab(&["sparse-risk", "--config", &cfg]);
    assert!(res.status.success());
    let body = String::from_utf8(res.stdout).unwrap();
    for p in 4..=6 {
        assert!(body.lines().any(|l| l.starts_with(&format!("{p},inf,"))), "p={p}");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "poly.toml", "seed = 1\ndegree = 5\ngrid_points = 8\n");
    let a = descentlab(&["polyfit", "--config", &cfg, "--seed", "2"]);
    let b = descentlab(&["polyfit", "--config", &cfg]);
    assert!(a.status.success() && b.status.success());
    assert!(String::from_utf8_lossy(&a.stdout).contains("# seed = 2\n"));
    assert_ne!(strip_comments(&a.stdout), strip_comments(&b.stdout));
}

#[test]
fn validate_echoes_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "emc.toml", "experiment = \"emc\"\nd = 7\n");
    let res = descentlab(&["validate", "--config", &cfg]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.contains("d = 7\n") && text.contains("epsilon = 1e-6\n") && text.contains("model = \"linear\"\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.toml", "");
    let unknown_key = write(dir.path(), "bad.toml", "colour = 3\n");
    let bad_syntax = write(dir.path(), "syntax.toml", "d = [1,\n");
    let bad_grid = write(dir.path(), "grid.toml", "grid_points = 1\n");
    let unknown_experiment = write(dir.path(), "named.toml", "experiment = \"warp-drive\"\n");

    assert_eq!(descentlab(&["warp-drive", "--config", &ok]).status.code(), Some(2));
    assert_eq!(descentlab(&["validate", "--config", &unknown_experiment]).status.code(), Some(2));
    assert_eq!(descentlab(&["emc", "--config", &unknown_key]).status.code(), Some(2));
    assert_eq!(descentlab(&["emc", "--config", &bad_syntax]).status.code(), Some(2));
    assert_eq!(descentlab(&["emc", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    let res = descentlab(&["polyfit", "--config", &bad_grid]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("grid_points"));
}

#[test]
fn mnist_source_requires_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "rff.toml", "source = \"mnist\"\n");
    assert_eq!(descentlab(&["rff-sweep", "--config", &cfg]).status.code(), Some(1));
}
