use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run_config(dir: &Path, depth: usize, extra: &str) -> PathBuf {
    let path = dir.join("run.toml");
    let fixture = fixtures_dir().join("fixture-a.toml");
    fs::write(
        &path,
        format!("fixture = {:?}\n\n[run]\ndepth = {depth}\natom_depth = 5\n{extra}", fixture.display().to_string()),
    )
    .unwrap();
    path
}

fn toruspack(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_toruspack"));
    cmd.args(args).env_remove("TORUS_THREADS").env_remove("TORUS_OUTPUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_succeeds_on_bundled_fixtures() {
    for name in ["fixture-a.toml", "fixture-b.toml", "fixture-d1.toml", "diagonal.toml", "run-a-depth8.toml"] {
        let out = toruspack(&["check", "--config", s(&fixtures_dir().join(name))], &[]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn config_errors_exit_1_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = run_config(dir.path(), 4, "psi = [1.0, -0.5]\n");
    let out = toruspack(&["check", "--config", s(&cfg)], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run.psi"));

    let cfg = run_config(dir.path(), 4, "dpeth = 3\n");
    let out = toruspack(&["check", "--config", s(&cfg)], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dpeth"));
}

#[test]
fn threshold_beyond_coverage_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = run_config(dir.path(), 4, "");
    let out = toruspack(&["count", "--config", s(&cfg), "--output-dir", s(dir.path()), "--r", "1,1000"], &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn failed_flags_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = run_config(dir.path(), 4, "");
    let out = toruspack(&["verify", "--config", s(&cfg), "--output-dir", s(dir.path())], &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("report-counting.json").exists());
}

#[test]
fn output_dir_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let (from_env, from_flag) = (dir.path().join("env"), dir.path().join("flag"));
    let cfg = run_config(dir.path(), 3, &format!("output_dir = {:?}\n", s(&dir.path().join("cfg"))));

    let out = toruspack(&["enumerate", "--config", s(&cfg)], &[]);
    assert!(out.status.success());
    assert!(dir.path().join("cfg/records.jsonl").exists());

    let out = toruspack(&["enumerate", "--config", s(&cfg)], &[("TORUS_OUTPUT_DIR", &from_env)]);
    assert!(out.status.success());
    assert!(from_env.join("records.jsonl").exists());

    let out = toruspack(
        &["enumerate", "--config", s(&cfg), "--output-dir", s(&from_flag)],
        &[("TORUS_OUTPUT_DIR", &from_env)],
    );
    assert!(out.status.success());
    assert!(from_flag.join("records.jsonl").exists());
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = run_config(dir.path(), 7, "");
    let outputs = |threads: &str| {
        let out_dir = dir.path().join(format!("t{threads}"));
        for cmd in ["enumerate", "count", "measure"] {
            let out = toruspack(&[cmd, "--config", s(&cfg), "--threads", threads, "--output-dir", s(&out_dir)], &[]);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        }
        ["records.jsonl", "summary.csv", "counts.csv", "atoms.jsonl", "measure.json"]
            .map(|f| fs::read(out_dir.join(f)).unwrap())
    };
    let one = outputs("1");
    assert_eq!(one, outputs("3"));
    assert_eq!(one, outputs("8"));
}
