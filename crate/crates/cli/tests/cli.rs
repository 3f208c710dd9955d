//! End-to-end tests of the installed binary: exit codes, output
//! schemas, determinism, and error addressing.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rdsym"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn shipped_parameter_config_is_deterministic_and_flagged() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let cfg = repo_config("paper_eq8.cfg");
    let out1 = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir1.path().to_str().unwrap(),
    ]);
    let out2 = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir2.path().to_str().unwrap(),
    ]);
    let code1 = out1.status.code().unwrap();
    let code2 = out2.status.code().unwrap();
    assert!(code1 == 0 || code1 == 2, "unexpected exit {code1}");
    assert_eq!(code1, code2);
    let csv1 = std::fs::read(dir1.path().join("simulate.csv")).unwrap();
    let csv2 = std::fs::read(dir2.path().join("simulate.csv")).unwrap();
    assert_eq!(csv1, csv2, "snapshot CSVs differ between identical runs");
    let text = String::from_utf8(csv1).unwrap();
    assert!(
        text.contains("IC/BC not from paper"),
        "output header must flag the substituted IC/BC"
    );
    assert!(text.contains("t,x,U,V"));
}

#[test]
fn undersized_grid_is_a_config_error_naming_nx() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.cfg");
    std::fs::write(
        &cfg_path,
        "system = cubic\nphi1 = 0\nphi2 = 0\nx_min = 0\nx_max = 1\nnx = 2\n\
         t0 = 0\nt_end = 0.1\ndt = 1e-4\nsnapshot_stride = 100\nic = constant\n\
         ic_u = 0\nic_v = 0\nbc = neumann\n",
    )
    .unwrap();
    let out = run(&[
        "simulate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("nx"), "{}", stderr_of(&out));
}

#[test]
fn unknown_config_key_is_line_addressed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("typo.cfg");
    std::fs::write(&cfg_path, "case = elliptic_pair\nbogus_key = 1\n").unwrap();
    let out = run(&[
        "exact",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("line 2") && err.contains("bogus_key"), "{err}");
}

#[test]
fn exact_pole_free_window_succeeds_with_two_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_config("exact_case1.cfg");
    let out = run(&[
        "exact",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--plot",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let svgs: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension().map(|x| x == "svg") == Some(true)).then_some(p)
        })
        .collect();
    assert_eq!(svgs.len(), 2, "expected exactly 2 plot files: {svgs:?}");
    let text = std::fs::read_to_string(dir.path().join("exact.csv")).unwrap();
    assert!(text.contains("t,x,U,V"));
}

#[test]
fn exact_window_crossing_a_pole_exits_two_naming_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("pole.cfg");
    std::fs::write(
        &cfg_path,
        "case = elliptic_pair\na = 1\nb = -1\nk1 = 1\nx_min = 0\nx_max = 1\n\
         nx = 11\nt_start = 0\nt_end = 0.5\nnt = 3\n",
    )
    .unwrap();
    let out = run(&[
        "exact",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("pole") && err.contains("m = 0"), "{err}");
}

#[test]
fn verify_suite_stdout_is_byte_identical_across_runs() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let args = |d: &Path| {
        vec![
            "verify".to_string(),
            "elliptic".to_string(),
            "--seed".to_string(),
            "42".to_string(),
            "--out".to_string(),
            d.to_str().unwrap().to_string(),
        ]
    };
    let out1 = bin().args(args(dir1.path())).output().unwrap();
    let out2 = bin().args(args(dir2.path())).output().unwrap();
    assert_eq!(out1.status.code(), Some(0));
    assert_eq!(out1.stdout, out2.stdout, "reports differ");
    assert_eq!(
        std::fs::read(dir1.path().join("verify_report.csv")).unwrap(),
        std::fs::read(dir2.path().join("verify_report.csv")).unwrap()
    );
}

#[test]
fn reduce_writes_trajectory_with_energy_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_config("reduce_oscillator.cfg");
    let out = run(&[
        "reduce",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(dir.path().join("reduce.csv")).unwrap();
    let header = text.lines().nth(1).unwrap();
    assert_eq!(header, "z,w1,dw1,w2,dw2,energy");
    assert!(text.lines().count() > 1000);
}

#[test]
fn missing_config_flag_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["simulate", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("--config"));
}
