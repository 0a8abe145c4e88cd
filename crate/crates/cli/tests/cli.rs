use std::process::Command;

fn secbeam() -> Command {
    Command::new(env!("CARGO_BIN_EXE_secbeam"))
}

#[test]
fn desk_sweep_writes_csv_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = secbeam()
            .args(["sweep-q0", "--scale", "desk", "--trials", "2", "--grid", "0.1,0.4", "--seed", "9", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",ok")));
}

#[test]
fn invalid_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"vr_size": 200}"#).unwrap();
    let out = secbeam().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vr_size"));
}

#[test]
fn unreachable_energy_target_exits_nonzero() {
    let out = secbeam()
        .args(["run", "--scale", "desk", "--trials", "1", "--q0-fraction", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains("infeasible"));
}

#[test]
fn unknown_scheme_is_a_usage_error() {
    let out = secbeam().args(["run", "--scheme", "magic"]).output().unwrap();
    assert!(!out.status.success());
}
