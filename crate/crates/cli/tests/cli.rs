use std::path::Path;
use std::process::{Command, Output};

fn ecsdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecsdyn")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn fig1_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig1.json", r#"{"d_sq": [2.0, 5.0], "draws": 3, "points": 21}"#);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = ecsdyn(&["fig1", "--config", &cfg, "--seed", "42", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 21);
    assert!(dir.path().join("a.csv.meta.json").exists());

    let c = dir.path().join("c.csv");
    let o = ecsdyn(&["fig1", "--config", &cfg, "--seed", "43", "--out", c.to_str().unwrap()]);
    assert!(o.status.success());
    assert_ne!(text, std::fs::read_to_string(&c).unwrap());
}

#[test]
fn figures_print_csv_without_out() {
    for (cmd, header) in [
        ("fig2", "scaled_time,ln_lambda_ratio,d_sq,dead"),
        ("fig3", "r,lambda_ratio,d_sq,one_minus_r"),
        ("fig4", "gamma_t,C_ab,C_rarb,C_ara,C_arb,C_brb,C_bra,d_sq"),
        ("evolve", "t,lambda_min,negativity,concurrence,purity"),
    ] {
        let o = ecsdyn(&[cmd]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let text = String::from_utf8(o.stdout).unwrap();
        assert_eq!(text.lines().next(), Some(header), "{cmd}");
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_grid = write_config(dir.path(), "grid.json", r#"{"points": 1}"#);
    let o = ecsdyn(&["fig2", "--config", &bad_grid]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("points"));

    let syntax = write_config(dir.path(), "syntax.json", "{\n  \"points\": 5,\n  \"stop\": oops\n}");
    let o = ecsdyn(&["fig2", "--config", &syntax]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&o.stderr).contains("syntax.json:3:"),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let unknown = write_config(dir.path(), "unknown.json", r#"{"cutoff": 12}"#);
    let o = ecsdyn(&["fig3", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let ok = write_config(dir.path(), "ok.json", r#"{"d_sq": [2.0], "points": 5, "stop": 1.0}"#);
    let o = ecsdyn(&["oracle-check", "--config", &ok, "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("\"pass\": true"), "{text}");

    let small = write_config(dir.path(), "small.json", r#"{"d_sq": [4.0], "cutoff": 4}"#);
    let o = ecsdyn(&["oracle-check", "--config", &small]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cutoff"));

    let strict = write_config(
        dir.path(),
        "strict.json",
        r#"{"d_sq": [2.0], "points": 3, "stop": 0.5, "frobenius_tol": 1e-30}"#,
    );
    let o = ecsdyn(&["oracle-check", "--config", &strict]);
    assert_eq!(o.status.code(), Some(3));
}
