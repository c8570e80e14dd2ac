use std::process::{Command, Output};

fn memspin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memspin")).args(args).output().unwrap()
}

#[test]
fn csv_to_stdout() {
    let out = memspin(&["damping", "--points", "3", "--omega-tc", "0,10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t/τ_c,Ωτ_c,exp(−Γ₊),exp(−t/T)");
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[1], "0,0,1,1");
}

#[test]
fn json_to_file() {
    let path = std::env::temp_dir().join(format!("memspin-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = memspin(&["km-map", "--n", "4", "--gamma-grid", "-2,0", "--format", "json", "--out", p]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["command"], "km-map");
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["qfi-sweep", "--gamma", "0.5"][..],
        &["qfi-sweep", "--unknown"],
        &["ftilde", "--omega-tc", "1,2"],
        &["mc-validate", "--noise", "white"],
        &["mc-validate", "--ntraj", "10", "--dt", "0.5"],
        &["damping", "--config", "/nonexistent/memspin.conf"],
        &[],
    ] {
        let out = memspin(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_succeeds() {
    let out = memspin(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("mc-validate"));
}

#[test]
fn noiseless_monte_carlo_is_exact() {
    let out = memspin(&["mc-validate", "--w0-tc", "0", "--wz", "0", "--ntraj", "20"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(row[1].parse::<f64>().unwrap() < 1e-12);
    assert_eq!(row[5], "true");
}
