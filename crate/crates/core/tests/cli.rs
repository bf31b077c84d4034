use std::process::{Command, Output};

fn charvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn exit_codes() {
    assert_eq!(charvar(&["dim", "--m", "2", "--n", "0"]).status.code(), Some(0));
    assert_eq!(charvar(&["dim", "--group", "sl5"]).status.code(), Some(2));
    assert_eq!(charvar(&["dim", "--m", "1", "--n", "0"]).status.code(), Some(2));
    let strict = charvar(&["fricke-check", "--samples", "10", "--tol", "1e-300"]);
    assert_eq!(strict.status.code(), Some(3));
}

#[test]
fn validation_message_goes_to_stderr() {
    let out = charvar(&["two-to-one", "--group", "sl2"]);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn dim_example_output() {
    let out = charvar(&["dim", "--group", "sl2", "--m", "2", "--n", "0", "--seed", "1"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rec = &doc["records"][0];
    assert_eq!(rec["dim_X"], 1);
    assert_eq!(rec["dim_formula"], 1);
    assert_eq!(rec["match"], true);
}

#[test]
fn output_file_matches_stdout_and_ignores_thread_count() {
    let dir = std::env::temp_dir().join(format!("charvar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let args = ["retract", "--seed", "4", "--samples", "16"];
    let to_file = Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(args)
        .args(["--output", path.to_str().unwrap()])
        .env("CHARVAR_THREADS", "1")
        .output()
        .unwrap();
    assert!(to_file.status.success());
    let direct = Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(args)
        .env("CHARVAR_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_output_has_header() {
    let out = charvar(&["diagram-check", "--samples", "5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,discrepancy");
    assert_eq!(lines.len(), 6);
}
