use std::path::PathBuf;
use std::process::{Command, Output};
use symcone::report::VerificationReport;

fn symcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symcone")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("symcone-cli-{}-{name}", std::process::id()))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn passing_suite_prints_a_parseable_report() {
    let o = symcone(&["verify", "gamma", "--cone", "halfline", "--s", "2.5"]);
    assert_eq!(o.status.code(), Some(0));
    let r = VerificationReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.suite, "gamma");
    assert!(r.aggregate_pass);
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS"));
}

#[test]
fn failing_suite_exits_with_one() {
    let o = symcone(&["verify", "gamma", "--cone", "halfline", "--s", "2.5", "--nodes", "2", "--tol", "1e-14"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!VerificationReport::from_json(&stdout(&o)).unwrap().aggregate_pass);
}

#[test]
fn usage_and_domain_errors_exit_with_two() {
    assert_eq!(symcone(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(symcone(&["verify", "gamma", "--cone", "lorentz:3", "--s", "1,0.4"]).status.code(), Some(2));
    assert_eq!(symcone(&["verify", "gamma", "--cone", "cube"]).status.code(), Some(2));
    assert_eq!(symcone(&["algebra", "det", "--cone", "lorentz:3", "--x", "1,2"]).status.code(), Some(2));
}

#[test]
fn out_and_csv_files() {
    let (json, csv) = (scratch("out.json"), scratch("out.csv"));
    let o = symcone(&[
        "verify",
        "beta",
        "--cone",
        "halfline",
        "--out",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("suite beta on halfline"));
    let r = VerificationReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("suite,label,computed,expected,error_estimate,tolerance,pass,note"));
    assert_eq!(table.lines().count(), r.cases.len() + 1);
    let _ = std::fs::remove_file(json);
    let _ = std::fs::remove_file(csv);
}

#[test]
fn config_file_is_read() {
    let cfg = scratch("gamma.cfg");
    std::fs::write(&cfg, "# gamma at two exponents\ncone=lorentz:3\ns=2,1.5\n").unwrap();
    let o = symcone(&["verify", "gamma", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = VerificationReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.cone, "lorentz:3");
    assert_eq!(r.params["s"], "2,1.5");
    let _ = std::fs::remove_file(cfg);
}

#[test]
fn algebra_outputs() {
    let det = symcone(&["algebra", "det", "--cone", "lorentz:3", "--x", "2,1,0"]);
    assert_eq!(stdout(&det).trim(), "3");
    let inv = symcone(&["algebra", "inverse", "--cone", "halfline", "--x", "4"]);
    assert_eq!(stdout(&inv).trim(), "0.25");
    let pow = symcone(&["algebra", "power", "--cone", "lorentz:3", "--x", "2,1,0", "--s", "1,1"]);
    assert!((stdout(&pow).trim().parse::<f64>().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn sweep_writes_a_table() {
    let o = symcone(&["sweep", "gamma", "--cone", "halfline", "--grid", "s=1;2;3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,pass,ratio,drift,signature,error"));
    assert_eq!(lines.filter(|l| l.contains(",true,")).count(), 3);
}
