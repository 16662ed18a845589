use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn relpow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relpow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each stdout line is JSON"))
        .collect()
}

#[test]
fn verify_reduced_parameter() {
    let out = relpow(&["verify", "--D", "5", "--c", "3+0*w"]);
    assert_eq!(out.status.code(), Some(0));
    let v = &lines(&out)[0];
    assert_eq!(v["schema"], 1);
    assert_eq!(v["classification"], "Reduced_And_Searched");
    let gens = v["generators"].as_array().unwrap();
    assert_eq!(gens.len(), 2);
    assert_eq!(gens[1]["y"], "-6+0*w");
}

#[test]
fn verify_large_and_special() {
    let out = relpow(&["verify", "--D", "1", "--c", "159200+0*w"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out)[0]["classification"], "LargeC_Bennett");

    let out = relpow(&["verify", "--D", "1", "--c", "1+0*w"]);
    let v = &lines(&out)[0];
    assert_eq!(v["classification"], "InSc");
    assert_eq!(v["closed"], true);
}

#[test]
fn verify_is_deterministic() {
    let a = relpow(&["verify", "--D", "2", "--c", "3-1*w"]);
    let b = relpow(&["verify", "--D", "2", "--c", "3-1*w"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn input_errors_exit_4() {
    assert_eq!(
        relpow(&["verify", "--D", "4", "--c", "3"]).status.code(),
        Some(4)
    );
    assert_eq!(
        relpow(&["verify", "--D", "2", "--c", "3+x"]).status.code(),
        Some(4)
    );
    assert_eq!(relpow(&["absindex", "--D", "7"]).status.code(), Some(4));
}

#[test]
fn thresholds_report() {
    let out = relpow(&["thresholds"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("159108"));
    assert!(text.contains("6.700e36"));
    assert!(text.contains("1.7150e37"));
}

#[test]
fn reduce_jobs() {
    let dir = std::env::temp_dir().join(format!("relpow-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.txt");
    fs::write(&empty, "").unwrap();
    let out = relpow(&["reduce", "--jobs", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let jobs = dir.join("jobs.txt");
    fs::write(&jobs, "# D element\n2 1+66*w\n5 3\n").unwrap();
    let out = relpow(&["reduce", "--jobs", jobs.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&out);
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r["ok"] == true));
    assert_eq!(recs[0]["line"], 2);

    let bad = dir.join("bad.txt");
    fs::write(&bad, "2 1+1*w\n2 nope\n").unwrap();
    let out = relpow(&["reduce", "--jobs", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn absindex_sweep() {
    let out = relpow(&[
        "absindex", "--D", "2", "--pmax", "3", "--qmax", "3", "--bmax", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&out);
    assert!(!recs.is_empty());
    assert!(recs.iter().all(|r| r["holds"] == true));
}

#[test]
fn scan_small_disk() {
    let out = relpow(&[
        "scan", "--D", "1", "--radius", "3", "--mmax", "6", "--H", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let recs = lines(&out);
    let summary = recs.last().unwrap();
    assert_eq!(summary["anomalies"], 0);
    assert!(recs
        .iter()
        .any(|r| r["c"] == "0+2*w" && r["classification"] == "ReZero_Closed"));
}
