use std::process::{Command, Output};

fn kropina(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kropina"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    kropina(args).status.code().expect("exit code")
}

#[test]
fn check_exit_codes() {
    let quick = ["--points", "4", "--dirs", "12", "--no-timings"];
    let cases = [
        (
            vec!["--scenario", "euclid_parallel", "--theorem", "61", "--weights", "pric"],
            0,
        ),
        (vec!["--scenario", "s3_hopf", "--theorem", "auto"], 0),
        (vec!["--scenario", "euclid_gaussian"], 0),
        (vec!["--scenario", "euclid_twist"], 3),
        (vec!["--scenario", "torus_wind"], 2),
        (vec!["--scenario", "s3_hopf", "--theorem", "61"], 1),
        (vec!["--scenario", "s3_hopf", "--theorem", "42"], 1),
        (vec!["--scenario", "no_such_scenario"], 1),
    ];
    for (args, expected) in cases {
        let mut all = vec!["check"];
        all.extend(&args);
        all.extend(&quick);
        assert_eq!(code(&all), expected, "{all:?}");
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["check"]), 1);
    assert_eq!(code(&["check", "--scenario", "s3_hopf", "--colour"]), 1);
    assert_eq!(code(&["convert", "--scenario", "s3_hopf", "--to", "polar"]), 1);
}

#[test]
fn json_reports_are_byte_identical_without_timings() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for i in 0..2 {
        let p = dir.path().join(format!("r{i}.json"));
        let args = [
            "check",
            "--scenario",
            "s3_hopf",
            "--seed",
            "9",
            "--no-timings",
            "--json-out",
            p.to_str().unwrap(),
        ];
        assert_eq!(code(&args), 0);
        outs.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    let v: serde_json::Value = serde_json::from_slice(&outs[0]).unwrap();
    assert_eq!(v["schema"], "report/1");
    assert_eq!(v["seed"], 9);
    assert_eq!(v["check"]["verdict"], "PASS");
    assert!(v.get("timings").is_none());

    let timed = kropina(&[
        "check",
        "--scenario",
        "s3_hopf",
        "--points",
        "2",
        "--dirs",
        "8",
        "--json-out",
        "-",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(v["timings"]["total_ms"].is_number());
}

#[test]
fn verify_reports_ladder() {
    let out = kropina(&[
        "verify",
        "--scenario",
        "random:2",
        "--points",
        "3",
        "--dirs",
        "8",
        "--json-out",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["verify"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["status"] != "fail"));
}

#[test]
fn convert_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let ab = dir.path().join("ab.json");
    let nav = dir.path().join("nav.json");
    let ab_s = ab.to_str().unwrap();
    let nav_s = nav.to_str().unwrap();
    assert_eq!(
        code(&[
            "convert",
            "--scenario",
            "s3_hopf",
            "--to",
            "ab",
            "--gauge",
            "1+0.1*x1",
            "--out",
            ab_s
        ]),
        0
    );
    assert_eq!(code(&["convert", "--scenario", ab_s, "--to", "nav", "--out", nav_s]), 0);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&nav).unwrap()).unwrap();
    assert_eq!(v["representation"], "nav");
    assert_eq!(
        code(&["check", "--scenario", nav_s, "--points", "3", "--dirs", "10"]),
        0
    );
    assert_eq!(
        code(&[
            "check",
            "--scenario",
            ab_s,
            "--theorem",
            "44",
            "--points",
            "3",
            "--dirs",
            "10"
        ]),
        0
    );
}

#[test]
fn negative_gauge_is_rejected() {
    let out = kropina(&["convert", "--scenario", "s3_hopf", "--to", "ab", "--gauge", "-1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive"));
}

#[test]
fn scenarios_list_names_builtins() {
    let out = kropina(&["scenarios", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "euclid_parallel",
        "s3_hopf",
        "euclid_gaussian",
        "euclid_twist",
        "torus_wind",
        "random:<seed>",
    ] {
        assert!(text.contains(name), "{name}");
    }
}
