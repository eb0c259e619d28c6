//! The `rackcode` binary driven as a subprocess.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn rackcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rackcode")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(format!("{}-{name}", std::process::id()))
}

#[test]
fn example1_downloads_18_bits() {
    let out = rackcode(&["example1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("rack 2: Tr(e), Tr(γe)"), "{text}");
    assert!(text.contains("bandwidth measured=18 predicted=18 ledger=18 symbols=9/2"), "{text}");
    assert!(text.contains("formula cor1=18"));
    assert!(text.ends_with("status ok\n"));
}

#[test]
fn example1_file_matches_builtin() {
    let file = stdout(&rackcode(&["run", scenario("example1.conf").to_str().unwrap()]));
    let builtin = stdout(&rackcode(&["example1"]));
    assert!(builtin.ends_with(&file), "built-in example and scenario file disagree");
}

#[test]
fn no_failures_costs_nothing() {
    let out = rackcode(&["run", scenario("empty.conf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("failures none"));
    assert!(text.contains("bandwidth measured=0 predicted=0 ledger=0"), "{text}");
}

#[test]
fn random_scenario_matches_golden() {
    let out = rackcode(&["run", scenario("random.conf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read_to_string(scenario("random.golden")).unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn seed_flag_changes_the_draw() {
    let path = scenario("random.conf");
    let a = stdout(&rackcode(&["run", path.to_str().unwrap(), "--seed", "8"]));
    let b = stdout(&rackcode(&["--seed", "8", "run", path.to_str().unwrap()]));
    assert_eq!(a, b);
    assert_ne!(a, std::fs::read_to_string(scenario("random.golden")).unwrap());
    assert!(a.ends_with("status ok\n"));
}

#[test]
fn config_errors_exit_3() {
    let bad = tmp("bad.conf");
    std::fs::write(&bad, "field p=4 t=1\ncode n=4 k=2 u=2\n").unwrap();
    let out = rackcode(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).starts_with("error "));

    let out = rackcode(&["run", "/nonexistent/scenario.conf"]);
    assert_eq!(out.status.code(), Some(3));
    let out = rackcode(&["table", "cor9", "eps=1"]);
    assert_eq!(out.status.code(), Some(3));

    // three failed racks out of four exceed nbar - s = 2
    std::fs::write(
        &bad,
        std::fs::read_to_string(scenario("example1.conf"))
            .unwrap()
            .replace("failures 1:2,3,4", "failures 1:1 2:1 3:1")
            .replace("helpers 2,3,4", "helpers 4"),
    )
    .unwrap();
    let out = rackcode(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).starts_with("error TOO_MANY_FAILED_RACKS"), "{}", stdout(&out));
    std::fs::remove_file(bad).unwrap();
}

#[test]
fn show_intra_changes_display_not_totals() {
    let path = scenario("composite.conf");
    let quiet = stdout(&rackcode(&["run", path.to_str().unwrap()]));
    let loud = stdout(&rackcode(&["run", path.to_str().unwrap(), "--show-intra"]));
    assert_ne!(quiet, loud);
    let totals = |s: &str| -> Vec<String> {
        s.lines().filter(|l| l.starts_with("bandwidth") || l.starts_with("formula")).map(String::from).collect()
    };
    assert_eq!(totals(&quiet), totals(&loud));
    assert!(loud.contains("intra "));
}

#[test]
fn ledger_file() {
    let path = tmp("ledger.csv");
    let out = rackcode(&["example1", "--ledger", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let ledger = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = ledger.lines().collect();
    assert_eq!(lines[0], "phase,src,dst,subsymbols");
    assert_eq!(*lines.last().unwrap(), "total,cross=18,intra=64,delivery=0");
    let cross: usize = lines[1..lines.len() - 1]
        .iter()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[1] != f[2])
        .map(|f| f[3].parse::<usize>().unwrap())
        .sum();
    assert_eq!(cross, 18);
    assert!(lines.iter().all(|l| !l.starts_with("step1-intra")));

    rackcode(&["example1", "--show-intra", "--ledger", path.to_str().unwrap()]);
    let full = std::fs::read_to_string(&path).unwrap();
    assert!(full.lines().count() > lines.len());
    assert_eq!(full.lines().last(), ledger.lines().last());
    std::fs::remove_file(path).unwrap();
}

#[test]
fn table_csv() {
    let out = rackcode(&["table", "cor3", "eps=1:3", "dbar=10", "t=30", "kp=5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "eps,dbar,t,kp,cor3\n1,10,30,5,50\n2,10,30,5,100\n3,10,30,5,150\n");

    let path = tmp("table.csv");
    let out = rackcode(&[
        "table",
        "two_rack",
        "eps1=1",
        "eps2=2",
        "dbar=10",
        "t=30",
        "kp=5",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "eps1,eps2,dbar,t,kp,two_rack\n1,2,10,30,5,950/7\n");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn verify_campaign() {
    let out = rackcode(&["verify", scenario("ternary.conf").to_str().unwrap(), "--trials", "40"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    for key in ["columns 40/40", "residues 40/40", "oracle 40/40", "bandwidth 40/40"] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
    assert!(text.ends_with("status ok\n"));
}
