use std::process::{Command, Output};

use serde_json::Value;

use neighborlat::{corpus, json as j};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neighborlat")).args(args).output().expect("spawning the binary")
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn lattice_arg(l: &neighborlat::Lattice) -> String {
    j::to_canonical(&j::lattice(l))
}

const U: &str = r#"{"gram":[[0,1],[1,0]]}"#;

#[test]
fn info_on_u() {
    let v = ok(&["info", U]);
    assert_eq!(j::to_canonical(&v), r#"{"disc":-1,"even":true,"rank":2,"signature":[1,1]}"#);
}

#[test]
fn e8_has_135_lines_mod_2() {
    let e8 = lattice_arg(&corpus::e8());
    assert_eq!(ok(&["lines", &e8, "--d", "2", "--count"])["count"], 135);
}

#[test]
fn kummer_list_has_16_rows_for_d_3() {
    let v = ok(&["kummer", "--d", "3", "--list"]);
    assert_eq!(v.as_array().unwrap().len(), 16);
    let s = ok(&["kummer", "--d", "3"]);
    assert_eq!(s["lines"], 16);
    assert_eq!(s["standard_neighbor"]["natural_gram"], s["gram"]);
}

#[test]
fn neighbor_round_trips_through_genus_check() {
    let l = lattice_arg(&corpus::sum(&[corpus::hyperbolic(), corpus::a(2)]));
    let lines = ok(&["lines", &l, "--d", "5"]);
    let line = j::to_canonical(&lines[3]);
    let n = j::to_canonical(&ok(&["neighbor", &l, "--line", &line]));
    assert_eq!(ok(&["genus-check", &l, &n])["same_genus"], true);
    let by_index = j::to_canonical(&ok(&["neighbor", &l, "--d", "5", "--index", "3"]));
    assert_eq!(n, by_index);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let l = lattice_arg(&corpus::sum(&[corpus::hyperbolic(), corpus::a(2)]));
    let a = run(&["transverse", &l, "--d", "7", "--index", "5"]);
    let b = run(&["transverse", &l, "--d", "7", "--index", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_neighborlat"))
        .args(["disc-form", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(br#"{"gram":[[2,-1],[-1,2]]}"#).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), r#"{"divisors":[3],"q_den":3,"q_num":[[2]]}"#);
}

#[test]
fn precondition_errors_exit_2() {
    let a2 = r#"{"gram":[[2,-1],[-1,2]]}"#;
    let out = run(&["lines", a2, "--d", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "not_coprime");
    let out = run(&["info", r#"{"gram":[[1,2]]}"#]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["info", "{not json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["lines", r#"{"gram":[[1,0],[0,1]]}"#, "--d", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn k3_commands() {
    let ns = lattice_arg(&corpus::diag(&[2]));
    let t = corpus::sum(&[corpus::diag(&[-2]), corpus::hyperbolic(), corpus::hyperbolic(), corpus::e8().scaled(-1), corpus::e8().scaled(-1)]);
    let input = format!(r#"{{"ns":{ns},"t":{}}}"#, lattice_arg(&t));
    let checked = ok(&["k3-pair-check", &input]);
    assert_eq!(checked["rho"], 1);
    assert_eq!(checked["glued"]["signature"], serde_json::json!([3, 19]));
    let pair = j::to_canonical(&checked["pair"]);
    assert_eq!(ok(&["k3-pair-check", &pair])["valid"], true);

    let tl = j::parse_lattice(&checked["pair"]["t"]).unwrap();
    let line = neighborlat::k3::find_isotropic_line(&tl, 3, 1_000_000).unwrap().unwrap();
    let line = j::to_canonical(&j::line(&line));
    let next = ok(&["k3-neighbor", &pair, "--line", &line]);
    assert_eq!(ok(&["k3-pair-check", &j::to_canonical(&next)])["valid"], true);
    let split = ok(&["k3-split", &pair, "--line", &line]);
    assert_eq!(split["embeddable"], "unknown");
    assert_eq!(split["disc"], -18);
}

#[test]
fn selftest_passes() {
    assert_eq!(ok(&["selftest"])["ok"], true);
}
