//! The `cvq` binary end to end: exit codes, table formats, determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use cvq::channel::Geometry;
use cvq::teleport::{fidelity_at, LinkSetup, Protocol};

fn cvq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cvq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn summary_passes_on_the_reference_preset() {
    let o = cvq(&["summary", "--preset", "table1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.len() >= 20);
    assert!(rows.iter().all(|r| r[4] == serde_json::Value::Bool(true)));
    assert_eq!(v["columns"][0], "anchor");
}

#[test]
fn failed_anchor_sets_exit_code_three() {
    let o = cvq(&["summary", "--set", "mu=2e-6"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reach = v["rows"].as_array().unwrap().iter().find(|r| r[0] == "reach_asym_m").unwrap();
    assert_eq!(reach[4], serde_json::Value::Bool(false));
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["warp"][..],
        &["teleport", "--preset", "no_such_preset"],
        &["teleport", "--set", "missing_equals"],
        &["teleport", "--protocol", "warp"],
        &["teleport", "--sweep", "L", "0", "1"],
        &["state", "--format", "xml"],
    ] {
        assert_eq!(cvq(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(cvq(&["--help"]).status.code(), Some(0));
    assert_eq!(cvq(&["--version"]).status.code(), Some(0));
}

#[test]
fn computation_errors_exit_with_two() {
    assert_eq!(cvq(&["teleport", "--set", "n=-1"]).status.code(), Some(2));
    assert_eq!(cvq(&["channel", "--set", "mu=abc"]).status.code(), Some(2));
}

#[test]
fn csv_round_trips_library_values() {
    let o = cvq(&["teleport", "--resource", "tmst-sym", "--protocol", "bare,swap", "--sweep", "L", "0", "500", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\r\n"), "RFC 4180 line endings");
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["L", "F_bare", "F_swap"]);
    let setup = LinkSetup::table1();
    let mut count = 0;
    for rec in rd.records() {
        let rec = rec.unwrap();
        let l: f64 = rec[0].parse().unwrap();
        let bare: f64 = rec[1].parse().unwrap();
        let swap: f64 = rec[2].parse().unwrap();
        // 17 significant digits reproduce the double exactly.
        assert_eq!(bare, fidelity_at(&setup, Geometry::Sym, Protocol::Bare, l).unwrap());
        assert_eq!(swap, fidelity_at(&setup, Geometry::Sym, Protocol::Swapped, l).unwrap());
        count += 1;
    }
    assert_eq!(count, 6);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = |jobs: &'static str| {
        vec!["distill", "--sweep", "L", "0", "450", "19", "--jobs", jobs]
    };
    let one = cvq(&args("1"));
    let many = cvq(&args("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let path = scratch("swap.json");
    let to_file = cvq(&["swap", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let direct = cvq(&["swap", "--format", "json"]);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn json_reports_carry_parameters_and_provenance() {
    let o = cvq(&["illum", "--set", "n_th=20", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["parameters"]["n_th"], "20");
    assert!(v["provenance"].as_str().is_some_and(|s| !s.is_empty()));
    assert_eq!(v["rows"].as_array().unwrap()[0].as_array().unwrap().len(), v["columns"].as_array().unwrap().len());
}

#[test]
fn preset_files_and_inheritance() {
    let path = scratch("presets.conf");
    std::fs::write(
        &path,
        "[base]\nmu = 1.44e-6\nn_th = 1250\neta_ant = 0\nr = 1\nn = 1e-2\n\n[wet]\ninherit = base\nmu = 3e-6 # rainy\n",
    )
    .unwrap();
    let file = path.to_str().unwrap();
    let reach = |preset: &str| -> f64 {
        let o = cvq(&["channel", "--reach", "--preset-file", file, "--preset", preset]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        let line = text.lines().find(|l| l.starts_with("asym,")).unwrap().to_string();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    let dry = reach("base");
    assert!((dry - 551.38).abs() < 0.01);
    assert!(reach("wet") < dry);
}

#[test]
fn every_subcommand_produces_a_table() {
    for cmd in ["state", "negativity", "qfi", "illum", "bifreq", "teleport", "distill", "swap", "channel", "satellite"] {
        let o = cvq(&[cmd]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(text.lines().count() >= 2, "{cmd} printed {text:?}");
    }
}
