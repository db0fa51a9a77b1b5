use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn zaremba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zaremba"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zaremba-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn census_small_alphabet() {
    let v = json_of(&zaremba(&[
        "census",
        "--alphabet",
        "1,2",
        "--N",
        "10",
        "--oracle",
    ]));
    assert_eq!(v["command"], "census");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["horizons"][0], 10);
    let row = &v["result"]["rows"][0];
    assert_eq!(row["count"], 8);
    assert_eq!(row["ratio"].as_f64(), Some(0.8));
    assert_eq!(v["result"]["oracle_agrees"], true);
}

#[test]
fn census_csv() {
    let out = zaremba(&[
        "census",
        "--alphabet",
        "1..5",
        "--N-list",
        "100,1e3",
        "--csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,count,ratio");
    assert!(lines[1].starts_with("100,100,"));
    assert!(lines[2].starts_with("1000,1000,"));
}

#[test]
fn validation_failures_exit_two() {
    for args in [
        &["census", "--alphabet", "1", "--N", "10"][..],
        &["census", "--alphabet", "0,2", "--N", "10"],
        &["census", "--alphabet", "1,2"],
        &["census", "--alphabet", "1,2", "--N-list", "100,10"],
        &["thresholds", "--nu", "2.5"],
        &[
            "ensemble",
            "--alphabet",
            "1,2",
            "--N",
            "1000",
            "--eps0",
            "0.01",
        ],
        &["dimension", "--alphabet", "1,2", "--depth", "0"],
        &["census", "--bogus"],
    ] {
        let out = zaremba(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn identical_config_identical_output() {
    for args in [
        &["census", "--alphabet", "1,3", "--N", "5000"][..],
        &["dimension", "--alphabet", "1,2,3", "--depth", "5"],
        &[
            "spectrum",
            "--alphabet",
            "1,2",
            "--N",
            "300",
            "--gamma",
            "0.3",
        ],
    ] {
        assert_eq!(zaremba(args).stdout, zaremba(args).stdout, "{args:?}");
    }
}

#[test]
fn deeper_brackets_nest() {
    let bracket = |depth: &str| {
        let v = json_of(&zaremba(&[
            "dimension",
            "--alphabet",
            "1,2",
            "--depth",
            depth,
        ]));
        let r = &v["result"]["report"];
        (r["lower"].as_f64().unwrap(), r["upper"].as_f64().unwrap())
    };
    let (lo4, hi4) = bracket("4");
    let (lo6, hi6) = bracket("6");
    assert!(lo4 <= lo6 && hi6 <= hi4);
    assert!(lo6 <= 0.5312805 && 0.5312805 <= hi6);
}

#[test]
fn verdicts_for_ten_letters() {
    let v = json_of(&zaremba(&[
        "dimension",
        "--alphabet",
        "1..10",
        "--depth",
        "4",
    ]));
    let verdicts = &v["result"]["report"]["verdicts"];
    assert_eq!(verdicts["t1"], "PASS");
    assert_eq!(verdicts["t2"], "PASS");
    assert_eq!(verdicts["t3"], "UNDECIDED");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = scratch("config");
    let file = dir.join("run.cfg");
    std::fs::write(&file, "# small run\nalphabet = 1,2\nN = 100\n").unwrap();
    let path = file.to_str().unwrap();
    let v = json_of(&zaremba(&["census", "--config", path]));
    assert_eq!(v["result"]["rows"][0]["n"], 100);
    let v = json_of(&zaremba(&["census", "--config", path, "--N", "10"]));
    assert_eq!(v["result"]["rows"][0]["count"], 8);

    std::fs::write(&file, "colour = red\n").unwrap();
    assert_eq!(
        zaremba(&["thresholds", "--config", path]).status.code(),
        Some(2)
    );
}

#[test]
fn out_directory_receives_files() {
    let dir = scratch("out");
    let d = dir.to_str().unwrap();
    let out = zaremba(&[
        "census",
        "--alphabet",
        "1,2",
        "--N",
        "50",
        "--witnesses",
        "--out",
        d,
    ]);
    assert!(out.status.success());
    for f in ["census.json", "census.csv", "witnesses.txt"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let written = std::fs::read(dir.join("census.json")).unwrap();
    assert_eq!(written, out.stdout);
}

#[test]
fn thresholds_table() {
    let v = json_of(&zaremba(&["thresholds"]));
    let r = &v["result"];
    assert_eq!(r["truncated"][0].as_f64(), Some(0.8815));
    assert_eq!(r["truncated"][2].as_f64(), Some(0.9276));
    assert_eq!(r["short_arc_at_three_halves"].as_f64(), Some(0.125));
    let value = r["nu_optimum"]["value"].as_f64().unwrap();
    assert!((value - 0.072302).abs() < 1e-6);
}

#[test]
fn spectrum_report() {
    let v = json_of(&zaremba(&[
        "spectrum",
        "--alphabet",
        "1,2",
        "--N-list",
        "200,400",
        "--gamma",
        "0.3",
    ]));
    let r = &v["result"];
    assert_eq!(r["theta_zero"]["ok"], true);
    assert_eq!(r["l2_trend"].as_array().unwrap().len(), 2);
    assert!(r["parseval"]["relative_error"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["arc_cover"]["holds"], true);
    assert!(r["lipschitz"]["max_ratio"].as_f64().unwrap() <= 1.0);
    assert!(r["regions"]["relative_gap"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn region_grid_is_fully_labelled() {
    let v = json_of(&zaremba(&[
        "regions",
        "--N",
        "1e8",
        "--gamma",
        "0.15",
        "--eps0",
        "0.001",
        "--nu",
        "1",
        "--partition-size",
        "128",
    ]));
    let g = &v["result"]["grid"];
    assert_eq!(g["outside"], 0);
    assert_eq!(g["inconsistent"], 0);
    assert_eq!(g["points"], 128 * 128);
}

#[test]
fn ensemble_factorization() {
    let v = json_of(&zaremba(&["ensemble", "--alphabet", "1,2", "--N", "1e4"]));
    let r = &v["result"];
    assert_eq!(r["reconstructed"], r["members"]);
    assert!(r["factorization"]["all_windows_fraction"].as_f64().unwrap() > 0.9);
    assert_eq!(r["ladder"]["ok"], false);
}

#[test]
fn self_check_passes() {
    let v = json_of(&zaremba(&["verify", "--seed", "7"]));
    assert_eq!(v["result"]["failed"], 0);
}
