//! End-to-end tests of the `hvlab` binary: exit codes, determinism, output
//! formats, config handling, and the headline numbers.

use std::path::PathBuf;
use std::process::{Command, Output};

fn hvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hvlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_str(out)).expect("stdout parses as JSON")
}

/// Data rows of a CSV payload: everything that is not a `#` meta line or
/// the header.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("hvlab-test-{}-{name}", std::process::id()))
}

#[test]
fn reruns_are_byte_identical() {
    let first = hvlab(&["swap", "--seed", "7", "--n", "4000", "--steps", "3"]);
    let second = hvlab(&["swap", "--seed", "7", "--n", "4000", "--steps", "3"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let first = hvlab(&["bell-boolean", "--seed", "9", "--n", "20000"]);
    let second = hvlab(&["bell-boolean", "--seed", "9", "--n", "20000"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(hvlab(&["no-such-experiment"]).status.code(), Some(1));
    assert_eq!(hvlab(&["hom", "--bogus"]).status.code(), Some(1));
    assert_eq!(hvlab(&["hom"]).status.code(), Some(1), "seed is required");
    assert_eq!(
        hvlab(&["hom", "--seed", "1", "--n", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        hvlab(&["bell-vector", "--seed", "1", "--angles", "0.1,0.2"])
            .status
            .code(),
        Some(1),
        "angles need four components"
    );
    assert_eq!(
        hvlab(&["demos", "filtering-order", "--theta", "3.0"])
            .status
            .code(),
        Some(1),
        "theta outside (0, pi/2)"
    );
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(hvlab(&["--help"]).status.code(), Some(0));
    assert_eq!(hvlab(&["--version"]).status.code(), Some(0));
    assert_eq!(hvlab(&["swap", "--help"]).status.code(), Some(0));
}

#[test]
fn failed_self_check_exits_two_but_still_reports() {
    // A single pulse that post-selection rejects: the run is fine, the
    // embedded check is not.
    let out = hvlab(&["ghz-pipeline", "--seed", "1", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout_str(&out);
    assert!(text.contains("# check=fail"), "payload carries the verdict");
    assert!(text.contains("config,i,j,k,count,fraction,se,expected"));
}

#[test]
fn bell_vector_hits_the_quantum_band() {
    let out = hvlab(&["bell-vector", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let s = v["s"].as_f64().unwrap();
    let j = v["j_ch"].as_f64().unwrap();
    assert!((2.818..=2.838).contains(&s), "S = {s}");
    assert!((0.202..=0.212).contains(&j), "J = {j}");
    assert_eq!(v["meta"]["check"], "pass");
}

#[test]
fn bell_boolean_reports_the_classical_bound() {
    let out = hvlab(&["bell-boolean", "--seed", "3", "--n", "50000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["s_analytic"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(v["j_analytic"].as_f64().unwrap().abs() < 1e-12);
    let s_mc = v["s_mc"].as_f64().unwrap();
    let s_se = v["s_se"].as_f64().unwrap();
    assert!((s_mc - 2.0).abs() < 5.0 * s_se, "S_mc = {s_mc} +- {s_se}");
}

#[test]
fn ks_search_reports_the_obstruction() {
    let out = hvlab(&["ks-search"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["standard"]["best_satisfied"], 5);
    assert_eq!(v["standard"]["n_full"], 0);
    assert_eq!(v["rotation_form"]["best_satisfied"], 5);
    assert!(v["all_plus_control"]["n_full"].as_u64().unwrap() > 0);
}

#[test]
fn ghz_instructions_report_the_discrepancy_floor() {
    let out = hvlab(&["ghz-instructions"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["search"]["best_satisfied"], 7);
    assert_eq!(v["search"]["n_full"], 0);
    let p = v["search"]["min_discrepancy_probability"].as_f64().unwrap();
    assert!((p - 0.125).abs() < 1e-15);
    assert_eq!(v["two_station_control"]["n_satisfying"], 4);
}

#[test]
fn ghz_table_has_unit_config_sums() {
    let out = hvlab(&["ghz-table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("config,i,j,k,fraction"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 64);
    let mut sums = std::collections::BTreeMap::<String, f64>::new();
    for row in &rows {
        *sums.entry(row[0].clone()).or_default() += row[4].parse::<f64>().unwrap();
    }
    assert_eq!(sums.len(), 8);
    for (config, sum) in sums {
        assert!((sum - 1.0).abs() < 1e-12, "{config} sums to {sum}");
    }
}

#[test]
fn sweep_grid_shows_the_gap_between_models() {
    let out = hvlab(&["sweep"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout_str(&out));
    assert_eq!(rows.len(), 17);
    let parse = |row: &Vec<String>| {
        (
            row[1].parse::<f64>().unwrap(),
            row[2].parse::<f64>().unwrap(),
        )
    };
    // Quarter-turn-difference point: both models agree.
    let (b, v) = parse(&rows[8]);
    assert!((b - v).abs() < 1e-12);
    assert!((b - 0.25).abs() < 1e-12);
    // Interior point: the piecewise-linear curve sits strictly below.
    let (b, v) = parse(&rows[4]);
    assert!(b < v);
}

#[test]
fn hom_table_is_exact_per_kind() {
    let out = hvlab(&["hom", "--seed", "5", "--n", "512"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout_str(&out));
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let counts: Vec<u64> = row[1..].iter().map(|s| s.parse().unwrap()).collect();
        match row[0].as_str() {
            "phi+" => assert_eq!(counts, vec![512, 0, 0, 0]),
            "psi-" => assert_eq!(counts, vec![0, 0, 512, 0]),
            "phi-" | "psi+" => {
                assert_eq!(counts[2], 0, "{} never coincides", row[0]);
                assert_eq!(counts[0] + counts[1] + counts[3], 512);
            }
            other => panic!("unexpected kind {other}"),
        }
    }
}

#[test]
fn config_file_feeds_defaults_and_flags_override() {
    let path = temp_path("config.toml");
    std::fs::write(&path, "seed = 11\n\n[hom]\nn = 200\n").unwrap();
    let cfg = path.to_str().unwrap();

    let out = hvlab(&["hom", "--config", cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("# seed=11"));
    assert!(text.contains("# n=200"));

    let out = hvlab(&["hom", "--config", cfg, "--n", "500", "--seed", "12"]);
    let text = stdout_str(&out);
    assert!(text.contains("# seed=12"));
    assert!(text.contains("# n=500"));

    std::fs::write(&path, "[hom]\nn = 3\nbogus = 1\n").unwrap();
    assert_eq!(hvlab(&["hom", "--config", cfg]).status.code(), Some(1));
    std::fs::write(&path, "[hmo]\nn = 3\n").unwrap();
    assert_eq!(hvlab(&["hom", "--config", cfg]).status.code(), Some(1));
    std::fs::remove_file(&path).ok();
}

#[test]
fn out_flag_writes_the_same_payload_to_a_file() {
    let path = temp_path("sweep.csv");
    let direct = hvlab(&["sweep", "--steps", "4"]);
    let filed = hvlab(&["sweep", "--steps", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(filed.status.code(), Some(0));
    assert!(filed.stdout.is_empty(), "payload goes to the file only");
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout_str(&direct));
    std::fs::remove_file(&path).ok();
}

#[test]
fn pipeline_event_log_lists_every_pulse() {
    let path = temp_path("events.csv");
    let out = hvlab(&[
        "ghz-pipeline",
        "--seed",
        "2",
        "--n",
        "50",
        "--events-out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("pulse,m_t,m_d1,m_d2,m_d3,fired_t,fired_d1,fired_d2,fired_d3,status"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 50);
    std::fs::remove_file(&path).ok();
}

#[test]
fn demos_report_exact_witnesses() {
    let v = json(&hvlab(&["demos", "plane-rotation"]));
    assert_eq!(v["three_half_turns"], -1);
    assert_eq!(v["two_half_one_quarter"], 0);
    assert_eq!(v["one_half_two_quarters"], 1);

    let v = json(&hvlab(&["demos", "card"]));
    assert_eq!(v["meta"]["check"], "pass");
    assert_ne!(v["fixed_frame"], v["body_frame"]);

    let v = json(&hvlab(&["demos", "filtering-order", "--theta", "0.7"]));
    assert_eq!(v["meta"]["check"], "pass");
    assert!(v["direct_overlap"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn formats_switch_on_demand() {
    let as_csv = hvlab(&["bell-boolean", "--seed", "1", "--n", "1000", "--format", "csv"]);
    assert!(stdout_str(&as_csv).contains("setting,alpha,beta,p_pp_mc"));
    let as_json = hvlab(&["ghz-table", "--format", "json"]);
    let v = json(&as_json);
    assert_eq!(v["rows"].as_array().unwrap().len(), 64);
}
