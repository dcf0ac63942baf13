use std::fs;
use std::process::{Command, Output};

use arps_sde::cli::{run_cli, EXIT_INVALID, EXIT_IO, EXIT_USAGE};
use arps_sde::decline::arps_rate;
use arps_sde::fpt::{durbin_value, DurbinForm};
use arps_sde::sim::{simulate_path, NoiseSpec, Scheme, TimeGrid};
use arps_sde::{ArpsParams, ModelKind};
use serde_json::Value;

fn arps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arps-sde"))
        .args(args)
        .env_remove("ARPS_SDE_THREADS")
        .output()
        .unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

const SIMULATE: &[&str] = &[
    "simulate", "--model", "const-vol", "--q0", "380", "--d0", "3e-4", "--b", "0.5", "--sigma2", "1", "--dt", "1",
    "--horizon", "10000", "--paths", "5", "--seed", "42",
];

#[test]
fn simulate_csv_is_byte_identical_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for out in [&first, &second] {
        let mut args = SIMULATE.to_vec();
        args.extend(["--out", out.to_str().unwrap()]);
        assert!(arps(&args).status.success());
    }
    let text = fs::read_to_string(&first).unwrap();
    assert_eq!(text, fs::read_to_string(&second).unwrap());
    assert!(text.starts_with("# config: {"));
    assert!(!text.contains('\r'));

    let rows = data_rows(&text);
    assert_eq!(rows[0], ["t", "path0", "path1", "path2", "path3", "path4"]);
    assert_eq!(rows.len(), 10_002);

    let params = ArpsParams::with_sigma2(380.0, 3e-4, 0.5, 1.0).unwrap();
    let grid = TimeGrid::uniform(1.0, 10_000.0).unwrap();
    let path = simulate_path(&params, ModelKind::ConstantVol, Scheme::Exact, &grid, NoiseSpec::new(42, 3)).unwrap();
    for (row, value) in rows[1..].iter().zip(&path.values) {
        assert_eq!(row[4].parse::<f64>().unwrap().to_bits(), value.to_bits());
    }
}

#[test]
fn config_echo_includes_defaults() {
    let out = arps(&["moments", "--horizon", "100", "--dt", "50"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().next().unwrap();
    let config: Value = serde_json::from_str(line.strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(config["q0"], 380.0);
    assert_eq!(config["d0"], 3e-4);
    assert_eq!(config["b"], 0.5);
    assert_eq!(config["model"], "const-vol");
}

#[test]
fn moments_mean_column_is_the_arps_curve() {
    let out = arps(&["moments", "--preset", "fig2", "--b", "0.75", "--horizon", "1000", "--dt", "250", "--format", "json"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let params = ArpsParams::with_sigma2(380.0, 3e-4, 0.75, 0.01).unwrap();
    let t = doc["t"].as_array().unwrap();
    let mean = doc["mean"].as_array().unwrap();
    assert_eq!(t.len(), 5);
    for (t, m) in t.iter().zip(mean) {
        let expected = arps_rate(&params, t.as_f64().unwrap()).unwrap();
        assert_eq!(m.as_f64().unwrap(), expected);
    }
}

#[test]
fn fpt_json_lists_the_closed_form() {
    let out = arps(&[
        "fpt", "--model", "linear-vol", "--b", "0", "--q0", "380", "--d0", "3e-4", "--sigma2", "0.01", "--x", "100",
        "--paths", "20000", "--dt", "0.05", "--seed", "7", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let m = doc["inverse_gaussian"]["m"].as_f64().unwrap();
    let mean = doc["mean"].as_f64().unwrap();
    let se = doc["mean_se"].as_f64().unwrap();
    assert!((m - 251.887).abs() < 1e-3);
    assert!((mean - m).abs() < 4.0 * se + 0.01 * m, "mean {mean} +- {se}");
    assert_eq!(doc["config"]["paths"], 20000);
    assert_eq!(doc["bounds"]["linear_vol_lower_bound"].as_f64(), Some(m));
}

#[test]
fn durbin_csv_round_trips_and_reports_defect() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("durbin.csv");
    let status = arps(&[
        "durbin", "--q0", "380", "--d0", "3e-4", "--sigma2", "0.01", "--x", "100", "--b", "1", "--form", "corrected",
        "--out", out.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("# normalization_defect: "));
    let params = ArpsParams::with_sigma2(380.0, 3e-4, 1.0, 0.01).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows[0], ["t", "density"]);
    for row in rows[1..].iter().step_by(97) {
        let t: f64 = row[0].parse().unwrap();
        let f: f64 = row[1].parse().unwrap();
        assert_eq!(f, durbin_value(&params, 100.0, t, DurbinForm::Corrected).unwrap());
    }
}

#[test]
fn order_check_reads_sample_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    fs::write(&a, "# note\nt\n1\n2\n3\n4\n").unwrap();
    fs::write(&b, "t\n2\n3\n4\n5\n").unwrap();
    let out = arps(&[
        "order-check", "--samples-a", a.to_str().unwrap(), "--samples-b", b.to_str().unwrap(), "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["holds"], true);
    assert_eq!(doc["report"]["max_violation"], 0.0);
}

#[test]
fn svg_output_is_written_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let svgs: Vec<String> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("p{i}.svg"));
            let mut args = SIMULATE.to_vec();
            args.extend(["--svg", path.to_str().unwrap()]);
            assert!(arps(&args).status.success());
            fs::read_to_string(path).unwrap()
        })
        .collect();
    assert!(svgs[0].starts_with("<svg") || svgs[0].starts_with("<?xml"));
    assert_eq!(svgs[0], svgs[1]);
}

#[test]
fn exit_codes_distinguish_failures() {
    assert_eq!(arps(&["simulate", "--bogus"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(arps(&["simulate", "--b", "1.5"]).status.code(), Some(EXIT_INVALID));
    assert_eq!(arps(&["fpt", "--x", "-1"]).status.code(), Some(EXIT_INVALID));
    assert_eq!(
        arps(&["moments", "--out", "/nonexistent-dir/x/y.csv"]).status.code(),
        Some(EXIT_IO)
    );
    let err = arps(&["simulate", "--b", "1.5"]).stderr;
    assert!(!err.is_empty());
}

#[test]
fn in_process_entry_point_matches_exit_codes() {
    assert_eq!(run_cli(["arps-sde", "moments", "--b", "-0.1"]), EXIT_INVALID);
    assert_eq!(run_cli(["arps-sde", "no-such-command"]), EXIT_USAGE);
}
