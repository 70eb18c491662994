use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use prelog_core::bounds::{coherent_avg_upper_bound, default_upsilon_grid, optimize_upsilon, FadingModel};
use prelog_core::grid::log_grid;
use prelog_core::processes::SamplePath;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_prelog-lab"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bound_sweep_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sweep.csv");
    ok(&[
        "bound-sweep",
        "--model",
        "rayleigh-band:W=0.05",
        "--snr",
        "1e2:1e10:9",
        "-o",
        file.to_str().unwrap(),
    ]);
    let (header, rows) = csv_rows(&file);
    assert_eq!(header, ["snr", "lb", "upsilon_star", "ub_coherent"]);
    assert_eq!(rows.len(), 9);

    let model = FadingModel::rayleigh_band(0.05).unwrap();
    let grid = default_upsilon_grid();
    for (row, snr) in rows.iter().zip(log_grid(1e2, 1e10, 9).unwrap()) {
        let best = optimize_upsilon(&model, snr, &grid).unwrap();
        assert_eq!(row[0].parse::<f64>().unwrap(), snr);
        assert_eq!(row[1].parse::<f64>().unwrap(), best.value);
        assert_eq!(row[2].parse::<f64>().unwrap(), best.upsilon);
        assert_eq!(
            row[3].parse::<f64>().unwrap(),
            coherent_avg_upper_bound(&model, snr).unwrap()
        );
    }
}

#[test]
fn json_and_csv_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let json = dir.path().join("a.json");
    let base = ["bound-sweep", "--model", "onoff:W=0.1", "--snr", "1e3:1e9:4"];
    ok(&[&base[..], &["-o", csv.to_str().unwrap()]].concat());
    ok(&[&base[..], &["-o", json.to_str().unwrap(), "--format", "json"]].concat());
    let (header, rows) = csv_rows(&csv);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let objs = doc.as_array().unwrap();
    assert_eq!(objs.len(), rows.len());
    for (obj, row) in objs.iter().zip(&rows) {
        let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
        assert_eq!(keys, header.iter().collect::<Vec<_>>());
        for (k, cell) in header.iter().zip(row) {
            assert_eq!(obj[k].as_f64().unwrap(), cell.parse::<f64>().unwrap(), "{k}");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["bound-sweep", "--model", "rician:K=2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["bound-sweep", "--model", "rayleigh-band:W=0.9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["bound-sweep", "--model", "phase-noise", "--snr", "10:1:3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["bound-sweep"]).status.code(), Some(2));
    let out = run(&[
        "spectrum",
        "--model",
        "phase-noise",
        "-o",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    assert_eq!(
        run(&[
            "bound-sweep",
            "--model",
            "phase-noise",
            "--config",
            "/nonexistent-dir/c.json"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        run_env(&["miso", "--spectra", "W=0.1"], &[("PRELOG_LAB_THREADS", "zero")])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn prelog_reports() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.csv");
    let out = ok(&[
        "prelog-report",
        "--model",
        "onoff:W=1/16",
        "-o",
        file.to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert!(text.contains("note1-gap: true"), "{text}");
    assert!(text.contains("upper-prelog: 0.5\n"));
    assert!(text.contains("zero-set-measure: 0.75\n"));

    let out = ok(&[
        "prelog-report",
        "--model",
        "rayleigh-band:W=0.1",
        "-o",
        file.to_str().unwrap(),
    ]);
    assert!(stdout(&out).contains("analytic-limit: 0.8\n"));
    let (header, rows) = csv_rows(&file);
    assert_eq!(header, ["snr", "lb", "upsilon_star", "ratio", "floored", "slope"]);
    let ratios: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));

    let json = dir.path().join("p.json");
    ok(&[
        "prelog-report",
        "--model",
        "phase-noise",
        "--snr",
        "1e4:1e12:5",
        "--format",
        "json",
        "-o",
        json.to_str().unwrap(),
    ]);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["analytic_limit"], 0.5);
    assert_eq!(doc["upper_prelog"], 0.5);
    assert_eq!(doc["lower_bound_kind"], "PHASE_LB");
    for row in doc["rows"].as_array().unwrap().iter().skip(1) {
        let slope = row["slope"].as_f64().unwrap();
        assert!((slope - 0.5).abs() < 0.005, "{slope}");
    }
}

#[test]
fn szego_gap_decreases() {
    let out = ok(&[
        "szego",
        "--model",
        "rayleigh-band:W=0.25",
        "--snr",
        "100",
        "--n",
        "64,256,512",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,rate,integral,gap"));
    let gaps: Vec<f64> = lines
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert_eq!(
        run(&["szego", "--model", "phase-noise", "--n", "64", "--max-dim", "32"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn simulate_onoff_parity_structure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let acf = dir.path().join("acf.csv");
    let out = ok(&[
        "simulate",
        "--model",
        "onoff:W=0.0625",
        "--n",
        "100000",
        "--seed",
        "7",
        "-o",
        path.to_str().unwrap(),
        "--autocov",
        acf.to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert!(text.contains("nonzero-fraction: 0.5\n"), "{text}");
    let (_, rows) = csv_rows(&path);
    assert_eq!(rows.len(), 100_000);
    let zero_parity: Vec<bool> = rows.iter().map(|r| r[1] == "0" && r[2] == "0").collect();
    let first = zero_parity[0];
    assert!(zero_parity.iter().step_by(2).all(|z| *z == first));
    assert!(zero_parity.iter().skip(1).step_by(2).all(|z| *z != first));

    let (header, lags) = csv_rows(&acf);
    assert_eq!(
        header,
        ["m", "empirical_re", "empirical_im", "analytic_re", "analytic_im"]
    );
    for row in &lags {
        let emp: f64 = row[1].parse().unwrap();
        let ana: f64 = row[3].parse().unwrap();
        assert!((emp - ana).abs() < 0.02, "{row:?}");
    }
}

#[test]
fn simulate_binary_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("h.bin");
    ok(&[
        "simulate",
        "--model",
        "phase-noise",
        "--n",
        "1000",
        "--seed",
        "3",
        "--binary",
        "-o",
        file.to_str().unwrap(),
    ]);
    let bytes = fs::read(&file).unwrap();
    assert_eq!(bytes.len(), 16 + 1000 * 16);
    let path = SamplePath::read_binary(bytes.as_slice(), "phase-noise").unwrap();
    assert_eq!(path.seed, 3);
    assert!(path.values.iter().all(|h| h.norm() == 1.0));
}

#[test]
fn outputs_are_byte_identical() {
    let args = [
        "simulate",
        "--model",
        "rayleigh-band:W=0.1",
        "--n",
        "3000",
        "--seed",
        "11",
        "--harmonics",
        "256",
    ];
    let a = ok(&args);
    let b = run_env(&args, &[("PRELOG_LAB_THREADS", "1")]);
    let c = run_env(&args, &[("PRELOG_LAB_THREADS", "3")]);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(a.stderr, c.stderr);

    let sweep = ["bound-sweep", "--model", "onoff:W=0.2", "--format", "json"];
    let x = ok(&sweep);
    let y = run_env(&sweep, &[("PRELOG_LAB_THREADS", "2")]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn miso_two_antennas() {
    let out = ok(&["miso", "--spectra", "W=0.1,W=0.2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("miso-prelog: 0.8\n"));
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.json");
    ok(&[
        "miso",
        "--spectra",
        "W=0.1,W=0.2",
        "--format",
        "json",
        "-o",
        file.to_str().unwrap(),
    ]);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(doc["miso_prelog"], 0.8);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out_file = dir.path().join("out.csv");
    fs::write(
        &cfg,
        format!(
            r#"{{"model": "rayleigh-band:W=0.25", "snr": 100, "n": "16,32", "output": {:?}}}"#,
            out_file.to_str().unwrap()
        ),
    )
    .unwrap();
    ok(&[
        "szego",
        "--model",
        "phase-noise",
        "--n",
        "8",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    let (_, rows) = csv_rows(&out_file);
    let dims: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(dims, ["16", "32"]);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.5 * 201f64.ln());

    fs::write(&cfg, r#"{"modle": "phase-noise"}"#).unwrap();
    assert_eq!(
        run(&["szego", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn custom_model_from_spectrum_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.json");
    fs::write(
        &spec,
        r#"{"segments": [[-0.5, -0.1, 0.0], [-0.1, 0.1, 5.0], [0.1, 0.5, 0.0]], "variance": 1.0}"#,
    )
    .unwrap();
    let model = format!("custom:spectrum={},tail=rayleigh", spec.to_str().unwrap());
    let out = ok(&["spectrum", "--model", &model, "--snr", "1e6", "--format", "json"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["zero_set_measure"], 0.8);
    let rayleigh = ok(&[
        "spectrum",
        "--model",
        "rayleigh-band:W=0.1",
        "--snr",
        "1e6",
        "--format",
        "json",
    ]);
    let other: Value = serde_json::from_slice(&rayleigh.stdout).unwrap();
    assert_eq!(doc["rows"], other["rows"]);

    fs::write(&spec, r#"{"segments": [[-0.5, 0.5, 2.0]], "variance": 2.0}"#).unwrap();
    assert_eq!(run(&["spectrum", "--model", &model]).status.code(), Some(2));
}

#[test]
fn man_page_renders() {
    let out = ok(&["man"]);
    let page = stdout(&out);
    assert!(page.starts_with(".TH PRELOG-LAB 1"));
    assert!(page.contains(".SS bound-sweep"));
}
