use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lasa_cli::io::{read_chain, read_gamma};
use lasa_core::features::{summarize_moments, SegmentFeatures};
use tempfile::TempDir;

fn lasa(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lasa"))
        .current_dir(dir)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("LASA_OUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = lasa(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn square_with_points(dir: &Path) -> std::path::PathBuf {
    let mut text = String::from("x,y\n");
    let corners = [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)];
    let jitter = [0.05, -0.04, 0.03];
    for e in 0..4 {
        let (ax, ay) = corners[e];
        let (bx, by): (f64, f64) = corners[(e + 1) % 4];
        text.push_str(&format!("{ax},{ay}\n"));
        for s in 1..3 {
            let t = s as f64 / 3.0;
            let (nx, ny) = ((by - ay) / 4.0, -(bx - ax) / 4.0);
            let eps = jitter[(e + s) % 3];
            text.push_str(&format!(
                "{},{}\n",
                ax + t * (bx - ax) + eps * nx,
                ay + t * (by - ay) + eps * ny
            ));
        }
    }
    let path = dir.join("square.csv");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn unit_square_reads_with_and_without_closure() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    fs::write(&a, "0,0\n1,0\n1,1\n0,1\n").unwrap();
    fs::write(&b, "x,y\n0,0\n1,0\n1,1\n0,1\n0,0\n").unwrap();
    let ca = read_chain(&a).unwrap();
    let cb = read_chain(&b).unwrap();
    assert_eq!(ca.chain.len(), 4);
    assert_eq!(ca.chain, cb.chain);
    assert!(ca.warnings.is_empty());
    assert_eq!(cb.warnings.len(), 1);
}

#[test]
fn detect_short_run_yields_valid_landmarks() {
    let tmp = TempDir::new().unwrap();
    square_with_points(tmp.path());
    ok(
        tmp.path(),
        &["detect", "square.csv", "--iterations", "10", "--out-dir", "out"],
    );
    let out = tmp.path().join("out");
    let gamma = read_gamma(&out.join("square.gamma.csv"), Some(12)).unwrap();
    assert!(gamma.is_structurally_valid());

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("square.report.json")).unwrap()).unwrap();
    let landmarks: Vec<u64> = report["landmarks_map"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(landmarks.len() as u64, report["k_map"].as_u64().unwrap());
    assert!(landmarks.iter().all(|&l| (1..=12).contains(&l)));
    for ci in report["credible_intervals"].as_array().unwrap() {
        let (lo, hi, l) = (
            ci["lo"].as_u64().unwrap(),
            ci["hi"].as_u64().unwrap(),
            ci["landmark"].as_u64().unwrap(),
        );
        let inside = if lo <= hi {
            lo <= l && l <= hi
        } else {
            l >= lo || l <= hi
        };
        assert!(inside, "{ci}");
    }
    assert!(report["landmarks_ppm"].is_array());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["created_unix"], 1_700_000_000u64);
    assert_eq!(manifest["inputs"][0]["sampler"]["iterations"], 10);
}

#[test]
fn no_ppm_and_manifest_only() {
    let tmp = TempDir::new().unwrap();
    square_with_points(tmp.path());
    ok(
        tmp.path(),
        &[
            "detect",
            "square.csv",
            "--iterations",
            "200",
            "--no-ppm",
            "--out-dir",
            "a",
        ],
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("a/square.report.json")).unwrap()).unwrap();
    assert!(report["landmarks_ppm"].is_null());

    ok(
        tmp.path(),
        &["detect", "square.csv", "--manifest-only", "--out-dir", "b"],
    );
    let names: Vec<_> = fs::read_dir(tmp.path().join("b"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, vec!["manifest.json"]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("b/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["inputs"][0]["sampler"]["iterations"], 1300);
    assert!((manifest["inputs"][0]["hyperparameters"]["beta_sigma"].as_f64().unwrap() - 1.0 / 12.0).abs() < 1e-15);
}

#[test]
fn out_dir_from_environment() {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_lasa"))
        .current_dir(tmp.path())
        .env("LASA_OUT_DIR", "from-env")
        .args(["simulate", "--n", "30"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("from-env/sim_001.csv").is_file());
}

#[test]
fn simulate_round_trips_and_repeats() {
    let tmp = TempDir::new().unwrap();
    ok(
        tmp.path(),
        &["simulate", "--replicates", "2", "--seed", "9", "--out-dir", "a"],
    );
    ok(
        tmp.path(),
        &["simulate", "--replicates", "2", "--seed", "9", "--out-dir", "b"],
    );
    for name in ["sim_001.csv", "sim_001.truth.csv", "sim_002.csv", "sim_002.truth.csv"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    assert!(!tmp.path().join("a/sim_003.csv").exists());
    let loaded = read_chain(&tmp.path().join("a/sim_001.csv")).unwrap();
    assert_eq!(loaded.chain.len(), 139);
    let truth = read_gamma(&tmp.path().join("a/sim_001.truth.csv"), Some(139)).unwrap();
    assert_eq!(truth.count(), 4);
}

#[test]
fn evaluate_truth_against_itself_and_hull() {
    let tmp = TempDir::new().unwrap();
    ok(
        tmp.path(),
        &["simulate", "--replicates", "3", "--n", "60", "--out-dir", "sim"],
    );
    fs::create_dir(tmp.path().join("pred")).unwrap();
    for i in 1..=3 {
        fs::copy(
            tmp.path().join(format!("sim/sim_00{i}.truth.csv")),
            tmp.path().join(format!("pred/sim_00{i}.gamma.csv")),
        )
        .unwrap();
    }
    ok(
        tmp.path(),
        &[
            "evaluate",
            "--truth-dir",
            "sim",
            "--pred-dir",
            "pred",
            "--out-dir",
            "ev",
        ],
    );
    let (header, rows) = read_table(&tmp.path().join("ev/metrics.csv"));
    let mcc = header.iter().position(|h| h == "mcc").unwrap();
    let ari = header.iter().position(|h| h == "ari").unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(r[mcc].parse::<f64>().unwrap(), 1.0);
        assert_eq!(r[ari].parse::<f64>().unwrap(), 1.0);
    }

    ok(
        tmp.path(),
        &[
            "evaluate",
            "--truth-dir",
            "sim",
            "--method",
            "hull",
            "--chain-dir",
            "sim",
            "--out-dir",
            "hull",
        ],
    );
    let (header, rows) = read_table(&tmp.path().join("hull/metrics.csv"));
    let mcc = header.iter().position(|h| h == "mcc").unwrap();
    let mut values: Vec<f64> = rows.iter().map(|r| r[mcc].parse().unwrap()).collect();
    values.sort_by(f64::total_cmp);
    let (_, med) = read_table(&tmp.path().join("hull/medians.csv"));
    assert_eq!(med[0][0], "hull");
    assert_eq!(med[0][2].parse::<f64>().unwrap(), values[1]);
}

#[test]
fn evaluate_rejects_length_mismatch() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["simulate", "--n", "40", "--out-dir", "sim"]);
    fs::create_dir(tmp.path().join("pred")).unwrap();
    let mut short = String::from("vertex,gamma\n");
    for i in 1..=30 {
        short.push_str(&format!("{i},{}\n", u8::from(i % 10 == 1)));
    }
    fs::write(tmp.path().join("pred/sim_001.gamma.csv"), short).unwrap();
    let out = lasa(
        tmp.path(),
        &[
            "evaluate",
            "--truth-dir",
            "sim",
            "--pred-dir",
            "pred",
            "--out-dir",
            "ev",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn features_zero_noise_and_moments() {
    let tmp = TempDir::new().unwrap();
    ok(
        tmp.path(),
        &[
            "simulate",
            "--sigma2",
            "0",
            "--replicates",
            "2",
            "--n",
            "80",
            "--out-dir",
            "sim",
        ],
    );
    ok(
        tmp.path(),
        &[
            "features",
            "sim/sim_001.csv",
            "sim/sim_002.csv",
            "--landmark-dir",
            "sim",
            "--landmark-suffix",
            ".truth.csv",
            "--out-dir",
            "f",
        ],
    );
    let (header, rows) = read_table(&tmp.path().join("f/segment_features.csv"));
    let ra = header.iter().position(|h| h == "ra").unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[ra].parse::<f64>().unwrap() == 0.0));

    ok(
        tmp.path(),
        &["simulate", "--sigma2", "1", "--n", "80", "--out-dir", "noisy"],
    );
    ok(
        tmp.path(),
        &[
            "features",
            "noisy/sim_001.csv",
            "--landmark-dir",
            "noisy",
            "--landmark-suffix",
            ".truth.csv",
            "--tbr-window",
            "5,10,20,40",
            "--out-dir",
            "g",
        ],
    );
    let (seg_header, seg_rows) = read_table(&tmp.path().join("g/segment_features.csv"));
    let (ch_header, ch_rows) = read_table(&tmp.path().join("g/chain_features.csv"));
    for l in [5, 10, 20, 40] {
        assert!(ch_header.contains(&format!("tbr_{l}")));
    }
    assert_eq!(ch_header.iter().filter(|h| h.starts_with("tbr_")).count(), 4);
    for f in SegmentFeatures::COLUMNS {
        let col = seg_header.iter().position(|h| h == f).unwrap();
        let vals: Vec<f64> = seg_rows.iter().filter_map(|r| r[col].parse().ok()).collect();
        let expect = summarize_moments(&vals).unwrap();
        let mean_col = ch_header.iter().position(|h| *h == format!("{f}_mean")).unwrap();
        let got: f64 = ch_rows[0][mean_col].parse().unwrap();
        assert!((got - expect.mean).abs() <= 1e-12 * expect.mean.abs().max(1.0), "{f}");
        let sd_col = ch_header.iter().position(|h| *h == format!("{f}_sd")).unwrap();
        if let Some(sd) = expect.sd {
            let got: f64 = ch_rows[0][sd_col].parse().unwrap();
            assert!((got - sd).abs() <= 1e-9 * sd.max(1e-12), "{f}");
        }
    }
}

#[test]
fn features_rejects_wrong_landmark_length() {
    let tmp = TempDir::new().unwrap();
    square_with_points(tmp.path());
    fs::create_dir(tmp.path().join("lm")).unwrap();
    fs::write(
        tmp.path().join("lm/square.gamma.csv"),
        "vertex,gamma\n1,1\n2,0\n3,1\n4,0\n5,1\n",
    )
    .unwrap();
    let out = lasa(
        tmp.path(),
        &["features", "square.csv", "--landmark-dir", "lm", "--out-dir", "f"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertices have no indicator"));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(lasa(tmp.path(), &["--version"]).status.code(), Some(0));
    assert_eq!(lasa(tmp.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(lasa(tmp.path(), &["detect"]).status.code(), Some(1));
    assert_eq!(
        lasa(tmp.path(), &["detect", "x.csv", "--burnin", "abc"]).status.code(),
        Some(1)
    );
    assert_eq!(lasa(tmp.path(), &["detect", "missing.csv"]).status.code(), Some(2));
    assert_eq!(lasa(tmp.path(), &["simulate", "--k", "2"]).status.code(), Some(1));

    fs::write(tmp.path().join("bad.csv"), "x,y\n0,0\na,b\n1,1\n").unwrap();
    let out = lasa(tmp.path(), &["detect", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:3"));

    fs::write(tmp.path().join("two.csv"), "0,0\n1,0\n0,0\n1,0\n").unwrap();
    assert_eq!(lasa(tmp.path(), &["detect", "two.csv"]).status.code(), Some(2));

    square_with_points(tmp.path());
    let out = lasa(tmp.path(), &["detect", "square.csv", "--burnin", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_input_matches_csv() {
    let tmp = TempDir::new().unwrap();
    let csv_path = square_with_points(tmp.path());
    let chain = read_chain(&csv_path).unwrap().chain;
    let pairs: Vec<[f64; 2]> = chain.vertices().iter().map(|v| [v.x, v.y]).collect();
    fs::write(tmp.path().join("sq.json"), serde_json::to_string(&pairs).unwrap()).unwrap();
    assert_eq!(read_chain(&tmp.path().join("sq.json")).unwrap().chain, chain);
    ok(
        tmp.path(),
        &["detect", "square.csv", "--iterations", "500", "--out-dir", "a"],
    );
    ok(
        tmp.path(),
        &["detect", "sq.json", "--iterations", "500", "--out-dir", "b"],
    );
    assert_eq!(
        fs::read(tmp.path().join("a/square.gamma.csv")).unwrap(),
        fs::read(tmp.path().join("b/sq.gamma.csv")).unwrap()
    );
}
