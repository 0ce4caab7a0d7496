use std::path::Path;
use std::process::{Command, Output};

use tecsim::checks::load_record;

fn tecsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tecsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = tecsim(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn all_single_sweeps_have_four_perfect_cases() {
    for pipeline in ["bitflip", "phaseflip", "erasure"] {
        let csv = stdout(&["run", "--pipeline", pipeline, "--error-kind", "all-single", "--format", "csv"]);
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 4, "{pipeline}");
        for row in rows {
            let f: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
            assert!((f - 1.0).abs() < 1e-10, "{pipeline}: {row}");
        }
    }
}

#[test]
fn gate_noise_lowers_the_fidelity() {
    let fidelity = |p2: &str| -> f64 {
        let csv = stdout(&[
            "run", "--pipeline", "bitflip", "--noise-p2", p2, "--trajectories", "1000", "--seed", "11", "--format", "csv",
        ]);
        csv.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap()
    };
    let (clean, noisy) = (fidelity("0"), fidelity("0.01"));
    assert!((clean - 1.0).abs() < 1e-10);
    assert!(noisy < clean, "{noisy} vs {clean}");
}

#[test]
fn plot_data_of_a_ground_state_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"pipeline": "bitflip", "message": {"alpha": 1.0, "beta": 0.0}, "tomography": true}"#,
    )
    .unwrap();
    let rec = dir.path().join("rec.json");
    stdout(&["run", "--config", path(&cfg), "--out", path(&rec)]);
    let csv = stdout(&["plot", "--record", path(&rec)]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("row,col,real_exp,imag_exp,real_ideal,imag_ideal"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let ideal: Vec<f64> = rows.iter().map(|r| r[4]).collect();
    assert_eq!(ideal, [1.0, 0.0, 0.0, 0.0]);
    // Sampled off-diagonals can push the raw estimate off the PSD cone;
    // the projection then moves a little weight off the diagonal.
    assert!(rows[0][2] > 0.99, "{:?}", rows[0]);

    // The measured bars are the ones stored in the record.
    let t = load_record(&rec).unwrap().cases[0].tomography.clone().unwrap();
    for r in &rows {
        let (i, j) = (r[0] as usize, r[1] as usize);
        assert_eq!((r[2], r[3]), (t.real[i][j], t.imag[i][j]));
    }
}

#[test]
fn plot_without_tomography_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("rec.json");
    stdout(&["run", "--pipeline", "bitflip", "--out", path(&rec)]);
    let out = tecsim(&["plot", "--record", path(&rec)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no tomography"));
}

#[test]
fn invalid_configs_exit_nonzero_with_a_diagnostic() {
    let out = tecsim(&["run", "--pipeline", "bitflip", "--error-kind", "erasure", "--error-qubit", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("case 0"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"pipeline": "bitflip", "shots": 10, "colour": "red"}"#).unwrap();
    let out = tecsim(&["run", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn checks_exit_zero_when_they_hold() {
    for args in [&["reps"][..], &["map"][..], &["route", "--random", "10"][..]] {
        assert!(tecsim(args).status.success(), "{args:?}");
    }
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/golden");
    assert!(tecsim(&["golden", "--dir", golden]).status.success());
}
