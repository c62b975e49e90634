use std::path::Path;
use std::process::{Command, Output};

fn qdbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let header: Vec<&str> = csv
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    data_rows(csv).into_iter().map(|r| r[i].clone()).collect()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    let many = dir.path().join("many.csv");
    let again = dir.path().join("again.csv");
    for (path, workers) in [(&one, "1"), (&many, "3"), (&again, "1")] {
        let out = qdbench(&[
            "bitcommit",
            "--source",
            "la",
            "--sweep",
            "eta",
            "0.1",
            "1",
            "12",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(read(&one), read(&many));
    assert_eq!(read(&one), read(&again));
    assert_eq!(data_rows(&read(&one)).len(), 12);
}

#[test]
fn coherent_source_rejected_by_decoy_bb84() {
    let out = qdbench(&["decoy", "--source", "re-coherent", "--distance", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("phase") && msg.contains("randomized"), "{msg}");
    assert!(out.stdout.is_empty());
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["bb84", "--source", "xx"][..],
        &["tokens", "--sweep", "eta", "0.1", "1", "1"],
        &["tokens", "--sweep", "eta", "1", "0.1", "5"],
        &["bitcommit", "--sweep", "distance", "0", "10", "5"],
        &["bb84", "--source", "pds", "--sweep", "eta", "0.1", "1", "3"],
        &["coinflip", "--source", "pds"],
        &["bb84", "--eta", "1.5"],
    ] {
        let out = qdbench(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# bit commitment\nsource = la\neta = 0.5\nm3 = vacuum\n",
    )
    .unwrap();
    let out = qdbench(&[
        "bitcommit",
        "--config",
        cfg.to_str().unwrap(),
        "--eta",
        "0.3",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(column(&csv, "eta"), ["0.3"]);
    assert_eq!(column(&csv, "source"), ["LA-incoherent"]);
    assert!(csv.contains("# assumption bitcommit_m3: 1-P(0)\n"));

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let out = qdbench(&["bitcommit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn token_sweep_over_collection_efficiency() {
    let out = qdbench(&[
        "tokens", "--source", "tpe", "--sweep", "eta", "0.1", "1.0", "90",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    for key in [
        "toolkit_version",
        "assumption log_base",
        "assumption choi_convention",
    ] {
        assert!(csv.contains(&format!("# {key}: ")), "{key}");
    }
    let eta: Vec<f64> = column(&csv, "eta")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let tol: Vec<f64> = column(&csv, "noise_tolerance")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(tol.len(), 90);
    assert!(eta.windows(2).all(|w| w[0] < w[1]));
    assert!(tol.windows(2).all(|w| w[1] >= w[0] - 1e-7));
    assert!(tol[0] > 0.0 && tol[89] < 0.25 * (1.0 - std::f64::consts::FRAC_1_SQRT_2) + 1e-7);
    for gap in column(&csv, "relative_gap") {
        assert!(gap.parse::<f64>().unwrap() <= 1e-7);
    }
}

#[test]
fn figure_bundle_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdbench(&["figures", "fig10", "--out", dir.path().to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "fig10_la.csv",
        "fig10_tpe.csv",
        "fig10_rp-pds.csv",
        "plot_fig10.py",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let la = read(&dir.path().join("fig10_la.csv"));
    assert!(la.contains("# figure: fig10\n"));
    assert_eq!(data_rows(&la).len(), 100);

    let out = qdbench(&["figures", "fig99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let out = qdbench(&["selftest"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}
