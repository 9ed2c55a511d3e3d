//! End-to-end checks of the binary: exit codes, reproducibility of the
//! persisted artifacts, config-file precedence, and record round-trips.

use std::path::Path;
use std::process::Command;

fn sausage() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sausage"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn constants_prints_capacity_row() {
    let out = sausage()
        .args(["constants", "--dim", "3", "--eps", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("6.283185"), "{text}");
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let status = sausage()
            .args([
                "simulate", "--space", "euclid", "--dim", "3", "--eps", "1", "--times", "0.5,1",
                "--paths", "6", "--dt", "0.005", "--seed", "42", "--out",
            ])
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(status.success());
        read(&out_dir.join("simulate.jsonl"))
    };
    let first = run("a");
    let second = run("b");
    assert_eq!(first, second, "reruns must be byte-identical");
    assert!(!first.contains("wall"), "no wall-clock field in records");
}

#[test]
fn bad_eps_is_a_config_error_naming_the_key() {
    let out = sausage()
        .args([
            "simulate", "--space", "euclid", "--dim", "3", "--eps=-1", "--times", "1,2",
            "--paths", "4",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("eps"), "{err}");
}

#[test]
fn unknown_config_key_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[simulate]\nepsilon = 1.0\n").unwrap();
    let out = sausage()
        .args(["simulate", "--times", "1,2", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("epsilon"), "{err}");
}

#[test]
fn flag_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[simulate]\nspace = \"euclid\"\ndim = 2\neps = 1.0\ntimes = [0.5, 1.0]\npaths = 4\nseed = 9\ndt = 0.01\n",
    )
    .unwrap();
    let out_a = dir.path().join("a");
    let status = sausage()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--paths", "5", "--out"])
        .arg(&out_a)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out_a.join("simulate.jsonl"));
    assert!(text.contains("\"n\":5"), "flag must win over file: {text}");
    assert!(text.contains("\"seed\":9"), "file values persist: {text}");
}

#[test]
fn fit_appends_record_after_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let status = sausage()
        .args([
            "simulate", "--space", "euclid", "--dim", "3", "--eps", "1", "--times",
            "0.5,1,2,4", "--paths", "12", "--dt", "0.005", "--seed", "3", "--out",
        ])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let status = sausage()
        .args(["fit", "--model", "inverse-sqrt", "--input"])
        .arg(out_dir.join("simulate.jsonl"))
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let fits = read(&out_dir.join("fits.jsonl"));
    assert!(fits.contains("InverseSqrt"), "{fits}");
}

#[test]
fn plot_renders_svg_from_records() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    sausage()
        .args([
            "simulate", "--space", "euclid", "--dim", "2", "--eps", "0.5", "--times", "0.5,1",
            "--paths", "4", "--dt", "0.01", "--seed", "1", "--out",
        ])
        .arg(&out_dir)
        .status()
        .unwrap();
    let chart = dir.path().join("chart.svg");
    let status = sausage()
        .args(["plot", "--mode", "per-time", "--input"])
        .arg(out_dir.join("simulate.jsonl"))
        .arg("--output")
        .arg(&chart)
        .status()
        .unwrap();
    assert!(status.success());
    let svg = read(&chart);
    assert!(svg.starts_with("<?xml") && svg.contains("</svg>"));
}

#[test]
fn hitting_probe_respects_strict_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let status = sausage()
        .args([
            "simulate", "--space", "euclid", "--dim", "2", "--eps", "0.5", "--times", "0.5,1",
            "--paths", "16", "--dt", "0.01", "--seed", "5", "--probe-center", "0,0",
            "--probe-eps", "1.0", "--strict-hitting", "--out",
        ])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let hits = read(&out_dir.join("hitting.jsonl"));
    assert!(hits.contains("\"strict\":true"), "{hits}");
}

#[test]
fn gasket_simulation_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let status = sausage()
        .args([
            "simulate", "--space", "gasket", "--times", "16,64", "--paths", "6", "--seed", "8",
            "--dump-paths", "--out",
        ])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out_dir.join("path_000000.csv").exists());
    let text = read(&out_dir.join("simulate.jsonl"));
    assert!(text.contains("gasket-walk"), "{text}");
}
