use std::path::Path;
use std::process::{Command, Output};

fn corremit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corremit")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = corremit(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn assert_reproducible(args: &[&str]) {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let mut full = vec!["--out", dir.path().to_str().unwrap()];
        full.extend_from_slice(args);
        run_ok(&full);
    }
    let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
    assert!(!fa.is_empty(), "{args:?} wrote no CSV");
    assert_eq!(fa, fb, "{args:?} is not byte-identical across runs");
}

#[test]
fn deterministic_outputs() {
    assert_reproducible(&["noise", "--omegas", "4", "--points", "30"]);
    assert_reproducible(&["rates", "--points", "12"]);
    assert_reproducible(&["--seed", "5", "subradiance", "--n", "30", "--realizations", "3", "--spacings", "0.3,3"]);
    assert_reproducible(&["--seed", "5", "superradiance", "--n", "20", "--realizations", "2", "--densities", "1"]);
    assert_reproducible(&["macrospin", "--points", "50"]);
}

#[test]
fn thread_count_does_not_change_results() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["subradiance", "--n", "30", "--realizations", "4", "--spacings", "1"];
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let mut full = vec!["--out", dir.path().to_str().unwrap(), "--seed", "9", "--threads", threads];
        full.extend_from_slice(&args);
        run_ok(&full);
    }
    assert_eq!(csv_files(a.path()), csv_files(b.path()));
}

#[test]
fn stochastic_commands_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = corremit(&["--out", dir.path().to_str().unwrap(), "subradiance", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "v_f_cm_s = 1e8\nm_g = 9.1e-28 g\nd_cm = 0\ndelta_hz = 1.2e9 kHz\ngamma_hz_per_g = 2.8e6\n")
        .unwrap();
    let out = corremit(&["--config", conf.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "rates"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("delta_hz"), "{err}");

    let out = corremit(&["--config", "/nonexistent/x.conf", "rates"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "v_f_cm_s = 1e8\nm_g = 9.1e-28\nd_cm = 2e-7 cm\ndelta_hz = 1.2e9\ngamma_hz_per_g = 2.8e6\n").unwrap();
    let out_dir = dir.path().join("out");
    run_ok(&["--config", conf.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "rates", "--points", "5"]);
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("d_cm = 2e-7 cm"), "{manifest}");
}

#[test]
fn verify_passes() {
    let out = run_ok(&["verify"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.contains("PASS fdt_relative"), "{text}");
}
