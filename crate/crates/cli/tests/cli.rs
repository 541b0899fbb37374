use std::path::Path;
use std::process::{Command, Output};

use lindblad_cl_cli::output::{read_delay_map, read_spectrum};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lindblad-cl"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_scan(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scan.toml");
    std::fs::write(&path, "[scan]\ndelays_fs = [0, 12, 24]\n[spectrum]\npoints = 201\n").unwrap();
    path
}

#[test]
fn pure_cl_simulation_writes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "simulate",
        "--preset",
        "paper8",
        "--no-pulse",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = read_spectrum(&out.join("density.csv")).unwrap();
    let detected = read_spectrum(&out.join("detected.csv")).unwrap();
    assert_eq!(s.len(), 2001);
    // Without a pulse the detected spectrum is S.
    assert_eq!(s.real(), detected.real());
    let p = read_spectrum(&out.join("polarization.csv")).unwrap();
    assert!(p.magnitude().iter().all(|&v| v == 0.0));
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("density_peaks_nm: 877.95"));
}

#[test]
fn kinematics_at_30_kev() {
    let o = run(&["kinematics", "--kev", "30", "--distance-um", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("30,0.328376,"), "{text}");
    assert!(text.contains("\n1,6.8223\n"), "{text}");
}

#[test]
fn negative_rate_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "[system]\nwavelengths_nm = [800]\ngamma = [[0, -1e13], [0, 0]]\ng = [[0, 0], [1e9, 0]]\nmu_debye = [[0, 35], [35, 0]]\n",
    )
    .unwrap();
    let o = run(&[
        "simulate",
        "-c",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("system.gamma[0][1]"), "{}", stderr(&o));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_scan(dir.path());
    let o = bin()
        .args([
            "scan",
            "-c",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .env("LINDBLAD_CL_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("LINDBLAD_CL_THREADS"));
}

#[test]
fn simulation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["simulate", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["density.csv", "polarization.csv", "detected.csv", "summary.txt"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn scan_then_visibility() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_scan(dir.path());
    let out = dir.path().join("scan");
    let o = run(&[
        "scan",
        "-c",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--per-delay",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let map_path = out.join("delay_map.csv");
    let map = read_delay_map(&map_path).unwrap();
    assert_eq!(map.intensity.len(), 3);
    assert_eq!(map.wavelengths.len(), 201);
    assert!(out.join("delay_002_density.csv").exists());
    let vis_path = dir.path().join("vis.csv");
    let o = run(&[
        "visibility",
        map_path.to_str().unwrap(),
        "--out",
        vis_path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("delay_fs,visibility,n_fringes\n"));
    let vis = std::fs::read_to_string(&vis_path).unwrap();
    assert!(vis.contains(&format!("# config_digest: {}", map.provenance)));
}

#[test]
fn exponential_fit_of_a_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let mut text = String::from("delay_fs,visibility\n");
    for k in 0..40 {
        let x = 12.0 * k as f64;
        text.push_str(&format!("{x},{}\n", 0.5 * (-x / 150.0).exp() + 0.1));
    }
    std::fs::write(&path, text).unwrap();
    let o = run(&["fit", path.to_str().unwrap(), "--model", "exp"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("tau_d_fs:"))
        .unwrap()
        .to_string();
    let tau: f64 = line.trim_start_matches("tau_d_fs:").trim().parse().unwrap();
    assert!((tau - 150.0).abs() < 1e-6, "{tau}");
}

#[test]
fn missing_file_exits_2() {
    let o = run(&["visibility", "/nonexistent/map.csv"]);
    assert_eq!(o.status.code(), Some(2));
}
