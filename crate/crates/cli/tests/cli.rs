use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fsqc::mesh::{generate, io};
use nalgebra::Point3;

fn fsqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsqc")).args(args).output().unwrap()
}

fn fsqc_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsqc"))
        .args(args)
        .env("FSQC_THREADS", threads)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report_value(path: &Path, key: &str) -> Option<String> {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("metric,value\nversion,"));
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")).map(str::to_string))
}

fn report_f64(path: &Path, key: &str) -> f64 {
    report_value(path, key).unwrap_or_else(|| panic!("no {key} in report")).parse().unwrap()
}

fn icosphere(dir: &Path, level: &str) -> PathBuf {
    let path = dir.join(format!("ico{level}.obj"));
    let o = fsqc(&["gen", "icosphere", "--level", level, "--out", s(&path)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    path
}

#[test]
fn param_on_an_icosphere() {
    let dir = tempfile::tempdir().unwrap();
    let ico = icosphere(dir.path(), "3");
    let (out, report) = (dir.path().join("sphere.obj"), dir.path().join("stats.csv"));
    let o = fsqc(&["param", "--in", s(&ico), "--uniform-k", "1", "--out", s(&out), "--report", s(&report)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(report_f64(&report, "mean_dilation") <= 1.1);
    assert_eq!(report_f64(&report, "flipped_faces"), 0.0);
    let sphere = io::load_mesh_auto(&out).unwrap();
    assert!(sphere.vertices().iter().all(|p| (p.coords.norm() - 1.0).abs() < 1e-9));
    let hist = std::fs::read_to_string(dir.path().join("stats_histogram.csv")).unwrap();
    assert!(hist.starts_with("bin_lo,bin_hi,count\n"));
    let total: usize = hist.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 1280);
}

#[test]
fn param_with_a_dilation_file_and_direction() {
    let dir = tempfile::tempdir().unwrap();
    let ico = icosphere(dir.path(), "2");
    let field = dir.path().join("k.csv");
    let mut text = String::from("face_index,K\n");
    for f in 0..320 {
        text.push_str(&format!("{f},{}\n", if f % 2 == 0 { 1.5 } else { 1.0 }));
    }
    std::fs::write(&field, text).unwrap();
    let (out, report) = (dir.path().join("s.off"), dir.path().join("r.csv"));
    let o = fsqc(&[
        "param", "--in", s(&ico), "--dilation", s(&field), "--out", s(&out), "--report", s(&report), "--p1", "0",
        "--p2", "7",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(report_value(&report, "rotation_angle").is_some());
    assert!((report_f64(&report, "target_mean") - 1.25).abs() < 1e-12);
}

#[test]
fn input_errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.obj");
    let out = dir.path().join("o.obj");
    let o = fsqc(&["param", "--in", s(&missing), "--uniform-k", "1", "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nope.obj"), "{}", stderr(&o));

    let ico = icosphere(dir.path(), "1");
    let o = fsqc(&["param", "--in", s(&ico), "--uniform-k", "0.5", "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("K must be ≥ 1"), "{}", stderr(&o));

    // Both or neither dilation source, unknown flags, bad tolerance.
    let o = fsqc(&["param", "--in", s(&ico), "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    let o = fsqc(&["param", "--in", s(&ico), "--uniform-k", "1", "--dilation", "k.csv", "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    let o = fsqc(&["param", "--bogus"]);
    assert_eq!(code(&o), 1);
    let o = fsqc(&["param", "--in", s(&ico), "--uniform-k", "1", "--out", s(&out), "--tolerance", "-1"]);
    assert_eq!(code(&o), 1);

    let torus = dir.path().join("torus.obj");
    io::save_mesh_auto(&generate::torus(10, 6, 2.0, 0.5), &torus).unwrap();
    let o = fsqc(&["param", "--in", s(&torus), "--uniform-k", "1", "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("stage `validate`"), "{}", stderr(&o));
}

#[test]
fn remesh_with_empty_and_ridge_regions() {
    let dir = tempfile::tempdir().unwrap();
    let ico = icosphere(dir.path(), "2");
    let spec = dir.path().join("empty.txt");
    std::fs::write(&spec, "faces =\nk = 2.5\np1 = 0\np2 = 5\n").unwrap();
    let out = dir.path().join("re.ply");
    let o = fsqc(&["remesh", "--in", s(&ico), "--region", s(&spec), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = io::load_mesh_auto(&out).unwrap();
    assert!(fsqc::mesh::validate_genus0(&m).passed());
    assert_eq!(m.vertex_count(), 162);

    let (ridge, ridge_spec) = (dir.path().join("ridge.obj"), dir.path().join("ridge.txt"));
    let o = fsqc(&["gen", "ridge", "--frequency", "24", "--out", s(&ridge), "--spec", s(&ridge_spec)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (out, report) = (dir.path().join("ridge_re.obj"), dir.path().join("q.csv"));
    let o = fsqc(&["remesh", "--in", s(&ridge), "--region", s(&ridge_spec), "--out", s(&out), "--report", s(&report)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(report_f64(&report, "region_aspect_uplift") > 1.2);
    assert!(report_f64(&report, "off_region_aspect_change").abs() < 0.15);
    let faces = std::fs::read_to_string(dir.path().join("q_faces.csv")).unwrap();
    assert!(faces.starts_with("face_index,min_angle_deg,aspect_ratio\n"));

    std::fs::write(&spec, "faces =\nk = 2.5\np1 = 3\np2 = 3\n").unwrap();
    let o = fsqc(&["remesh", "--in", s(&ico), "--region", s(&spec), "--out", s(&out)]);
    assert_eq!(code(&o), 1);
}

fn flat_patch(dir: &Path, stretch: f64, name: &str) -> PathBuf {
    let disk = generate::hex_disk(3);
    let v = disk.vertices().iter().map(|p| Point3::new(stretch * p.x, p.y, 0.0)).collect();
    let path = dir.join(name);
    io::save_mesh_auto(&disk.with_vertices(v).unwrap(), &path).unwrap();
    path
}

#[test]
fn metrics_examples() {
    let dir = tempfile::tempdir().unwrap();
    let ico = icosphere(dir.path(), "2");
    let scaled = dir.path().join("scaled.obj");
    let m = io::load_mesh_auto(&ico).unwrap();
    io::save_mesh_auto(&m.with_vertices(m.vertices().iter().map(|p| p * 3.5).collect()).unwrap(), &scaled).unwrap();
    let report = dir.path().join("m.csv");
    for target in [&ico, &scaled] {
        let o = fsqc(&["metrics", "--source", s(&ico), "--target", s(target), "--report", s(&report)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!((report_f64(&report, "mean_dilation") - 1.0).abs() < 1e-9);
        assert!(report_f64(&report, "sd_dilation") < 1e-9);
    }

    let (flat, doubled) = (flat_patch(dir.path(), 1.0, "flat.obj"), flat_patch(dir.path(), 2.0, "doubled.obj"));
    let o = fsqc(&["metrics", "--source", s(&flat), "--target", s(&doubled), "--report", s(&report), "--uniform-k", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!((report_f64(&report, "mean_dilation") - 2.0).abs() < 1e-9);
    assert!(report_f64(&report, "sd_dilation") < 1e-9);
    assert!(report_f64(&report, "mean_drift").abs() < 1e-9);
    assert_eq!(report_f64(&report, "flipped_faces"), 0.0);

    let o = fsqc(&["metrics", "--source", s(&ico), "--target", s(&flat)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn runs_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (ridge, spec) = (dir.path().join("r.obj"), dir.path().join("r.txt"));
    assert_eq!(code(&fsqc(&["gen", "ridge", "--frequency", "16", "--out", s(&ridge), "--spec", s(&spec)])), 0);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "1", "3"].iter().enumerate() {
        let (out, report) = (dir.path().join(format!("o{i}.obj")), dir.path().join(format!("q{i}.csv")));
        let o = fsqc_env(&["remesh", "--in", s(&ridge), "--region", s(&spec), "--out", s(&out), "--report", s(&report)], threads);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let (sp, sr) = (dir.path().join(format!("s{i}.obj")), dir.path().join(format!("p{i}.csv")));
        let o = fsqc_env(&["param", "--in", s(&ridge), "--uniform-k", "2", "--out", s(&sp), "--report", s(&sr)], threads);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push([out, report, sp, sr].map(|p| std::fs::read(p).unwrap()));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}
