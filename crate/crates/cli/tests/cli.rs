use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use uwu_cli::doc::FilterSpecDocument;
use uwu_cli::image::{format_pgm, read_plane};
use uwu_core::Plane;

fn uwu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uwu"))
        .args(args)
        .output()
        .expect("run uwu")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let out = dir.join(name);
    let mut args = vec!["synth"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", s(&out)]);
    let o = uwu(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn load(path: &Path) -> FilterSpecDocument {
    FilterSpecDocument::from_json(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_fresh_haar_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(dir.path(), "haar.json", &["orth", "--init", "haar"]);
    let doc = load(&spec);
    assert!((doc.params[0] - FRAC_PI_4).abs() < 1e-15);
    let o = uwu(&["verify", s(&spec)]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{stdout}");
    for name in ["resynthesis", "pr-roundtrip", "orthogonality", "gradient"] {
        assert!(stdout.contains(name), "{stdout}");
    }
}

#[test]
fn verify_detects_corrupted_tap() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(dir.path(), "haar.json", &["orth", "--init", "haar"]);
    let mut doc = load(&spec);
    doc.h0.taps[1] += 1e-3;
    fs::write(&spec, doc.to_json().unwrap()).unwrap();
    let o = uwu(&["verify", s(&spec)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("failed check(s): resynthesis"));
}

#[test]
fn verify_random_lifting_and_biorth() {
    let dir = tempfile::tempdir().unwrap();
    let lifting = synth(
        dir.path(),
        "l.json",
        &["lifting", "--init", "random", "--steps", "8"],
    );
    assert_eq!(code(&uwu(&["verify", s(&lifting)])), 0);
    let biorth = synth(
        dir.path(),
        "b.json",
        &["biorth", "--init", "random", "--steps", "4"],
    );
    let o = uwu(&["verify", s(&biorth)]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{stdout}");
    assert!(stdout.contains("mirror-image") && stdout.contains("symmetry"));
}

#[test]
fn explicit_params_with_negative_values() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(
        dir.path(),
        "l.json",
        &["lifting", "--params", "-0.25,0.5", "--base", "bior1.1"],
    );
    let doc = load(&spec);
    assert_eq!(doc.params, vec![-0.25, 0.5]);
    assert_eq!(doc.base.as_deref(), Some("bior1.1"));
    assert_eq!(doc.metadata.init, "explicit");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&uwu(&["synth", "orth", "--init", "zeros"])), 2);
    assert_eq!(code(&uwu(&["synth", "biorth", "--init", "db3"])), 2);
    assert_eq!(code(&uwu(&["synth", "typeb", "--init", "haar"])), 2);
    assert_eq!(code(&uwu(&["synth", "orth"])), 2);
    assert_eq!(code(&uwu(&["frobnicate"])), 2);
}

#[test]
fn lifting_step_warning() {
    let o = uwu(&["synth", "lifting", "--init", "zeros", "--steps", "9"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn missing_spec_is_runtime_error() {
    assert_eq!(code(&uwu(&["verify", "/nonexistent/spec.json"])), 1);
}

fn write_pgm(path: &Path, p: &Plane) {
    fs::write(path, format_pgm(p)).unwrap();
}

#[test]
fn analyze_constant_image_routes_dc_to_ll() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(dir.path(), "haar.json", &["orth", "--init", "haar"]);
    let img = dir.path().join("flat.pgm");
    write_pgm(&img, &Plane::from_fn(32, 32, |_, _| 0.6));
    let bands = dir.path().join("bands");
    assert_eq!(
        code(&uwu(&["analyze", s(&img), s(&spec), "--out", s(&bands)])),
        0
    );
    let manifest = fs::read_to_string(bands.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"band_height\": 16"));
    for name in ["hl", "lh", "hh"] {
        let bytes = fs::read(bands.join(format!("{name}.f64"))).unwrap();
        assert_eq!(bytes.len(), 16 * 16 * 8);
        for c in bytes.chunks_exact(8) {
            assert!(f64::from_le_bytes(c.try_into().unwrap()).abs() < 1e-14);
        }
    }
}

#[test]
fn analyze_then_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        ("o.json", &["orth", "--init", "db3"][..]),
        (
            "b.json",
            &["biorth", "--init", "random", "--steps", "3"][..],
        ),
        (
            "l.json",
            &["lifting", "--init", "random", "--steps", "2"][..],
        ),
    ] {
        let spec = synth(dir.path(), name, args);
        let img = dir.path().join("img.pgm");
        let p = Plane::from_fn(13, 10, |r, c| ((r * 31 + c * 17) % 256) as f64 / 255.0);
        write_pgm(&img, &p);
        let bands = dir.path().join(format!("{name}.bands"));
        assert_eq!(
            code(&uwu(&["analyze", s(&img), s(&spec), "--out", s(&bands)])),
            0
        );
        let out = dir.path().join(format!("{name}.f64"));
        assert_eq!(
            code(&uwu(&[
                "reconstruct",
                s(&bands),
                s(&spec),
                "--out",
                s(&out)
            ])),
            0
        );
        let back = read_plane(&out).unwrap();
        assert_eq!(back.dims(), (13, 10));
        assert!(back.max_abs_diff(&read_plane(&img).unwrap()) <= 1e-9);
    }
}

#[test]
fn fuse_halves_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(
        dir.path(),
        "b.json",
        &["biorth", "--init", "zeros", "--steps", "2"],
    );
    let img = dir.path().join("img.pgm");
    write_pgm(
        &img,
        &Plane::from_fn(7, 5, |r, c| ((r + c) % 3) as f64 / 2.0),
    );
    let head = dir.path().join("head.json");
    fs::write(
        &head,
        r#"{"weights": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]], "bias": [0.5, 0, 0, -0.5]}"#,
    )
    .unwrap();
    let out = dir.path().join("fused.f64");
    let o = uwu(&[
        "fuse",
        s(&img),
        s(&spec),
        "--head",
        s(&head),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_plane(&out).unwrap().dims(), (4, 3));
}

#[test]
fn bad_images_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(dir.path(), "haar.json", &["orth", "--init", "haar"]);
    let out = dir.path().join("o.f64");
    let empty = dir.path().join("empty.pgm");
    fs::write(&empty, "P2\n0 3\n255\n").unwrap();
    let huge = dir.path().join("huge.pgm");
    fs::write(&huge, "P2\n100000 1\n255\n0\n").unwrap();
    for img in [&empty, &huge] {
        assert_eq!(code(&uwu(&["fuse", s(img), s(&spec), "--out", s(&out)])), 1);
    }
    assert!(!out.exists());
}

#[test]
fn tune_reaches_quarter_pi() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(dir.path(), "o.json", &["orth", "--params", "0.5"]);
    let out = dir.path().join("tuned.json");
    let o = uwu(&[
        "tune",
        s(&spec),
        "--lr",
        "0.1",
        "--iters",
        "200",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!((load(&out).params[0] - FRAC_PI_4).abs() < 0.01);
    let trace = fs::read_to_string(dir.path().join("tuned.json.trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("iteration,objective"));
    assert_eq!(trace.lines().count(), 202);
}

#[test]
fn tune_with_zero_rate_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        ("o.json", &["orth", "--init", "db2"][..]),
        (
            "l.json",
            &["lifting", "--init", "random", "--steps", "3"][..],
        ),
    ] {
        let spec = synth(dir.path(), name, args);
        let out = dir.path().join(format!("tuned-{name}"));
        let o = uwu(&[
            "tune",
            s(&spec),
            "--lr",
            "0",
            "--iters",
            "1",
            "--out",
            s(&out),
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(fs::read(&spec).unwrap(), fs::read(&out).unwrap());
    }
}

#[test]
fn tune_ll_compaction_needs_image() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(
        dir.path(),
        "b.json",
        &["biorth", "--init", "random", "--steps", "2"],
    );
    let out = dir.path().join("t.json");
    let args = [
        "tune",
        s(&spec),
        "--objective",
        "ll-compaction",
        "--out",
        s(&out),
    ];
    assert_eq!(code(&uwu(&args)), 2);

    let img = dir.path().join("img.pgm");
    write_pgm(
        &img,
        &Plane::from_fn(16, 16, |r, c| ((r * c) % 7) as f64 / 6.0),
    );
    let o = uwu(&[
        "tune",
        s(&spec),
        "--objective",
        "ll-compaction",
        "--image",
        s(&img),
        "--lr",
        "0.05",
        "--iters",
        "5",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(dir.path().join("t.json.trace.csv")).unwrap();
    let values: Vec<f64> = trace
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.last().unwrap() >= &values[0]);
}

#[test]
fn freqz_of_haar() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(dir.path(), "haar.json", &["orth", "--init", "haar"]);
    let out = dir.path().join("f.csv");
    assert_eq!(
        code(&uwu(&[
            "freqz",
            s(&spec),
            "--samples",
            "512",
            "--out",
            s(&out)
        ])),
        0
    );
    let csv = fs::read_to_string(&out).unwrap();
    let last: Vec<f64> = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(last[1].abs() <= 1e-12);
    assert_eq!(code(&uwu(&["freqz", s(&spec), "--samples", "1"])), 2);
}

#[test]
fn synth_to_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = synth(
        dir.path(),
        "r.json",
        &["orth", "--init", "random", "--steps", "3", "--seed", "9"],
    );
    let o = uwu(&[
        "synth", "orth", "--init", "random", "--steps", "3", "--seed", "9",
    ]);
    assert_eq!(o.stdout, fs::read(&spec).unwrap());
}
