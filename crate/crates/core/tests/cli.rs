use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use csstd::pipeline::{encode_feature_file, encode_pgm, read_feature_file};
use csstd::{classic_sigmoid, Field};

fn csstd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csstd"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_mask(path: &Path, w: usize, h: usize, f: impl Fn(i64, i64) -> bool) {
    let pixels: Vec<u8> = (0..w * h)
        .map(|i| {
            if f((i % w) as i64, (i / w) as i64) {
                255
            } else {
                0
            }
        })
        .collect();
    fs::write(path, encode_pgm(w, h, &pixels)).unwrap();
}

fn disk(x: i64, y: i64) -> bool {
    (x - 40).pow(2) + (y - 40).pow(2) <= 400
}

fn l_shape(x: i64, y: i64) -> bool {
    (10..50).contains(&x) && (10..50).contains(&y) && !(x >= 25 && y < 35)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("disk.pgm");
    let l = dir.path().join("l.pgm");
    let e = dir.path().join("empty.pgm");
    write_mask(&d, 80, 80, disk);
    write_mask(&l, 60, 60, l_shape);
    write_mask(&e, 16, 16, |_, _| false);

    let out = csstd(&["verify", "--input", p(&d)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict=true"));
    assert_eq!(code(&csstd(&["verify", "--input", p(&l)])), 1);
    let out = csstd(&["verify", "--input", p(&e)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("components=0"));

    let bad = dir.path().join("bad.pgm");
    fs::write(&bad, b"P2\n1 1\n255\n0").unwrap();
    assert_eq!(code(&csstd(&["verify", "--input", p(&bad)])), 2);
}

#[test]
fn project_keeps_a_disk_byte_identical_and_convexifies_an_l() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("disk.pgm");
    write_mask(&d, 80, 80, disk);
    let prefix = dir.path().join("out/disk");
    assert_eq!(
        code(&csstd(&[
            "project",
            "--input",
            p(&d),
            "--out-prefix",
            p(&prefix)
        ])),
        0
    );
    let out = dir.path().join("out/disk.mask.pgm");
    assert_eq!(fs::read(&out).unwrap(), fs::read(&d).unwrap());
    assert!(dir.path().join("out/disk.manifest.txt").exists());

    let l = dir.path().join("l.pgm");
    write_mask(&l, 60, 60, l_shape);
    let prefix = dir.path().join("l");
    assert_eq!(
        code(&csstd(&[
            "project",
            "--input",
            p(&l),
            "--out-prefix",
            p(&prefix),
            "--inner",
            "100"
        ])),
        0
    );
    let projected = dir.path().join("l.mask.pgm");
    assert_eq!(code(&csstd(&["verify", "--input", p(&projected)])), 0);
}

#[test]
fn segment_reduces_to_the_classic_sigmoid() {
    let dir = tempfile::tempdir().unwrap();
    let o = Field::from_fn(24, 20, |x, y| (x as f64 * 0.4).sin() * 2.0 - y as f64 * 0.1);
    let features = dir.path().join("o.ff1");
    fs::write(
        &features,
        encode_feature_file(std::slice::from_ref(&o)).unwrap(),
    )
    .unwrap();
    let prefix = dir.path().join("run");
    let out = csstd(&[
        "segment",
        "--features",
        p(&features),
        "--no-convex",
        "--no-td",
        "--epsilon",
        "1",
        "--out-prefix",
        p(&prefix),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let masks = read_feature_file(dir.path().join("run.masks.ff1")).unwrap();
    let expected = classic_sigmoid(&o);
    // masks are stored as f32
    assert!(masks[0].sup_distance(&expected).unwrap() < 1e-7);
    let trace = fs::read_to_string(dir.path().join("run.trace.csv")).unwrap();
    assert!(trace.starts_with("iter,data_energy,td_energy,total,sup_change\n"));
    for suffix in [".labels.pgm", ".overlay.ppm", ".manifest.txt"] {
        assert!(dir.path().join(format!("run{suffix}")).exists(), "{suffix}");
    }
}

#[test]
fn segment_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("img.pgm");
    write_mask(&img, 32, 32, |x, _| x < 16);
    let prefix = dir.path().join("run");
    let out = csstd(&["segment", "--input", p(&img), "--out-prefix", p(&prefix)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--means"));
    assert_eq!(code(&csstd(&["segment", "--out-prefix", p(&prefix)])), 2);
    assert_eq!(
        code(&csstd(&[
            "segment",
            "--input",
            p(&img),
            "--means",
            "1,0",
            "--radii",
            "3,2",
            "--out-prefix",
            p(&prefix)
        ])),
        2
    );
    assert_eq!(code(&csstd(&["frobnicate"])), 2);
    assert_eq!(
        code(&csstd(&[
            "demo",
            "--kind",
            "fig9",
            "--out-dir",
            p(dir.path())
        ])),
        2
    );
}

#[test]
fn segment_an_image_with_means() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("img.pgm");
    let pixels: Vec<u8> = (0..64 * 64)
        .map(|i| {
            if disk((i % 64) as i64 + 8, (i / 64) as i64 + 8) {
                191
            } else {
                64
            }
        })
        .collect();
    fs::write(&img, encode_pgm(64, 64, &pixels)).unwrap();
    let prefix = dir.path().join("seg");
    let out = csstd(&[
        "segment",
        "--input",
        p(&img),
        "--means",
        "0.75,0.25",
        "--out-prefix",
        p(&prefix),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let labels = dir.path().join("seg.labels.pgm");
    let out = csstd(&["dice", "--pred", p(&labels), "--gt", p(&labels)]);
    assert_eq!(stdout(&out).trim(), "100.0");
    let masks = dir.path().join("seg.masks.ff1");
    assert_eq!(code(&csstd(&["verify", "--input", p(&masks)])), 0);
}

#[test]
fn dice_values() {
    let dir = tempfile::tempdir().unwrap();
    let label = |name: &str, f: &dyn Fn(usize) -> bool| {
        let path = dir.path().join(name);
        let pixels: Vec<u8> = (0..200).map(|i| if f(i) { 1 } else { 2 }).collect();
        fs::write(&path, encode_pgm(20, 10, &pixels)).unwrap();
        path
    };
    let a = label("a.pgm", &|i| i < 100);
    let b = label("b.pgm", &|i| (40..140).contains(&i));
    let c = label("c.pgm", &|i| i >= 100);
    let run = |x: &Path, y: &Path| {
        stdout(&csstd(&[
            "dice",
            "--pred",
            p(x),
            "--gt",
            p(y),
            "--class",
            "1",
        ]))
    };
    assert_eq!(run(&a, &a).trim(), "100.0");
    assert_eq!(run(&a, &c).trim(), "0.0");
    assert_eq!(run(&a, &b).trim(), "60.0");

    let small = dir.path().join("small.pgm");
    fs::write(&small, encode_pgm(2, 2, &[1, 1, 2, 2])).unwrap();
    assert_eq!(
        code(&csstd(&["dice", "--pred", p(&a), "--gt", p(&small)])),
        2
    );
}

#[test]
fn non_finite_features_exit_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    let features = dir.path().join("step.ff1");
    let o = Field::from_fn(16, 16, |x, _| if x < 8 { 1.0 } else { -1.0 });
    fs::write(&features, encode_feature_file(&[o]).unwrap()).unwrap();
    let prefix = dir.path().join("run");
    let out = csstd(&[
        "segment",
        "--features",
        p(&features),
        "--lambda",
        "1e308",
        "--out-prefix",
        p(&prefix),
    ]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn repeated_demo_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = csstd(&[
            "demo",
            "--kind",
            "nested",
            "--size",
            "96",
            "--out-dir",
            p(d),
        ]);
        assert_eq!(code(&out), 0);
        assert!(stdout(&out).contains("nested=true"));
    }
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 7);
    for name in names {
        let x = fs::read(a.join(&name)).unwrap();
        let y = fs::read(b.join(&name)).unwrap();
        if name == "manifest.txt" {
            let strip = |bytes: &[u8], root: &Path| {
                String::from_utf8_lossy(bytes)
                    .lines()
                    .filter(|l| !l.starts_with("elapsed_ms="))
                    .map(|l| l.replace(p(root), "<out>"))
                    .collect::<Vec<_>>()
            };
            assert_eq!(strip(&x, &a), strip(&y, &b));
        } else {
            assert_eq!(x, y, "{name:?}");
        }
    }
}
