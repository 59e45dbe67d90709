use std::path::Path;
use std::process::{Command, Output};

fn ektau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ektau")).args(args).env_remove("EKTAU_THREADS").output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    let o = ektau(args);
    o.status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn check_surface_exit_codes() {
    assert_eq!(code(&["check-surface", "--gallery", "slice"]), 0);
    assert_eq!(code(&["check-surface", "--gallery", "rotsphere", "--H", "0.70710678", "--kappa", "-1"]), 0);
    assert_eq!(code(&["check-surface", "--gallery", "bumped"]), 4);
    assert_eq!(code(&["check-surface", "--gallery", "nosuch"]), 2);
    assert_eq!(code(&["check-surface", "--gallery", "slice", "--tol", "-1"]), 2);
    assert_eq!(code(&["check-surface", "--gallery", "slice", "--bogus"]), 2);
}

#[test]
fn cylinder_qar_column() {
    let o = ektau(&["check-surface", "--gallery", "cyl", "--kg", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let head: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = head.iter().position(|h| *h == "qar_abs").unwrap();
    let mut n = 0;
    for l in lines {
        let q: f64 = l.split(',').nth(col).unwrap().parse().unwrap();
        assert!((q - 0.75).abs() <= 1e-6, "{q}");
        n += 1;
    }
    assert!(n > 100);
}

#[test]
fn key_lemma_exit_codes() {
    assert_eq!(code(&["key-lemma", "--gallery", "nil-fiber"]), 0);
    let o = ektau(&["key-lemma", "--gallery", "example"]);
    assert_eq!(o.status.code(), Some(4));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("angle"), "{text}");
    assert_eq!(code(&["key-lemma", "--gallery", "mirrored-caps", "--mutate", "1e-3"]), 4);
    assert_eq!(code(&["key-lemma", "--gallery", "tangent-nil", "--mutate", "-1e-3"]), 4);
}

#[test]
fn example_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&["example-h2xr", "--out", d]), 0);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "example_h2xr.json")).unwrap();
    let verdict = json["verdict"].as_str().unwrap();
    assert!(verdict.contains("not a part of an Abresch-Rosenberg surface"), "{verdict}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["check-surface", "--gallery", "rotsphere", "--kappa", "-1", "--H", "0.70710678"],
        vec!["key-lemma", "--gallery", "mirrored-caps"],
        vec!["meridians", "--kappa", "-1"],
    ];
    for args in runs {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for dir in [&a, &b] {
            let mut full = args.clone();
            full.extend(["--out", dir.path().to_str().unwrap()]);
            ektau(&full);
        }
        let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            let n = n.to_str().unwrap();
            assert_eq!(read(a.path(), n), read(b.path(), n), "{args:?} {n}");
        }
    }
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (dir.path().join("x"), dir.path().join("y"));
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        format!(r#"{{"gallery": "cyl", "kg": 0.5, "h": 0.02, "format": "csv", "out": {:?}}}"#, x.to_str().unwrap()),
    )
    .unwrap();
    let a = ektau(&["check-surface", "--config", cfg.to_str().unwrap()]);
    let b = ektau(&[
        "check-surface", "--gallery", "cyl", "--kg", "0.5", "--h", "0.02", "--format", "csv", "--out",
        y.to_str().unwrap(),
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(read(&x, "qar.csv"), read(&y, "qar.csv"));
    // flags win over the file
    let c = ektau(&["check-surface", "--config", cfg.to_str().unwrap(), "--kg", "2", "--out", y.to_str().unwrap()]);
    assert_ne!(a.stdout, c.stdout);

    std::fs::write(&cfg, r#"{"galery": "cyl"}"#).unwrap();
    assert_eq!(code(&["check-surface", "--config", cfg.to_str().unwrap()]), 2);
    assert_eq!(code(&["check-surface", "--config", "/nonexistent/run.json"]), 2);
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_ektau"))
            .args(["check-surface", "--gallery", "slice", "--format", "csv"])
            .env("EKTAU_THREADS", v)
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn meridians_close_and_flag_negative_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&["meridians", "--kappa", "1", "--H", "1", "--family", "sphere", "--out", d]), 0);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "meridians.json")).unwrap();
    assert_eq!(json[0]["closes"], serde_json::Value::Bool(true));
    assert!(dir.path().join("meridian_S2_H.csv").exists());

    assert_eq!(code(&["meridians", "--kappa", "-1", "--H", "0.3", "--family", "catenoidal", "--out", d]), 0);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "meridians.json")).unwrap();
    assert_eq!(json[0]["negative_gauss_somewhere"], serde_json::Value::Bool(true));

    assert_eq!(code(&["meridians", "--kappa", "-1", "--H", "0.3", "--family", "sphere"]), 2);
    assert_eq!(code(&["meridians", "--family", "donut"]), 2);
}
