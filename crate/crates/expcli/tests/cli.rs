use std::path::{Path, PathBuf};
use std::process::Command;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("skewlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn skewlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_skewlab")).args(args).output().unwrap()
}

const TRIVIAL: &str = r#"
config_version = 1
[map]
kind = "linear"
degree = 2
[cocycle]
group = "u1"
phase = { cos = [1.0] }
[alpha]
values = [0]
[cutoff]
value = 32
"#;

#[test]
fn trivial_block_gives_single_point_at_one() {
    let dir = scratch("trivial");
    let cfg = write_config(&dir, TRIVIAL);
    let out = dir.join("out");
    let o = skewlab(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("resonances.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).filter(|l| l.ends_with("true")).collect();
    assert_eq!(rows, vec!["0,1,1,0,1,0,true"]);
    assert!(out.join("resolved_config.toml").exists());
    assert!(out.join("resonances.svg").exists());
}

#[test]
fn outputs_are_deterministic() {
    let dir = scratch("determinism");
    let cfg = write_config(
        &dir,
        &TRIVIAL
            .replace("values = [0]", "values = [0, 1, 2, 3]")
            .replace("[cutoff]", "[trapped]\ndelta = 0.2\nx_grid = 16\n[cutoff]"),
    );
    let cfg = cfg.to_str().unwrap();
    for cmd in ["spectrum", "trapped"] {
        let (a, b) = (dir.join(format!("{cmd}-a")), dir.join(format!("{cmd}-b")));
        assert!(
            skewlab(&[cmd, "--config", cfg, "--out", a.to_str().unwrap(), "--threads", "1"])
                .status
                .success()
        );
        assert!(
            skewlab(&[cmd, "--config", cfg, "--out", b.to_str().unwrap(), "--threads", "3"])
                .status
                .success()
        );
        for entry in std::fs::read_dir(&a).unwrap() {
            let name = entry.unwrap().file_name();
            if name.to_string_lossy().ends_with(".csv") {
                assert_eq!(
                    std::fs::read(a.join(&name)).unwrap(),
                    std::fs::read(b.join(&name)).unwrap()
                );
            }
        }
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = scratch("config-error");
    let cfg = write_config(&dir, &TRIVIAL.replace("degree = 2", "degree = 2\ndegre = 3"));
    let o = skewlab(&[
        "gap",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(&dir, &TRIVIAL.replace("degree = 2", "degree = 1"));
    let o = skewlab(&[
        "gap",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_mirror_is_accepted() {
    let dir = scratch("json");
    let p = dir.join("config.json");
    std::fs::write(
        &p,
        r#"{"config_version": 1, "map": {"kind": "linear", "degree": 2},
            "cocycle": {"group": "u1"}, "captive": {"n_max": 6, "x_grid": 4, "xi_grid": 4, "radius": 1.0}}"#,
    )
    .unwrap();
    let out = dir.join("out");
    let o = skewlab(&[
        "captive",
        "--config",
        p.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("captive.csv")).unwrap();
    let counts: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(counts, vec!["2", "4", "8", "16", "32", "64"]);
}
