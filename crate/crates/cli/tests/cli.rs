use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn habc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_habc")).current_dir(dir).args(args).output().unwrap()
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("habc-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const DISC_SCENE: &str = r#"
[obstacle]
kind = "disc"
params = { radius = 1.0 }

[truncation]
kind = "circle"
R = 2.0

[pml]
inner_radius = 2.0
width = 0.5
"#;

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn manifest(dir: &Path) -> toml::Table {
    std::fs::read_to_string(dir.join("manifest.toml")).unwrap().parse().unwrap()
}

#[test]
fn pade_prints_coefficients_and_zero_set() {
    let dir = workdir("pade");
    let out = habc(&dir, &["pade", "--M", "1", "--N", "1", "--out-dir", "out"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-3/4"), "{text}");
    assert!(text.contains("-1/4"), "{text}");
    assert!(text.contains("zeros = []"), "{text}");
    let m = manifest(&dir.join("out"));
    assert_eq!(m["subcommand"].as_str(), Some("pade"));
    assert_eq!(m["parameters"]["M"].as_integer(), Some(1));
    assert!(m["version"].as_str().is_some());
}

#[test]
fn help_and_usage_exit_codes() {
    let dir = workdir("usage");
    assert_eq!(habc(&dir, &["--help"]).status.code(), Some(0));
    assert_eq!(habc(&dir, &["solve", "--help"]).status.code(), Some(0));
    assert_eq!(habc(&dir, &["pade", "--bogus"]).status.code(), Some(2));
    assert_eq!(habc(&dir, &["frobnicate"]).status.code(), Some(2));
    let inadmissible = habc(&dir, &["pade", "--M", "0", "--N", "1"]);
    assert_eq!(inadmissible.status.code(), Some(2));
    assert!(stderr(&inadmissible).starts_with("error: usage: "), "{}", stderr(&inadmissible));
}

#[test]
fn config_files_are_strict_and_flags_win() {
    let dir = workdir("config");
    std::fs::write(dir.join("bad.toml"), "M = 1\nN = 1\nwhat = 2\n").unwrap();
    assert_eq!(habc(&dir, &["pade", "--config", "bad.toml"]).status.code(), Some(2));
    std::fs::write(dir.join("good.toml"), "M = 1\nN = 1\nout_dir = \"from_file\"\n").unwrap();
    let out = habc(&dir, &["pade", "--config", "good.toml", "--N", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = manifest(&dir.join("from_file"));
    assert_eq!(m["parameters"]["M"].as_integer(), Some(1));
    assert_eq!(m["parameters"]["N"].as_integer(), Some(0));
}

#[test]
fn missing_files_are_io_errors() {
    let dir = workdir("io");
    let out = habc(&dir, &["solve", "--scene", "nowhere.toml", "--k", "5", "--out-dir", "o"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("nowhere.toml"), "{}", stderr(&out));
    let missing = habc(&dir, &["solve", "--k", "5", "--out-dir", "o"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn solve_and_reference_write_fields_and_manifests() {
    let dir = workdir("solve");
    std::fs::write(dir.join("disc.toml"), DISC_SCENE).unwrap();
    let out = habc(&dir, &["solve", "--scene", "disc.toml", "--k", "4", "--M", "1", "--N", "1", "--out-dir", "s"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.join("s/solution.csv")).unwrap();
    assert!(csv.starts_with("node_id,x,y,re,im"));
    let m = manifest(&dir.join("s"));
    assert_eq!(m["parameters"]["k"].as_float(), Some(4.0));
    assert_eq!(m["parameters"]["N"].as_integer(), Some(1));
    assert!(dir.join("s/scene.toml").exists());

    let out = habc(&dir, &["reference", "--scene", "disc.toml", "--k", "4", "--out-dir", "r"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let err: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("mie_relative_l2_error = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(err < 0.01, "{err}");
}

#[test]
fn mie_and_mesh_subcommands() {
    let dir = workdir("mie");
    std::fs::write(dir.join("disc.toml"), DISC_SCENE).unwrap();
    let out = habc(&dir, &["mie", "--k", "3", "--n", "8", "--out-dir", "m"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(dir.join("m/manifest.toml").exists());
    let out = habc(&dir, &["mesh", "--scene", "disc.toml", "--k", "4", "--pml", "--out-dir", "g"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(manifest(&dir.join("g"))["parameters"]["pml"].as_bool(), Some(true));
}

#[test]
fn rays_modes() {
    let dir = workdir("rays");
    std::fs::write(dir.join("disc.toml"), DISC_SCENE).unwrap();
    for mode in ["direct", "angles", "reentrant"] {
        let out = habc(&dir, &["rays", "--scene", "disc.toml", "--mode", mode, "--n", "500", "--out-dir", mode]);
        assert_eq!(out.status.code(), Some(0), "{mode}: {}", stderr(&out));
        assert!(dir.join(mode).join("manifest.toml").exists());
    }
    let angles = std::fs::read_to_string(dir.join("angles/angles.csv")).unwrap();
    assert!(angles.starts_with("bin_lo,bin_hi,count"));
    // Unfolding needs a square truncation boundary.
    let out = habc(&dir, &["rays", "--scene", "disc.toml", "--mode", "unfold"]);
    assert_eq!(out.status.code(), Some(2));
    let out = habc(&dir, &["rays", "--scene", "disc.toml", "--mode", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_rejects_unknown_tables() {
    let dir = workdir("experiment");
    let out = habc(&dir, &["experiment", "--table", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(dir.join("spec.toml"), "table = \"ball\"\nrows = [{ k = 3.0, R = 2.0 }]\nbogus = 1\n").unwrap();
    let out = habc(&dir, &["experiment", "--spec", "spec.toml"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn small_custom_experiment_runs() {
    let dir = workdir("custom");
    std::fs::write(dir.join("spec.toml"), "table = \"ball\"\nrows = [{ k = 6.0, R = 2.0 }]\n").unwrap();
    let out = habc(&dir, &["experiment", "--spec", "spec.toml", "--out-dir", "e"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.join("e/ball.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(dir.join("e/ball.svg").exists());
    assert!(dir.join("e/manifest.toml").exists());
}
