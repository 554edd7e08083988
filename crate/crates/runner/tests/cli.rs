use std::process::Command;

fn sgdec(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sgdec")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(sgdec(&["--help"]).0, 0);
    assert_eq!(sgdec(&["frobnicate"]).0, 1);
    let (code, _, err) = sgdec(&["run"]);
    assert_eq!(code, 1);
    assert!(err.contains("--preset"), "{err}");
}

#[test]
fn presets_are_listed_and_shown() {
    let (code, out, _) = sgdec(&["presets"]);
    assert_eq!(code, 0);
    assert!(out.contains("bare_fluxon") && out.contains("positronium_fractal"));
    let (code, out, _) = sgdec(&["presets", "--show", "triple_constriction"]);
    assert_eq!(code, 0);
    assert!(out.contains("center = 250.0"));
    assert_eq!(sgdec(&["presets", "--show", "nope"]).0, 1);
}

#[test]
fn run_then_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let (code, stdout, err) = sgdec(&["run", "--preset", "bare_fluxon", "-s", "t_max=2", "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("50 steps"), "{stdout}");
    let table = dir.path().join("d.csv");
    let (code, _, err) = sgdec(&["diagnose", out.join("snapshots.sgf1").to_str().unwrap(), "-o", table.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(std::fs::read_to_string(table).unwrap().lines().count() > 2);
}

#[test]
fn bad_config_points_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "schema_version = 1\nt_max = 1.0\ngrid = { length = 10.0, dx = 0.1, dt = 0.2 }\nic = { kind = \"zero\" }\n",
    )
    .unwrap();
    let (code, _, err) = sgdec(&["run", cfg.to_str().unwrap(), "-o", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains(":3:") && err.contains("grid.dt"), "{err}");
}

#[test]
fn numerical_blow_up_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = sgdec(&[
        "run",
        "--preset",
        "bare_fluxon",
        "-s",
        "t_max=400",
        "model={kind=\"massive_schwinger\", g=0.3, mass2=1e10}",
        "-o",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn compare_skips_what_a_method_cannot_run() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = sgdec(&[
        "compare",
        "--preset",
        "capacitor_massless",
        "-s",
        "t_max=10",
        "grid.length=300",
        "--every",
        "5",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("cn     skipped"), "{out}");
    assert!(dir.path().join("energy_dec.csv").exists());
    assert!(dir.path().join("energy_euler.csv").exists());
}
