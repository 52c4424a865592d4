use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vei(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vei"))
        .args(args)
        .output()
        .expect("vei runs")
}

fn root(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .display()
        .to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_log_and_render_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("episode.csv");
    let world = dir.path().join("world.svg");
    let out = vei(&[
        "run",
        "--scenario",
        &root("scenarios/straight_road.toml"),
        "--log",
        s(&log),
        "--world-svg",
        s(&world),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("outcome: collision"), "{stdout}");
    assert!(std::fs::read_to_string(&world)
        .unwrap()
        .contains("f0-escooter"));

    let svg = dir.path().join("strip.svg");
    let out = vei(&[
        "render",
        "--log",
        s(&log),
        "--times",
        "0,3.0,6.1,7.5",
        "--out",
        s(&svg),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches(r#"class="frame""#).count(), 4);

    let out = vei(&[
        "render",
        "--log",
        s(&log),
        "--times",
        "99",
        "--out",
        s(&svg),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("99"));
}

#[test]
fn run_normal_waits() {
    let out = vei(&[
        "run",
        "--scenario",
        &root("scenarios/intersection.toml"),
        "--behavior",
        "normal",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.contains("outcome: timeout") && stdout.contains("final_mode: wait"),
        "{stdout}"
    );
}

#[test]
fn sweep_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.toml");
    std::fs::write(&grid, "[r_fov]\nlower = 10.0\nupper = 20.0\nstep = 5.0\n\n[x_veh2_init]\nlower = -85.0\nupper = -65.0\nstep = 10.0\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = vei(&[
        "sweep",
        "--scenario",
        &root("scenarios/intersection.toml"),
        "--grid",
        s(&grid),
        "--behavior",
        "both",
        "--out",
        s(&out_dir),
        "--workers",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 9);
    assert!(csv.starts_with("episode_id,use_case,behavior,y_veh0,"));
    let summary = std::fs::read_to_string(out_dir.join("summary.toml")).unwrap();
    assert!(summary.contains("episodes = 18"));
    assert_eq!(summary.matches("[[group]]").count(), 2);
}

#[test]
fn sweep_rejects_inapplicable_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.toml");
    std::fs::write(
        &grid,
        "[x_veh3_init]\nlower = 75.0\nupper = 95.0\nstep = 10.0\n",
    )
    .unwrap();
    let out = vei(&[
        "sweep",
        "--scenario",
        &root("scenarios/straight_road.toml"),
        "--grid",
        s(&grid),
        "--out",
        s(dir.path()),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("x_veh3_init"));
}
