use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn starkqed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starkqed"))
        .args(args)
        .env_remove("STARKQED_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn sweep_is_byte_identical_across_runs_and_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let common = [
        "sweep",
        "--delta-over-g",
        "0,-1",
        "--beta-over-g",
        "1",
        "--nbar",
        "0,0.1",
        "--gt-max",
        "2",
        "--gt-step",
        "0.01",
    ];
    let mut args_a = common.to_vec();
    args_a.extend(["--workers", "1", "--out", a.path().to_str().unwrap()]);
    let mut args_b = common.to_vec();
    args_b.extend(["--workers", "4", "--out", b.path().to_str().unwrap()]);
    assert!(starkqed(&args_a).status.success());
    assert!(starkqed(&args_b).status.success());

    let names = files_in(a.path());
    assert_eq!(names.len(), 4);
    assert_eq!(names, files_in(b.path()));
    for name in &names {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn single_point_sweep_starts_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = starkqed(&[
        "sweep",
        "--delta-over-g",
        "0",
        "--beta-over-g",
        "0",
        "--nbar",
        "0",
        "--gt-min",
        "0",
        "--gt-max",
        "0.05",
        "--gt-step",
        "0.1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let names = files_in(dir.path());
    assert_eq!(names.len(), 1);
    let text = fs::read_to_string(dir.path().join(&names[0])).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data, ["gt,concurrence,eof", "0,0,0"]);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(
        &cfg,
        "# test\ndelta_over_g = 2\nbeta_over_g = 2\nnbar = 0\ngt_max = 0.5\ngt_step = 0.1\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = starkqed(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--beta-over-g",
        "-1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let names = files_in(&out_dir);
    assert_eq!(names.len(), 1);
    let text = fs::read_to_string(out_dir.join(&names[0])).unwrap();
    assert!(text.contains("# delta_over_g = 2\n"));
    assert!(text.contains("# beta_over_g = -1\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 7);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_starkqed"))
        .args([
            "sweep",
            "--delta-over-g",
            "0",
            "--beta-over-g",
            "0",
            "--nbar",
            "0",
        ])
        .args(["--gt-max", "0.1", "--gt-step", "0.05"])
        .env("STARKQED_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(files_in(dir.path()).len(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();

    let bad_step = starkqed(&["sweep", "--gt-step", "0", "--out", d]);
    assert_eq!(bad_step.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_step.stderr).contains("gt_step"));

    assert_eq!(
        starkqed(&["sweep", "--nbar", "-1", "--out", d])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        starkqed(&["preset", "fig9", "--out", d]).status.code(),
        Some(2)
    );
    assert_eq!(starkqed(&["sweep", "--bogus"]).status.code(), Some(2));

    let missing = dir.path().join("missing.cfg");
    let code = starkqed(&["sweep", "--config", missing.to_str().unwrap()])
        .status
        .code();
    assert_eq!(code, Some(3));

    let unknown = dir.path().join("unknown.cfg");
    fs::write(&unknown, "colour = blue\n").unwrap();
    let out = starkqed(&["sweep", "--config", unknown.to_str().unwrap(), "--out", d]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = starkqed(&[
        "sweep",
        "--gt-max",
        "0.1",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fig2_preset_writes_two_series_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = starkqed(&[
        "preset",
        "fig2",
        "--gt-step",
        "0.05",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        files_in(dir.path()),
        ["fig2_dotted.csv", "fig2_manifest.json", "fig2_solid.csv"]
    );
    let manifest: serde_like::Manifest =
        serde_like::parse(&fs::read_to_string(dir.path().join("fig2_manifest.json")).unwrap());
    assert_eq!(manifest.csvs, ["fig2_solid.csv", "fig2_dotted.csv"]);
}

#[test]
fn fig6_preset_writes_one_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = starkqed(&[
        "preset",
        "fig6",
        "--gt-step",
        "0.05",
        "--fig6-nbar",
        "0.2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        files_in(dir.path()),
        ["fig6_manifest.json", "fig6_solid.csv"]
    );
    let text = fs::read_to_string(dir.path().join("fig6_solid.csv")).unwrap();
    assert!(text.contains("# nbar = 0.2\n"));
    assert!(text.contains("# field = thermal\n"));
}

#[test]
fn validate_with_zero_coupling_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("micro.cfg");
    fs::write(
        &cfg,
        "omega = 1000\ndetuning = 100\ncoupling = 0\ngt_step = 0.1\n",
    )
    .unwrap();
    let out = starkqed(&[
        "validate",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("result: PASS"));
    let report = fs::read_to_string(dir.path().join("validate_report.json")).unwrap();
    assert!(report.contains("\"max_abs_diff\": 0.0"));
}

#[test]
fn validate_failure_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("micro.cfg");
    fs::write(
        &cfg,
        "omega = 1000\ndetuning = 100\ncoupling = 1\ngt_step = 0.05\ntolerance = 1e-9\n",
    )
    .unwrap();
    let out = starkqed(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("result: FAIL"));
}

#[test]
fn validate_rejects_incomplete_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("micro.cfg");
    fs::write(&cfg, "omega = 1000\n").unwrap();
    assert_eq!(
        starkqed(&["validate", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

/// Just enough JSON handling to pull the CSV names out of a manifest.
mod serde_like {
    pub struct Manifest {
        pub csvs: Vec<String>,
    }

    pub fn parse(text: &str) -> Manifest {
        let csvs = text
            .lines()
            .filter_map(|l| l.trim().strip_prefix("\"csv\": \""))
            .map(|rest| rest.trim_end_matches(',').trim_end_matches('"').to_string())
            .collect();
        Manifest { csvs }
    }
}
