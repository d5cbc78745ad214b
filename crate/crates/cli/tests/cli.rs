//! End-to-end runs of the `frontflow` binary.

use std::path::Path;
use std::process::{Command, Output};

fn frontflow(args: &[&str], out_root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frontflow"))
        .args(args)
        .env("FRONTFLOW_OUT", out_root)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn info_lists_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    let o = frontflow(&["info"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for p in frontflow::Preset::ALL {
        assert!(text.contains(p.name()), "{} missing", p.name());
    }
}

#[test]
fn unknown_preset_exits_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = frontflow(&["run", "--preset", "ex9_nothing"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("unknown preset") && e.contains("Usage"), "{e}");
}

#[test]
fn double_bubble_run_stays_at_rest_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = frontflow(
        &["run", "--preset", "ex1_double_bubble", "--scheme", "sp", "--xfem", "on", "--T", "0.003", "--checkpoint-every", "2"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let run = dir.path().join("ex1_double_bubble");
    for f in ["config.txt", "records.csv", "checkpoint_000002.txt", "checkpoint_final.txt", "final_network.txt"] {
        assert!(run.join(f).is_file(), "{f} missing");
    }
    let csv = std::fs::read_to_string(run.join("records.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "u_max").unwrap();
    let rows: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|&u| u <= 1e-8), "{rows:?}");
    let net = std::fs::read_to_string(run.join("final_network.txt")).unwrap();
    assert!(frontflow::CurveNetwork::from_text(&net).is_ok());
}

#[test]
fn config_file_round_trip_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let o = frontflow(&["config", "--preset", "ex2_junction_migration"], dir.path());
    assert!(o.status.success());
    let cfg_path = dir.path().join("run.cfg");
    let text = String::from_utf8(o.stdout).unwrap().replace("fine = 4", "fine = 3").replace("vertices = 66", "vertices = 40");
    std::fs::write(&cfg_path, text).unwrap();
    let cfg = cfg_path.to_str().unwrap();
    let out = dir.path().join("a");
    let out_s = out.to_str().unwrap();
    let o = frontflow(&["run", "--config", cfg, "--max-steps", "2", "--checkpoint-every", "1", "--out", out_s], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let ck = out.join("checkpoint_000001.txt");
    let o = frontflow(&["run", "--config", cfg, "--max-steps", "2", "--resume", ck.to_str().unwrap(), "--out", out_s], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    // a checkpoint from a different trajectory is refused
    let o = frontflow(&["run", "--config", cfg, "--dt", "0.02", "--resume", ck.to_str().unwrap(), "--out", out_s], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("different run configuration"));
}

#[test]
fn bad_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "preset = ex1_double_bubble\nspeed = 3\n").unwrap();
    let o = frontflow(&["run", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn check_passes_on_junction_migration() {
    let dir = tempfile::tempdir().unwrap();
    let o = frontflow(&["check", "--preset", "ex2_junction_migration", "--steps", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("energy law") && !text.contains("FAILED"), "{text}");
}
