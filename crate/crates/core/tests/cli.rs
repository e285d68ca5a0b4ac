use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adine::harness::{read_trace_csv, RaceFile, SUMMARY_HEADER, TRACE_HEADER};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn adine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adine")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn table1_race_writes_summary_and_eight_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = configs().join("table1.json");
    let o = adine(&["race", "--config", path_str(&cfg), "--out-dir", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next().unwrap(), SUMMARY_HEADER.join(","));
    assert_eq!(lines.count(), 8);
    assert!(out.join("summary.txt").exists());

    let traces: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("table1-"))
        .collect();
    assert_eq!(traces.len(), 8);
    for name in traces {
        let text = std::fs::read_to_string(out.join(&name)).unwrap();
        assert!(text.starts_with(&(TRACE_HEADER.join(",") + "\n")));
        let records = read_trace_csv(&out.join(&name)).unwrap();
        assert!(records.windows(2).all(|w| w[0].t < w[1].t), "{name}");
    }
}

#[test]
fn seed_and_max_iters_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("fig1_quadratic_n100.json");
    let run = |seed: &str| {
        let out = dir.path().join(seed);
        let o = adine(&[
            "race",
            "--config",
            path_str(&cfg),
            "--out-dir",
            path_str(&out),
            "--seed",
            seed,
            "--max-iters",
            "20",
        ]);
        assert!(o.status.success());
        std::fs::read_to_string(out.join("summary.csv")).unwrap()
    };
    let a = run("3");
    assert!(a.lines().skip(1).all(|l| l.contains(",20,max_iters,")), "{a}");
    assert_ne!(a, run("4"));
}

#[test]
fn missing_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = adine(&["race", "--config", "/nonexistent/cfg.json", "--out-dir", path_str(&out)]);
    assert!(!o.status.success());
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    assert!(!out.exists());
}

#[test]
fn unknown_subcommand_and_flag_print_usage() {
    for args in [&["fly"][..], &["race", "--bogus"][..], &[][..]] {
        let o = adine(args);
        assert!(!o.status.success());
        assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"), "{args:?}");
    }
}

#[test]
fn invalid_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"id":"bad","target":{"kind":"saddle2d"},"stop":{"kind":"loss_below","threshold":-10},
            "max_iters":10,"optimizers":[{"method":"cm","eta":-1.0,"m":0.9}]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = adine(&["race", "--config", path_str(&cfg), "--out-dir", path_str(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad"));
    assert!(!out.exists());
}

#[test]
fn train_rejects_landscape_targets() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("table1.json");
    let o = adine(&["train", "--config", path_str(&cfg), "--out-dir", path_str(dir.path())]);
    assert!(!o.status.success());
}

#[test]
fn train_writes_speedup_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("svhn_wide.json");
    let out = dir.path().join("out");
    let o = adine(&["train", "--config", path_str(&cfg), "--out-dir", path_str(&out), "--max-iters", "300"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let speedup = std::fs::read_to_string(out.join("speedup.csv")).unwrap();
    assert_eq!(speedup.lines().count(), 4);
    let trace = read_trace_csv(&out.join("svhn-wide-02-adine-z1_5.csv")).unwrap();
    assert_eq!(trace.len(), 300);
    assert!(trace.iter().all(|r| r.wsl.is_some()));
}

#[test]
fn sweep_writes_one_row_per_zeta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("zeta_sweep.json");
    let out = dir.path().join("out");
    let o = adine(&["sweep-zeta", "--config", path_str(&cfg), "--out-dir", path_str(&out), "--max-iters", "30"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 7);
}

#[test]
fn selftest_passes() {
    let o = adine(&["selftest"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn every_checked_in_config_parses() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let file = RaceFile::load(&path).unwrap();
        file.experiments().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
