use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;

use vslab::io::{load_config, FieldSnapshot, RunConfig};
use vslab::spectral::{random_solenoidal, Grid};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn vslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vslab")).args(args).output().unwrap()
}

fn small_config(dir: &Path) -> PathBuf {
    let cfg = dir.join("small.cfg");
    std::fs::write(
        &cfg,
        format!(
            "n = 8\nT = 0.1\ndt = 0.005\nslabs = 4\nsamples_per_slab = 5\nfield_every = 5\noutput = {}\n",
            dir.join("out").display()
        ),
    )
    .unwrap();
    cfg
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let o = vslab(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error:"), "{err}");
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn missing_config_flag_is_usage_error() {
    assert_eq!(vslab(&["run-slab"]).status.code(), Some(2));
}

#[test]
fn invalid_config_exits_two_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "n = 16\nT = 0.5\nepsilon0 = 1.5\n").unwrap();
    let o = vslab(&["run-slab", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: config") && err.contains(":3:") && err.contains("epsilon0"), "{err}");
}

#[test]
fn runtime_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = vslab(&["compare", "--config", cfg.to_str().unwrap(), "--left", "/nonexistent", "--right", "/nonexistent"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn run_then_compare_self_is_zero_and_monitor_replays() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    let o = vslab(&["run-ref", "--config", cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = vslab(&["run-slab", "--config", cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let snaps = dir.path().join("out/slab/snapshots");
    let s = snaps.to_str().unwrap();
    let o = vslab(&["compare", "--config", cfg, "--left", s, "--right", s]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "sup_l2_distance,0.0000000000000000e0");

    let o = vslab(&["monitor", "--config", cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(dir.path().join("out/monitor/summary.csv")).unwrap();
    assert!(summary.starts_with("quantity,value\n") && summary.contains("hgamma,"));

    // slab and reference agree only to the scheme's accuracy
    let r = dir.path().join("out/ref/snapshots");
    let o = vslab(&["compare", "--config", cfg, "--left", s, "--right", r.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d: f64 = String::from_utf8_lossy(&o.stdout).trim().split(',').nth(1).unwrap().parse().unwrap();
    assert!(d > 0.0 && d < 1.0, "{d}");

    for f in ["config.ini", "series.csv", "ledger.csv", "summary.csv", "enstrophy.svg", "energy.svg"] {
        assert!(dir.path().join("out/slab").join(f).exists(), "{f}");
    }
    // the echoed config replays the run
    let echoed = RunConfig::parse(
        &std::fs::read_to_string(dir.path().join("out/slab/config.ini")).unwrap(),
        "echo",
    )
    .unwrap();
    assert_eq!(echoed, load_config(Path::new(cfg)).unwrap());
}

#[test]
fn study_reports_rates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = vslab(&["study", "--config", cfg.to_str().unwrap(), "--set", "study_slabs=2,4,8", "--set", "samples_per_slab=2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("rate,") && out.contains("ubar_rate,"), "{out}");
    let study = std::fs::read_to_string(dir.path().join("out/study/study.csv")).unwrap();
    assert_eq!(study.lines().count(), 4);
}

#[test]
fn sample_config_echo_matches_golden() {
    let cfg = load_config(&repo_root().join("docs/sample.cfg")).unwrap();
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/sample.normalized.ini")).unwrap();
    assert_eq!(cfg.normalized(), golden);
    let dir = tempfile::tempdir().unwrap();
    let path = cfg.echo(dir.path()).unwrap();
    assert_eq!(std::fs::read(path).unwrap(), golden.as_bytes());
}

#[test]
fn svg_point_count_matches_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    assert!(vslab(&["run-slab", "--config", cfg.to_str().unwrap()]).status.success());
    let series = std::fs::read_to_string(dir.path().join("out/slab/series.csv")).unwrap();
    let n = series.lines().count() - 1;
    let svg = std::fs::read_to_string(dir.path().join("out/slab/enstrophy.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    assert_eq!(points.split_whitespace().count(), n);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normalized_config_round_trips(
        n in (2usize..16).prop_map(|h| 2 * h),
        nu in 1e-3f64..10.0,
        eps0 in 0.01f64..0.99,
        c in 0.1f64..5.0,
        slabs in 1usize..64,
        seed in any::<u64>(),
    ) {
        let text = format!(
            "n = {n}\nT = 1\nnu = {nu:?}\nepsilon0 = {eps0:?}\nC = {c:?}\nslabs = {slabs}\ninitial = random-divfree({seed})\n"
        );
        let cfg = RunConfig::parse(&text, "prop").unwrap();
        let again = RunConfig::parse(&cfg.normalized(), "echo").unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.normalized(), cfg.normalized());
    }

    #[test]
    fn snapshot_bytes_round_trip(seed in any::<u64>(), time in -1e3f64..1e3) {
        let w = random_solenoidal(Grid::new(4).unwrap(), seed, 1);
        let snap = FieldSnapshot::from_field(&w, time);
        let bytes = snap.to_bytes();
        prop_assert_eq!(bytes.len(), 24 + 3 * 64 * 16);
        let back = FieldSnapshot::from_bytes(&bytes, Path::new("prop")).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
    }
}
