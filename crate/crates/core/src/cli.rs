//! Command-line surface: `run-ref`, `run-slab`, `compare`, `study`, `monitor`.
//!
//! Each subcommand writes into its own subdirectory of the configured output
//! directory (`ref/`, `slab/`, `compare/`, `study/`, `monitor/`) together with
//! the normalized config. Exit codes: 0 success, 1 runtime failure, 2 usage
//! or configuration error. Failures print one line starting with `error:`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::estimates::{
    convergence_study, dt_u_monitor_snapshots, energy_identity_residual, enstrophy_ledger,
    hgamma_diagnostic, ubar_error_l2q, DtMonitor, TimeRule,
};
use crate::io::{
    emit_reports, fmt_f64, load_config_with, read_trajectory, write_monitor_csv, write_study_csv,
    write_trajectory, ProviderMode, RunConfig,
};
use crate::reference::{run_reference, ReferenceRun};
use crate::series::{sup_l2_distance, ScalarSample, Snapshot};
use crate::slab::{
    build_partition, run_slab_scheme, ReferenceVelocity, TimePartition, VelocityNormSample,
    VelocityProvider,
};
use crate::spectral::{biot_savart, l2_sq};

#[derive(Debug, Parser)]
#[command(name = "vslab", version, about = "Time-slab vorticity experiments with estimate ledgers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (INI).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override a config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the reference solver and emit snapshots and reports.
    RunRef(Common),
    /// Run the slab scheme and emit snapshots, ledger and reports.
    RunSlab(Common),
    /// Sup-in-time L² distance between two stored trajectories.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Snapshot directory of the first trajectory.
        #[arg(long, value_name = "DIR")]
        left: PathBuf,
        /// Snapshot directory of the second trajectory.
        #[arg(long, value_name = "DIR")]
        right: PathBuf,
    },
    /// Slab-count refinement study against the reference solver.
    Study(Common),
    /// Replay stored snapshots through the estimate monitors.
    Monitor {
        #[command(flatten)]
        common: Common,
        /// Snapshot directory; defaults to `<output>/ref/snapshots`.
        #[arg(long, value_name = "DIR")]
        input: Option<PathBuf>,
    },
}

/// Parse `argv` (program name first) and run; returns the exit code.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let common = match &cli.command {
        Command::RunRef(c) | Command::RunSlab(c) | Command::Study(c) => c,
        Command::Compare { common, .. } | Command::Monitor { common, .. } => common,
    };
    let cfg = match load_config_with(&common.config, &common.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", one_line(&e));
            return 2;
        }
    };
    let outcome = match &cli.command {
        Command::RunRef(_) => run_ref(&cfg),
        Command::RunSlab(_) => run_slab(&cfg),
        Command::Compare { left, right, .. } => compare(&cfg, left, right),
        Command::Study(_) => study(&cfg),
        Command::Monitor { input, .. } => monitor(&cfg, input.as_deref()),
    };
    match outcome {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {}", one_line(&e));
            1
        }
    }
}

fn one_line(e: &Error) -> String {
    e.to_string().replace('\n', " ")
}

fn subdir(cfg: &RunConfig, name: &str) -> Result<PathBuf> {
    let dir = cfg.output.join(name);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    cfg.echo(&dir)?;
    Ok(dir)
}

/// Reference run with snapshots every `every` steps (and at `T`).
fn reference_run(cfg: &RunConfig, every: usize) -> Result<ReferenceRun> {
    let steps = cfg.reference_steps();
    let mut times: Vec<f64> = (0..=steps / every).map(|m| (m * every) as f64 * cfg.dt).collect();
    if steps % every != 0 {
        times.push(cfg.t_end);
    }
    run_reference(&cfg.initial_vorticity()?, cfg.t_end, &cfg.stepper(), &times, cfg.scalar_every)
}

fn norm_series(series: &[ScalarSample]) -> Vec<VelocityNormSample> {
    series
        .iter()
        .map(|s| VelocityNormSample { t: s.t, l2_sq: s.energy, h1_semi_sq: s.dissipation })
        .collect()
}

fn partition_for(cfg: &RunConfig, series: Option<&[ScalarSample]>) -> Result<TimePartition> {
    let norms = series.map(norm_series);
    build_partition(cfg.t_end, cfg.partition_policy(), norms.as_deref())
}

fn energy_residual(series: &[ScalarSample], nu: f64) -> Result<f64> {
    energy_identity_residual(series, nu, TimeRule::Gregory)
        .or_else(|_| energy_identity_residual(series, nu, TimeRule::Trapezoid))
}

/// Monitor on `snaps` plus the band against every `stride`-th snapshot.
fn monitor_with_band(snaps: &[Snapshot], stride: usize) -> Result<(DtMonitor, Vec<(f64, f64)>)> {
    let fine = dt_u_monitor_snapshots(snaps)?;
    let coarse: Vec<Snapshot> = snaps.iter().step_by(stride).cloned().collect();
    let band = if coarse.len() >= 3 {
        fine.band_against(&dt_u_monitor_snapshots(&coarse)?)
    } else {
        Vec::new()
    };
    Ok((fine, band))
}

fn monitor_summary(mon: &DtMonitor, band: &[(f64, f64)]) -> Vec<(&'static str, String)> {
    let tol = 1e-9 * mon.step;
    let banded: Vec<(f64, f64)> = mon
        .samples
        .iter()
        .filter_map(|s| band.iter().find(|(t, _)| (t - s.t).abs() <= tol).map(|&(_, b)| (s.margin, b)))
        .collect();
    let min_margin = mon.min_margin().map_or(f64::NAN, |s| s.margin);
    let max_band = banded.iter().map(|&(_, b)| b).fold(0.0, f64::max);
    let pass = banded.iter().all(|&(m, b)| m >= -b);
    vec![
        ("dtu_min_margin", fmt_f64(min_margin)),
        ("dtu_max_band", fmt_f64(max_band)),
        ("dtu_banded_samples", banded.len().to_string()),
        ("dtu_pass", pass.to_string()),
    ]
}

/// Uniform ledger slabs must end on recorded scalar samples.
fn check_ledger_lattice(cfg: &RunConfig) -> Result<()> {
    if cfg.partition != crate::io::PartitionKind::Uniform {
        return Ok(());
    }
    let h = cfg.dt * cfg.scalar_every as f64;
    let slab = cfg.t_end / cfg.slabs as f64;
    let m = (slab / h).round();
    if m < 1.0 || (m * h - slab).abs() > 1e-9 * slab {
        return Err(Error::param(
            "slabs",
            format!("slab length {slab} is not a multiple of the scalar spacing {h}"),
        ));
    }
    Ok(())
}

fn run_ref(cfg: &RunConfig) -> Result<Vec<String>> {
    check_ledger_lattice(cfg)?;
    let dir = subdir(cfg, "ref")?;
    let run = reference_run(cfg, cfg.field_every)?;
    let series = &run.trajectory.series;
    write_trajectory(&dir.join("snapshots"), &run.trajectory.snapshots)?;
    let partition = partition_for(cfg, Some(series))?;
    let ledger = enstrophy_ledger(series, &partition, cfg.eps0, cfg.c)?;
    let mut extra = vec![
        ("energy_identity_residual", fmt_f64(energy_residual(series, cfg.nu)?)),
        ("steps", run.steps.to_string()),
    ];
    if run.trajectory.snapshots.len() >= 3 {
        let (mon, band) = monitor_with_band(&run.trajectory.snapshots, cfg.monitor_stride)?;
        write_monitor_csv(&dir.join("monitor.csv"), &mon, &band)?;
        extra.extend(monitor_summary(&mon, &band));
    }
    emit_reports(&ledger, None, &dir, &extra)?;
    Ok(vec![
        format!("output,{}", dir.display()),
        format!("global_pass,{}", ledger.global_pass),
    ])
}

fn run_slab(cfg: &RunConfig) -> Result<Vec<String>> {
    let dir = subdir(cfg, "slab")?;
    let needs_reference =
        cfg.provider == ProviderMode::Reference || cfg.partition == crate::io::PartitionKind::Adaptive;
    let reference = if needs_reference { Some(reference_run(cfg, cfg.field_every)?) } else { None };
    let partition = partition_for(cfg, reference.as_ref().map(|r| r.trajectory.series.as_slice()))?;
    let provider = match (&cfg.provider, &reference) {
        (ProviderMode::Reference, Some(r)) => {
            VelocityProvider::Reference(ReferenceVelocity::from_snapshots(&r.trajectory.snapshots)?)
        }
        _ => VelocityProvider::SelfConsistent,
    };
    let run = run_slab_scheme(&cfg.initial_vorticity()?, &partition, &provider, &cfg.scheme())?;
    write_trajectory(&dir.join("snapshots"), &run.trajectory.snapshots)?;
    let ledger = enstrophy_ledger(&run.trajectory.series, &partition, cfg.eps0, cfg.c)?;
    let iters: usize = run.records.iter().map(|r| r.diagnostics.iterations).sum();
    let max_rho = run
        .records
        .iter()
        .filter_map(|r| r.diagnostics.max_ratio())
        .fold(f64::NAN, f64::max);
    let min_cs = run.records.iter().map(|r| r.cs_margin).fold(f64::INFINITY, f64::min);
    let extra = vec![
        ("provider", provider.name().to_string()),
        ("slabs", partition.len().to_string()),
        ("picard_iterations_total", iters.to_string()),
        ("max_rho", fmt_f64(max_rho)),
        ("min_cs_margin", fmt_f64(min_cs)),
    ];
    emit_reports(&ledger, Some(&run.records), &dir, &extra)?;
    Ok(vec![
        format!("output,{}", dir.display()),
        format!("global_pass,{}", ledger.global_pass),
        format!("all_rows_pass,{}", ledger.all_rows_pass()),
    ])
}

fn compare(cfg: &RunConfig, left: &Path, right: &Path) -> Result<Vec<String>> {
    let dir = subdir(cfg, "compare")?;
    let a = read_trajectory(left)?;
    let b = read_trajectory(right)?;
    let tol = 1e-9 * a.last().map_or(1.0, |s| s.t.abs().max(1.0));
    let d = sup_l2_distance(&a, &b, tol).ok_or_else(|| {
        Error::Estimate(format!(
            "trajectories are not comparable: {} vs {} snapshots, times or grids differ",
            a.len(),
            b.len()
        ))
    })?;
    let text = format!("quantity,value\nsup_l2_distance,{}\nsnapshots,{}\n", fmt_f64(d), a.len());
    let path = dir.join("compare.csv");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(vec![format!("sup_l2_distance,{}", fmt_f64(d))])
}

fn study(cfg: &RunConfig) -> Result<Vec<String>> {
    let dir = subdir(cfg, "study")?;
    let n0 = cfg.study_slabs[0];
    if let Some(bad) = cfg.study_slabs.iter().find(|&&n| n % n0 != 0) {
        return Err(Error::param("study_slabs", format!("{bad} is not a multiple of {n0}")));
    }
    // common comparison times: the sample points of the coarsest partition
    let h = cfg.t_end / (n0 * cfg.samples_per_slab) as f64;
    let every = (h / cfg.dt).round() as usize;
    if every == 0 || ((every as f64) * cfg.dt - h).abs() > 1e-9 * h {
        return Err(Error::param(
            "dt",
            format!("coarsest sample spacing {h} is not a multiple of dt = {}", cfg.dt),
        ));
    }
    let reference = reference_run(cfg, every)?;
    let ref_snaps = &reference.trajectory.snapshots;
    let velocity = ReferenceVelocity::from_snapshots(ref_snaps)?;
    let provider = match cfg.provider {
        ProviderMode::Reference => VelocityProvider::Reference(velocity.clone()),
        ProviderMode::SelfConsistent => VelocityProvider::SelfConsistent,
    };
    let omega0 = cfg.initial_vorticity()?;
    let (mut steps, mut errors, mut ubar_errors) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &cfg.study_slabs {
        let partition = TimePartition::uniform(cfg.t_end, n)?;
        let mut scheme = cfg.scheme();
        scheme.field_every = n / n0;
        let run = run_slab_scheme(&omega0, &partition, &provider, &scheme)?;
        let snaps = &run.trajectory.snapshots;
        if snaps.len() != ref_snaps.len() {
            return Err(Error::Estimate(format!(
                "slab run with {n} slabs stored {} snapshots, reference {}",
                snaps.len(),
                ref_snaps.len()
            )));
        }
        let err = snaps
            .iter()
            .zip(ref_snaps)
            .map(|(a, b)| l2_sq(&a.omega.sub(&b.omega)).sqrt())
            .fold(0.0, f64::max);
        steps.push(cfg.t_end / n as f64);
        errors.push(err);
        ubar_errors.push(ubar_error_l2q(&velocity, &partition)?);
    }
    let report = convergence_study(&steps, &errors)?;
    let ubar = convergence_study(&steps, &ubar_errors)?;
    write_study_csv(&dir.join("study.csv"), &report)?;
    write_study_csv(&dir.join("ubar_study.csv"), &ubar)?;
    let summary = format!(
        "quantity,value\nrate,{}\nmonotone,{}\nubar_rate,{}\nubar_monotone,{}\n",
        fmt_f64(report.rate),
        report.monotone,
        fmt_f64(ubar.rate),
        ubar.monotone
    );
    let path = dir.join("summary.csv");
    std::fs::write(&path, summary).map_err(|e| Error::io(&path, e))?;
    Ok(vec![format!("rate,{}", fmt_f64(report.rate)), format!("ubar_rate,{}", fmt_f64(ubar.rate))])
}

fn monitor(cfg: &RunConfig, input: Option<&Path>) -> Result<Vec<String>> {
    let dir = subdir(cfg, "monitor")?;
    let input = input.map_or_else(|| cfg.output.join("ref").join("snapshots"), Path::to_path_buf);
    let snaps = read_trajectory(&input)?;
    let (mon, band) = monitor_with_band(&snaps, cfg.monitor_stride)?;
    write_monitor_csv(&dir.join("monitor.csv"), &mon, &band)?;
    let series = snaps
        .iter()
        .map(|s| Ok(ScalarSample::measure(s.t, &s.omega, &biot_savart(&s.omega)?)))
        .collect::<Result<Vec<_>>>()?;
    crate::io::write_series_csv(&dir.join("series.csv"), &series)?;
    let hg = hgamma_diagnostic(&snaps, cfg.gamma)?;
    let mut rows = monitor_summary(&mon, &band);
    rows.push(("gamma", fmt_f64(cfg.gamma)));
    rows.push(("hgamma", fmt_f64(hg.value)));
    let mut text = String::from("quantity,value\n");
    for (k, v) in &rows {
        text.push_str(&format!("{k},{v}\n"));
    }
    let path = dir.join("summary.csv");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(rows.iter().map(|(k, v)| format!("{k},{v}")).collect())
}
