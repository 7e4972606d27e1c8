//! CSV tables and SVG line plots of a run.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which parses
//! back to the same binary64. Every table starts with its header row.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimates::{ConvergenceReport, DtMonitor, EstimateLedger};
use crate::series::ScalarSample;
use crate::slab::SlabRecord;

pub const SERIES_HEADER: [&str; 5] = ["t", "energy", "enstrophy", "dissipation", "palinstrophy"];
pub const LEDGER_HEADER: [&str; 13] = [
    "k",
    "t_start",
    "t_end",
    "dt_k",
    "kstar",
    "kstar_ok",
    "f_k",
    "M_k",
    "gronwall_bound",
    "margin",
    "pass",
    "picard_iters",
    "max_rho",
];
pub const MONITOR_HEADER: [&str; 8] =
    ["t", "dtu_sq", "grad_dtu_sq", "ddt_dtu_sq", "phi", "margin", "band", "pass"];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Estimate(format!("{other:?}")),
    })?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_series_csv(path: &Path, series: &[ScalarSample]) -> Result<()> {
    let rows: Vec<Vec<String>> = series
        .iter()
        .map(|s| {
            [s.t, s.energy, s.enstrophy, s.dissipation, s.palinstrophy]
                .iter()
                .map(|&x| fmt_f64(x))
                .collect()
        })
        .collect();
    write_table(path, &SERIES_HEADER, &rows)
}

/// Ledger rows; Picard columns are empty when `records` is absent.
pub fn write_ledger_csv(path: &Path, ledger: &EstimateLedger, records: Option<&[SlabRecord]>) -> Result<()> {
    let rows: Vec<Vec<String>> = ledger
        .rows
        .iter()
        .map(|r| {
            let rec = records.and_then(|rs| rs.iter().find(|x| x.slab.index == r.k));
            vec![
                r.k.to_string(),
                fmt_f64(r.t_start),
                fmt_f64(r.t_end),
                fmt_f64(r.dt),
                fmt_f64(r.kstar),
                r.kstar_ok.to_string(),
                fmt_f64(r.f_k),
                fmt_f64(r.m_k),
                fmt_f64(r.bound),
                fmt_f64(r.margin),
                r.pass.to_string(),
                rec.map_or(String::new(), |x| x.diagnostics.iterations.to_string()),
                rec.and_then(|x| x.diagnostics.max_ratio()).map_or(String::new(), fmt_f64),
            ]
        })
        .collect();
    write_table(path, &LEDGER_HEADER, &rows)
}

/// Global quantities as `quantity,value` rows.
pub fn write_summary_csv(path: &Path, ledger: &EstimateLedger, extra: &[(&str, String)]) -> Result<()> {
    let mut rows = vec![
        vec!["K0".into(), fmt_f64(ledger.k0)],
        vec!["epsilon0".into(), fmt_f64(ledger.eps0)],
        vec!["C".into(), fmt_f64(ledger.c)],
        vec!["T".into(), fmt_f64(ledger.t_end)],
        vec!["gronwall_bound".into(), fmt_f64(ledger.gronwall_bound)],
        vec!["sup_enstrophy".into(), fmt_f64(ledger.sup_enstrophy)],
        vec!["global_margin".into(), fmt_f64(ledger.global_margin)],
        vec!["global_pass".into(), ledger.global_pass.to_string()],
        vec!["all_rows_pass".into(), ledger.all_rows_pass().to_string()],
        vec!["kstar_violations".into(), ledger.kstar_violations().len().to_string()],
    ];
    rows.extend(extra.iter().map(|(k, v)| vec![k.to_string(), v.clone()]));
    write_table(path, &["quantity", "value"], &rows)
}

/// Monitor rows with the step-doubling band where available (else empty).
pub fn write_monitor_csv(path: &Path, monitor: &DtMonitor, band: &[(f64, f64)]) -> Result<()> {
    let tol = 1e-9 * monitor.step;
    let rows: Vec<Vec<String>> = monitor
        .samples
        .iter()
        .map(|s| {
            let b = band.iter().find(|(t, _)| (t - s.t).abs() <= tol).map(|&(_, b)| b);
            vec![
                fmt_f64(s.t),
                fmt_f64(s.dtu_sq),
                fmt_f64(s.grad_dtu_sq),
                fmt_f64(s.ddt_dtu_sq),
                fmt_f64(s.phi),
                fmt_f64(s.margin),
                b.map_or(String::new(), fmt_f64),
                b.map_or(String::new(), |b| (s.margin >= -b).to_string()),
            ]
        })
        .collect();
    write_table(path, &MONITOR_HEADER, &rows)
}

pub fn write_study_csv(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .steps
        .iter()
        .zip(&report.errors)
        .enumerate()
        .map(|(i, (&s, &e))| {
            vec![
                fmt_f64(s),
                fmt_f64(e),
                if i == 0 { String::new() } else { fmt_f64(report.factors[i - 1]) },
            ]
        })
        .collect();
    write_table(path, &["step", "error", "factor"], &rows)
}

/// Standalone SVG with one polyline per named series, all sharing axes.
pub fn svg_line_plot(title: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 48.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let finite = series.iter().flat_map(|(_, p)| p.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let esc = |s: &str| s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        esc(title)
    );
    let _ = writeln!(
        out,
        r#"<path d="M{PAD} {PAD}V{}H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    for (label, y, anchor) in [(y0, H - PAD, "end"), (y1, PAD, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{label:.4e}</text>"#,
            PAD - 4.0
        );
    }
    for (label, x) in [(x0, PAD), (x1, W - PAD)] {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{label:.4}</text>"#,
            H - PAD + 14.0
        );
    }
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = pts
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            W - PAD - 120.0,
            PAD + 14.0 * (i as f64 + 1.0),
            esc(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write `series.csv`, `ledger.csv`, `summary.csv`, `enstrophy.svg` and
/// `energy.svg` into `out_dir`.
pub fn emit_reports(
    ledger: &EstimateLedger,
    records: Option<&[SlabRecord]>,
    out_dir: &Path,
    extra_summary: &[(&str, String)],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let p = |name: &str| out_dir.join(name);
    write_series_csv(&p("series.csv"), &ledger.series)?;
    write_ledger_csv(&p("ledger.csv"), ledger, records)?;
    write_summary_csv(&p("summary.csv"), ledger, extra_summary)?;
    let pts = |f: fn(&ScalarSample) -> f64| ledger.series.iter().map(|s| (s.t, f(s))).collect::<Vec<_>>();
    write_text(&p("enstrophy.svg"), &svg_line_plot("enstrophy", &[("enstrophy", pts(|s| s.enstrophy))]))?;
    write_text(
        &p("energy.svg"),
        &svg_line_plot("energy and dissipation", &[("energy", pts(|s| s.energy)), ("dissipation", pts(|s| s.dissipation))]),
    )?;
    Ok(["series.csv", "ledger.csv", "summary.csv", "enstrophy.svg", "energy.svg"]
        .iter()
        .map(|n| p(n))
        .collect())
}
