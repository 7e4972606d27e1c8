use crate::error::{Error, Result};
use crate::series::ScalarSample;
use crate::slab::{compute_kstar, TimePartition, VelocityNormSample};

use super::quadrature::trapezoid;

/// One slab of the enstrophy ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub k: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    /// `Δt_k sup‖u‖² + ∫‖∇u‖²` over the slab samples.
    pub kstar: f64,
    /// Whether `4 C K*_k <= 1 − ε₀`.
    pub kstar_ok: bool,
    /// `f_k(t_k) = sup E + ε₀ ∫ Σ‖∇ω_i‖²`.
    pub f_k: f64,
    /// `M_k = sup E` over the slab.
    pub m_k: f64,
    /// `M_{k−1} e^{(1−ε₀)Δt_k}` with `M_0 = K₀`.
    pub bound: f64,
    /// `bound − M_k`, signed.
    pub margin: f64,
    pub pass: bool,
}

/// Inequality ledger of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateLedger {
    pub series: Vec<ScalarSample>,
    pub rows: Vec<LedgerRow>,
    pub k0: f64,
    pub eps0: f64,
    pub c: f64,
    pub t_end: f64,
    /// `K₀ e^{(1−ε₀)T}`.
    pub gronwall_bound: f64,
    pub sup_enstrophy: f64,
    pub global_margin: f64,
    pub global_pass: bool,
}

impl EstimateLedger {
    pub fn all_rows_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Slabs that violate the slab-size rule.
    pub fn kstar_violations(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| !r.kstar_ok).map(|r| r.k).collect()
    }
}

/// `K₀ e^{(1−ε₀)T}`.
pub fn gronwall_bound(k0: f64, eps0: f64, t_end: f64) -> f64 {
    k0 * ((1.0 - eps0) * t_end).exp()
}

/// Build the ledger from a scalar series sampled on `[0, T]`; every slab
/// must contain at least two samples (its ends included).
pub fn enstrophy_ledger(
    series: &[ScalarSample],
    partition: &TimePartition,
    eps0: f64,
    c: f64,
) -> Result<EstimateLedger> {
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::param("epsilon0", format!("must lie in (0, 1), got {eps0}")));
    }
    if !(c > 0.0) {
        return Err(Error::param("C", format!("must be positive, got {c}")));
    }
    let t_end = partition.end_time();
    let tol = 1e-9 * t_end.max(1.0);
    let first = series
        .first()
        .ok_or_else(|| Error::Estimate("ledger needs a nonempty series".into()))?;
    if first.t.abs() > tol {
        return Err(Error::Estimate(format!("series starts at t = {}, not 0", first.t)));
    }
    let k0 = first.enstrophy;
    let mut rows = Vec::with_capacity(partition.len());
    let mut m_prev = k0;
    for slab in partition.slabs() {
        let inside: Vec<&ScalarSample> = series
            .iter()
            .filter(|s| s.t >= slab.start - tol && s.t <= slab.end + tol)
            .collect();
        if inside.len() < 2
            || (inside[0].t - slab.start).abs() > tol
            || (inside[inside.len() - 1].t - slab.end).abs() > tol
        {
            return Err(Error::Estimate(format!(
                "slab {} [{}, {}] is not covered by the series samples",
                slab.index, slab.start, slab.end
            )));
        }
        let norms: Vec<VelocityNormSample> = inside
            .iter()
            .map(|s| VelocityNormSample { t: s.t, l2_sq: s.energy, h1_semi_sq: s.dissipation })
            .collect();
        let kstar = compute_kstar(&norms, slab.dt())?;
        let ts: Vec<f64> = inside.iter().map(|s| s.t).collect();
        let pal: Vec<f64> = inside.iter().map(|s| s.palinstrophy).collect();
        let m_k = inside.iter().map(|s| s.enstrophy).fold(f64::NEG_INFINITY, f64::max);
        let f_k = m_k + eps0 * trapezoid(&ts, &pal);
        let bound = m_prev * ((1.0 - eps0) * slab.dt()).exp();
        let margin = bound - m_k;
        rows.push(LedgerRow {
            k: slab.index,
            t_start: slab.start,
            t_end: slab.end,
            dt: slab.dt(),
            kstar,
            kstar_ok: 4.0 * c * kstar <= 1.0 - eps0,
            f_k,
            m_k,
            bound,
            margin,
            pass: margin >= 0.0,
        });
        m_prev = m_k;
    }
    let sup_enstrophy = series
        .iter()
        .filter(|s| s.t <= t_end + tol)
        .map(|s| s.enstrophy)
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = gronwall_bound(k0, eps0, t_end);
    Ok(EstimateLedger {
        series: series.to_vec(),
        rows,
        k0,
        eps0,
        c,
        t_end,
        gronwall_bound: bound,
        sup_enstrophy,
        global_margin: bound - sup_enstrophy,
        global_pass: sup_enstrophy <= bound,
    })
}
