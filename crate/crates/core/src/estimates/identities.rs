use crate::error::{Error, Result};
use crate::series::ScalarSample;
use crate::slab::SlabSolution;
use crate::spectral::{
    curl, h1_semi_sq, l2_sq, norm_suite, relative_divergence, SpectralVectorField,
    DIVERGENCE_TOLERANCE,
};

use super::quadrature::{gregory, trapezoid};

/// Rule for time integrals over a sampled series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeRule {
    Trapezoid,
    /// Trapezoid with end corrections; needs uniform spacing.
    Gregory,
}

/// Uniform spacing of `ts`, if any.
pub(crate) fn uniform_step(ts: &[f64]) -> Option<f64> {
    if ts.len() < 2 {
        return None;
    }
    let h = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
    let ok = ts
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    ok.then_some(h)
}

/// `∫ y dt` over the samples with the chosen rule.
pub fn integrate(ts: &[f64], ys: &[f64], rule: TimeRule) -> Result<f64> {
    match rule {
        TimeRule::Trapezoid => Ok(trapezoid(ts, ys)),
        TimeRule::Gregory => {
            let h = uniform_step(ts).ok_or_else(|| {
                Error::Estimate("end-corrected rule needs uniformly spaced samples".into())
            })?;
            Ok(gregory(h, ys))
        }
    }
}

/// Relative residual of `‖u(T)‖² + 2ν∫₀ᵀ Σ‖∇u_i‖² = ‖u(0)‖²`.
pub fn energy_identity_residual(series: &[ScalarSample], nu: f64, rule: TimeRule) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::Estimate(format!(
            "energy identity needs at least 2 samples, got {}",
            series.len()
        )));
    }
    let e0 = series[0].energy;
    let e1 = series[series.len() - 1].energy;
    let ts: Vec<f64> = series.iter().map(|s| s.t).collect();
    let ds: Vec<f64> = series.iter().map(|s| s.dissipation).collect();
    let dissipated = 2.0 * nu * integrate(&ts, &ds, rule)?;
    if e0 == 0.0 {
        return Ok(if e1 == 0.0 && dissipated == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((e1 + dissipated - e0).abs() / e0)
}

/// `|Σ‖∇u_i‖² − Σ‖ω_i‖²| / max(...)` for divergence-free `u`.
pub fn grad_vorticity_check(u: &SpectralVectorField) -> Result<f64> {
    let div = relative_divergence(u);
    if div > DIVERGENCE_TOLERANCE {
        return Err(Error::NotDivergenceFree(div));
    }
    let a = h1_semi_sq(u);
    let b = l2_sq(&curl(u));
    let scale = a.max(b);
    Ok(if scale == 0.0 { 0.0 } else { (a - b).abs() / scale })
}

/// Interpolation constant quoted for `ℝ³`; only a comparison value on the torus.
pub const R3_LADYZHENSKAYA_CONSTANT: f64 = 2.0;

/// `‖v‖²_{L⁴} / (‖v‖^{1/2}_{L²} ‖∇v‖^{3/2}_{L²})` for nonconstant zero-mean `v`.
pub fn ladyzhenskaya_ratio(v: &SpectralVectorField) -> Result<f64> {
    let s = norm_suite(v);
    if s.l2_sq == 0.0 {
        return Err(Error::Estimate("interpolation ratio undefined for the zero field".into()));
    }
    if s.h1_semi_sq == 0.0 {
        return Err(Error::Estimate(
            "interpolation ratio undefined for a constant field".into(),
        ));
    }
    let mean = v.mean();
    let mean_abs = mean.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if mean_abs > 1e-12 * v.max_abs().max(1.0) {
        return Err(Error::NonzeroMean(mean_abs));
    }
    Ok(s.l4 * s.l4 / (s.l2_sq.powf(0.25) * s.h1_semi_sq.powf(0.75)))
}

/// Cauchy–Schwarz margin `(1/Δt)∫ Σ‖ω̃_i‖² dt − Σ‖ω̄_i‖²` of a slab solution,
/// both terms in closed form.
pub fn average_cs_check(solution: &SlabSolution) -> f64 {
    solution.mean_square() - l2_sq(&solution.average())
}
