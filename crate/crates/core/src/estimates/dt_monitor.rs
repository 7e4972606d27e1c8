use crate::error::{Error, Result};
use crate::series::Snapshot;
use crate::spectral::{biot_savart, h1_semi_sq, inner, l2_sq, SpectralVectorField};

use super::identities::uniform_step;

/// Monitor values at one interior sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtMonitorSample {
    pub t: f64,
    /// `‖∂_t u‖²`
    pub dtu_sq: f64,
    /// `‖∇∂_t u‖²`
    pub grad_dtu_sq: f64,
    /// `d/dt ‖∂_t u‖² = 2(∂_t u, ∂²_t u)`
    pub ddt_dtu_sq: f64,
    /// `φ = 3³ (Σ‖ω_i‖²)²`
    pub phi: f64,
    /// `φ‖∂_t u‖² − d/dt‖∂_t u‖² − ‖∇∂_t u‖²`
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtMonitor {
    pub step: f64,
    pub samples: Vec<DtMonitorSample>,
}

impl DtMonitor {
    /// Smallest margin and its sample, if any.
    pub fn min_margin(&self) -> Option<DtMonitorSample> {
        self.samples
            .iter()
            .copied()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
    }

    /// Finite-difference error band by step doubling: at each time shared with
    /// `coarse` (same data at twice the spacing), `|margin_h − margin_2h|`.
    pub fn band_against(&self, coarse: &DtMonitor) -> Vec<(f64, f64)> {
        let tol = 1e-9 * self.step;
        self.samples
            .iter()
            .filter_map(|s| {
                coarse
                    .samples
                    .iter()
                    .find(|c| (c.t - s.t).abs() <= tol)
                    .map(|c| (s.t, (s.margin - c.margin).abs()))
            })
            .collect()
    }
}

/// Evaluate the `∂_t u` differential inequality at interior samples with
/// centered differences; `u` must be uniformly spaced in time.
pub fn dt_u_monitor(times: &[f64], u: &[SpectralVectorField]) -> Result<DtMonitor> {
    if times.len() != u.len() {
        return Err(Error::ShapeMismatch { expected: times.len(), actual: u.len() });
    }
    if times.len() < 3 {
        return Err(Error::Estimate(format!(
            "time-derivative monitor needs at least 3 samples, got {}",
            times.len()
        )));
    }
    let h = uniform_step(times)
        .filter(|h| *h > 0.0)
        .ok_or_else(|| Error::Estimate("time-derivative monitor needs uniform spacing".into()))?;
    let mut samples = Vec::with_capacity(times.len() - 2);
    for m in 1..times.len() - 1 {
        u[0].check_same_grid(&u[m])?;
        let dtu = u[m + 1].sub(&u[m - 1]).scale(0.5 / h);
        let d2tu = u[m + 1].sub(&u[m].scale(2.0)).axpy(1.0, &u[m - 1]).scale(1.0 / (h * h));
        let dtu_sq = l2_sq(&dtu);
        let grad_dtu_sq = h1_semi_sq(&dtu);
        let ddt = 2.0 * inner(&dtu, &d2tu);
        // Σ‖ω_i‖² = Σ‖∇u_i‖² for divergence-free u
        let enstrophy = h1_semi_sq(&u[m]);
        let phi = 27.0 * enstrophy * enstrophy;
        samples.push(DtMonitorSample {
            t: times[m],
            dtu_sq,
            grad_dtu_sq,
            ddt_dtu_sq: ddt,
            phi,
            margin: phi * dtu_sq - ddt - grad_dtu_sq,
        });
    }
    Ok(DtMonitor { step: h, samples })
}

/// Same monitor on vorticity snapshots, velocities by Biot–Savart.
pub fn dt_u_monitor_snapshots(snapshots: &[Snapshot]) -> Result<DtMonitor> {
    let times: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let u = snapshots
        .iter()
        .map(|s| biot_savart(&s.omega))
        .collect::<Result<Vec<_>>>()?;
    dt_u_monitor(&times, &u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::abc_velocity;
    use crate::spectral::Grid;

    #[test]
    fn zero_trajectory_has_zero_margins() {
        let g = Grid::new(4).unwrap();
        let ts = [0.0, 0.1, 0.2, 0.3];
        let u = vec![SpectralVectorField::zeros(g); 4];
        let m = dt_u_monitor(&ts, &u).unwrap();
        assert_eq!(m.samples.len(), 2);
        assert!(m.samples.iter().all(|s| s.margin == 0.0));
        assert!(dt_u_monitor(&ts[..2], &u[..2]).is_err());
        assert!(dt_u_monitor(&[0.0, 0.1, 0.3], &u[..3]).is_err());
    }

    #[test]
    fn beltrami_margin_closed_form() {
        let g = Grid::new(8).unwrap();
        let u0 = abc_velocity(g);
        let h = 1e-3;
        let ts: Vec<f64> = (0..=20).map(|i| i as f64 * h).collect();
        let u: Vec<_> = ts.iter().map(|t| u0.scale((-t).exp())).collect();
        let mon = dt_u_monitor(&ts, &u).unwrap();
        for s in &mon.samples {
            // ∂_t u = −u, |k|² = 1: margin = (φ + λ²)‖∂_t u‖² with λ = ν = 1
            let exact_dtu = l2_sq(&u0) * (-2.0 * s.t).exp();
            let exact = (s.phi + 1.0) * exact_dtu;
            assert!(s.margin > 0.0);
            assert!((s.margin - exact).abs() <= 1e-5 * exact, "{} vs {exact}", s.margin);
        }
        let coarse_t: Vec<f64> = ts.iter().step_by(2).copied().collect();
        let coarse_u: Vec<_> = u.iter().step_by(2).cloned().collect();
        let coarse = dt_u_monitor(&coarse_t, &coarse_u).unwrap();
        let band = mon.band_against(&coarse);
        assert_eq!(band.len(), coarse.samples.len());
        assert!(band.iter().all(|(_, b)| *b >= 0.0));
    }
}
