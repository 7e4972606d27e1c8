//! Scalar time series and field snapshots shared by the solvers and monitors.

use crate::spectral::{h1_semi_sq, l2_sq, SpectralVectorField};

/// Norms recorded at one instant.
///
/// `energy` and `dissipation` belong to the velocity that drives the run
/// (`‖u‖²`, `Σ‖∇u_i‖²`); `enstrophy` and `palinstrophy` to the evolved
/// vorticity (`Σ‖ω_i‖²`, `Σ‖∇ω_i‖²`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSample {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub dissipation: f64,
    pub palinstrophy: f64,
}

impl ScalarSample {
    pub fn measure(t: f64, omega: &SpectralVectorField, u: &SpectralVectorField) -> Self {
        ScalarSample {
            t,
            energy: l2_sq(u),
            enstrophy: l2_sq(omega),
            dissipation: h1_semi_sq(u),
            palinstrophy: h1_semi_sq(omega),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.energy.is_finite()
            && self.enstrophy.is_finite()
            && self.dissipation.is_finite()
            && self.palinstrophy.is_finite()
    }
}

/// Vorticity field at a sampled time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub omega: SpectralVectorField,
}

/// Sampled trajectory: field snapshots plus a denser scalar series.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub series: Vec<ScalarSample>,
}

impl Trajectory {
    /// Snapshot closest to `t` within `tol`.
    pub fn snapshot_at(&self, t: f64, tol: f64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| (s.t - t).abs() <= tol)
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

/// Sup over matching times of `‖a(t) − b(t)‖_{L²}`; snapshot times must agree.
pub fn sup_l2_distance(a: &[Snapshot], b: &[Snapshot], tol: f64) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        if (x.t - y.t).abs() > tol || x.omega.grid() != y.omega.grid() {
            return None;
        }
        worst = worst.max(l2_sq(&x.omega.sub(&y.omega)).sqrt());
    }
    Some(worst)
}
