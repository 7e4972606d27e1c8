use crate::error::{Error, Result};
use crate::series::Snapshot;
use crate::spectral::{biot_savart, h1_semi_sq, l2_sq, Grid, SpectralVectorField};

use super::partition::VelocityNormSample;

/// Source of the averaged velocity `ū` inside a slab.
#[derive(Debug, Clone)]
pub enum VelocityProvider {
    /// `ū` is the slab average of a precomputed velocity trajectory.
    Reference(ReferenceVelocity),
    /// `ū = biot_savart(ω̄)` from the current Picard iterate.
    SelfConsistent,
}

impl VelocityProvider {
    pub fn name(&self) -> &'static str {
        match self {
            VelocityProvider::Reference(_) => "reference",
            VelocityProvider::SelfConsistent => "self-consistent",
        }
    }
}

/// Velocity samples `u(t_m)` with the piecewise-linear interpolant between
/// them.
#[derive(Debug, Clone)]
pub struct ReferenceVelocity {
    times: Vec<f64>,
    fields: Vec<SpectralVectorField>,
}

impl ReferenceVelocity {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralVectorField>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::param(
                "reference velocity",
                format!("{} times for {} fields", times.len(), fields.len()),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("reference velocity", "times must be strictly increasing"));
        }
        for f in &fields[1..] {
            fields[0].check_same_grid(f)?;
        }
        Ok(ReferenceVelocity { times, fields })
    }

    /// Velocity recovered from vorticity snapshots.
    pub fn from_snapshots(snapshots: &[Snapshot]) -> Result<Self> {
        let times = snapshots.iter().map(|s| s.t).collect();
        let fields = snapshots
            .iter()
            .map(|s| biot_savart(&s.omega))
            .collect::<Result<Vec<_>>>()?;
        Self::new(times, fields)
    }

    /// `u ≡ 0` on `[0, t_end]`.
    pub fn zero(grid: Grid, t_end: f64) -> Result<Self> {
        Self::new(
            vec![0.0, t_end],
            vec![SpectralVectorField::zeros(grid), SpectralVectorField::zeros(grid)],
        )
    }

    pub fn grid(&self) -> Grid {
        self.fields[0].grid()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralVectorField] {
        &self.fields
    }

    fn tol(&self) -> f64 {
        1e-12 * self.times.last().unwrap().abs().max(1.0)
    }

    fn check_span(&self, t: f64) -> Result<()> {
        let tol = self.tol();
        if t < self.times[0] - tol || t > self.times[self.times.len() - 1] + tol {
            return Err(Error::param(
                "reference velocity",
                format!(
                    "time {t} outside the sampled span [{}, {}]",
                    self.times[0],
                    self.times[self.times.len() - 1]
                ),
            ));
        }
        Ok(())
    }

    /// Interval `m` with `times[m] <= t <= times[m+1]` and the weight of the
    /// right end.
    fn bracket(&self, t: f64) -> (usize, f64) {
        if self.times.len() == 1 {
            return (0, 0.0);
        }
        let last = self.times.len() - 2;
        let m = match self.times.partition_point(|&s| s <= t) {
            0 => 0,
            p => (p - 1).min(last),
        };
        let w = ((t - self.times[m]) / (self.times[m + 1] - self.times[m])).clamp(0.0, 1.0);
        (m, w)
    }

    /// Interpolated velocity at `t`.
    pub fn at(&self, t: f64) -> Result<SpectralVectorField> {
        self.check_span(t)?;
        let (m, w) = self.bracket(t);
        if w == 0.0 {
            return Ok(self.fields[m].clone());
        }
        if w == 1.0 {
            return Ok(self.fields[m + 1].clone());
        }
        Ok(self.fields[m].scale(1.0 - w).axpy(w, &self.fields[m + 1]))
    }

    /// Exact time average of the interpolant over `[a, b]`.
    pub fn average(&self, a: f64, b: f64) -> Result<SpectralVectorField> {
        if !(b > a) {
            return Err(Error::param("reference velocity", format!("empty window [{a}, {b}]")));
        }
        self.check_span(a)?;
        self.check_span(b)?;
        let mut acc = SpectralVectorField::zeros(self.grid());
        if self.times.len() == 1 {
            return Ok(self.fields[0].clone());
        }
        for m in 0..self.times.len() - 1 {
            let (t0, t1) = (self.times[m], self.times[m + 1]);
            let lo = a.max(t0);
            let hi = b.min(t1);
            if hi <= lo {
                continue;
            }
            // trapezoid is exact on the linear piece
            let len = t1 - t0;
            let wl = (lo - t0) / len;
            let wh = (hi - t0) / len;
            let weight = 0.5 * (hi - lo);
            acc = acc
                .axpy(weight * (2.0 - wl - wh), &self.fields[m])
                .axpy(weight * (wl + wh), &self.fields[m + 1]);
        }
        Ok(acc.scale(1.0 / (b - a)))
    }

    /// Norms of the stored samples lying in `[a, b]`, plus the interpolated
    /// ends when they fall between samples.
    pub fn norm_samples(&self, a: f64, b: f64) -> Result<Vec<VelocityNormSample>> {
        self.check_span(a)?;
        self.check_span(b)?;
        let tol = self.tol();
        let measure = |t: f64, u: &SpectralVectorField| VelocityNormSample {
            t,
            l2_sq: l2_sq(u),
            h1_semi_sq: h1_semi_sq(u),
        };
        let mut out = Vec::new();
        if !self.times.iter().any(|&s| (s - a).abs() <= tol) {
            out.push(measure(a, &self.at(a)?));
        }
        for (t, u) in self.times.iter().zip(&self.fields) {
            if *t >= a - tol && *t <= b + tol {
                out.push(measure(*t, u));
            }
        }
        if !self.times.iter().any(|&s| (s - b).abs() <= tol) {
            out.push(measure(b, &self.at(b)?));
        }
        Ok(out)
    }
}
