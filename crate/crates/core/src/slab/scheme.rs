use crate::error::{Error, Result};
use crate::estimates::average_cs_check;
use crate::series::{ScalarSample, Snapshot, Trajectory};
use crate::spectral::{biot_savart, check_solenoidal_zero_mean, SpectralVectorField};

use super::partition::{compute_kstar, Slab, TimePartition, VelocityNormSample};
use super::provider::VelocityProvider;
use super::solve::{picard_solve_slab, PicardConfig, PicardDiagnostics};

pub const DEFAULT_SAMPLES_PER_SLAB: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabSchemeConfig {
    pub picard: PicardConfig,
    /// Sample intervals per slab for the scalar series and `K*_k`.
    pub samples_per_slab: usize,
    /// Store a vorticity snapshot at every `field_every`-th sample point.
    pub field_every: usize,
}

impl SlabSchemeConfig {
    pub fn new(nu: f64) -> Self {
        SlabSchemeConfig {
            picard: PicardConfig::new(nu),
            samples_per_slab: DEFAULT_SAMPLES_PER_SLAB,
            field_every: 1,
        }
    }
}

/// Per-slab outcome kept after the solution itself is discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabRecord {
    pub slab: Slab,
    pub diagnostics: PicardDiagnostics,
    pub kstar: f64,
    /// `(1/Δt)∫‖ω̃‖² − ‖ω̄‖²`, nonnegative by Cauchy–Schwarz.
    pub cs_margin: f64,
}

#[derive(Debug, Clone)]
pub struct SlabRun {
    pub partition: TimePartition,
    pub trajectory: Trajectory,
    pub records: Vec<SlabRecord>,
    pub final_omega: SpectralVectorField,
}

/// Chain slab solves across the partition.
///
/// Scalars are sampled at `samples_per_slab + 1` equispaced points per slab
/// (shared breakpoints once), with the velocity that drives the slab:
/// the reference velocity in reference mode, `biot_savart(ω̃)` otherwise.
pub fn run_slab_scheme(
    omega0: &SpectralVectorField,
    partition: &TimePartition,
    provider: &VelocityProvider,
    cfg: &SlabSchemeConfig,
) -> Result<SlabRun> {
    cfg.picard.validate()?;
    check_solenoidal_zero_mean(omega0)?;
    if cfg.samples_per_slab == 0 {
        return Err(Error::param("samples_per_slab", "must be at least 1"));
    }
    let field_every = cfg.field_every.max(1);
    if let VelocityProvider::Reference(r) = provider {
        omega0.check_same_grid(&r.fields()[0])?;
        let times = r.times();
        let tol = 1e-12 * partition.end_time().max(1.0);
        if times[0] > tol || times[times.len() - 1] < partition.end_time() - tol {
            return Err(Error::param(
                "reference velocity",
                format!(
                    "span [{}, {}] does not cover (0, {})",
                    times[0],
                    times[times.len() - 1],
                    partition.end_time()
                ),
            ));
        }
    }

    let mut trajectory = Trajectory::default();
    let mut records = Vec::with_capacity(partition.len());
    let mut omega = omega0.clone();
    omega.zero_mean();
    let mut point = 0usize;
    let total_points = partition.len() * cfg.samples_per_slab;
    for slab in partition.slabs() {
        let sol = picard_solve_slab(&omega, provider, slab, &cfg.picard)?;
        let mut norms = Vec::with_capacity(cfg.samples_per_slab + 1);
        for i in 0..=cfg.samples_per_slab {
            let local = i == cfg.samples_per_slab;
            let t = if local {
                slab.end
            } else {
                slab.start + slab.dt() * i as f64 / cfg.samples_per_slab as f64
            };
            let w = if i == 0 {
                omega.clone()
            } else if local {
                sol.endpoint()
            } else {
                sol.evaluate(t)?
            };
            let u = match provider {
                VelocityProvider::Reference(r) => r.at(t)?,
                VelocityProvider::SelfConsistent => biot_savart(&w)?,
            };
            let sample = ScalarSample::measure(t, &w, &u);
            norms.push(VelocityNormSample {
                t,
                l2_sq: sample.energy,
                h1_semi_sq: sample.dissipation,
            });
            if i == 0 && slab.index > 1 {
                continue;
            }
            if !sample.is_finite() {
                return Err(Error::BlowUp {
                    time: t,
                    enstrophy: sample.enstrophy,
                });
            }
            trajectory.series.push(sample);
            if point % field_every == 0 || point == total_points {
                trajectory.snapshots.push(Snapshot { t, omega: w });
            }
            point += 1;
        }
        records.push(SlabRecord {
            slab,
            kstar: compute_kstar(&norms, slab.dt())?,
            cs_margin: average_cs_check(&sol),
            diagnostics: sol.diagnostics.clone(),
        });
        omega = sol.endpoint();
    }
    Ok(SlabRun {
        partition: partition.clone(),
        trajectory,
        records,
        final_omega: omega,
    })
}
