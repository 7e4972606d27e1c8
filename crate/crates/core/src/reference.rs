//! Direct pseudo-spectral integration of the vorticity equation.
//!
//! Diffusion is integrated exactly per mode through the integrating factor
//! `e^{−ν|k|²t}`; the advection-stretching term is advanced by classical
//! fourth-order Runge–Kutta.

use crate::error::{Error, Result};
use crate::series::{ScalarSample, Snapshot, Trajectory};
use crate::spectral::{
    biot_savart, curl, leray_project, transport_stretching, Grid, SpectralVectorField,
};

pub const DEFAULT_ENSTROPHY_CEILING: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub nu: f64,
    /// Evolve the advection-stretching term; `false` gives pure diffusion.
    pub nonlinear: bool,
    pub enstrophy_ceiling: f64,
}

impl StepperConfig {
    pub fn new(dt: f64, nu: f64) -> Self {
        StepperConfig {
            dt,
            nu,
            nonlinear: true,
            enstrophy_ceiling: DEFAULT_ENSTROPHY_CEILING,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::param("nu", format!("must be positive, got {}", self.nu)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceState {
    pub t: f64,
    pub omega: SpectralVectorField,
    u: SpectralVectorField,
}

impl ReferenceState {
    pub fn new(t: f64, omega: SpectralVectorField) -> Result<Self> {
        let u = biot_savart(&omega)?;
        Ok(ReferenceState { t, omega, u })
    }

    /// Velocity recovered from the current vorticity.
    pub fn velocity(&self) -> &SpectralVectorField {
        &self.u
    }

    pub fn sample(&self) -> ScalarSample {
        ScalarSample::measure(self.t, &self.omega, &self.u)
    }
}

/// `−(u·∇)ω + (ω·∇)u`, dealiased and projected, with `u` from Biot–Savart.
pub fn vorticity_rhs(omega: &SpectralVectorField) -> Result<SpectralVectorField> {
    let u = biot_savart(omega)?;
    Ok(transport_stretching(&u, omega))
}

/// Right-hand side of the velocity form: `P(u × curl u)`, dealiased.
pub fn velocity_rhs(u: &SpectralVectorField) -> SpectralVectorField {
    let omega = curl(u);
    let mut out = leray_project(&crate::spectral::cross_dealiased(u, &omega));
    out.zero_mean();
    out
}

/// Per-mode half-step decay factors `e^{−ν|k|²dt/2}`.
fn half_decay(grid: Grid, nu: f64, dt: f64) -> Vec<f64> {
    (0..grid.len())
        .map(|idx| (-nu * grid.ksq(idx) * dt * 0.5).exp())
        .collect()
}

fn apply_decay(v: &SpectralVectorField, decay: &[f64], power: i32) -> SpectralVectorField {
    let mut out = v.clone();
    for comp in 0..3 {
        for (c, &d) in out.component_mut(comp).iter_mut().zip(decay) {
            *c *= d.powi(power);
        }
    }
    out
}

/// One integrating-factor RK4 step of `v' = −ν|k|² v + N(v)`.
fn if_rk4<F>(v: &SpectralVectorField, dt: f64, decay: &[f64], rhs: F) -> Result<SpectralVectorField>
where
    F: Fn(&SpectralVectorField) -> Result<SpectralVectorField>,
{
    let e1 = |x: &SpectralVectorField| apply_decay(x, decay, 1);
    let e2 = |x: &SpectralVectorField| apply_decay(x, decay, 2);

    let k1 = rhs(v)?;
    let a = e1(&v.axpy(0.5 * dt, &k1));
    let k2 = rhs(&a)?;
    let b = e1(v).axpy(0.5 * dt, &k2);
    let k3 = rhs(&b)?;
    let c = e2(v).axpy(dt, &e1(&k3));
    let k4 = rhs(&c)?;

    let incr = e2(&k1).axpy(2.0, &e1(&k2.axpy(1.0, &k3))).axpy(1.0, &k4);
    Ok(e2(v).axpy(dt / 6.0, &incr))
}

fn restore_invariants(omega: &SpectralVectorField) -> SpectralVectorField {
    let mut out = leray_project(omega);
    out.zero_mean();
    out
}

fn check_blow_up(t: f64, omega: &SpectralVectorField, ceiling: f64) -> Result<()> {
    let enstrophy = crate::spectral::l2_sq(omega);
    if !omega.is_finite() || !enstrophy.is_finite() || enstrophy > ceiling {
        return Err(Error::BlowUp { time: t, enstrophy });
    }
    Ok(())
}

/// Advance a state by one step of size `cfg.dt`.
pub fn step_if_rk4(state: &ReferenceState, cfg: &StepperConfig) -> Result<ReferenceState> {
    cfg.validate()?;
    let decay = half_decay(state.omega.grid(), cfg.nu, cfg.dt);
    step_with(state, cfg, &decay, state.t + cfg.dt)
}

fn step_with(
    state: &ReferenceState,
    cfg: &StepperConfig,
    decay: &[f64],
    t_next: f64,
) -> Result<ReferenceState> {
    let next = if cfg.nonlinear {
        if_rk4(&state.omega, cfg.dt, decay, vorticity_rhs)?
    } else {
        apply_decay(&state.omega, decay, 2)
    };
    let omega = restore_invariants(&next);
    check_blow_up(t_next, &omega, cfg.enstrophy_ceiling)?;
    ReferenceState::new(t_next, omega)
}

/// Result of a reference run: snapshots at the requested times and the
/// scalar series at every step.
#[derive(Debug, Clone)]
pub struct ReferenceRun {
    pub trajectory: Trajectory,
    pub final_state: ReferenceState,
    pub steps: usize,
}

/// Integer step count for time `t` on the `dt` lattice.
pub(crate) fn lattice_steps(t: f64, dt: f64, name: &'static str) -> Result<usize> {
    let m = (t / dt).round();
    if m < 0.0 || (m * dt - t).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(Error::param(
            name,
            format!("time {t} is not a multiple of dt = {dt}"),
        ));
    }
    Ok(m as usize)
}

/// Integrate from `omega0` at `t = 0` to `t_end` with fixed `dt`.
///
/// `sample_times` must lie on the `dt` lattice; a snapshot of ω is stored at
/// each. Scalars are recorded every `scalar_every` steps and at the end.
pub fn run_reference(
    omega0: &SpectralVectorField,
    t_end: f64,
    cfg: &StepperConfig,
    sample_times: &[f64],
    scalar_every: usize,
) -> Result<ReferenceRun> {
    cfg.validate()?;
    if !(t_end > 0.0) {
        return Err(Error::param("T", format!("must be positive, got {t_end}")));
    }
    let steps = lattice_steps(t_end, cfg.dt, "T")?;
    let mut sample_steps = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        let m = lattice_steps(t, cfg.dt, "sample time")?;
        if m > steps {
            return Err(Error::param("sample time", format!("{t} beyond T = {t_end}")));
        }
        sample_steps.push(m);
    }
    let scalar_every = scalar_every.max(1);

    let decay = half_decay(omega0.grid(), cfg.nu, cfg.dt);
    let mut state = ReferenceState::new(0.0, omega0.clone())?;
    let mut trajectory = Trajectory::default();
    let record = |state: &ReferenceState, m: usize, traj: &mut Trajectory| {
        if m % scalar_every == 0 || m == steps {
            traj.series.push(state.sample());
        }
        for (&s, &t) in sample_steps.iter().zip(sample_times) {
            if s == m {
                traj.snapshots.push(Snapshot {
                    t,
                    omega: state.omega.clone(),
                });
            }
        }
    };
    record(&state, 0, &mut trajectory);
    for m in 1..=steps {
        state = step_with(&state, cfg, &decay, m as f64 * cfg.dt)?;
        record(&state, m, &mut trajectory);
    }
    Ok(ReferenceRun {
        trajectory,
        final_state: state,
        steps,
    })
}

/// Velocity-form integration `∂_t u = P(u × ω) + νΔu`, used only as an
/// independent cross-check of the vorticity solver.
pub fn run_velocity_form(
    u0: &SpectralVectorField,
    t_end: f64,
    cfg: &StepperConfig,
) -> Result<SpectralVectorField> {
    cfg.validate()?;
    let steps = lattice_steps(t_end, cfg.dt, "T")?;
    let decay = half_decay(u0.grid(), cfg.nu, cfg.dt);
    let mut u = restore_invariants(u0);
    for m in 1..=steps {
        let next = if_rk4(&u, cfg.dt, &decay, |v| Ok(velocity_rhs(v)))?;
        u = restore_invariants(&next);
        check_blow_up(m as f64 * cfg.dt, &curl(&u), cfg.enstrophy_ceiling)?;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{abc_vorticity, random_divfree_vorticity, taylor_green_velocity, taylor_green_vorticity};
    use crate::spectral::{divergence, l2_sq, relative_divergence};

    fn rel_err(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
        (l2_sq(&a.sub(b)) / l2_sq(b)).sqrt()
    }

    #[test]
    fn zero_rhs_for_zero_field() {
        let g = Grid::new(8).unwrap();
        let r = vorticity_rhs(&SpectralVectorField::zeros(g)).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn beltrami_rhs_vanishes() {
        let g = Grid::new(16).unwrap();
        let r = vorticity_rhs(&abc_vorticity(g)).unwrap();
        assert!(r.max_abs() < 1e-14, "{}", r.max_abs());
    }

    /// Hand-differentiated Taylor–Green fields and their gradients.
    fn tg_nonlinear_oracle(x: f64, y: f64, z: f64) -> [f64; 3] {
        let (sx, cx, sy, cy, sz, cz) = (x.sin(), x.cos(), y.sin(), y.cos(), z.sin(), z.cos());
        let u = [sx * cy * cz, -cx * sy * cz, 0.0];
        let w = [-cx * sy * sz, -sx * cy * sz, 2.0 * sx * sy * cz];
        // du[i][j] = ∂_j u_i
        let du = [
            [cx * cy * cz, -sx * sy * cz, -sx * cy * sz],
            [sx * sy * cz, -cx * cy * cz, cx * sy * sz],
            [0.0, 0.0, 0.0],
        ];
        let dw = [
            [sx * sy * sz, -cx * cy * sz, -cx * sy * cz],
            [-cx * cy * sz, sx * sy * sz, -sx * cy * cz],
            [2.0 * cx * sy * cz, 2.0 * sx * cy * cz, -2.0 * sx * sy * sz],
        ];
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i] += w[j] * du[i][j] - u[j] * dw[i][j];
            }
        }
        out
    }

    #[test]
    fn taylor_green_rhs_matches_hand_derivation() {
        let g = Grid::new(16).unwrap();
        let rhs = vorticity_rhs(&taylor_green_vorticity(g)).unwrap();
        let oracle = SpectralVectorField::from_fn(g, tg_nonlinear_oracle);
        assert!(rhs.sub(&oracle).max_abs() < 1e-10);
        // the oracle is already solenoidal
        assert!(divergence(&oracle).max_abs() < 1e-12);
    }

    #[test]
    fn rhs_is_solenoidal_zero_mean() {
        let g = Grid::new(16).unwrap();
        let r = vorticity_rhs(&random_divfree_vorticity(g, 3)).unwrap();
        assert!(divergence(&r).max_abs() < 1e-12);
        assert_eq!(r.mean(), [crate::spectral::ZERO; 3]);
    }

    #[test]
    fn linear_step_is_exact_diffusion() {
        let g = Grid::new(8).unwrap();
        let w = SpectralVectorField::from_fn(g, |x, y, _| [0.0, 0.0, (x + 2.0 * y).sin()]);
        let mut cfg = StepperConfig::new(0.01, 1.0);
        cfg.nonlinear = false;
        let next = step_if_rk4(&ReferenceState::new(0.0, w.clone()).unwrap(), &cfg).unwrap();
        let expect = w.scale((-5.0f64 * 0.01).exp());
        assert!(next.omega.sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn beltrami_step_decays_exactly() {
        let g = Grid::new(16).unwrap();
        let w = abc_vorticity(g);
        let cfg = StepperConfig::new(0.05, 1.0);
        let next = step_if_rk4(&ReferenceState::new(0.0, w.clone()).unwrap(), &cfg).unwrap();
        assert!(rel_err(&next.omega, &w.scale((-0.05f64).exp())) < 1e-12);
    }

    #[test]
    fn fourth_order_self_convergence() {
        let g = Grid::new(16).unwrap();
        let w0 = random_divfree_vorticity(g, 17).scale(3.0);
        let t = 0.2;
        let run = |dt: f64| {
            run_reference(&w0, t, &StepperConfig::new(dt, 0.1), &[], 1000)
                .unwrap()
                .final_state
                .omega
        };
        let (a, b, c) = (run(0.04), run(0.02), run(0.01));
        let e1 = l2_sq(&a.sub(&b)).sqrt();
        let e2 = l2_sq(&b.sub(&c)).sqrt();
        let ratio = e1 / e2;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn zero_trajectory_stays_zero() {
        let g = Grid::new(8).unwrap();
        let run = run_reference(
            &SpectralVectorField::zeros(g),
            0.1,
            &StepperConfig::new(0.01, 1.0),
            &[0.0, 0.05, 0.1],
            1,
        )
        .unwrap();
        assert_eq!(run.trajectory.snapshots.len(), 3);
        assert!(run.trajectory.snapshots.iter().all(|s| s.omega.max_abs() == 0.0));
        assert_eq!(run.trajectory.series.len(), 11);
    }

    #[test]
    fn beltrami_run_matches_exact_decay() {
        let g = Grid::new(16).unwrap();
        let w0 = abc_vorticity(g);
        let run = run_reference(&w0, 0.5, &StepperConfig::new(0.01, 1.0), &[0.5], 1).unwrap();
        assert!(rel_err(&run.final_state.omega, &w0.scale((-0.5f64).exp())) < 1e-10);
    }

    #[test]
    fn invariants_hold_along_run() {
        let g = Grid::new(16).unwrap();
        let w0 = random_divfree_vorticity(g, 5);
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.01).collect();
        let run = run_reference(&w0, 0.1, &StepperConfig::new(0.01, 0.5), &times, 1).unwrap();
        for s in &run.trajectory.snapshots {
            assert!(relative_divergence(&s.omega) < 1e-10);
            assert_eq!(s.omega.mean(), [crate::spectral::ZERO; 3]);
        }
    }

    #[test]
    fn blow_up_is_reported() {
        let g = Grid::new(8).unwrap();
        let mut cfg = StepperConfig::new(0.01, 1.0);
        cfg.enstrophy_ceiling = 1.0;
        let err = run_reference(&taylor_green_vorticity(g), 0.1, &cfg, &[], 1).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }

    #[test]
    fn rejects_off_lattice_times() {
        let g = Grid::new(8).unwrap();
        let cfg = StepperConfig::new(0.03, 1.0);
        assert!(run_reference(&taylor_green_vorticity(g), 0.1, &cfg, &[], 1).is_err());
    }

    #[test]
    fn velocity_form_agrees_with_vorticity_form() {
        let g = Grid::new(16).unwrap();
        let u0 = taylor_green_velocity(g).scale(2.0);
        let cfg = StepperConfig::new(0.01, 0.2);
        let u = run_velocity_form(&u0, 0.3, &cfg).unwrap();
        let w = run_reference(&curl(&u0), 0.3, &cfg, &[], 100)
            .unwrap()
            .final_state
            .omega;
        assert!(rel_err(&curl(&u), &w) < 1e-10, "{}", rel_err(&curl(&u), &w));
    }
}
