use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    biot_savart, check_solenoidal_zero_mean, l2_sq, transport_stretching, SpectralVectorField,
};

use super::partition::Slab;
use super::provider::VelocityProvider;

/// Slab averages `ω̄ᵏ`, `ūᵏ`: the frozen coefficients of the linear problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabAverages {
    pub omega_bar: SpectralVectorField,
    pub u_bar: SpectralVectorField,
}

/// Convergence record of the successive approximation on one slab.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PicardDiagnostics {
    pub iterations: usize,
    /// `d_j = ‖ω̄_j − ω̄_{j−1}‖_{L²}`, one per iteration.
    pub changes: Vec<f64>,
    /// `ρ_j = d_j / d_{j−1}`, from the second iteration on (skipped when
    /// `d_{j−1} = 0`).
    pub ratios: Vec<f64>,
    pub converged: bool,
}

impl PicardDiagnostics {
    pub fn max_ratio(&self) -> Option<f64> {
        self.ratios.iter().copied().reduce(f64::max)
    }

    pub fn last_change(&self) -> f64 {
        self.changes.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub nu: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl PicardConfig {
    pub fn new(nu: f64) -> Self {
        PicardConfig {
            nu,
            tol: 1e-10,
            max_iter: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::param("nu", format!("must be positive, got {}", self.nu)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("tol", format!("must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// Closed-form solution of the linear slab problem
/// `∂_t ω̂ = −ν|k|² ω̂ + F̂` with constant forcing `F = P[(ω̄·∇)ū − (ū·∇)ω̄]`.
#[derive(Debug, Clone)]
pub struct SlabSolution {
    pub slab: Slab,
    pub nu: f64,
    pub omega_init: SpectralVectorField,
    pub forcing: SpectralVectorField,
    /// Coefficient averages the forcing was built from.
    pub averages: SlabAverages,
    pub diagnostics: PicardDiagnostics,
}

/// `(1 − e^{−x})/x`.
pub(crate) fn phi(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

const SERIES_CUTOFF: f64 = 0.05;

/// Power series `Σ_j c(j) x^j` summed to 16 terms.
fn series(x: f64, c: impl Fn(i32) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut p = 1.0;
    for j in 0..16 {
        sum += c(j) * p;
        p *= x;
    }
    sum
}

fn factorial(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `(1 − φ(x))/x`; the slab average of the Duhamel gain is `Δ·psi(λΔ)`.
pub(crate) fn psi(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        // coefficients of x^j: (−1)^j / (j+2)!
        series(x, |j| (-1f64).powi(j) / factorial(j + 2))
    } else {
        (x + (-x).exp_m1()) / (x * x)
    }
}

/// `(φ(x) − φ(2x))/x`.
fn psi_cross(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        series(x, |j| (-1f64).powi(j + 1) * (1.0 - 2f64.powi(j + 1)) / factorial(j + 2))
    } else {
        (phi(x) - phi(2.0 * x)) / x
    }
}

/// `(1 − 2φ(x) + φ(2x))/x²`.
fn psi_square(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        series(x, |j| (-1f64).powi(j) * (2f64.powi(j + 2) - 2.0) / factorial(j + 3))
    } else {
        (1.0 - 2.0 * phi(x) + phi(2.0 * x)) / (x * x)
    }
}

impl SlabSolution {
    fn lambda(&self, idx: usize) -> f64 {
        self.nu * self.omega_init.grid().ksq(idx)
    }

    /// `ω̃` at absolute time `t` inside the slab.
    pub fn evaluate(&self, t: f64) -> Result<SpectralVectorField> {
        let tol = 1e-12 * self.slab.end.abs().max(1.0);
        if !self.slab.contains(t, tol) {
            return Err(Error::param(
                "t",
                format!("{t} outside slab [{}, {}]", self.slab.start, self.slab.end),
            ));
        }
        let tau = (t - self.slab.start).clamp(0.0, self.slab.dt());
        Ok(self.evaluate_local(tau))
    }

    fn evaluate_local(&self, tau: f64) -> SpectralVectorField {
        let g = self.omega_init.grid();
        let mut out = SpectralVectorField::zeros(g);
        for idx in 0..g.len() {
            let lam = self.lambda(idx);
            let decay = (-lam * tau).exp();
            let gain = tau * phi(lam * tau);
            let w0 = self.omega_init.mode(idx);
            let f = self.forcing.mode(idx);
            out.set_mode(idx, [0, 1, 2].map(|c| w0[c] * decay + f[c] * gain));
        }
        out
    }

    /// Value at the end of the slab; the next slab starts from this field.
    pub fn endpoint(&self) -> SpectralVectorField {
        self.evaluate_local(self.slab.dt())
    }

    /// Closed-form time average of the trajectory over the slab.
    pub fn average(&self) -> SpectralVectorField {
        let g = self.omega_init.grid();
        let dt = self.slab.dt();
        let mut out = SpectralVectorField::zeros(g);
        for idx in 0..g.len() {
            let x = self.lambda(idx) * dt;
            let (a, b) = (phi(x), dt * psi(x));
            let w0 = self.omega_init.mode(idx);
            let f = self.forcing.mode(idx);
            out.set_mode(idx, [0, 1, 2].map(|c| w0[c] * a + f[c] * b));
        }
        out
    }

    /// Closed-form `(1/Δt) ∫ Σ‖ω̃_i‖²_{L²} dt` over the slab.
    pub fn mean_square(&self) -> f64 {
        let g = self.omega_init.grid();
        let dt = self.slab.dt();
        let mut sum = 0.0;
        for idx in 0..g.len() {
            let x = self.lambda(idx) * dt;
            let dd = phi(2.0 * x);
            let dg = dt * psi_cross(x);
            let gg = dt * dt * psi_square(x);
            let w0 = self.omega_init.mode(idx);
            let f = self.forcing.mode(idx);
            for c in 0..3 {
                sum += w0[c].norm_sqr() * dd
                    + 2.0 * (w0[c] * f[c].conj()).re * dg
                    + f[c].norm_sqr() * gg;
            }
        }
        g.volume() * sum
    }
}

/// Solve the linear slab problem with the given frozen averages.
pub fn linear_slab_solve(
    omega_init: &SpectralVectorField,
    averages: &SlabAverages,
    slab: Slab,
    nu: f64,
) -> Result<SlabSolution> {
    omega_init.check_same_grid(&averages.omega_bar)?;
    omega_init.check_same_grid(&averages.u_bar)?;
    check_solenoidal_zero_mean(&averages.omega_bar)?;
    check_solenoidal_zero_mean(&averages.u_bar)?;
    if !(slab.dt() > 0.0) {
        return Err(Error::param("slab", format!("non-positive length {}", slab.dt())));
    }
    let mut forcing = transport_stretching(&averages.u_bar, &averages.omega_bar);
    forcing.set_mode(0, [Complex64::new(0.0, 0.0); 3]);
    Ok(SlabSolution {
        slab,
        nu,
        omega_init: omega_init.clone(),
        forcing,
        averages: averages.clone(),
        diagnostics: PicardDiagnostics::default(),
    })
}

/// `ω̄ᵏ = (1/Δt_k) ∫ ω̃ dt` of a linear slab solution.
pub fn slab_average(solution: &SlabSolution) -> SpectralVectorField {
    solution.average()
}

fn provider_average(
    provider: &VelocityProvider,
    omega_bar: &SpectralVectorField,
    slab: Slab,
) -> Result<SpectralVectorField> {
    match provider {
        VelocityProvider::Reference(r) => r.average(slab.start, slab.end),
        VelocityProvider::SelfConsistent => biot_savart(omega_bar),
    }
}

/// Successive approximation of the slab averages.
///
/// Iterate 0 freezes `ω̄ = ω̃^{k−1}` and takes `ū` from the provider at the
/// slab start. Each iteration solves the linear problem, averages the result
/// and updates `ū`. In reference mode `ū` only becomes the true slab average
/// after the first update, so convergence is declared from the second
/// iteration on.
pub fn picard_solve_slab(
    omega_init: &SpectralVectorField,
    provider: &VelocityProvider,
    slab: Slab,
    cfg: &PicardConfig,
) -> Result<SlabSolution> {
    cfg.validate()?;
    let u0 = match provider {
        VelocityProvider::Reference(r) => {
            omega_init.check_same_grid(&r.fields()[0])?;
            r.at(slab.start)?
        }
        VelocityProvider::SelfConsistent => biot_savart(omega_init)?,
    };
    let min_iter = match provider {
        VelocityProvider::Reference(_) => 2,
        VelocityProvider::SelfConsistent => 1,
    };
    let mut averages = SlabAverages {
        omega_bar: omega_init.clone(),
        u_bar: u0,
    };
    let mut diag = PicardDiagnostics::default();
    for j in 1..=cfg.max_iter {
        let mut sol = linear_slab_solve(omega_init, &averages, slab, cfg.nu)?;
        let next = sol.average();
        let d = l2_sq(&next.sub(&averages.omega_bar)).sqrt();
        if !d.is_finite() {
            return Err(Error::PicardDiverged {
                slab: slab.index,
                iterations: j,
                last_change: d,
                ratios: diag.ratios,
            });
        }
        if let Some(&prev) = diag.changes.last() {
            if prev > 0.0 {
                diag.ratios.push(d / prev);
            }
        }
        diag.changes.push(d);
        diag.iterations = j;
        if d <= cfg.tol && j >= min_iter {
            diag.converged = true;
            sol.diagnostics = diag;
            return Ok(sol);
        }
        let u_bar = provider_average(provider, &next, slab)?;
        averages = SlabAverages {
            omega_bar: next,
            u_bar,
        };
    }
    Err(Error::PicardDiverged {
        slab: slab.index,
        iterations: cfg.max_iter,
        last_change: diag.last_change(),
        ratios: diag.ratios,
    })
}
