//! Fractional time-regularity integral `∫ |τ|^{2γ} Σ‖ω̂_i(τ)‖² dτ` of a
//! sampled trajectory.
//!
//! The trajectory is the piecewise-linear interpolant of the samples,
//! extended by zero outside the sampled span, with the time transform
//! `ω̂(τ) = ∫ ω(t) e^{−2πiτt} dt`. Writing the interpolant through its slope
//! changes `s_m` and jumps `J_m` at the sample times, the integral splits
//! into pairwise terms whose `τ`-integrals have closed forms
//! `∫|τ|^{a} e^{2πiτΔ} dτ ∝ Γ(a+1)|2πΔ|^{−a−1}` (taken as finite parts; the
//! divergent pieces cancel because the interpolant has compact support).
//! The result is `Σ_{m,m'} K_{mm'} (ω_m, ω_{m'})_{L²}` with a scalar kernel `K`
//! that depends only on the sample times and `γ`.

use std::f64::consts::PI;

use statrs::function::gamma::gamma as gamma_fn;

use crate::error::{Error, Result};
use crate::series::Snapshot;
use crate::spectral::inner;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HGammaDiagnostic {
    pub gamma: f64,
    pub value: f64,
    pub samples: usize,
    pub t_start: f64,
    pub t_end: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 0.25) {
        return Err(Error::param("gamma", format!("must lie in (0, 1/4), got {gamma}")));
    }
    Ok(())
}

/// `(2π)^{−p} · Γ(μ) · trig(πμ/2) · (2π|Δ|)^{−μ}`.
fn pair_term(p: i32, mu: f64, delta: f64, trig: fn(f64) -> f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    let two_pi = 2.0 * PI;
    two_pi.powi(-p) * gamma_fn(mu) * trig(PI * mu / 2.0) * (two_pi * delta.abs()).powf(-mu)
}

/// Kernel matrix `K` for sample times `ts` (strictly increasing, ≥ 2).
pub fn hgamma_kernel(ts: &[f64], gamma: f64) -> Result<Vec<Vec<f64>>> {
    check_gamma(gamma)?;
    let m = ts.len();
    if m < 2 {
        return Err(Error::Estimate("time-regularity integral needs at least 2 samples".into()));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Estimate("sample times must be strictly increasing".into()));
    }
    // slope changes s = D c, jumps J = E c
    let mut d = vec![vec![0.0; m]; m];
    for i in 0..m - 1 {
        let h = ts[i + 1] - ts[i];
        d[i][i] -= 1.0 / h;
        d[i][i + 1] += 1.0 / h;
        d[i + 1][i] += 1.0 / h;
        d[i + 1][i + 1] -= 1.0 / h;
    }
    let (mu_a, mu_b, mu_s) = (2.0 * gamma - 3.0, 2.0 * gamma - 1.0, 2.0 * gamma - 2.0);
    let mut a = vec![vec![0.0; m]; m];
    let mut s = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let delta = ts[i] - ts[j];
            a[i][j] = pair_term(4, mu_a, delta, f64::cos);
            s[i][j] = delta.signum() * pair_term(3, mu_s, delta, f64::sin);
        }
    }
    let b_end = pair_term(2, mu_b, ts[m - 1] - ts[0], f64::cos);
    // DᵀAD
    let mut ad = vec![vec![0.0; m]; m];
    let mut sd = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let lo = j.saturating_sub(1);
            let hi = (j + 1).min(m - 1);
            for l in lo..=hi {
                ad[i][j] += a[i][l] * d[l][j];
                sd[i][j] += s[i][l] * d[l][j];
            }
        }
    }
    let mut k = vec![vec![0.0; m]; m];
    for i in 0..m {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(m - 1);
        for j in 0..m {
            let mut v = 0.0;
            for l in lo..=hi {
                v += d[l][i] * ad[l][j];
            }
            k[i][j] = 2.0 * v;
        }
    }
    // jumps: J_0 = c_0, J_{m−1} = −c_{m−1}
    let e = [(0usize, 1.0), (m - 1, -1.0)];
    for &(p, sp) in &e {
        for &(q, sq) in &e {
            let delta = ts[p] - ts[q];
            if delta != 0.0 {
                k[p][q] += 2.0 * sp * sq * b_end;
            }
        }
    }
    // EᵀSD − DᵀSE; S is odd, so the two halves coincide
    for &(p, sp) in &e {
        for j in 0..m {
            let v = 2.0 * sp * sd[p][j];
            k[p][j] += v;
            k[j][p] += v;
        }
    }
    // only the symmetric part contributes to a quadratic form
    for i in 0..m {
        for j in 0..i {
            let avg = 0.5 * (k[i][j] + k[j][i]);
            k[i][j] = avg;
            k[j][i] = avg;
        }
    }
    Ok(k)
}

/// `cᵀ K c` for a scalar sample sequence.
pub fn hgamma_scalar(ts: &[f64], values: &[f64], gamma: f64) -> Result<f64> {
    if ts.len() != values.len() {
        return Err(Error::ShapeMismatch { expected: ts.len(), actual: values.len() });
    }
    let k = hgamma_kernel(ts, gamma)?;
    let mut sum = 0.0;
    for i in 0..ts.len() {
        for j in 0..ts.len() {
            sum += k[i][j] * values[i] * values[j];
        }
    }
    Ok(sum)
}

/// Evaluate the integral for the zero-extended interpolant of `snapshots`.
pub fn hgamma_diagnostic(snapshots: &[Snapshot], gamma: f64) -> Result<HGammaDiagnostic> {
    check_gamma(gamma)?;
    let ts: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let k = hgamma_kernel(&ts, gamma)?;
    let m = snapshots.len();
    let mut value = 0.0;
    for i in 0..m {
        snapshots[0].omega.check_same_grid(&snapshots[i].omega)?;
        for j in 0..=i {
            let g = inner(&snapshots[i].omega, &snapshots[j].omega);
            value += if i == j { k[i][i] * g } else { 2.0 * k[i][j] * g };
        }
    }
    Ok(HGammaDiagnostic {
        gamma,
        value: value.max(0.0),
        samples: m,
        t_start: ts[0],
        t_end: ts[m - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, SpectralVectorField};
    use num_complex::Complex64;

    /// Time transform of the zero-extended piecewise-linear interpolant.
    fn transform(ts: &[f64], cs: &[f64], tau: f64) -> Complex64 {
        let w = 2.0 * PI * tau;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..ts.len() - 1 {
            let h = ts[i + 1] - ts[i];
            let a = cs[i];
            let b = (cs[i + 1] - cs[i]) / h;
            let z = Complex64::new(0.0, -w * h);
            // F0 = ∫₀ʰ e^{−iωs} ds, F1 = ∫₀ʰ s e^{−iωs} ds
            let (f0, f1) = if (w * h).abs() < 1e-2 {
                let mut f0 = Complex64::new(0.0, 0.0);
                let mut f1 = Complex64::new(0.0, 0.0);
                let mut zn = Complex64::new(1.0, 0.0);
                let mut fact = 1.0;
                for n in 0..12 {
                    f0 += zn * h / (fact * (n as f64 + 1.0));
                    f1 += zn * h * h / (fact * (n as f64 + 2.0));
                    zn *= z;
                    fact *= n as f64 + 1.0;
                }
                (f0, f1)
            } else {
                let iw = Complex64::new(0.0, w);
                let e = z.exp();
                let f0 = (Complex64::new(1.0, 0.0) - e) / iw;
                let f1 = (-h * e + f0) / iw;
                (f0, f1)
            };
            acc += Complex64::new(0.0, -w * ts[i]).exp() * (a * f0 + b * f1);
        }
        acc
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    /// Dense-frequency quadrature of `∫|τ|^{2γ}|f̂(τ)|² dτ` with an averaged
    /// tail beyond `r`.
    fn oracle(ts: &[f64], cs: &[f64], gamma: f64, r: f64) -> f64 {
        let g2 = 2.0 * gamma;
        let integrand = |tau: f64| tau.powf(g2) * transform(ts, cs, tau).norm_sqr();
        // τ = s⁵ removes the algebraic singularity at 0
        let near = simpson(|s: f64| 5.0 * s.powi(4) * integrand(s.powi(5)), 0.0, 1.0, 2000);
        let far = simpson(integrand, 1.0, r, (r as usize - 1) * 40);
        let jumps = cs[0] * cs[0] + cs[cs.len() - 1] * cs[cs.len() - 1];
        let tail = jumps / (4.0 * PI * PI) * r.powf(g2 - 1.0) / (1.0 - g2);
        2.0 * (near + far + tail)
    }

    #[test]
    fn constant_mode_matches_sinc_quadrature() {
        let ts: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let cs = vec![1.0; ts.len()];
        let got = hgamma_scalar(&ts, &cs, 0.2).unwrap();
        let expected = oracle(&ts, &cs, 0.2, 20000.0);
        assert!((got - expected).abs() <= 1e-6 * expected, "{got} vs {expected}");
    }

    #[test]
    fn varying_samples_match_quadrature() {
        let ts: Vec<f64> = (0..=10).map(|i| 0.2 + i as f64 * 0.07).collect();
        let cs: Vec<f64> = ts.iter().map(|t| (3.0 * t).cos() + 0.5 * t).collect();
        for gamma in [0.05, 0.2] {
            let got = hgamma_scalar(&ts, &cs, gamma).unwrap();
            let expected = oracle(&ts, &cs, gamma, 20000.0);
            assert!((got - expected).abs() <= 1e-6 * expected, "{gamma}: {got} vs {expected}");
        }
    }

    #[test]
    fn zero_and_preconditions() {
        let g = Grid::new(4).unwrap();
        let snaps: Vec<Snapshot> = (0..4)
            .map(|i| Snapshot { t: i as f64 * 0.1, omega: SpectralVectorField::zeros(g) })
            .collect();
        assert_eq!(hgamma_diagnostic(&snaps, 0.2).unwrap().value, 0.0);
        assert!(hgamma_diagnostic(&snaps, 0.3).is_err());
        assert!(hgamma_diagnostic(&snaps, 0.0).is_err());
        assert!(hgamma_diagnostic(&snaps[..1], 0.2).is_err());
    }

    #[test]
    fn field_version_scales_with_norm() {
        let g = Grid::new(4).unwrap();
        let v = SpectralVectorField::from_fn(g, |x, _, _| [0.0, 0.0, x.sin()]);
        let ts: Vec<f64> = (0..=6).map(|i| i as f64 / 6.0).collect();
        let cs: Vec<f64> = ts.iter().map(|t| (-t).exp()).collect();
        let snaps: Vec<Snapshot> = ts
            .iter()
            .zip(&cs)
            .map(|(&t, &c)| Snapshot { t, omega: v.scale(c) })
            .collect();
        let got = hgamma_diagnostic(&snaps, 0.1).unwrap().value;
        let expected = hgamma_scalar(&ts, &cs, 0.1).unwrap() * g.volume() / 2.0;
        assert!((got - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn gamma_dependence_follows_time_scale() {
        // rescaling time by L multiplies the integral by L^{1-2γ}: long
        // trajectories decrease in γ, short ones increase
        let at = |len: f64, gamma: f64| {
            let ts: Vec<f64> = (0..=8).map(|i| len * i as f64 / 8.0).collect();
            hgamma_scalar(&ts, &[1.0; 9], gamma).unwrap()
        };
        assert!(at(100.0, 0.2) < at(100.0, 0.05));
        assert!(at(0.01, 0.2) > at(0.01, 0.05));
        let ratio = at(3.0, 0.2) / at(1.0, 0.2);
        assert!((ratio - 3f64.powf(0.6)).abs() < 1e-9 * ratio, "{ratio}");
    }
}
