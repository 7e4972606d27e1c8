//! Modewise differential operators, projection, Biot–Savart inversion and
//! dealiased quadratic products.

use num_complex::Complex64;

use super::field::{ScalarSpectralField, SpectralVectorField, ZERO};
use super::grid::Grid;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative divergence above which Biot–Savart refuses its input.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-8;

/// Absolute mean-mode magnitude (relative to the field's largest mode) above
/// which the mean is considered nonzero.
pub const MEAN_TOLERANCE: f64 = 1e-12;

#[inline]
fn ik_cross(k: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    [
        I * (v[2] * k[1] - v[1] * k[2]),
        I * (v[0] * k[2] - v[2] * k[0]),
        I * (v[1] * k[0] - v[0] * k[1]),
    ]
}

#[inline]
fn k_dot(k: [f64; 3], v: [Complex64; 3]) -> Complex64 {
    v[0] * k[0] + v[1] * k[1] + v[2] * k[2]
}

/// `curl v`, modewise `i k × v̂`.
pub fn curl(v: &SpectralVectorField) -> SpectralVectorField {
    let g = v.grid();
    v.map_modes(|idx, m| ik_cross(g.kvec(idx), m))
}

/// `div v`, modewise `i k · v̂`.
pub fn divergence(v: &SpectralVectorField) -> ScalarSpectralField {
    let g = v.grid();
    let coeffs = (0..g.len())
        .map(|idx| I * k_dot(g.kvec(idx), v.mode(idx)))
        .collect();
    ScalarSpectralField::from_coeffs(g, coeffs).expect("length matches grid")
}

/// `∇f`, modewise `i k f̂`.
pub fn gradient(f: &ScalarSpectralField) -> SpectralVectorField {
    let g = f.grid();
    let mut out = SpectralVectorField::zeros(g);
    for (idx, &c) in f.coeffs().iter().enumerate() {
        let k = g.kvec(idx);
        out.set_mode(idx, [I * c * k[0], I * c * k[1], I * c * k[2]]);
    }
    out
}

/// Leray projection onto divergence-free fields: `v̂ - k (k·v̂)/|k|²`,
/// identity where `|k| = 0`.
pub fn leray_project(v: &SpectralVectorField) -> SpectralVectorField {
    let g = v.grid();
    v.map_modes(|idx, m| {
        let k = g.kvec(idx);
        let ksq = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if ksq == 0.0 {
            return m;
        }
        let p = k_dot(k, m) / ksq;
        [m[0] - p * k[0], m[1] - p * k[1], m[2] - p * k[2]]
    })
}

/// Relative divergence `‖k·v̂‖ / ‖|k| v̂‖` (zero for a field with no gradients).
pub fn relative_divergence(v: &SpectralVectorField) -> f64 {
    let g = v.grid();
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..g.len() {
        let k = g.kvec(idx);
        let m = v.mode(idx);
        num += k_dot(k, m).norm_sqr();
        den += g.ksq(idx) * (m[0].norm_sqr() + m[1].norm_sqr() + m[2].norm_sqr());
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Check the Biot–Savart preconditions: zero mean and divergence-free.
pub fn check_solenoidal_zero_mean(v: &SpectralVectorField) -> Result<()> {
    let mean = v.mean();
    let mean_mag = mean.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if mean_mag > MEAN_TOLERANCE * v.max_abs().max(1.0) {
        return Err(Error::NonzeroMean(mean_mag));
    }
    let rel = relative_divergence(v);
    if rel > DIVERGENCE_TOLERANCE {
        return Err(Error::NotDivergenceFree(rel));
    }
    Ok(())
}

/// Velocity from vorticity: `û = i k × ω̂ / |k|²`, `û(0) = 0`.
pub fn biot_savart(omega: &SpectralVectorField) -> Result<SpectralVectorField> {
    check_solenoidal_zero_mean(omega)?;
    Ok(biot_savart_unchecked(omega))
}

pub(crate) fn biot_savart_unchecked(omega: &SpectralVectorField) -> SpectralVectorField {
    let g = omega.grid();
    omega.map_modes(|idx, m| {
        let k = g.kvec(idx);
        let ksq = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if ksq == 0.0 {
            return [ZERO; 3];
        }
        let c = ik_cross(k, m);
        [c[0] / ksq, c[1] / ksq, c[2] / ksq]
    })
}

/// Zero every mode with some `|k_i|` outside the 2/3-rule band.
pub fn dealias(v: &SpectralVectorField) -> SpectralVectorField {
    let g = v.grid();
    v.map_modes(|idx, m| if g.retained(idx) { m } else { [ZERO; 3] })
}

pub fn dealias_scalar(f: &ScalarSpectralField) -> ScalarSpectralField {
    let g = f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, &c)| if g.retained(idx) { c } else { ZERO })
        .collect();
    ScalarSpectralField::from_coeffs(g, coeffs).expect("length matches grid")
}

/// Pseudo-spectral product of two scalar fields: truncate inputs, multiply on
/// the grid, transform back, truncate.
pub fn multiply_dealiased(
    a: &ScalarSpectralField,
    b: &ScalarSpectralField,
) -> Result<ScalarSpectralField> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch(a.grid().n(), b.grid().n()));
    }
    let pa = dealias_scalar(a).to_physical();
    let pb = dealias_scalar(b).to_physical();
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    Ok(dealias_scalar(&ScalarSpectralField::from_physical(
        a.grid(),
        &prod,
    )?))
}

/// Pseudo-spectral `a × b` with 2/3-rule truncation of inputs and output.
pub fn cross_dealiased(a: &SpectralVectorField, b: &SpectralVectorField) -> SpectralVectorField {
    debug_assert_eq!(a.grid(), b.grid());
    let g = a.grid();
    let pa = dealias(a).to_physical();
    let pb = dealias(b).to_physical();
    let mut out = [vec![0.0; g.len()], vec![0.0; g.len()], vec![0.0; g.len()]];
    for p in 0..g.len() {
        let x = [pa[0][p], pa[1][p], pa[2][p]];
        let y = [pb[0][p], pb[1][p], pb[2][p]];
        out[0][p] = x[1] * y[2] - x[2] * y[1];
        out[1][p] = x[2] * y[0] - x[0] * y[2];
        out[2][p] = x[0] * y[1] - x[1] * y[0];
    }
    dealias(&SpectralVectorField::from_physical(g, &out).expect("length matches grid"))
}

/// Advection-stretching term `(ω·∇)u − (u·∇)ω` for divergence-free `u`, `ω`,
/// evaluated as `curl(u × ω)` with dealiasing and a final Leray projection.
pub fn transport_stretching(
    u: &SpectralVectorField,
    omega: &SpectralVectorField,
) -> SpectralVectorField {
    let mut out = leray_project(&curl(&cross_dealiased(u, omega)));
    out.zero_mean();
    out
}

/// Real orthonormal pair spanning the plane perpendicular to `k` (k ≠ 0).
pub(crate) fn solenoidal_basis(k: [f64; 3]) -> [[f64; 3]; 2] {
    let norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let khat = [k[0] / norm, k[1] / norm, k[2] / norm];
    // pick the axis least aligned with k
    let mut axis = 0;
    for a in 1..3 {
        if khat[a].abs() < khat[axis].abs() {
            axis = a;
        }
    }
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let d = khat[axis];
    let mut e1 = [e[0] - d * khat[0], e[1] - d * khat[1], e[2] - d * khat[2]];
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    for x in e1.iter_mut() {
        *x /= n1;
    }
    let e2 = [
        khat[1] * e1[2] - khat[2] * e1[1],
        khat[2] * e1[0] - khat[0] * e1[2],
        khat[0] * e1[1] - khat[1] * e1[0],
    ];
    [e1, e2]
}

/// Grid helper: iterate retained wavevectors in lexicographic order.
pub(crate) fn retained_indices(g: &Grid) -> Vec<usize> {
    let cut = g.dealias_cutoff();
    let mut out = Vec::new();
    for a in -cut..=cut {
        for b in -cut..=cut {
            for c in -cut..=cut {
                out.push(g.index_of([a, b, c]));
            }
        }
    }
    out
}
