//! Named initial conditions.

use crate::spectral::{curl, l2_sq, random_solenoidal, Grid, SpectralVectorField};

/// Taylor–Green velocity `(sin x cos y cos z, −cos x sin y cos z, 0)`.
pub fn taylor_green_velocity(grid: Grid) -> SpectralVectorField {
    zero_mean(SpectralVectorField::from_fn(grid, |x, y, z| {
        [x.sin() * y.cos() * z.cos(), -x.cos() * y.sin() * z.cos(), 0.0]
    }))
}

/// Drop the roundoff left in the mean mode by the forward transform.
fn zero_mean(mut v: SpectralVectorField) -> SpectralVectorField {
    v.zero_mean();
    v
}

/// Curl of the Taylor–Green velocity.
pub fn taylor_green_vorticity(grid: Grid) -> SpectralVectorField {
    zero_mean(SpectralVectorField::from_fn(grid, |x, y, z| {
        [
            -x.cos() * y.sin() * z.sin(),
            -x.sin() * y.cos() * z.sin(),
            2.0 * x.sin() * y.sin() * z.cos(),
        ]
    }))
}

/// ABC flow with `A = B = C = 1`; a Beltrami field with `curl u = u`.
pub fn abc_velocity(grid: Grid) -> SpectralVectorField {
    zero_mean(SpectralVectorField::from_fn(grid, |x, y, z| {
        [
            z.sin() + y.cos(),
            x.sin() + z.cos(),
            y.sin() + x.cos(),
        ]
    }))
}

/// Vorticity of the ABC flow (equal to its velocity).
pub fn abc_vorticity(grid: Grid) -> SpectralVectorField {
    abc_velocity(grid)
}

/// Random smooth vorticity: curl of a random solenoidal velocity with
/// `|k_i| <= min(3, cutoff)`, scaled to the Taylor–Green kinetic energy.
pub fn random_divfree_vorticity(grid: Grid, seed: u64) -> SpectralVectorField {
    let kmax = grid.dealias_cutoff().min(3);
    let u = random_solenoidal(grid, seed, kmax);
    let target = grid.volume() / 4.0;
    let e = l2_sq(&u);
    let u = if e > 0.0 { u.scale((target / e).sqrt()) } else { u };
    curl(&u)
}
