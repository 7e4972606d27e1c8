use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::field::{SpectralVectorField, ZERO};
use super::grid::Grid;
use super::ops::leray_project;

/// Random real divergence-free zero-mean field.
///
/// Grid values are drawn uniformly from `[-1, 1)` by a SplitMix64 stream
/// seeded with `seed` (component-major, flat grid order), transformed,
/// truncated to `|k_i| <= kmax`, and Leray-projected. Modes with no
/// derivative wavevector (mean and pure-Nyquist corners) are zeroed.
pub fn random_solenoidal(grid: Grid, seed: u64, kmax: i64) -> SpectralVectorField {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let values = [(); 3].map(|_| {
        (0..grid.len())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect::<Vec<f64>>()
    });
    let raw = SpectralVectorField::from_physical(grid, &values).expect("length matches grid");
    let truncated = raw.map_modes(|idx, m| {
        let k = grid.wavevector(idx);
        if k.iter().any(|x| x.abs() > kmax) || grid.ksq(idx) == 0.0 {
            [ZERO; 3]
        } else {
            m
        }
    });
    leray_project(&truncated)
}
