//! Periodic-box spectral representation of vector fields.

mod fft;
mod field;
mod grid;
mod norms;
mod ops;
mod random;

pub use fft::{Direction, Fft3};
pub use field::{PhysicalVector, ScalarSpectralField, SpectralVectorField};
pub use grid::Grid;
pub use norms::{h1_semi_sq, inner, l2_sq, l2_sq_quadrature, norm_suite, scalar_norm_suite, NormSuite};
pub use ops::{
    biot_savart, check_solenoidal_zero_mean, cross_dealiased, curl, dealias, dealias_scalar,
    divergence, gradient, leray_project, multiply_dealiased, relative_divergence,
    transport_stretching, DIVERGENCE_TOLERANCE, MEAN_TOLERANCE,
};
pub use random::random_solenoidal;

#[cfg(test)]
pub(crate) use field::ZERO;
pub(crate) use ops::{retained_indices, solenoidal_basis};
