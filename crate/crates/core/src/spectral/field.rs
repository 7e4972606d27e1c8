use num_complex::Complex64;

use super::fft::{Direction, Fft3};
use super::grid::Grid;
use crate::error::{Error, Result};

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Complex Fourier coefficients of a real scalar field.
///
/// Coefficients are normalized so that `f(x) = Σ_k c_k e^{i k·x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

/// Three-component spectral vector field (velocity or vorticity).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField {
    grid: Grid,
    coeffs: [Vec<Complex64>; 3],
}

/// Real vector field sampled on the grid, component-major.
pub type PhysicalVector = [Vec<f64>; 3];

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            actual: len,
        });
    }
    Ok(())
}

/// Forward transform of real samples, normalized and made exactly Hermitian.
fn forward_real(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Fft3::cached(grid.n()).process(&mut data, Direction::Forward);
    let scale = 1.0 / grid.len() as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
    symmetrize(grid, &mut data);
    data
}

fn inverse_real(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    Fft3::cached(grid.n()).process(&mut data, Direction::Inverse);
    data.into_iter().map(|c| c.re).collect()
}

/// Replace `c(k)` by `(c(k) + conj(c(-k)))/2`, which is bit-exactly Hermitian.
pub(crate) fn symmetrize(grid: &Grid, data: &mut [Complex64]) {
    for i in 0..data.len() {
        let j = grid.conj_index(i);
        if i < j {
            let (a, b) = (data[i], data[j]);
            data[i] = (a + b.conj()) * 0.5;
            data[j] = (b + a.conj()) * 0.5;
        } else if i == j {
            data[i] = Complex64::new(data[i].re, 0.0);
        }
    }
}

fn hermitian_defect(grid: &Grid, data: &[Complex64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, c) in data.iter().enumerate() {
        let j = grid.conj_index(i);
        worst = worst.max((c - data[j].conj()).norm());
    }
    worst
}

impl ScalarSpectralField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarSpectralField {
            grid,
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, coeffs.len())?;
        Ok(ScalarSpectralField { grid, coeffs })
    }

    pub fn from_physical(grid: Grid, values: &[f64]) -> Result<Self> {
        check_len(&grid, values.len())?;
        Ok(ScalarSpectralField {
            grid,
            coeffs: forward_real(&grid, values),
        })
    }

    pub fn to_physical(&self) -> Vec<f64> {
        inverse_real(&self.grid, &self.coeffs)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.grid, &self.coeffs)
    }
}

impl SpectralVectorField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralVectorField {
            grid,
            coeffs: [
                vec![ZERO; grid.len()],
                vec![ZERO; grid.len()],
                vec![ZERO; grid.len()],
            ],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &coeffs {
            check_len(&grid, c.len())?;
        }
        Ok(SpectralVectorField { grid, coeffs })
    }

    pub fn from_physical(grid: Grid, values: &PhysicalVector) -> Result<Self> {
        for v in values {
            check_len(&grid, v.len())?;
        }
        Ok(SpectralVectorField {
            grid,
            coeffs: [
                forward_real(&grid, &values[0]),
                forward_real(&grid, &values[1]),
                forward_real(&grid, &values[2]),
            ],
        })
    }

    /// Sample an analytic vector function on the grid and transform it.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        let mut values: PhysicalVector = [
            vec![0.0; grid.len()],
            vec![0.0; grid.len()],
            vec![0.0; grid.len()],
        ];
        let n = grid.n();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let idx = grid.flat(a, b, c);
                    let v = f(grid.coord(a), grid.coord(b), grid.coord(c));
                    for comp in 0..3 {
                        values[comp][idx] = v[comp];
                    }
                }
            }
        }
        Self::from_physical(grid, &values).expect("shape matches by construction")
    }

    pub fn to_physical(&self) -> PhysicalVector {
        [
            inverse_real(&self.grid, &self.coeffs[0]),
            inverse_real(&self.grid, &self.coeffs[1]),
            inverse_real(&self.grid, &self.coeffs[2]),
        ]
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.coeffs[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.coeffs[i]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.coeffs
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.coeffs
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> [Complex64; 3] {
        [self.coeffs[0][idx], self.coeffs[1][idx], self.coeffs[2][idx]]
    }

    #[inline]
    pub fn set_mode(&mut self, idx: usize, v: [Complex64; 3]) {
        for (comp, value) in v.into_iter().enumerate() {
            self.coeffs[comp][idx] = value;
        }
    }

    /// Build a field by applying `f(idx, mode)` to every mode.
    pub fn map_modes(&self, f: impl Fn(usize, [Complex64; 3]) -> [Complex64; 3]) -> Self {
        let mut out = SpectralVectorField::zeros(self.grid);
        for idx in 0..self.grid.len() {
            out.set_mode(idx, f(idx, self.mode(idx)));
        }
        out
    }

    pub fn check_same_grid(&self, other: &SpectralVectorField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.grid.n(), other.grid.n()));
        }
        Ok(())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &SpectralVectorField) -> SpectralVectorField {
        debug_assert_eq!(self.grid, other.grid);
        let mut out = self.clone();
        for comp in 0..3 {
            for (o, x) in out.coeffs[comp].iter_mut().zip(&other.coeffs[comp]) {
                *o += x * alpha;
            }
        }
        out
    }

    pub fn sub(&self, other: &SpectralVectorField) -> SpectralVectorField {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, alpha: f64) -> SpectralVectorField {
        let mut out = self.clone();
        for comp in out.coeffs.iter_mut() {
            for c in comp.iter_mut() {
                *c *= alpha;
            }
        }
        out
    }

    /// Mean (k = 0) mode.
    pub fn mean(&self) -> [Complex64; 3] {
        self.mode(0)
    }

    pub fn zero_mean(&mut self) {
        self.set_mode(0, [ZERO; 3]);
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest `|c(k) - conj(c(-k))|` over all components and modes.
    pub fn hermitian_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| hermitian_defect(&self.grid, c))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}
