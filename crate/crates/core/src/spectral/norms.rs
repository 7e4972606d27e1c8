use super::field::{ScalarSpectralField, SpectralVectorField};

/// Norms of a field on the `(2π)³` box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSuite {
    /// `‖v‖²_{L²}` by Parseval.
    pub l2_sq: f64,
    /// `‖∇v‖²_{L²} = (2π)³ Σ |k|² |v̂|²`.
    pub h1_semi_sq: f64,
    /// `‖v‖_{L⁴}` of the pointwise Euclidean magnitude, grid quadrature.
    pub l4: f64,
}

pub fn l2_sq(v: &SpectralVectorField) -> f64 {
    let sum: f64 = v
        .components()
        .iter()
        .flat_map(|c| c.iter())
        .map(|c| c.norm_sqr())
        .sum();
    v.grid().volume() * sum
}

pub fn h1_semi_sq(v: &SpectralVectorField) -> f64 {
    let g = v.grid();
    let mut sum = 0.0;
    for idx in 0..g.len() {
        let ksq = g.ksq(idx);
        if ksq == 0.0 {
            continue;
        }
        let m = v.mode(idx);
        sum += ksq * (m[0].norm_sqr() + m[1].norm_sqr() + m[2].norm_sqr());
    }
    g.volume() * sum
}

/// `(v, w)_{L²}` for real fields.
pub fn inner(v: &SpectralVectorField, w: &SpectralVectorField) -> f64 {
    let mut sum = 0.0;
    for comp in 0..3 {
        for (a, b) in v.component(comp).iter().zip(w.component(comp)) {
            sum += (a * b.conj()).re;
        }
    }
    v.grid().volume() * sum
}

fn l4_from_samples(values: &[&[f64]], volume: f64) -> f64 {
    let npts = values[0].len();
    let mut sum = 0.0;
    for p in 0..npts {
        let mag_sq: f64 = values.iter().map(|c| c[p] * c[p]).sum();
        sum += mag_sq * mag_sq;
    }
    (volume * sum / npts as f64).powf(0.25)
}

pub fn norm_suite(v: &SpectralVectorField) -> NormSuite {
    let phys = v.to_physical();
    NormSuite {
        l2_sq: l2_sq(v),
        h1_semi_sq: h1_semi_sq(v),
        l4: l4_from_samples(&[&phys[0], &phys[1], &phys[2]], v.grid().volume()),
    }
}

pub fn scalar_norm_suite(f: &ScalarSpectralField) -> NormSuite {
    let g = f.grid();
    let l2: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let h1: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| g.ksq(idx) * c.norm_sqr())
        .sum();
    let phys = f.to_physical();
    NormSuite {
        l2_sq: g.volume() * l2,
        h1_semi_sq: g.volume() * h1,
        l4: l4_from_samples(&[&phys], g.volume()),
    }
}

/// Physical-space trapezoid (grid) quadrature of `|v|²`.
pub fn l2_sq_quadrature(v: &SpectralVectorField) -> f64 {
    let phys = v.to_physical();
    let g = v.grid();
    let sum: f64 = phys.iter().flat_map(|c| c.iter()).map(|x| x * x).sum();
    g.volume() * sum / g.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_solenoidal, Grid};
    use std::f64::consts::PI;

    #[test]
    fn sine_norms() {
        let g = Grid::new(8).unwrap();
        let v = SpectralVectorField::from_fn(g, |x, _, _| [x.sin(), 0.0, 0.0]);
        let s = norm_suite(&v);
        let half_vol = (2.0 * PI).powi(3) / 2.0;
        assert!((s.l2_sq - half_vol).abs() < 1e-12);
        assert!((s.l2_sq - 124.0251).abs() < 1e-4);
        assert!((s.h1_semi_sq - half_vol).abs() < 1e-12);
        let l4_expected = ((2.0 * PI).powi(3) * 3.0 / 8.0).powf(0.25);
        assert!((s.l4 - l4_expected).abs() < 1e-12);
    }

    #[test]
    fn constant_norms() {
        let g = Grid::new(8).unwrap();
        let v = SpectralVectorField::from_fn(g, |_, _, _| [1.0, 0.0, 0.0]);
        let s = norm_suite(&v);
        assert!((s.l4 - (2.0 * PI).powf(0.75)).abs() < 1e-12);
        assert_eq!(s.h1_semi_sq, 0.0);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = Grid::new(8).unwrap();
        let v = random_solenoidal(g, 5, 4);
        let a = l2_sq(&v);
        let b = l2_sq_quadrature(&v);
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn scalar_suite_matches_vector_component() {
        let g = Grid::new(8).unwrap();
        let v = SpectralVectorField::from_fn(g, |x, y, _| [x.sin() * y.cos(), 0.0, 0.0]);
        let f = ScalarSpectralField::from_coeffs(g, v.component(0).to_vec()).unwrap();
        let a = norm_suite(&v);
        let b = scalar_norm_suite(&f);
        assert!((a.l2_sq - b.l2_sq).abs() < 1e-12);
        assert!((a.h1_semi_sq - b.h1_semi_sq).abs() < 1e-12);
        assert!((a.l4 - b.l4).abs() < 1e-12);
    }
}
