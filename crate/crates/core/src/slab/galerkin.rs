//! Coefficient bound of the successive approximation in a divergence-free
//! Fourier basis.
//!
//! Each retained wavevector `k ≠ 0` carries two real unit vectors `e_a(k)`
//! orthogonal to `k`; a coordinate is `g_{k,a} = e_a(k)·ω̂(k)`. In these
//! coordinates the slab system reads `g' + α g + β ḡ = 0` with `α` the
//! diagonal `ν|k|²` and `β` the averaged advection-stretching operator
//! `ω̄ ↦ P[(ū·∇)ω̄ − (ω̄·∇)ū]`, whose entries follow from the exact
//! convolution `[curl(ū × ω̄)]^(k) = i k × Σ_{m+l=k} û(m) × ω̄̂(l)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{retained_indices, solenoidal_basis, SpectralVectorField};

/// Largest grid the dense evaluation accepts.
pub const MAX_DIAGNOSTIC_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaStar {
    /// `max_row Σ(|α|+|β|) / max_row Σ(|α|+2|β|)`.
    pub value: f64,
    /// `max_row Σ(|α|+|β|)`; its inverse is the admissible slab length.
    pub numerator: f64,
    pub denominator: f64,
    pub max_beta_row: f64,
    /// Number of basis coordinates (rows).
    pub dimension: usize,
}

impl DeltaStar {
    /// Slab length `1 / max_row Σ(|α|+|β|)` under which the bound applies.
    pub fn admissible_dt(&self) -> f64 {
        1.0 / self.numerator
    }

    /// Whether any averaged coupling is present; without it the ratio is 1.
    pub fn coupled(&self) -> bool {
        self.max_beta_row > 0.0
    }
}

fn dot_c(a: [f64; 3], v: [Complex64; 3]) -> Complex64 {
    v[0] * a[0] + v[1] * a[1] + v[2] * a[2]
}

fn cross_c(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Evaluate the printed contraction ratio for averaged velocity `u_bar`.
///
/// `u_bar` is assumed dealiased (as every slab average is), so the
/// pseudo-spectral product on retained modes equals the exact convolution.
pub fn delta_star(u_bar: &SpectralVectorField, nu: f64) -> Result<DeltaStar> {
    let g = u_bar.grid();
    if g.n() > MAX_DIAGNOSTIC_N {
        return Err(Error::param(
            "n",
            format!("coefficient diagnostic limited to n <= {MAX_DIAGNOSTIC_N}, got {}", g.n()),
        ));
    }
    let half = (g.n() / 2) as i64;
    let modes: Vec<usize> = retained_indices(&g)
        .into_iter()
        .filter(|&idx| g.ksq(idx) > 0.0)
        .collect();
    let bases: Vec<[[f64; 3]; 2]> = modes.iter().map(|&idx| solenoidal_basis(g.kvec(idx))).collect();
    let one = Complex64::new(1.0, 0.0);

    let mut numerator: f64 = 0.0;
    let mut denominator: f64 = 0.0;
    let mut max_beta_row: f64 = 0.0;
    for (row, &kidx) in modes.iter().enumerate() {
        let kw = g.wavevector(kidx);
        let kv = g.kvec(kidx);
        let ik = kv.map(|x| Complex64::new(0.0, x));
        let alpha = nu * g.ksq(kidx);
        let mut beta = [0.0f64; 2];
        for (col, &lidx) in modes.iter().enumerate() {
            let lw = g.wavevector(lidx);
            let m = [kw[0] - lw[0], kw[1] - lw[1], kw[2] - lw[2]];
            if m.iter().any(|&c| c <= -half || c > half) {
                continue;
            }
            let um = u_bar.mode(g.index_of(m));
            if um.iter().all(|c| c.norm_sqr() == 0.0) {
                continue;
            }
            for eb in &bases[col] {
                let e = eb.map(|x| one * x);
                let v = cross_c(ik, cross_c(um, e));
                for (a, ea) in bases[row].iter().enumerate() {
                    beta[a] += dot_c(*ea, v).norm();
                }
            }
        }
        for b in beta {
            numerator = numerator.max(alpha + b);
            denominator = denominator.max(alpha + 2.0 * b);
            max_beta_row = max_beta_row.max(b);
        }
    }
    if denominator == 0.0 {
        return Err(Error::Estimate(
            "coefficient rows all vanish; the ratio is undefined".into(),
        ));
    }
    Ok(DeltaStar {
        value: numerator / denominator,
        numerator,
        denominator,
        max_beta_row,
        dimension: 2 * modes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::taylor_green_velocity;
    use crate::spectral::{leray_project, transport_stretching, Grid};

    #[test]
    fn uncoupled_ratio_is_one() {
        let g = Grid::new(8).unwrap();
        let d = delta_star(&SpectralVectorField::zeros(g), 1.0).unwrap();
        assert!(!d.coupled());
        assert_eq!(d.value, 1.0);
        // retained k ≠ 0 on 8³: 5³ − 1 wavevectors, two coordinates each
        assert_eq!(d.dimension, 248);
        assert_eq!(d.numerator, 12.0);
    }

    #[test]
    fn coupled_ratio_lies_in_unit_interval() {
        let g = Grid::new(8).unwrap();
        let d = delta_star(&taylor_green_velocity(g), 1.0).unwrap();
        assert!(d.coupled());
        assert!(d.value > 0.5 && d.value < 1.0, "{d:?}");
    }

    #[test]
    fn rejects_large_grids() {
        let g = Grid::new(16).unwrap();
        assert!(delta_star(&SpectralVectorField::zeros(g), 1.0).is_err());
    }

    /// The matrix entries reproduce the pseudo-spectral operator on a basis
    /// vector.
    #[test]
    fn entries_match_pseudo_spectral_operator() {
        let g = Grid::new(8).unwrap();
        let u = taylor_green_velocity(g);
        let l = g.index_of([1, 1, 0]);
        let e = solenoidal_basis(g.kvec(l))[0];
        // real field with ω̂(±l) = e, as a Hermitian pair
        let mut w = SpectralVectorField::zeros(g);
        w.set_mode(l, e.map(|x| Complex64::new(x, 0.0)));
        w.set_mode(g.conj_index(l), e.map(|x| Complex64::new(x, 0.0)));
        let w = leray_project(&w);
        let op = transport_stretching(&u, &w);
        let k = g.index_of([2, 1, 1]);
        let m = [1, 0, 1];
        let um = u.mode(g.index_of(m));
        let ik = g.kvec(k).map(|x| Complex64::new(0.0, x));
        let direct = cross_c(ik, cross_c(um, e.map(|x| Complex64::new(x, 0.0))));
        // only l contributes to k = (2,1,1) from the pair ±l with |m_i| <= 1
        let got = op.mode(k);
        for c in 0..3 {
            assert!((got[c] - direct[c]).norm() < 1e-14, "{c}: {:?} vs {:?}", got[c], direct[c]);
        }
    }
}
