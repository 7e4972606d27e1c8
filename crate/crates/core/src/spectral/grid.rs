use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, 2π)³` with `n` modes per axis.
///
/// Spectral storage uses FFT index order on every axis: index `i` carries the
/// wavenumber `i` for `i <= n/2` and `i - n` above, so the stored wavevectors
/// are `{-n/2+1, …, n/2}³`. Flat index is `(i1 * n + i2) * n + i3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Grid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of grid points (and of modes per component).
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Box volume `(2π)³`.
    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(3)
    }

    /// Grid spacing `2π/n`.
    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n as f64
    }

    #[inline]
    pub fn flat(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n + i2) * self.n + i3
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Signed integer wavenumber stored at axis index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Axis index holding the signed wavenumber `k` (taken modulo `n`).
    #[inline]
    pub fn axis_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Wavenumber used by differential operators. The Nyquist index has no
    /// real derivative and maps to zero.
    #[inline]
    pub fn deriv_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i) as f64
        }
    }

    /// Integer wavevector of a flat spectral index.
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let (a, b, c) = self.unflat(idx);
        [self.wavenumber(a), self.wavenumber(b), self.wavenumber(c)]
    }

    /// Derivative wavevector of a flat spectral index (Nyquist components zeroed).
    #[inline]
    pub fn kvec(&self, idx: usize) -> [f64; 3] {
        let (a, b, c) = self.unflat(idx);
        [
            self.deriv_wavenumber(a),
            self.deriv_wavenumber(b),
            self.deriv_wavenumber(c),
        ]
    }

    #[inline]
    pub fn ksq(&self, idx: usize) -> f64 {
        let k = self.kvec(idx);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    /// Flat index of the wavevector `-k`.
    #[inline]
    pub fn conj_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (a, b, c) = self.unflat(idx);
        self.flat((n - a) % n, (n - b) % n, (n - c) % n)
    }

    /// Flat index for a signed wavevector.
    pub fn index_of(&self, k: [i64; 3]) -> usize {
        self.flat(
            self.axis_index(k[0]),
            self.axis_index(k[1]),
            self.axis_index(k[2]),
        )
    }

    /// Axis index survives 2/3-rule truncation: `3|k| < n`.
    #[inline]
    pub fn axis_retained(&self, i: usize) -> bool {
        3 * self.wavenumber(i).unsigned_abs() < self.n as u64
    }

    #[inline]
    pub fn retained(&self, idx: usize) -> bool {
        let (a, b, c) = self.unflat(idx);
        self.axis_retained(a) && self.axis_retained(b) && self.axis_retained(c)
    }

    /// Largest retained wavenumber magnitude per axis.
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.n as i64) - 1) / 3
    }

    /// Physical coordinate of grid index `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}
