//! `VSLB` binary snapshots of spectral vector fields.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content                  |
//! |--------|------|--------------------------|
//! | 0      | 4    | magic `VSLB`             |
//! | 4      | 4    | format version (u32) = 1 |
//! | 8      | 4    | grid n (u32)             |
//! | 12     | 4    | component count (u32) = 3|
//! | 16     | 8    | time (f64)               |
//! | 24     | …    | payload                  |
//!
//! The payload holds, per component, `n³` pairs `(re, im)` of f64 in
//! lexicographic order of the signed wavevector `(k1, k2, k3)`, each axis
//! running from `−n/2+1` to `n/2`.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::Snapshot;
use crate::spectral::{Grid, SpectralVectorField};

pub const MAGIC: [u8; 4] = *b"VSLB";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 24;
/// Extension used for snapshot files inside a run directory.
pub const SNAPSHOT_EXT: &str = "vslb";

/// Decoded snapshot file. Coefficients stay in storage (FFT index) order,
/// so grids too small for a [`Grid`] (such as `n = 2`) still round trip.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub n: u32,
    pub time: f64,
    pub coeffs: [Vec<Complex64>; 3],
}

/// Storage index for each position of the file order along one axis.
fn axis_order(n: usize) -> Vec<usize> {
    let half = (n / 2) as i64;
    (-half + 1..=half).map(|k| k.rem_euclid(n as i64) as usize).collect()
}

fn file_order(n: usize) -> Vec<usize> {
    let ax = axis_order(n);
    let mut out = Vec::with_capacity(n * n * n);
    for &a in &ax {
        for &b in &ax {
            for &c in &ax {
                out.push((a * n + b) * n + c);
            }
        }
    }
    out
}

fn snapshot_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Snapshot {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

impl FieldSnapshot {
    pub fn from_field(field: &SpectralVectorField, time: f64) -> Self {
        FieldSnapshot {
            n: field.grid().n() as u32,
            time,
            coeffs: field.components().clone(),
        }
    }

    pub fn into_field(self) -> Result<SpectralVectorField> {
        let grid = Grid::new(self.n as usize)?;
        SpectralVectorField::from_coeffs(grid, self.coeffs)
    }

    pub fn into_snapshot(self) -> Result<Snapshot> {
        let t = self.time;
        Ok(Snapshot { t, omega: self.into_field()? })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.n as usize;
        let mut out = Vec::with_capacity(HEADER_LEN + 3 * n * n * n * 16);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&3u32.to_le_bytes());
        out.extend_from_slice(&self.time.to_le_bytes());
        let order = file_order(n);
        for comp in &self.coeffs {
            for &idx in &order {
                out.extend_from_slice(&comp[idx].re.to_le_bytes());
                out.extend_from_slice(&comp[idx].im.to_le_bytes());
            }
        }
        out
    }

    /// Decode and validate; `path` only labels errors.
    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(snapshot_err(path, format!("truncated header: {} bytes", bytes.len())));
        }
        if bytes[0..4] != MAGIC {
            return Err(snapshot_err(path, format!("bad magic {:?}", String::from_utf8_lossy(&bytes[0..4]))));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let version = u32_at(4);
        if version != FORMAT_VERSION {
            return Err(snapshot_err(path, format!("version mismatch: file {version}, expected {FORMAT_VERSION}")));
        }
        let n = u32_at(8);
        if n == 0 || n % 2 != 0 {
            return Err(snapshot_err(path, format!("invalid grid n = {n}")));
        }
        let comps = u32_at(12);
        if comps != 3 {
            return Err(snapshot_err(path, format!("component count {comps}, expected 3")));
        }
        let time = f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
        let nn = n as usize;
        let modes = nn * nn * nn;
        let expected = HEADER_LEN + 3 * modes * 16;
        if bytes.len() != expected {
            return Err(snapshot_err(
                path,
                format!("payload length {} bytes, expected {}", bytes.len() - HEADER_LEN, expected - HEADER_LEN),
            ));
        }
        let order = file_order(nn);
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let mut coeffs: [Vec<Complex64>; 3] = Default::default();
        let mut offset = HEADER_LEN;
        for comp in coeffs.iter_mut() {
            comp.resize(modes, Complex64::new(0.0, 0.0));
            for &idx in &order {
                comp[idx] = Complex64::new(f64_at(offset), f64_at(offset + 8));
                offset += 16;
            }
        }
        let snap = FieldSnapshot { n, time, coeffs };
        snap.validate(path)?;
        Ok(snap)
    }

    fn validate(&self, path: &Path) -> Result<()> {
        let n = self.n as usize;
        let mut scale: f64 = 0.0;
        for comp in &self.coeffs {
            for c in comp {
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(snapshot_err(path, "non-finite coefficient"));
                }
                scale = scale.max(c.norm());
            }
        }
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for (ci, comp) in self.coeffs.iter().enumerate() {
            for idx in 0..comp.len() {
                let (a, b, c) = (idx / (n * n), (idx / n) % n, idx % n);
                let j = (((n - a) % n) * n + (n - b) % n) * n + (n - c) % n;
                let defect = (comp[idx] - comp[j].conj()).norm();
                if defect > tol {
                    return Err(snapshot_err(
                        path,
                        format!("Hermitian symmetry violated in component {ci} (defect {defect:.3e})"),
                    ));
                }
            }
        }
        Ok(())
    }
}

pub fn persist_field(field: &SpectralVectorField, time: f64, path: &Path) -> Result<()> {
    write_snapshot(&FieldSnapshot::from_field(field, time), path)
}

pub fn write_snapshot(snap: &FieldSnapshot, path: &Path) -> Result<()> {
    std::fs::write(path, snap.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_field(path: &Path) -> Result<FieldSnapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    FieldSnapshot::from_bytes(&bytes, path)
}

/// Write snapshots as `omega_000000.vslb`, `omega_000001.vslb`, … in `dir`.
pub fn write_trajectory(dir: &Path, snapshots: &[Snapshot]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    snapshots
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = dir.join(format!("omega_{i:06}.{SNAPSHOT_EXT}"));
            persist_field(&s.omega, s.t, &p)?;
            Ok(p)
        })
        .collect()
}

/// Load every `.vslb` file in `dir`, ordered by time.
pub fn read_trajectory(dir: &Path) -> Result<Vec<Snapshot>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let p = entry.map_err(|e| Error::io(dir, e))?.path();
        if p.extension().is_some_and(|e| e == SNAPSHOT_EXT) {
            paths.push(p);
        }
    }
    paths.sort();
    let mut snaps = paths
        .iter()
        .map(|p| load_field(p).and_then(FieldSnapshot::into_snapshot))
        .collect::<Result<Vec<_>>>()?;
    snaps.sort_by(|a, b| a.t.total_cmp(&b.t));
    if snaps.is_empty() {
        return Err(snapshot_err(dir, "no snapshot files found"));
    }
    Ok(snaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::random_divfree_vorticity;

    #[test]
    fn golden_two_cubed_zero_bytes() {
        let snap = FieldSnapshot {
            n: 2,
            time: 0.5,
            coeffs: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); 8]),
        };
        let mut golden = Vec::new();
        golden.extend_from_slice(b"VSLB");
        golden.extend_from_slice(&[1, 0, 0, 0]);
        golden.extend_from_slice(&[2, 0, 0, 0]);
        golden.extend_from_slice(&[3, 0, 0, 0]);
        golden.extend_from_slice(&[0, 0, 0, 0, 0, 0, 0xe0, 0x3f]);
        golden.extend(std::iter::repeat(0u8).take(3 * 8 * 16));
        let bytes = snap.to_bytes();
        assert_eq!(bytes, golden);
        assert_eq!(FieldSnapshot::from_bytes(&bytes, Path::new("g")).unwrap(), snap);
    }

    #[test]
    fn file_order_is_signed_lexicographic() {
        assert_eq!(axis_order(4), vec![3, 0, 1, 2]);
        let order = file_order(4);
        assert_eq!(order[0], (3 * 4 + 3) * 4 + 3);
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(sorted, (0..64).collect::<Vec<_>>());
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid::new(8).unwrap();
        let w = random_divfree_vorticity(g, 7);
        let snap = FieldSnapshot::from_field(&w, 0.125);
        let back = FieldSnapshot::from_bytes(&snap.to_bytes(), Path::new("x")).unwrap();
        assert_eq!(back.time.to_bits(), 0.125f64.to_bits());
        for (a, b) in back.coeffs.iter().zip(w.components()) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!((x.re.to_bits(), x.im.to_bits()), (y.re.to_bits(), y.im.to_bits()));
            }
        }
        assert_eq!(back.into_field().unwrap(), w);
    }

    #[test]
    fn corrupt_files_rejected() {
        let g = Grid::new(4).unwrap();
        let w = random_divfree_vorticity(g, 3);
        let good = FieldSnapshot::from_field(&w, 0.0).to_bytes();
        let msg = |b: &[u8]| match FieldSnapshot::from_bytes(b, Path::new("f")) {
            Err(Error::Snapshot { message, .. }) => message,
            other => panic!("{other:?}"),
        };
        let mut bad = good.clone();
        bad[0..4].copy_from_slice(b"XXXX");
        assert!(msg(&bad).contains("magic"));
        let mut bad = good.clone();
        bad[4] = 2;
        assert!(msg(&bad).contains("version"));
        assert!(msg(&good[..good.len() - 1]).contains("payload"));
        assert!(msg(&good[..10]).contains("header"));
        // perturb one coefficient without its conjugate partner
        let mut bad = good.clone();
        let o = HEADER_LEN + 16 * 22 + 8;
        let v = f64::from_le_bytes(bad[o..o + 8].try_into().unwrap()) + 1.0;
        bad[o..o + 8].copy_from_slice(&v.to_le_bytes());
        assert!(msg(&bad).contains("Hermitian"));
    }
}
