//! Field snapshots: a raw little-endian f64 blob plus a JSON sidecar.
//!
//! Physical snapshots store one value per lattice point in row-major order
//! over `(x_1, .., x_n, v_1, .., v_n)` with `x_j = -L/2 + j L/N`.
//! Spectral snapshots store interleaved `(re, im)` pairs in the same row-major
//! layout with FFT ordering along each axis (index `j` holds frequency `j`
//! for `j < N/2` and `j - N` otherwise).

use std::fs;
use std::path::{Path, PathBuf};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{Field, SpectralField};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotKind {
    Physical,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub n: usize,
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(rename = "Nv")]
    pub nv: usize,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Lv")]
    pub lv: f64,
    pub kind: SnapshotKind,
}

impl SnapshotHeader {
    fn new(grid: &TorusGrid, kind: SnapshotKind) -> Self {
        Self {
            n: grid.n,
            nx: grid.nx,
            nv: grid.nv,
            lx: grid.lx,
            lv: grid.lv,
            kind,
        }
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.n, self.nx, self.nv, self.lx, self.lv)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Physical(Field),
    Spectral(SpectralField),
}

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("bin"), stem.with_extension("json"))
}

fn encode(values: impl Iterator<Item = f64>) -> Vec<u8> {
    values.flat_map(|v| v.to_le_bytes()).collect()
}

fn decode(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::InvalidParameter(format!(
            "snapshot blob length {} is not a multiple of 8",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

/// Writes `<stem>.bin` and `<stem>.json`.
pub fn write_field(stem: &Path, f: &Field) -> Result<()> {
    let (bin, json) = paths(stem);
    fs::write(bin, encode(f.values().iter().copied()))?;
    let header = SnapshotHeader::new(f.grid(), SnapshotKind::Physical);
    fs::write(json, serde_json::to_string_pretty(&header)?)?;
    Ok(())
}

pub fn write_spectral(stem: &Path, s: &SpectralField) -> Result<()> {
    let (bin, json) = paths(stem);
    fs::write(bin, encode(s.coeffs().iter().flat_map(|c| [c.re, c.im])))?;
    let header = SnapshotHeader::new(s.grid(), SnapshotKind::Spectral);
    fs::write(json, serde_json::to_string_pretty(&header)?)?;
    Ok(())
}

pub fn read_snapshot(stem: &Path) -> Result<Snapshot> {
    let (bin, json) = paths(stem);
    let header: SnapshotHeader = serde_json::from_str(&fs::read_to_string(json)?)?;
    let grid = header.grid()?;
    let values = decode(&fs::read(bin)?)?;
    match header.kind {
        SnapshotKind::Physical => Ok(Snapshot::Physical(Field::new(grid, values)?)),
        SnapshotKind::Spectral => {
            let coeffs = values
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            Ok(Snapshot::Spectral(SpectralField::new(grid, coeffs)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::forward;

    #[test]
    fn header_uses_documented_keys() {
        let g = TorusGrid::new(1, 4, 8, 1.5, 2.5).unwrap();
        let h = serde_json::to_value(SnapshotHeader::new(&g, SnapshotKind::Spectral)).unwrap();
        assert_eq!(h["Nx"], 4);
        assert_eq!(h["Nv"], 8);
        assert_eq!(h["Lv"], 2.5);
        assert_eq!(h["kind"], "spectral");
    }

    #[test]
    fn blob_is_little_endian_row_major() {
        let dir = tempdir();
        let g = TorusGrid::new(1, 4, 4, 1.0, 1.0).unwrap();
        let f = Field::new(g, (0..16).map(|i| i as f64).collect()).unwrap();
        let stem = dir.join("f");
        write_field(&stem, &f).unwrap();
        let bytes = fs::read(stem.with_extension("bin")).unwrap();
        assert_eq!(bytes.len(), 128);
        assert_eq!(f64::from_le_bytes(bytes[8..16].try_into().unwrap()), 1.0);
        assert_eq!(read_snapshot(&stem).unwrap(), Snapshot::Physical(f.clone()));

        let s = forward(&f).unwrap();
        write_spectral(&stem, &s).unwrap();
        assert_eq!(read_snapshot(&stem).unwrap(), Snapshot::Spectral(s));
    }

    fn tempdir() -> PathBuf {
        let d = std::env::temp_dir().join(format!("kinspec-snap-{}", std::process::id()));
        fs::create_dir_all(&d).unwrap();
        d
    }
}
