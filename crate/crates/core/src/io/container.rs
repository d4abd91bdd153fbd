use std::path::Path;

use super::{atomic_write, Reader};
use crate::error::{Result, SinoError};
use crate::spectral::{GridSpec, RealField};

pub const FIELD_MAGIC: &[u8; 8] = b"SINODATA";
pub const FIELD_VERSION: u32 = 1;

/// Snapshots of one grid at a fixed cadence, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldContainer {
    pub grid: GridSpec,
    pub channels: usize,
    /// Seconds between snapshots.
    pub cadence: f64,
    pub snapshots: Vec<RealField>,
}

impl FieldContainer {
    /// Little-endian header, payload snapshot-major then channel-major then
    /// row-major, and the CRC32 of the payload.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let d = self.grid.dim();
        let per = self.channels * self.grid.size();
        let mut out = Vec::with_capacity(41 + 16 * d + 8 * per * self.snapshots.len());
        out.extend_from_slice(FIELD_MAGIC);
        out.extend_from_slice(&FIELD_VERSION.to_le_bytes());
        out.push(d as u8);
        out.extend_from_slice(&(self.channels as u32).to_le_bytes());
        for &n in self.grid.points() {
            out.extend_from_slice(&(n as u64).to_le_bytes());
        }
        for &l in self.grid.length() {
            out.extend_from_slice(&l.to_le_bytes());
        }
        out.extend_from_slice(&(self.snapshots.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.cadence.to_le_bytes());
        let start = out.len();
        for s in &self.snapshots {
            if s.grid() != &self.grid || s.channels() != self.channels {
                return Err(SinoError::ShapeMismatch("snapshot does not match the container grid".into()));
            }
            for v in s.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let crc = crc32fast::hash(&out[start..]);
        out.extend_from_slice(&crc.to_le_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: String| SinoError::format(path, reason);
        let mut r = Reader::new(bytes, path);
        if r.take(8)? != FIELD_MAGIC {
            return Err(bad("not a field container (bad magic)".into()));
        }
        let version = r.u32()?;
        if version != FIELD_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let d = r.u8()? as usize;
        let channels = r.u32()? as usize;
        let points = (0..d).map(|_| r.u64().map(|n| n as usize)).collect::<Result<Vec<_>>>()?;
        let length = (0..d).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let count = r.u64()? as usize;
        let cadence = r.f64()?;
        let grid = GridSpec::new(points, length).map_err(|e| bad(e.to_string()))?;
        let per = channels.checked_mul(grid.size()).ok_or_else(|| bad("header sizes overflow".into()))?;
        let payload_len =
            per.checked_mul(count).and_then(|n| n.checked_mul(8)).ok_or_else(|| bad("header sizes overflow".into()))?;
        if r.remaining() != payload_len + 4 {
            return Err(bad(format!(
                "payload is {} bytes, header implies {}",
                r.remaining().saturating_sub(4),
                payload_len
            )));
        }
        let payload = r.take(payload_len)?;
        let stored = r.u32()?;
        let crc = crc32fast::hash(payload);
        if crc != stored {
            return Err(bad(format!("CRC mismatch: stored {stored:08x}, computed {crc:08x}")));
        }
        let values: Vec<f64> =
            payload.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk"))).collect();
        let snapshots = values
            .chunks(per.max(1))
            .take(count)
            .map(|c| RealField::new(grid.clone(), channels, c.to_vec()))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| bad(e.to_string()))?;
        Ok(FieldContainer { grid, channels, cadence, snapshots })
    }

    /// Writes atomically; returns [`file_crc`] of the bytes written.
    pub fn write(&self, path: &Path) -> Result<u32> {
        let bytes = self.to_bytes()?;
        atomic_write(path, &bytes)?;
        Ok(file_crc(&bytes))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| SinoError::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }
}

/// CRC32 of a container file without its trailing CRC. (Including the
/// trailer would give the same value for every file sharing a header: a
/// message followed by its own CRC always hashes to a constant residue.)
pub fn file_crc(bytes: &[u8]) -> u32 {
    crc32fast::hash(&bytes[..bytes.len().saturating_sub(4)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FieldContainer {
        let grid = GridSpec::new(vec![4, 6], vec![1.0, 2.5]).unwrap();
        let snapshots = (0..3)
            .map(|k| RealField::from_fn(&grid, 2, |c, x| (k as f64 + 1.0) * x[0].sin() - c as f64 * x[1] / 3.0))
            .collect();
        FieldContainer { grid, channels: 2, cadence: 0.005, snapshots }
    }

    #[test]
    fn header_layout() {
        let b = sample().to_bytes().unwrap();
        assert_eq!(&b[..8], b"SINODATA");
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 1);
        assert_eq!(b[12], 2);
        assert_eq!(u32::from_le_bytes(b[13..17].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(b[17..25].try_into().unwrap()), 4);
        assert_eq!(f64::from_le_bytes(b[41..49].try_into().unwrap()), 2.5);
        assert_eq!(u64::from_le_bytes(b[49..57].try_into().unwrap()), 3);
        assert_eq!(b.len(), 65 + 3 * 2 * 24 * 8 + 4);
    }

    #[test]
    fn every_single_byte_corruption_is_detected() {
        let c = sample();
        let b = c.to_bytes().unwrap();
        let p = Path::new("mem");
        assert_eq!(FieldContainer::from_bytes(&b, p).unwrap(), c);
        for i in (0..b.len()).step_by(7) {
            let mut x = b.clone();
            x[i] ^= 0x10;
            assert!(FieldContainer::from_bytes(&x, p).map_or(true, |d| d != c), "byte {i}");
        }
        assert!(FieldContainer::from_bytes(&b[..b.len() - 1], p).is_err());
    }
}
