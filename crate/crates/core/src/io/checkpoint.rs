use std::path::Path;

use super::{atomic_write, Reader};
use crate::error::{Result, SinoError};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"SINOCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

/// Configuration echo plus named tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointContainer {
    /// Canonical (key-sorted) TOML.
    pub echo: String,
    pub tensors: Vec<NamedTensor>,
}

impl CheckpointContainer {
    pub fn tensor(&self, name: &str) -> Option<&NamedTensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    /// Magic, version, echo (u64 length + UTF-8), tensor count, tensors
    /// (u32 name length, name, u8 rank, u64 dims, f64 data), then the CRC32
    /// of everything before it. All integers little-endian.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.echo.len() as u64).to_le_bytes());
        out.extend_from_slice(self.echo.as_bytes());
        out.extend_from_slice(&(self.tensors.len() as u32).to_le_bytes());
        for t in &self.tensors {
            if t.dims.iter().product::<usize>() != t.data.len() || t.dims.len() > u8::MAX as usize {
                return Err(SinoError::ShapeMismatch(format!(
                    "tensor {} has dims {:?} but {} values",
                    t.name,
                    t.dims,
                    t.data.len()
                )));
            }
            out.extend_from_slice(&(t.name.len() as u32).to_le_bytes());
            out.extend_from_slice(t.name.as_bytes());
            out.push(t.dims.len() as u8);
            for &d in &t.dims {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for v in &t.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: String| SinoError::format(path, reason);
        if bytes.len() < 12 {
            return Err(bad("file too short".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
        let crc = crc32fast::hash(body);
        if &body[..8] != CHECKPOINT_MAGIC {
            return Err(bad("not a checkpoint (bad magic)".into()));
        }
        if crc != stored {
            return Err(bad(format!("CRC mismatch: stored {stored:08x}, computed {crc:08x}")));
        }
        let mut r = Reader::new(body, path);
        r.take(8)?;
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let echo_len = r.u64()? as usize;
        let echo = String::from_utf8(r.take(echo_len)?.to_vec()).map_err(|_| bad("echo is not UTF-8".into()))?;
        let count = r.u32()? as usize;
        let mut tensors = Vec::with_capacity(count.min(4096));
        for _ in 0..count {
            let n = r.u32()? as usize;
            let name = String::from_utf8(r.take(n)?.to_vec()).map_err(|_| bad("tensor name is not UTF-8".into()))?;
            let rank = r.u8()? as usize;
            let dims = (0..rank).map(|_| r.u64().map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
            let len = dims
                .iter()
                .try_fold(1usize, |a, &d| a.checked_mul(d))
                .filter(|&l| l.checked_mul(8).is_some_and(|b| b <= r.remaining()))
                .ok_or_else(|| bad(format!("tensor {name} overruns the file")))?;
            let data = (0..len).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
            tensors.push(NamedTensor { name, dims, data });
        }
        if r.remaining() != 0 {
            return Err(bad(format!("{} trailing bytes", r.remaining())));
        }
        Ok(CheckpointContainer { echo, tensors })
    }

    pub fn write(&self, path: &Path) -> Result<u32> {
        let bytes = self.to_bytes()?;
        atomic_write(path, &bytes)?;
        Ok(crc32fast::hash(&bytes))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| SinoError::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }
}
