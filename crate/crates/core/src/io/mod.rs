//! On-disk formats: field and checkpoint containers, canonical config text.

mod checkpoint;
mod container;

use std::io::Write;
use std::os::unix::fs::PermissionsExt;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use checkpoint::{CheckpointContainer, NamedTensor, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use container::{file_crc, FieldContainer, FIELD_MAGIC, FIELD_VERSION};

use crate::error::{Result, SinoError};
use crate::model::{ModelConfig, SinoParams};

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| SinoError::io(dir, e))?;
    let mut tmp = tempfile::Builder::new()
        .permissions(std::fs::Permissions::from_mode(0o644))
        .tempfile_in(dir)
        .map_err(|e| SinoError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| SinoError::io(path, e))?;
    tmp.persist(path).map_err(|e| SinoError::io(path, e.error))?;
    Ok(())
}

/// TOML with keys sorted at every level; identical values always give
/// identical text.
pub fn canonical_toml<T: Serialize>(value: &T) -> Result<String> {
    let v = toml::Value::try_from(value).map_err(|e| SinoError::Config(e.to_string()))?;
    toml::to_string(&v).map_err(|e| SinoError::Config(e.to_string()))
}

/// Hex SHA-256 of the canonical text.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String> {
    let text = canonical_toml(value)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

pub fn params_to_tensors(params: &SinoParams, prefix: &str) -> Vec<NamedTensor> {
    params
        .tensors()
        .into_iter()
        .map(|t| NamedTensor { name: format!("{prefix}{}", t.name), dims: t.shape, data: t.data.to_vec() })
        .collect()
}

/// Rebuilds parameters for `cfg` from the tensors named `prefix + name`;
/// the names and shapes must match the configuration exactly.
pub fn params_from_tensors(cfg: &ModelConfig, tensors: &[NamedTensor], prefix: &str) -> Result<SinoParams> {
    let mut params = SinoParams::init(cfg, 0)?.zeros_like();
    let mut used = 0;
    for t in params.tensors_mut() {
        let name = format!("{prefix}{}", t.name);
        let src = tensors
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| SinoError::ShapeMismatch(format!("checkpoint lacks tensor {name}")))?;
        if src.dims != t.shape {
            return Err(SinoError::ShapeMismatch(format!(
                "tensor {name} has dims {:?}, configuration needs {:?}",
                src.dims, t.shape
            )));
        }
        t.data.copy_from_slice(&src.data);
        used += 1;
    }
    let present = tensors.iter().filter(|t| t.name.starts_with(prefix) && !prefix_clash(&t.name, prefix)).count();
    if present != used {
        return Err(SinoError::ShapeMismatch(format!(
            "checkpoint holds {present} tensors under {prefix:?}, configuration has {used}"
        )));
    }
    Ok(params)
}

// With an empty prefix, the namespaced extras (optimizer moments, best
// parameters, history) are not parameters.
fn prefix_clash(name: &str, prefix: &str) -> bool {
    prefix.is_empty() && name.contains(':')
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8], path: &'a Path) -> Self {
        Reader { bytes, pos: 0, path }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(SinoError::format(self.path, "unexpected end of file"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}
