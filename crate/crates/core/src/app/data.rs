use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SinoError};
use crate::io::{atomic_write, file_crc, FieldContainer};
use crate::solvers::{DatasetMeta, PdeSpec, SolverConfig, Split, TrajectoryDataset};

pub const MANIFEST: &str = "manifest.toml";

/// One written container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub split: Split,
    /// CRC32 of the file minus its trailer, 8 hex digits.
    pub crc32: String,
    pub trajectories: usize,
    pub snapshots_per_trajectory: usize,
    /// Initial-condition seeds, in decimal (they exceed TOML's integer range).
    pub seeds: Vec<String>,
    pub pde: PdeSpec,
    pub solver: SolverConfig,
}

/// Text index of a dataset directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|e| SinoError::io(&path, e))?;
        toml::from_str(&text).map_err(|e| SinoError::format(&path, e.to_string()))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = crate::io::canonical_toml(self)?;
        atomic_write(&dir.join(MANIFEST), text.as_bytes())
    }

    pub fn entry(&self, split: Split) -> Option<&ManifestEntry> {
        self.files.iter().find(|f| f.split == split)
    }
}

/// Writes all trajectories of a split into one container, trajectory after
/// trajectory; returns the manifest entry.
pub fn write_split(dir: &Path, ds: &TrajectoryDataset) -> Result<ManifestEntry> {
    ds.validate()?;
    let file = format!("{}.sino", ds.meta.split.name());
    let container = FieldContainer {
        grid: ds.grid.clone(),
        channels: ds.channels,
        cadence: ds.cadence,
        snapshots: ds.trajectories.iter().flatten().cloned().collect(),
    };
    let crc = container.write(&dir.join(&file))?;
    Ok(ManifestEntry {
        file,
        split: ds.meta.split,
        crc32: format!("{crc:08x}"),
        trajectories: ds.len(),
        snapshots_per_trajectory: ds.snapshots(),
        seeds: ds.meta.seeds.iter().map(u64::to_string).collect(),
        pde: ds.meta.pde,
        solver: ds.meta.solver,
    })
}

/// Reads a split back, checking the file CRC recorded in the manifest.
pub fn read_split(dir: &Path, split: Split) -> Result<TrajectoryDataset> {
    let manifest = Manifest::read(dir)?;
    let entry = manifest
        .entry(split)
        .ok_or_else(|| SinoError::format(dir.join(MANIFEST), format!("no {} split listed", split.name())))?;
    read_entry(dir, entry)
}

pub fn read_entry(dir: &Path, entry: &ManifestEntry) -> Result<TrajectoryDataset> {
    let path: PathBuf = dir.join(&entry.file);
    let bytes = std::fs::read(&path).map_err(|e| SinoError::io(&path, e))?;
    let crc = format!("{:08x}", file_crc(&bytes));
    if crc != entry.crc32 {
        return Err(SinoError::format(&path, format!("file CRC {crc} differs from the manifest ({})", entry.crc32)));
    }
    let c = FieldContainer::from_bytes(&bytes, &path)?;
    let per = entry.snapshots_per_trajectory;
    if c.snapshots.len() != entry.trajectories * per {
        return Err(SinoError::format(
            &path,
            format!("{} snapshots, manifest implies {}", c.snapshots.len(), entry.trajectories * per),
        ));
    }
    let seeds = entry
        .seeds
        .iter()
        .map(|s| s.parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| SinoError::format(&path, "bad seed in manifest"))?;
    let trajectories = if per == 0 { Vec::new() } else { c.snapshots.chunks(per).map(<[_]>::to_vec).collect() };
    Ok(TrajectoryDataset {
        grid: c.grid,
        channels: c.channels,
        cadence: c.cadence,
        trajectories,
        meta: DatasetMeta { pde: entry.pde, solver: entry.solver, split: entry.split, seeds },
    })
}
