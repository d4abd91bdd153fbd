//! The binary field and checkpoint containers: round trip, CRC checks and
//! canonical config hashing.

use std::f64::consts::PI;

use sino::io::{canonical_toml, config_hash, params_to_tensors, CheckpointContainer, FieldContainer};
use sino::model::{init_params, ModelConfig};
use sino::spectral::{grf_vector, GrfParams, GridSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("sino-examples");
    let grid = GridSpec::cube(2, 16, 2.0 * PI)?;
    let snapshots =
        (0..3).map(|s| grf_vector(&grid, s, &GrfParams::smooth_state(2), 2)).collect::<sino::Result<Vec<_>>>()?;
    let c = FieldContainer { grid: grid.clone(), channels: 2, cadence: 5e-3, snapshots };
    let path = dir.join("fields.sino");
    let crc = c.write(&path)?;
    println!("{} written, file CRC {crc:08x}", path.display());
    assert_eq!(FieldContainer::read(&path)?, c);

    let mut bytes = std::fs::read(&path)?;
    let last = bytes.len() - 9;
    bytes[last] ^= 0x01;
    match FieldContainer::from_bytes(&bytes, &path) {
        Err(e) => println!("flipped bit detected: {e}"),
        Ok(_) => unreachable!("CRC must catch a flipped payload bit"),
    }

    let model = ModelConfig::new(2, &grid, 5e-3);
    let params = init_params(&model, 0)?;
    let ckpt = CheckpointContainer { echo: canonical_toml(&model)?, tensors: params_to_tensors(&params, "") };
    let cpath = dir.join("model.ckpt");
    ckpt.write(&cpath)?;
    let back = CheckpointContainer::read(&cpath)?;
    println!("checkpoint: {} tensors, config hash {}", back.tensors.len(), config_hash(&model)?);
    for t in back.tensors.iter().take(4) {
        println!("  {:<24} {:?}", t.name, t.dims);
    }
    Ok(())
}
