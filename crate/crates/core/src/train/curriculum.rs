use rand::Rng;

use crate::error::{Result, SinoError};
use crate::solvers::TrajectoryDataset;
use crate::spectral::RealField;

/// One training draw: warm up `warmup` model steps from `state` without
/// gradients, then supervise against `segment[1..]`.
#[derive(Debug, Clone)]
pub struct CurriculumSample {
    pub trajectory: usize,
    pub start: usize,
    pub warmup: usize,
    /// Ground truth at `start`.
    pub state: RealField,
    /// Ground truth at `start + warmup ..= start + warmup + n2`.
    pub segment: Vec<RealField>,
}

/// Draws a trajectory, a warm-up length `n ∈ {0..n1}` and a start index,
/// all uniformly.
pub fn sample_curriculum(ds: &TrajectoryDataset, n1: usize, n2: usize, rng: &mut impl Rng) -> Result<CurriculumSample> {
    let needed = n1 + n2 + 1;
    let available = ds.snapshots();
    if ds.is_empty() || available < needed {
        return Err(SinoError::InsufficientLength { needed, available });
    }
    let trajectory = rng.random_range(0..ds.len());
    let warmup = rng.random_range(0..=n1);
    let start = rng.random_range(0..=available - warmup - n2 - 1);
    let traj = &ds.trajectories[trajectory];
    Ok(CurriculumSample {
        trajectory,
        start,
        warmup,
        state: traj[start].clone(),
        segment: traj[start + warmup..=start + warmup + n2].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{DatasetMeta, PdeSpec, SolverConfig, Split};
    use crate::spectral::GridSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Snapshot j of trajectory i is the constant field 100 i + j.
    fn ramp(n_traj: usize, len: usize) -> TrajectoryDataset {
        let grid = GridSpec::cube(2, 4, 1.0).unwrap();
        let trajectories = (0..n_traj)
            .map(|i| (0..len).map(|j| RealField::from_fn(&grid, 1, |_, _| (100 * i + j) as f64)).collect())
            .collect();
        TrajectoryDataset {
            grid,
            channels: 1,
            cadence: 0.1,
            trajectories,
            meta: DatasetMeta {
                pde: PdeSpec::heat(2, 0.1),
                solver: SolverConfig::new(0.1, 1.0, 0.1),
                split: Split::Train,
                seeds: vec![0; n_traj],
            },
        }
    }

    fn value(f: &RealField) -> usize {
        f.data()[0] as usize
    }

    #[test]
    fn frames_line_up_with_start_and_warmup() {
        let ds = ramp(3, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let s = sample_curriculum(&ds, 4, 8, &mut rng).unwrap();
            assert!(s.start + s.warmup + 8 < 20);
            assert_eq!(value(&s.state), 100 * s.trajectory + s.start);
            assert_eq!(s.segment.len(), 9);
            for (j, f) in s.segment.iter().enumerate() {
                assert_eq!(value(f), 100 * s.trajectory + s.start + s.warmup + j);
            }
        }
    }

    #[test]
    fn no_warmup_when_n1_is_zero() {
        let ds = ramp(2, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..500).all(|_| sample_curriculum(&ds, 0, 8, &mut rng).unwrap().warmup == 0));
    }

    #[test]
    fn warmup_lengths_are_uniform() {
        let ds = ramp(2, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = [0usize; 5];
        let draws = 100_000;
        for _ in 0..draws {
            counts[sample_curriculum(&ds, 4, 8, &mut rng).unwrap().warmup] += 1;
        }
        for c in counts {
            let p = c as f64 / draws as f64;
            assert!((p - 0.2).abs() < 0.02 * 0.2, "{counts:?}");
        }
    }

    #[test]
    fn short_trajectories_are_rejected() {
        let ds = ramp(1, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = sample_curriculum(&ds, 4, 8, &mut rng).unwrap_err();
        assert!(matches!(e, SinoError::InsufficientLength { needed: 13, available: 12 }));
        assert!(sample_curriculum(&ramp(0, 20), 4, 8, &mut rng).is_err());
    }

    #[test]
    fn draws_are_reproducible() {
        let ds = ramp(3, 25);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| {
                    let s = sample_curriculum(&ds, 4, 8, &mut rng).unwrap();
                    (s.trajectory, s.start, s.warmup)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }
}
