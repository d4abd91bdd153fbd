use serde::{Deserialize, Serialize};

use crate::error::{Result, SinoError};
use crate::model::{ModelConfig, SinoOperator, SinoParams};
use crate::spectral::RealField;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    /// Mean squared error per step.
    #[default]
    #[serde(rename = "mse")]
    Mse,
    /// Relative ℓ2 error per step.
    #[serde(rename = "rel_l2")]
    RelL2,
}

/// Per-step loss and its derivative w.r.t. the prediction.
fn step_loss(kind: LossKind, pred: &[f64], truth: &[f64]) -> Result<(f64, Vec<f64>)> {
    match kind {
        LossKind::Mse => {
            let n = pred.len() as f64;
            let loss = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / n;
            let g = pred.iter().zip(truth).map(|(p, t)| 2.0 * (p - t) / n).collect();
            Ok((loss, g))
        }
        LossKind::RelL2 => {
            let den: f64 = truth.iter().map(|t| t * t).sum();
            if den == 0.0 {
                return Err(SinoError::DegenerateTruth);
            }
            let num: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
            let loss = (num / den).sqrt();
            let g = if loss > 0.0 {
                pred.iter().zip(truth).map(|(p, t)| (p - t) / (den * loss)).collect()
            } else {
                vec![0.0; pred.len()]
            };
            Ok((loss, g))
        }
    }
}

fn check_targets(targets: &[RealField]) -> Result<()> {
    if targets.is_empty() {
        return Err(SinoError::InsufficientLength { needed: 2, available: 1 });
    }
    Ok(())
}

/// Mean per-step loss of `targets.len()` model steps from `start`.
pub fn loss_from(
    params: &SinoParams,
    cfg: &ModelConfig,
    start: &RealField,
    targets: &[RealField],
    kind: LossKind,
) -> Result<f64> {
    check_targets(targets)?;
    let op = SinoOperator::new(params, cfg, start.grid())?;
    let mut u = start.clone();
    let mut total = 0.0;
    for t in targets {
        u = op.step(&u)?;
        total += step_loss(kind, u.data(), t.data())?.0;
    }
    Ok(total / targets.len() as f64)
}

/// Rollout loss of a ground-truth segment: steps from `segment[0]`,
/// compared against `segment[1..]`.
pub fn loss_rollout(params: &SinoParams, cfg: &ModelConfig, segment: &[RealField], kind: LossKind) -> Result<f64> {
    check_targets(segment.get(1..).unwrap_or(&[]))?;
    loss_from(params, cfg, &segment[0], &segment[1..], kind)
}

/// Loss and exact gradient of [`loss_rollout`].
pub fn backward(
    params: &SinoParams,
    cfg: &ModelConfig,
    segment: &[RealField],
    kind: LossKind,
) -> Result<(f64, SinoParams)> {
    check_targets(segment.get(1..).unwrap_or(&[]))?;
    backward_from(params, cfg, &segment[0], &segment[1..], kind, 1.0)
}

/// Loss (times `scale`) and its gradient for a rollout from `start`.
///
/// The start state is treated as data: anything that produced it carries
/// no gradient.
pub fn backward_from(
    params: &SinoParams,
    cfg: &ModelConfig,
    start: &RealField,
    targets: &[RealField],
    kind: LossKind,
    scale: f64,
) -> Result<(f64, SinoParams)> {
    check_targets(targets)?;
    let op = SinoOperator::new(params, cfg, start.grid())?;
    let steps = targets.len();
    let w = scale / steps as f64;
    let mut tapes = Vec::with_capacity(steps);
    let mut seeds = Vec::with_capacity(steps);
    let mut u = start.clone();
    let mut total = 0.0;
    for (s, t) in targets.iter().enumerate() {
        let (next, tape) = op.step_taped(&u).map_err(|e| match e {
            SinoError::NonFinite { at, .. } => {
                SinoError::non_finite("training rollout", format!("step {} ({at})", s + 1))
            }
            other => other,
        })?;
        let (l, mut g) = step_loss(kind, next.data(), t.data())?;
        g.iter_mut().for_each(|v| *v *= w);
        total += l;
        tapes.push(tape);
        seeds.push(g);
        u = next;
    }
    let mut grads = params.zeros_like();
    let mut g_table = op.table_grad();
    let mut gu = vec![0.0; start.data().len()];
    for s in (0..steps).rev() {
        gu.iter_mut().zip(&seeds[s]).for_each(|(a, b)| *a += b);
        gu = op.step_backward(&tapes[s], &gu, &mut grads, &mut g_table);
    }
    op.finish_backward(&g_table, &mut grads);
    let loss = scale * total / steps as f64;
    if !loss.is_finite() || !grads.is_finite() {
        return Err(SinoError::non_finite("gradient", "backward pass"));
    }
    Ok((loss, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    #[test]
    fn rel_l2_of_zero_prediction_is_one() {
        let (l, _) = step_loss(LossKind::RelL2, &[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert_eq!(l, 1.0);
    }

    #[test]
    fn zero_model_on_constant_truth_has_zero_loss() {
        let grid = GridSpec::cube(2, 8, 1.0).unwrap();
        let cfg = ModelConfig::new(1, &grid, 0.1);
        let p = SinoParams::init(&cfg, 0).unwrap().zeros_like();
        let u = RealField::from_fn(&grid, 1, |_, x| x[0] * x[1]);
        let seg = vec![u.clone(), u.clone(), u];
        assert_eq!(loss_rollout(&p, &cfg, &seg, LossKind::Mse).unwrap(), 0.0);
    }
}
