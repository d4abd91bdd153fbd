use crate::error::{Result, SinoError};
use crate::spectral::RealField;

fn check_pair(pred: &[f64], truth: &[f64]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(SinoError::ShapeMismatch(format!("prediction has {} values, truth {}", pred.len(), truth.len())));
    }
    Ok(())
}

/// `sqrt(Σ(y - ŷ)² / Σy²)` over flat arrays.
pub fn relative_l2_raw(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(pred, truth)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (p, t) in pred.iter().zip(truth) {
        num += (t - p) * (t - p);
        den += t * t;
    }
    if den == 0.0 {
        return Err(SinoError::DegenerateTruth);
    }
    Ok((num / den).sqrt())
}

/// Relative ℓ2 error of one snapshot.
pub fn relative_l2(pred: &RealField, truth: &RealField) -> Result<f64> {
    if pred.grid() != truth.grid() || pred.channels() != truth.channels() {
        return Err(SinoError::ShapeMismatch("prediction and truth live on different grids".into()));
    }
    relative_l2_raw(pred.data(), truth.data())
}

/// Relative ℓ2 error pooled over every snapshot of a trajectory.
pub fn relative_l2_trajectory(pred: &[RealField], truth: &[RealField]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(SinoError::ShapeMismatch(format!(
            "{} predicted snapshots for {} true ones",
            pred.len(),
            truth.len()
        )));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (p, t) in pred.iter().zip(truth) {
        if p.grid() != t.grid() || p.channels() != t.channels() {
            return Err(SinoError::ShapeMismatch("prediction and truth live on different grids".into()));
        }
        for (a, b) in p.data().iter().zip(t.data()) {
            num += (b - a) * (b - a);
            den += b * b;
        }
    }
    if den == 0.0 {
        return Err(SinoError::DegenerateTruth);
    }
    Ok((num / den).sqrt())
}

/// Pearson correlation over flat arrays.
pub fn pcc_raw(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(pred, truth)?;
    let n = pred.len() as f64;
    if pred.is_empty() {
        return Err(SinoError::ZeroVariance);
    }
    let mp = pred.iter().sum::<f64>() / n;
    let mt = truth.iter().sum::<f64>() / n;
    let (mut cov, mut vp, mut vt) = (0.0, 0.0, 0.0);
    for (p, t) in pred.iter().zip(truth) {
        let (a, b) = (p - mp, t - mt);
        cov += a * b;
        vp += a * a;
        vt += b * b;
    }
    if vp == 0.0 || vt == 0.0 {
        return Err(SinoError::ZeroVariance);
    }
    // sqrt(fl(s * s)) == s, so identical and negated inputs give exactly ±1
    Ok((cov / (vp * vt).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson correlation over all points and channels of one snapshot.
pub fn pcc(pred: &RealField, truth: &RealField) -> Result<f64> {
    if pred.grid() != truth.grid() || pred.channels() != truth.channels() {
        return Err(SinoError::ShapeMismatch("prediction and truth live on different grids".into()));
    }
    pcc_raw(pred.data(), truth.data())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cases() {
        assert_eq!(relative_l2_raw(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(relative_l2_raw(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 2f64.sqrt());
        assert_eq!(relative_l2_raw(&[0.0, 0.0], &[3.0, -4.0]).unwrap(), 1.0);
        assert!(matches!(relative_l2_raw(&[1.0], &[0.0]), Err(SinoError::DegenerateTruth)));
        assert_eq!(pcc_raw(&[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0]).unwrap(), 1.0);
        assert_eq!(pcc_raw(&[-1.0, -2.0, -4.0], &[1.0, 2.0, 4.0]).unwrap(), -1.0);
        assert!(matches!(pcc_raw(&[1.0, 1.0], &[1.0, 2.0]), Err(SinoError::ZeroVariance)));
    }
}
