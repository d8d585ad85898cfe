use crate::error::{check_dims, Error, Result};
use crate::field::{Field, SoftMask};

fn check_binary(name: &str, f: &Field) -> Result<()> {
    if f.values().iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidInput(format!("{name} must be binary")));
    }
    Ok(())
}

/// Dice measure `2 TP / (2 TP + FN + FP)` as a percentage; 100 when both
/// masks are empty.
pub fn dice(pred: &Field, gt: &Field) -> Result<f64> {
    check_dims(gt.dims(), pred.dims())?;
    check_binary("prediction", pred)?;
    check_binary("ground truth", gt)?;
    let (mut tp, mut fn_, mut fp) = (0usize, 0usize, 0usize);
    for (&p, &g) in pred.values().iter().zip(gt.values()) {
        match (p == 1.0, g == 1.0) {
            (true, true) => tp += 1,
            (false, true) => fn_ += 1,
            (true, false) => fp += 1,
            (false, false) => {}
        }
    }
    let denom = 2 * tp + fn_ + fp;
    if denom == 0 {
        return Ok(100.0);
    }
    Ok(200.0 * tp as f64 / denom as f64)
}

/// `1 - 2⟨v, u⟩ / (‖v‖² + ‖u‖²)`.
pub fn smooth_dice_loss(v: &SoftMask, u_true: &Field) -> Result<f64> {
    check_dims(u_true.dims(), v.dims())?;
    check_binary("ground truth", u_true)?;
    let mut inner = 0.0;
    let mut norms = 0.0;
    for (&a, &b) in v.values().iter().zip(u_true.values()) {
        inner += a * b;
        norms += a * a + b * b;
    }
    if norms == 0.0 {
        return Err(Error::InvalidInput(
            "smooth Dice loss is undefined when both inputs are zero".into(),
        ));
    }
    Ok(1.0 - 2.0 * inner / norms)
}
