//! Thresholding-dynamics (TD) interface energy `⟨e u, k * (1 - u)⟩`, its
//! gradient, and the edge-stopping weight derived from the image.

use std::f64::consts::PI;
use std::ops::Deref;

use crate::error::{check_dims, Error, Result};
use crate::field::{
    convolve, gaussian_kernel, gradient_magnitude, BoundaryPolicy, Field, Kernel, SoftMask,
};

/// Edge weight `e(x) = 1 / (1 + ‖∇v(x)‖)`, valued in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeight(Field);

impl EdgeWeight {
    pub fn new(field: Field) -> Result<Self> {
        if field.values().iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
            return Err(Error::InvalidInput(
                "edge weights must lie in (0, 1]".to_string(),
            ));
        }
        Ok(Self(field))
    }

    /// `e ≡ 1`, used when segmenting feature maps without an image.
    pub fn uniform(width: usize, height: usize) -> Self {
        Self(Field::filled(width, height, 1.0))
    }

    pub fn as_field(&self) -> &Field {
        &self.0
    }
}

impl Deref for EdgeWeight {
    type Target = Field;

    fn deref(&self) -> &Field {
        &self.0
    }
}

pub fn edge_weight(v: &Field) -> Result<EdgeWeight> {
    let grad = gradient_magnitude(v)?;
    Ok(EdgeWeight(grad.map(|g| 1.0 / (1.0 + g))))
}

/// `R(u) = Σ_x e(x) u(x) (k * (1 - u))(x)`, mirror boundary.
pub fn td_energy(u: &SoftMask, e: &EdgeWeight, k: &Kernel) -> Result<f64> {
    check_dims(u.dims(), e.dims())?;
    let smoothed = convolve(u.complement().as_field(), k, BoundaryPolicy::Mirror)?;
    Ok(u.values()
        .iter()
        .zip(e.values())
        .zip(smoothed.values())
        .map(|((ui, ei), si)| ei * ui * si)
        .sum())
}

/// Gradient of [`td_energy`]: `e (k * (1 - u)) - k * (e u)`.
pub fn td_subgradient(u: &SoftMask, e: &EdgeWeight, k: &Kernel) -> Result<Field> {
    check_dims(u.dims(), e.dims())?;
    let outer = convolve(u.complement().as_field(), k, BoundaryPolicy::Mirror)?;
    let weighted = u.zip_map(e, |ui, ei| ui * ei)?;
    let inner = convolve(&weighted, k, BoundaryPolicy::Mirror)?;
    let values = e
        .values()
        .iter()
        .zip(outer.values())
        .zip(inner.values())
        .map(|((ei, oi), ii)| ei * oi - ii)
        .collect();
    Field::new(u.width(), u.height(), values)
}

/// Perimeter estimate `√(π/σ) Σ u (k_σ * (1 - u))` for a (near-)binary mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdPerimeter {
    pub value: f64,
    /// False when some value of `u` is farther than `1e-6` from `{0, 1}`;
    /// the estimate is still computed but its perimeter meaning is lost.
    pub near_binary: bool,
}

pub fn td_perimeter(u: &SoftMask, sigma: f64) -> Result<TdPerimeter> {
    let k = gaussian_kernel(sigma)?;
    let near_binary = u.values().iter().all(|&v| v.min(1.0 - v).abs() <= 1e-6);
    let raw = td_energy(u, &EdgeWeight::uniform(u.width(), u.height()), &k)?;
    Ok(TdPerimeter {
        value: (PI / sigma).sqrt() * raw,
        near_binary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ball_kernel;

    fn step(w: usize, h: usize, at: usize) -> SoftMask {
        SoftMask::new(Field::from_fn(w, h, |x, _| if x >= at { 1.0 } else { 0.0 })).unwrap()
    }

    #[test]
    fn edge_weight_examples() {
        let e = edge_weight(&Field::filled(5, 5, 0.3)).unwrap();
        assert!(e.values().iter().all(|&v| v == 1.0));

        let e = edge_weight(&Field::from_fn(6, 6, |x, _| x as f64)).unwrap();
        assert_eq!(e.get(2, 3), 0.5);

        let noisy = Field::from_fn(9, 7, |x, y| ((x * 13 + y * 29) % 17) as f64 * 40.0);
        assert!(edge_weight(&noisy).unwrap().min() > 0.0);
    }

    #[test]
    fn td_energy_vanishes_on_constant_masks() {
        let k = gaussian_kernel(1.5).unwrap();
        let e = EdgeWeight::uniform(10, 8);
        assert_eq!(td_energy(&SoftMask::zeros(10, 8), &e, &k).unwrap(), 0.0);
        assert_eq!(td_energy(&SoftMask::ones(10, 8), &e, &k).unwrap(), 0.0);
    }

    #[test]
    fn td_energy_scales_with_interface_length() {
        let k = gaussian_kernel(2.0).unwrap();
        let short = td_energy(&step(64, 32, 32), &EdgeWeight::uniform(64, 32), &k).unwrap();
        let long = td_energy(&step(64, 64, 32), &EdgeWeight::uniform(64, 64), &k).unwrap();
        assert!((long / short - 2.0).abs() < 0.1);
    }

    #[test]
    fn subgradient_examples() {
        let k = gaussian_kernel(1.0).unwrap();
        let e = EdgeWeight::uniform(9, 7);
        let half = SoftMask::new(Field::filled(9, 7, 0.5)).unwrap();
        assert!(td_subgradient(&half, &e, &k)
            .unwrap()
            .values()
            .iter()
            .all(|v| v.abs() < 1e-15));

        let p = td_subgradient(&SoftMask::zeros(9, 7), &e, &k).unwrap();
        assert!(p.values().iter().all(|v| (v - 1.0).abs() < 1e-14));

        let u = step(16, 8, 8);
        let p = td_subgradient(&u, &EdgeWeight::uniform(16, 8), &ball_kernel(2)).unwrap();
        assert!(p.get(7, 4) > 0.0);
        assert!(p.get(8, 4) < 0.0);
        assert!((p.get(7, 4) + p.get(8, 4)).abs() < 1e-14);
    }

    #[test]
    fn dimension_checks() {
        let k = ball_kernel(1);
        let e = EdgeWeight::uniform(4, 4);
        assert!(td_energy(&SoftMask::zeros(4, 3), &e, &k).is_err());
        assert!(td_subgradient(&SoftMask::zeros(3, 4), &e, &k).is_err());
    }

    #[test]
    fn perimeter_flags_soft_input() {
        let soft = SoftMask::new(Field::filled(8, 8, 0.3)).unwrap();
        assert!(!td_perimeter(&soft, 1.0).unwrap().near_binary);
        let hard = step(8, 8, 4);
        assert!(td_perimeter(&hard, 1.0).unwrap().near_binary);
        assert_eq!(
            td_perimeter(&SoftMask::zeros(8, 8), 1.0).unwrap().value,
            0.0
        );
    }
}
