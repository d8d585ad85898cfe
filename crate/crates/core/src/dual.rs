//! Log-sum-exp smoothing of ReLU, its entropic conjugate, and the
//! regularized sigmoid obtained from the dual problem.

use crate::error::{check_dims, Error, Result};
use crate::field::{Field, SoftMask};

/// Entropy values are evaluated on `u` clamped to `[ENTROPY_CLAMP, 1 - ENTROPY_CLAMP]`.
pub const ENTROPY_CLAMP: f64 = 1e-12;

/// Entropic regularization weight `ε > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyParam(f64);

impl EntropyParam {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(Self(epsilon))
        } else {
            Err(Error::InvalidParameter(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Logistic function `1 / (1 + e^{-z})` without overflow for large `|z|`.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ε ln(e^{o/ε} + 1)`, evaluated as `max(o, 0) + ε ln(1 + e^{-|o|/ε})`.
pub fn lse(o: f64, epsilon: EntropyParam) -> f64 {
    let eps = epsilon.get();
    o.max(0.0) + eps * (-o.abs() / eps).exp().ln_1p()
}

/// `ε (u ln u + (1-u) ln(1-u))` on `[0, 1]`, with `0 ln 0 = 0`.
///
/// Outside `[0, 1]` the conjugate takes the value `+∞`, which is returned as
/// `f64::INFINITY`.
pub fn binary_entropy(u: f64, epsilon: EntropyParam) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return f64::INFINITY;
    }
    if u == 0.0 || u == 1.0 {
        return 0.0;
    }
    let c = u.clamp(ENTROPY_CLAMP, 1.0 - ENTROPY_CLAMP);
    epsilon.get() * (c * c.ln() + (1.0 - c) * (1.0 - c).ln())
}

/// Pointwise `S((o - λ p) / ε)`: the minimizer of `F(u; o) + λ⟨p, u⟩`.
pub fn regularized_sigmoid(
    o: &Field,
    p: &Field,
    lambda: f64,
    epsilon: EntropyParam,
) -> Result<SoftMask> {
    check_dims(o.dims(), p.dims())?;
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let eps = epsilon.get();
    let values = o
        .values()
        .iter()
        .zip(p.values())
        .map(|(&oi, &pi)| sigmoid((oi - lambda * pi) / eps))
        .collect();
    Ok(SoftMask::from_raw(o.width(), o.height(), values))
}

/// Classic logistic sigmoid applied pointwise.
pub fn classic_sigmoid(o: &Field) -> SoftMask {
    let values = o.values().iter().map(|&v| sigmoid(v)).collect();
    SoftMask::from_raw(o.width(), o.height(), values)
}

/// `F(u; o) = Σ_x [-o u + ε (u ln u + (1-u) ln(1-u))]`.
pub fn data_energy(u: &SoftMask, o: &Field, epsilon: EntropyParam) -> Result<f64> {
    check_dims(o.dims(), u.dims())?;
    Ok(u.values()
        .iter()
        .zip(o.values())
        .map(|(&ui, &oi)| -oi * ui + binary_entropy(ui, epsilon))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(v: f64) -> EntropyParam {
        EntropyParam::new(v).unwrap()
    }

    #[test]
    fn lse_examples() {
        assert!((lse(0.0, eps(1.0)) - 2f64.ln()).abs() < 1e-15);
        // direct evaluation of the defining formula
        let direct = 0.5 * ((1.0f64 / 0.5).exp() + 1.0).ln();
        assert!((lse(1.0, eps(0.5)) - direct).abs() < 1e-14);
        assert!((direct - 1.063464).abs() < 1e-6);
        assert_eq!(lse(1000.0, eps(1.0)), 1000.0);
        assert!(lse(-1000.0, eps(1.0)) >= 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.0, eps(0.3)), 0.0);
        assert_eq!(binary_entropy(1.0, eps(0.3)), 0.0);
        assert!((binary_entropy(0.5, eps(1.0)) + 2f64.ln()).abs() < 1e-15);
        let direct = 0.1 * (0.9 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
        assert!((binary_entropy(0.9, eps(0.1)) - direct).abs() < 1e-15);
        assert!((direct + 0.032508).abs() < 1e-6);
        assert_eq!(binary_entropy(1.2, eps(1.0)), f64::INFINITY);
        assert_eq!(binary_entropy(-0.1, eps(1.0)), f64::INFINITY);
    }

    #[test]
    fn regularized_sigmoid_examples() {
        let o = Field::from_fn(4, 3, |x, y| x as f64 - y as f64 * 0.7);
        let zero = Field::zeros(4, 3);
        let u = regularized_sigmoid(&o, &zero, 0.0, eps(1.0)).unwrap();
        for (ui, oi) in u.values().iter().zip(o.values()) {
            let direct = 1.0 / (1.0 + (-oi).exp());
            assert!((ui - direct).abs() <= 1e-15 * direct);
        }

        let u = regularized_sigmoid(&zero, &zero, 5.0, eps(0.2)).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.5));

        let o = Field::filled(1, 1, 1.0);
        let p = Field::filled(1, 1, 0.05);
        let u = regularized_sigmoid(&o, &p, 10.0, eps(0.1)).unwrap();
        assert!((u.get(0, 0) - 1.0 / (1.0 + (-5.0f64).exp())).abs() < 1e-15);
        assert!((u.get(0, 0) - 0.993307).abs() < 1e-6);

        assert!(regularized_sigmoid(&o, &Field::zeros(2, 1), 1.0, eps(1.0)).is_err());
    }

    #[test]
    fn sigmoid_is_overflow_safe() {
        let o = Field::new(3, 1, vec![-800.0, 0.0, 800.0]).unwrap();
        let u = regularized_sigmoid(&o, &Field::zeros(3, 1), 0.0, eps(0.05)).unwrap();
        assert_eq!(u.values(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn data_energy_examples() {
        let o = Field::from_fn(3, 2, |x, y| (x + y) as f64);
        assert_eq!(
            data_energy(&SoftMask::zeros(3, 2), &o, eps(0.4)).unwrap(),
            0.0
        );

        let c = Field::filled(5, 4, 1.7);
        let e = data_energy(&SoftMask::ones(5, 4), &c, eps(0.4)).unwrap();
        assert!((e + 1.7 * 20.0).abs() < 1e-12);

        let u = SoftMask::new(Field::filled(1, 1, 0.5)).unwrap();
        let e = data_energy(&u, &Field::filled(1, 1, 2.0), eps(1.0)).unwrap();
        assert!((e - (-1.0 - 2f64.ln())).abs() < 1e-15);

        assert!(data_energy(&u, &Field::zeros(2, 2), eps(1.0)).is_err());
    }

    #[test]
    fn epsilon_validated() {
        assert!(EntropyParam::new(0.0).is_err());
        assert!(EntropyParam::new(f64::NAN).is_err());
    }
}
