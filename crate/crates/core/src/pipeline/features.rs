use crate::error::{Error, Result};
use crate::field::Field;

/// Per-class mean intensities `μ₁, …, μ_L`, ordered by label.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMeans(Vec<f64>);

impl ClassMeans {
    pub fn new(means: Vec<f64>) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 class means, got {}",
                means.len()
            )));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidParameter("class means must be finite".into()));
        }
        Ok(Self(means))
    }

    pub fn classes(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `o = -(v - μ_a)² + (v - μ_b)²`: positive where `v` is closer to `μ_a`.
pub fn region_variance_feature(v: &Field, mu_a: f64, mu_b: f64) -> Field {
    v.map(|x| -(x - mu_a).powi(2) + (x - mu_b).powi(2))
}

/// Sublevel features `o_γ = ô_γ - ô_{γ+1}` with `ô_γ = -(v - μ_γ)²`, one per
/// channel `γ = 1..L-1`.
pub fn difference_features(v: &Field, means: &ClassMeans) -> Vec<Field> {
    means
        .0
        .windows(2)
        .map(|pair| region_variance_feature(v, pair[0], pair[1]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_variance_examples() {
        let o = region_variance_feature(&Field::filled(1, 1, 0.3), 0.3, 0.8);
        assert!((o.get(0, 0) - 0.25).abs() < 1e-15);
        let o = region_variance_feature(&Field::filled(1, 1, 0.55), 0.3, 0.8);
        assert!(o.get(0, 0).abs() < 1e-15);
        let o = region_variance_feature(&Field::filled(1, 1, 0.2), 0.0, 1.0);
        assert!((o.get(0, 0) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn difference_features_count() {
        let means = ClassMeans::new(vec![0.2, 0.5, 0.9]).unwrap();
        let v = Field::new(3, 1, vec![0.2, 0.5, 0.9]).unwrap();
        let os = difference_features(&v, &means);
        assert_eq!(os.len(), 2);
        // cup pixel favours channel 1, background pixel disfavours both
        assert!(os[0].get(0, 0) > 0.0 && os[1].get(0, 0) > 0.0);
        assert!(os[0].get(1, 0) < 0.0 && os[1].get(1, 0) > 0.0);
        assert!(os[0].get(2, 0) < 0.0 && os[1].get(2, 0) < 0.0);
        assert!(ClassMeans::new(vec![0.5]).is_err());
    }
}
