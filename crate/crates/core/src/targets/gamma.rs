use super::TargetDistribution;
use crate::error::{Error, Result};

/// Product of independent Gamma(2, 1) marginals.
#[derive(Debug, Clone)]
pub struct GammaProduct {
    name: String,
    dim: usize,
}

impl GammaProduct {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self { name: format!("gamma-product(p={dim})"), dim })
    }
}

impl TargetDistribution for GammaProduct {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    // Gamma(2, 1) has density x e^{-x}; the normalizing constant is 1.
    fn log_density(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &v in x {
            if !(v > 0.0) {
                return f64::NEG_INFINITY;
            }
            acc += v.ln() - v;
        }
        acc
    }

    fn grad_log_density(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| 1.0 / v - 1.0).collect()
    }

    fn initial_point(&self) -> Vec<f64> {
        vec![1.0; self.dim]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let g = GammaProduct::new(2).unwrap();
        let lf = g.log_density(&[2.0, 2.0]);
        assert!((lf - 2.0 * (2f64.ln() - 2.0)).abs() < 1e-15);
        assert!((lf + 2.613706).abs() < 1e-6);
        assert_eq!(g.grad_log_density(&[2.0, 2.0]), vec![-0.5, -0.5]);
    }

    #[test]
    fn outside_support_is_neg_infinity() {
        let g = GammaProduct::new(1).unwrap();
        assert_eq!(g.log_density(&[-1.0]), f64::NEG_INFINITY);
        assert_eq!(g.log_density(&[0.0]), f64::NEG_INFINITY);
        assert!(!g.in_support(&[f64::NAN]));
    }
}
