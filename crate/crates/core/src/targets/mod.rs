//! Benchmark target distributions.
//!
//! Every target reports `-inf` log density outside its support rather than
//! failing, so the sampler's zero-density path is exercised the same way
//! on every model.

mod eight_schools;
mod gamma;
mod gaussian;
mod gp;
mod logistic;
mod transform;

pub use eight_schools::{EightSchools, EightSchoolsData};
pub use gamma::GammaProduct;
pub use gaussian::CorrelatedGaussian;
pub use gp::{GpData, GpRegression};
pub use logistic::{load_regression_csv, LogisticRegression, RegressionData};
pub use transform::OrthogonalImage;

use crate::error::{Error, Result};

/// A log density with gradient on `R^dim`.
pub trait TargetDistribution: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Log density up to an additive constant; `-inf` outside the support.
    fn log_density(&self, x: &[f64]) -> f64;

    /// Gradient of the log density. Only meaningful where the log density
    /// is finite; elsewhere the result is unspecified (possibly NaN).
    fn grad_log_density(&self, x: &[f64]) -> Vec<f64>;

    /// A documented point with finite log density, used to start chains.
    fn initial_point(&self) -> Vec<f64>;

    fn in_support(&self, x: &[f64]) -> bool {
        self.log_density(x) > f64::NEG_INFINITY
    }
}

impl<T: TargetDistribution + ?Sized> TargetDistribution for Box<T> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (**self).log_density(x)
    }
    fn grad_log_density(&self, x: &[f64]) -> Vec<f64> {
        (**self).grad_log_density(x)
    }
    fn initial_point(&self) -> Vec<f64> {
        (**self).initial_point()
    }
}

/// Central-difference gradient, `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn finite_diff_grad<T: TargetDistribution + ?Sized>(target: &T, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {h}")));
    }
    if x.len() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: x.len() });
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = target.log_density(&probe);
        probe[i] = x[i] - h;
        let down = target.log_density(&probe);
        probe[i] = x[i];
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::StencilOutOfSupport(i));
        }
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_diff_is_exact_on_quadratics() {
        let target = CorrelatedGaussian::new(3, 0.4).unwrap();
        let x = [0.3, -1.2, 2.0];
        let fd = finite_diff_grad(&target, &x, 1e-5).unwrap();
        let exact = target.grad_log_density(&x);
        for (a, b) in fd.iter().zip(&exact) {
            assert!(((a - b) / b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn finite_diff_on_gamma() {
        let target = GammaProduct::new(2).unwrap();
        let fd = finite_diff_grad(&target, &[2.0, 2.0], 1e-6).unwrap();
        for g in fd {
            assert!((g + 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn finite_diff_guards() {
        let target = GammaProduct::new(1).unwrap();
        assert!(matches!(finite_diff_grad(&target, &[1.0], 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            finite_diff_grad(&target, &[1e-7], 1e-6),
            Err(Error::StencilOutOfSupport(0))
        ));
    }
}
