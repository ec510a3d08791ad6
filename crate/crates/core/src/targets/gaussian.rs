use std::f64::consts::PI;

use super::TargetDistribution;
use crate::error::{Error, Result};

/// Zero-mean Gaussian with unit variances and constant correlation `rho`.
///
/// The precision matrix of an equicorrelation matrix is again of the form
/// `a I + b 11ᵀ`, so only the two scalars are stored.
#[derive(Debug, Clone)]
pub struct CorrelatedGaussian {
    name: String,
    dim: usize,
    rho: f64,
    prec_diag: f64,
    prec_all: f64,
    log_norm: f64,
}

impl CorrelatedGaussian {
    pub fn new(dim: usize, rho: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let lower = if dim > 1 { -1.0 / (dim as f64 - 1.0) } else { -1.0 };
        if !(rho > lower && rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho = {rho} outside the positive-definite range ({lower}, 1) for dimension {dim}"
            )));
        }
        let p = dim as f64;
        let big = 1.0 + (p - 1.0) * rho;
        let small = 1.0 - rho;
        let prec_diag = 1.0 / small;
        let prec_all = -rho / (small * big);
        let log_det = (p - 1.0) * small.ln() + big.ln();
        Ok(Self {
            name: format!("correlated-gaussian(p={dim},rho={rho})"),
            dim,
            rho,
            prec_diag,
            prec_all,
            log_norm: -0.5 * log_det - 0.5 * p * (2.0 * PI).ln(),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Eigenvalues of the covariance, largest first: `1 + (p-1) rho` once and
    /// `1 - rho` with multiplicity `p - 1`.
    pub fn covariance_eigenvalues(&self) -> Vec<f64> {
        let mut eig = vec![1.0 - self.rho; self.dim];
        eig[0] = 1.0 + (self.dim as f64 - 1.0) * self.rho;
        eig
    }

    pub fn condition_number(&self) -> f64 {
        let eig = self.covariance_eigenvalues();
        let max = eig.iter().cloned().fold(f64::MIN, f64::max);
        let min = eig.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    pub fn covariance(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| if i == j { 1.0 } else { self.rho }).collect())
            .collect()
    }

    pub fn precision(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.prec_all + if i == j { self.prec_diag } else { 0.0 })
                    .collect()
            })
            .collect()
    }
}

impl TargetDistribution for CorrelatedGaussian {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let sum: f64 = x.iter().sum();
        let sq: f64 = x.iter().map(|v| v * v).sum();
        self.log_norm - 0.5 * (self.prec_diag * sq + self.prec_all * sum * sum)
    }

    fn grad_log_density(&self, x: &[f64]) -> Vec<f64> {
        let sum: f64 = x.iter().sum();
        x.iter().map(|v| -(self.prec_diag * v + self.prec_all * sum)).collect()
    }

    fn initial_point(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }
}
