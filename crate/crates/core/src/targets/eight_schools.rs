use std::path::Path;

use serde::Deserialize;

use super::TargetDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct EightSchoolsData {
    pub effects: Vec<f64>,
    pub std_errors: Vec<f64>,
}

impl EightSchoolsData {
    pub fn new(effects: Vec<f64>, std_errors: Vec<f64>) -> Result<Self> {
        let data = Self { effects, std_errors };
        data.validate()?;
        Ok(data)
    }

    fn validate(&self) -> Result<()> {
        if self.effects.len() != 8 || self.std_errors.len() != 8 {
            return Err(Error::InvalidParameter(format!(
                "eight schools needs 8 effects and 8 standard errors, got {} and {}",
                self.effects.len(),
                self.std_errors.len()
            )));
        }
        if self.effects.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("effects must be finite".into()));
        }
        if self.std_errors.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter("standard errors must be positive and finite".into()));
        }
        Ok(())
    }

    /// Reads `effects` and `std_errors` arrays from a TOML file.
    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let data: Self = toml::from_str(&text)
            .map_err(|e| Error::Data { path: path.to_owned(), message: e.to_string() })?;
        data.validate()
            .map_err(|e| Error::Data { path: path.to_owned(), message: e.to_string() })?;
        Ok(data)
    }
}

/// Centered hierarchical normal model over `(θ_1..θ_8, μ, log τ)`.
///
/// `y_j ~ N(θ_j, σ_j²)`, `θ_j ~ N(μ, τ²)`, flat on `μ`, flat on `τ > 0`.
/// The last coordinate is `log τ`, so the density carries the Jacobian
/// term `+ log τ`.
#[derive(Debug, Clone)]
pub struct EightSchools {
    data: EightSchoolsData,
    precisions: Vec<f64>,
}

impl EightSchools {
    pub fn new(data: EightSchoolsData) -> Result<Self> {
        data.validate()?;
        let precisions = data.std_errors.iter().map(|s| 1.0 / (s * s)).collect();
        Ok(Self { data, precisions })
    }

    pub fn data(&self) -> &EightSchoolsData {
        &self.data
    }
}

const MU: usize = 8;
const LOG_TAU: usize = 9;

impl TargetDistribution for EightSchools {
    fn name(&self) -> &str {
        "eight-schools"
    }

    fn dim(&self) -> usize {
        10
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let (mu, log_tau) = (x[MU], x[LOG_TAU]);
        let inv_tau2 = (-2.0 * log_tau).exp();
        let mut acc = 0.0;
        for j in 0..8 {
            let r = self.data.effects[j] - x[j];
            let d = x[j] - mu;
            acc -= 0.5 * r * r * self.precisions[j] + 0.5 * d * d * inv_tau2;
        }
        // eight N(μ, τ²) normalizers plus the log τ Jacobian
        let lf = acc - 7.0 * log_tau;
        if lf.is_nan() {
            f64::NEG_INFINITY
        } else {
            lf
        }
    }

    fn grad_log_density(&self, x: &[f64]) -> Vec<f64> {
        let (mu, log_tau) = (x[MU], x[LOG_TAU]);
        let inv_tau2 = (-2.0 * log_tau).exp();
        let mut g = vec![0.0; 10];
        let mut sq = 0.0;
        for j in 0..8 {
            let d = x[j] - mu;
            g[j] = (self.data.effects[j] - x[j]) * self.precisions[j] - d * inv_tau2;
            g[MU] += d * inv_tau2;
            sq += d * d;
        }
        g[LOG_TAU] = sq * inv_tau2 - 7.0;
        g
    }

    fn initial_point(&self) -> Vec<f64> {
        let mean = self.data.effects.iter().sum::<f64>() / 8.0;
        let mut x: Vec<f64> = self.data.effects.iter().map(|y| 0.5 * (y + mean)).collect();
        x.push(mean);
        x.push(10f64.ln());
        x
    }
}
