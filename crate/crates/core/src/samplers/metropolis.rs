//! Adaptive Metropolis with a two-component mixture proposal.
//!
//! Until `onset` states have been seen, and afterwards with probability
//! `beta`, the proposal is isotropic Gaussian with standard deviation
//! `initial_sd_times_sqrt_d / sqrt(d)`. Otherwise it is Gaussian with
//! covariance `(2.38² / d) (Σ̂ + ridge I)`, where `Σ̂` is the empirical
//! covariance of the chain so far.

use nalgebra::{DMatrix, DVector};

use super::{StepOutcome, StepStats};
use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::targets::TargetDistribution;

#[derive(Debug, Clone, PartialEq)]
pub struct AmConfig {
    /// Initial proposal standard deviation multiplied by `sqrt(d)`.
    pub initial_sd_times_sqrt_d: f64,
    /// Number of states to observe before using the empirical covariance;
    /// `None` means `2 d`.
    pub onset: Option<usize>,
    /// Probability of using the fixed isotropic component after onset.
    pub beta: f64,
    pub ridge: f64,
}

impl AmConfig {
    pub fn new(initial_sd_times_sqrt_d: f64) -> Result<Self> {
        let cfg = Self { initial_sd_times_sqrt_d, onset: None, beta: 0.05, ridge: 1e-10 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.initial_sd_times_sqrt_d > 0.0 && self.initial_sd_times_sqrt_d.is_finite()) {
            return Err(Error::InvalidParameter("initial proposal scale must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParameter("beta must lie in [0, 1]".into()));
        }
        if !(self.ridge >= 0.0) {
            return Err(Error::InvalidParameter("ridge must be non-negative".into()));
        }
        Ok(())
    }

    fn onset_for(&self, dim: usize) -> usize {
        self.onset.unwrap_or(2 * dim)
    }
}

/// Running mean and scatter matrix (Welford).
#[derive(Debug, Clone, PartialEq)]
pub struct RunningMoments {
    count: usize,
    mean: Vec<f64>,
    scatter: DMatrix<f64>,
}

impl RunningMoments {
    pub fn new(dim: usize) -> Self {
        Self { count: 0, mean: vec![0.0; dim], scatter: DMatrix::zeros(dim, dim) }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        let delta: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        for (m, d) in self.mean.iter_mut().zip(&delta) {
            *m += d / n;
        }
        let p = self.mean.len();
        for i in 0..p {
            let after_i = x[i] - self.mean[i];
            for j in 0..p {
                self.scatter[(i, j)] += delta[j] * after_i;
            }
        }
    }

    /// Unbiased sample covariance; `None` with fewer than two states.
    pub fn covariance(&self) -> Option<DMatrix<f64>> {
        (self.count >= 2).then(|| &self.scatter / (self.count as f64 - 1.0))
    }
}

/// One Adaptive Metropolis step from `x0` with cached `log_f_x0`.
///
/// `moments` must describe the states visited so far; it is updated with
/// the returned state. Every step is charged two density evaluations, one
/// for the current state and one for the proposal.
pub fn adaptive_metropolis_step<T, R>(
    x0: &[f64],
    log_f_x0: f64,
    target: &T,
    cfg: &AmConfig,
    moments: &mut RunningMoments,
    src: &mut R,
) -> Result<StepOutcome>
where
    T: TargetDistribution + ?Sized,
    R: RandomSource + ?Sized,
{
    let d = target.dim();
    if x0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x0.len() });
    }
    if !log_f_x0.is_finite() {
        return Err(Error::NonFiniteStart(log_f_x0));
    }

    let use_fixed = src.uniform() < cfg.beta || moments.count() < cfg.onset_for(d);
    let z = DVector::from_vec(src.std_normal_vec(d)?);
    let adapted = if use_fixed {
        None
    } else {
        moments.covariance().and_then(|cov| {
            let scale = 2.38 * 2.38 / d as f64;
            let shifted = (cov + DMatrix::identity(d, d) * cfg.ridge) * scale;
            shifted.cholesky().map(|c| c.l() * &z)
        })
    };
    let step = adapted.unwrap_or_else(|| z * (cfg.initial_sd_times_sqrt_d / (d as f64).sqrt()));
    let proposal: Vec<f64> = x0.iter().zip(step.iter()).map(|(a, b)| a + b).collect();

    let log_f = target.log_density(&proposal);
    let log_u = src.uniform().ln();
    let accepted = log_f.is_finite() && log_u < log_f - log_f_x0;
    let stats = StepStats { n_density_evals: 2, n_grad_evals: 0, n_crumbs: 0, accepted };
    let outcome = if accepted {
        StepOutcome { x: proposal, log_density: log_f, stats }
    } else {
        StepOutcome { x: x0.to_vec(), log_density: log_f_x0, stats }
    };
    moments.push(&outcome.x);
    Ok(outcome)
}
