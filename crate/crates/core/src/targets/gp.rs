use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::TargetDistribution;
use crate::error::{Error, Result};

/// Inputs and observed targets for GP regression.
#[derive(Debug, Clone, PartialEq)]
pub struct GpData {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl GpData {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.len() < 2 {
            return Err(Error::InvalidParameter("GP regression needs at least two observations".into()));
        }
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch { expected: inputs.len(), found: targets.len() });
        }
        let d = inputs[0].len();
        if d == 0 || inputs.iter().any(|x| x.len() != d) {
            return Err(Error::InvalidParameter("GP inputs must share a positive dimension".into()));
        }
        if inputs.iter().flatten().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("GP data must be finite".into()));
        }
        Ok(Self { inputs, targets })
    }

    /// `n` one-dimensional inputs uniform on `[0, 5]`, with targets drawn
    /// from the model itself at signal variance 1, noise variance 0.1 and
    /// decay rate 1. Deterministic in `seed` (ChaCha8 stream).
    pub fn synthetic(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<Vec<f64>> = (0..n).map(|_| vec![5.0 * rng.gen::<f64>()]).collect();
        let c = covariance(&inputs, 1.0, 0.1, 1.0);
        let chol = c
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter("synthetic GP covariance not positive definite".into()))?;
        let z = DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let y = chol.l() * z;
        Self::new(inputs, y.iter().copied().collect())
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn covariance(inputs: &[Vec<f64>], signal: f64, noise: f64, decay: f64) -> DMatrix<f64> {
    let n = inputs.len();
    DMatrix::from_fn(n, n, |i, j| {
        let k = signal * (-decay * sq_dist(&inputs[i], &inputs[j])).exp();
        if i == j {
            k + noise
        } else {
            k
        }
    })
}

/// Posterior over (signal variance, noise variance, decay rate) for a
/// zero-mean GP with kernel `v1 exp(-l d²) + v2 δ`.
///
/// Each parameter has an independent exponential prior with rate 1. The
/// unlogged variant works on the parameters directly and is `-inf` off the
/// positive octant; the logged variant works on their logarithms and adds
/// the Jacobian.
#[derive(Debug, Clone)]
pub struct GpRegression {
    data: GpData,
    sq_dists: DMatrix<f64>,
    y: DVector<f64>,
    logged: bool,
    prior_rate: f64,
}

impl GpRegression {
    pub fn new(data: GpData, logged: bool) -> Self {
        let n = data.inputs.len();
        let sq_dists = DMatrix::from_fn(n, n, |i, j| sq_dist(&data.inputs[i], &data.inputs[j]));
        let y = DVector::from_column_slice(&data.targets);
        Self { data, sq_dists, y, logged, prior_rate: 1.0 }
    }

    pub fn data(&self) -> &GpData {
        &self.data
    }

    pub fn is_logged(&self) -> bool {
        self.logged
    }

    fn cov(&self, signal: f64, noise: f64, decay: f64) -> DMatrix<f64> {
        let n = self.y.len();
        DMatrix::from_fn(n, n, |i, j| {
            let k = signal * (-decay * self.sq_dists[(i, j)]).exp();
            if i == j {
                k + noise
            } else {
                k
            }
        })
    }

    /// Gaussian marginal log likelihood of the targets, `-inf` when the
    /// covariance is not numerically positive definite.
    pub fn log_likelihood(&self, signal: f64, noise: f64, decay: f64) -> f64 {
        self.likelihood_parts(signal, noise, decay, false).map_or(f64::NEG_INFINITY, |p| p.0)
    }

    fn likelihood_parts(
        &self,
        signal: f64,
        noise: f64,
        decay: f64,
        with_grad: bool,
    ) -> Option<(f64, [f64; 3])> {
        let n = self.y.len();
        let chol = self.cov(signal, noise, decay).cholesky()?;
        let alpha = chol.solve(&self.y);
        let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let ll = -0.5 * self.y.dot(&alpha) - 0.5 * log_det - 0.5 * n as f64 * (2.0 * PI).ln();
        if !ll.is_finite() {
            return None;
        }
        if !with_grad {
            return Some((ll, [0.0; 3]));
        }
        // d ll / dθ = ½ tr((α αᵀ - C⁻¹) dC/dθ)
        let inv = chol.inverse();
        let mut grad = [0.0; 3];
        for i in 0..n {
            for j in 0..n {
                let w = alpha[i] * alpha[j] - inv[(i, j)];
                let base = (-decay * self.sq_dists[(i, j)]).exp();
                grad[0] += w * base;
                grad[2] -= w * signal * self.sq_dists[(i, j)] * base;
            }
            grad[1] += alpha[i] * alpha[i] - inv[(i, i)];
        }
        Some((ll, grad.map(|g| 0.5 * g)))
    }

    fn natural(&self, x: &[f64]) -> [f64; 3] {
        if self.logged {
            [x[0].exp(), x[1].exp(), x[2].exp()]
        } else {
            [x[0], x[1], x[2]]
        }
    }
}

impl TargetDistribution for GpRegression {
    fn name(&self) -> &str {
        if self.logged {
            "gp-logged"
        } else {
            "gp-unlogged"
        }
    }

    fn dim(&self) -> usize {
        3
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let v = self.natural(x);
        if !v.iter().all(|p| *p > 0.0 && p.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let ll = self.log_likelihood(v[0], v[1], v[2]);
        let prior = -self.prior_rate * v.iter().sum::<f64>();
        let jacobian = if self.logged { x.iter().sum() } else { 0.0 };
        ll + prior + jacobian
    }

    fn grad_log_density(&self, x: &[f64]) -> Vec<f64> {
        let v = self.natural(x);
        if !v.iter().all(|p| *p > 0.0 && p.is_finite()) {
            return vec![f64::NAN; 3];
        }
        let Some((_, g)) = self.likelihood_parts(v[0], v[1], v[2], true) else {
            return vec![f64::NAN; 3];
        };
        (0..3)
            .map(|i| {
                let dv = g[i] - self.prior_rate;
                if self.logged {
                    dv * v[i] + 1.0
                } else {
                    dv
                }
            })
            .collect()
    }

    fn initial_point(&self) -> Vec<f64> {
        let v = [1.0, 0.5, 1.0];
        if self.logged {
            v.iter().map(|p: &f64| p.ln()).collect()
        } else {
            v.to_vec()
        }
    }
}
