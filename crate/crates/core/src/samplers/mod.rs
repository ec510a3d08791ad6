//! Samplers and the chain driver.

mod metropolis;
mod shrink;

pub use metropolis::{adaptive_metropolis_step, AmConfig, RunningMoments};
pub use shrink::{shrink_rank_step, shrink_rank_step_traced, ShrinkConfig, ShrinkState};

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::targets::TargetDistribution;

/// Cost accounting for one transition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub n_density_evals: u64,
    pub n_grad_evals: u64,
    pub n_crumbs: u64,
    pub accepted: bool,
}

/// New state, its log density and the step's cost.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub x: Vec<f64>,
    pub log_density: f64,
    pub stats: StepStats,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SamplerConfig {
    ShrinkRank(ShrinkConfig),
    AdaptiveMetropolis(AmConfig),
}

impl SamplerConfig {
    /// Identifier used on the command line and in result files.
    pub fn id(&self) -> &'static str {
        match self {
            SamplerConfig::ShrinkRank(_) => "shrink-rank",
            SamplerConfig::AdaptiveMetropolis(_) => "adaptive-metropolis",
        }
    }

    /// The tuning parameter varied in benchmarks.
    pub fn tuning(&self) -> f64 {
        match self {
            SamplerConfig::ShrinkRank(c) => c.sigma_c,
            SamplerConfig::AdaptiveMetropolis(c) => c.initial_sd_times_sqrt_d,
        }
    }

    /// Default configuration of sampler `id` at tuning value `tuning`.
    pub fn from_id(id: &str, tuning: f64) -> Result<Self> {
        match id {
            "shrink-rank" => Ok(SamplerConfig::ShrinkRank(ShrinkConfig::new(tuning)?)),
            "adaptive-metropolis" => Ok(SamplerConfig::AdaptiveMetropolis(AmConfig::new(tuning)?)),
            other => Err(Error::InvalidParameter(format!(
                "unknown sampler `{other}` (expected shrink-rank or adaptive-metropolis)"
            ))),
        }
    }
}

/// Runs `n_iterations` transitions from `x_init`.
pub fn run_chain<T, R>(
    sampler: &SamplerConfig,
    target: &T,
    x_init: &[f64],
    n_iterations: usize,
    src: &mut R,
) -> Result<Chain>
where
    T: TargetDistribution + ?Sized,
    R: RandomSource + ?Sized,
{
    let dim = target.dim();
    if x_init.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: x_init.len() });
    }
    let mut log_f = target.log_density(x_init);
    if !log_f.is_finite() {
        return Err(Error::NonFiniteStart(log_f));
    }
    let mut chain = Chain::with_capacity(dim, n_iterations);
    let mut x = x_init.to_vec();
    let mut moments = RunningMoments::new(dim);
    for iteration in 0..n_iterations {
        let outcome = match sampler {
            SamplerConfig::ShrinkRank(cfg) => shrink_rank_step(&x, log_f, target, cfg, src),
            SamplerConfig::AdaptiveMetropolis(cfg) => {
                adaptive_metropolis_step(&x, log_f, target, cfg, &mut moments, src)
            }
        }
        .map_err(|e| Error::AtIteration { iteration, source: Box::new(e) })?;
        chain.push(&outcome.x, outcome.log_density, &outcome.stats);
        x = outcome.x;
        log_f = outcome.log_density;
    }
    Ok(chain)
}
