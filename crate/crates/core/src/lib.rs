//! Shrinking-rank slice sampling.
//!
//! A gradient-adaptive slice sampler in the crumb framework, an Adaptive
//! Metropolis baseline, a suite of benchmark targets and the diagnostics
//! needed to compare samplers by log-density evaluations per independent
//! observation.
//!
//! ```
//! use shrinkrank::rng::SeededSource;
//! use shrinkrank::samplers::{run_chain, SamplerConfig, ShrinkConfig};
//! use shrinkrank::targets::{GammaProduct, TargetDistribution};
//!
//! let target = GammaProduct::new(2).unwrap();
//! let sampler = SamplerConfig::ShrinkRank(ShrinkConfig::new(1.0).unwrap());
//! let mut src = SeededSource::new(42);
//! let chain = run_chain(&sampler, &target, &target.initial_point(), 1000, &mut src).unwrap();
//! assert_eq!(chain.len(), 1000);
//! ```

pub mod bench;
pub mod chain;
pub mod diagnostics;
pub mod error;
pub mod projection;
pub mod rng;
pub mod samplers;
pub mod targets;

pub use chain::Chain;
pub use error::{Error, Result};
