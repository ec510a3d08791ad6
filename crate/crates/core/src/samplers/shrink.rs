//! The shrinking-rank slice sampling transition.
//!
//! Each transition draws a log slice level below `log f(x0)`, then a
//! sequence of Gaussian crumbs centred at `x0`. Proposal `k` is Gaussian
//! with precision equal to the summed crumb precisions and mean equal to
//! their precision-weighted mean offset, restricted to the nullspace of
//! the basis `J`. After a rejected in-support proposal the projected
//! gradient there is appended to `J` if it is close enough in angle to the
//! full gradient; otherwise the crumb standard deviation shrinks by
//! `theta` (and by `zero_density_factor` as well when the proposal had
//! zero density).

use super::{StepOutcome, StepStats};
use crate::error::{Error, Result};
use crate::projection::{OrthoBasis, DEFAULT_COS_THRESHOLD};
use crate::rng::RandomSource;
use crate::targets::TargetDistribution;

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkConfig {
    /// Standard deviation of the first crumb.
    pub sigma_c: f64,
    /// Shrink factor applied when the basis is not extended.
    pub theta: f64,
    /// Minimum cosine between projected and full gradient for adaptation.
    pub cos_threshold: f64,
    /// Extra shrink factor after a zero-density proposal. Setting it to 1
    /// disables the rule.
    pub zero_density_factor: f64,
    pub max_crumbs: usize,
}

impl ShrinkConfig {
    pub fn new(sigma_c: f64) -> Result<Self> {
        let cfg = Self {
            sigma_c,
            theta: 0.95,
            cos_threshold: DEFAULT_COS_THRESHOLD,
            zero_density_factor: 0.1,
            max_crumbs: 10_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.sigma_c > 0.0 && self.sigma_c.is_finite()) {
            return bad("sigma_c must be positive and finite");
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad("theta must lie in (0, 1)");
        }
        if !(self.cos_threshold > 0.0 && self.cos_threshold < 1.0) {
            return bad("cos_threshold must lie in (0, 1)");
        }
        if !(self.zero_density_factor > 0.0 && self.zero_density_factor <= 1.0) {
            return bad("zero_density_factor must lie in (0, 1]");
        }
        if self.max_crumbs == 0 {
            return bad("max_crumbs must be positive");
        }
        Ok(())
    }
}

/// Working state of one transition.
#[derive(Debug, Clone)]
pub struct ShrinkState {
    pub x0: Vec<f64>,
    pub log_y: f64,
    pub basis: OrthoBasis,
    /// `c_k - x0` for every crumb drawn so far.
    pub crumb_offsets: Vec<Vec<f64>>,
    /// Standard deviation each crumb was drawn with.
    pub crumb_sds: Vec<f64>,
    /// Proposals tried so far, in order.
    pub proposals: Vec<Vec<f64>>,
    /// Basis size in effect when each proposal was drawn.
    pub basis_sizes: Vec<usize>,
}

impl ShrinkState {
    fn new(x0: &[f64], log_y: f64) -> Result<Self> {
        Ok(Self {
            x0: x0.to_vec(),
            log_y,
            basis: OrthoBasis::empty(x0.len())?,
            crumb_offsets: Vec::new(),
            crumb_sds: Vec::new(),
            proposals: Vec::new(),
            basis_sizes: Vec::new(),
        })
    }

    pub fn n_crumbs(&self) -> usize {
        self.crumb_sds.len()
    }

    /// Each crumb sd equals the previous one, `theta` times it, or
    /// `zero_factor * theta` times it.
    pub fn schedule_is_valid(&self, theta: f64, zero_factor: f64) -> bool {
        self.crumb_sds.windows(2).all(|w| {
            let (prev, next) = (w[0], w[1]);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
            next <= prev && (next == prev || close(next, theta * prev) || close(next, zero_factor * theta * prev))
        })
    }
}

/// One shrinking-rank transition from `x0`, whose log density `log_f_x0`
/// the caller already knows.
///
/// The count in the returned stats includes one evaluation for the slice
/// level at `x0` (even though the cached value is used) plus one per
/// proposal, and one gradient per rejected proposal inside the support.
pub fn shrink_rank_step<T, R>(
    x0: &[f64],
    log_f_x0: f64,
    target: &T,
    cfg: &ShrinkConfig,
    src: &mut R,
) -> Result<StepOutcome>
where
    T: TargetDistribution + ?Sized,
    R: RandomSource + ?Sized,
{
    shrink_rank_step_traced(x0, log_f_x0, target, cfg, src).map(|(outcome, _)| outcome)
}

/// [`shrink_rank_step`], also returning the final working state.
pub fn shrink_rank_step_traced<T, R>(
    x0: &[f64],
    log_f_x0: f64,
    target: &T,
    cfg: &ShrinkConfig,
    src: &mut R,
) -> Result<(StepOutcome, ShrinkState)>
where
    T: TargetDistribution + ?Sized,
    R: RandomSource + ?Sized,
{
    let p = target.dim();
    if x0.len() != p {
        return Err(Error::DimensionMismatch { expected: p, found: x0.len() });
    }
    if !log_f_x0.is_finite() {
        return Err(Error::NonFiniteStart(log_f_x0));
    }

    let log_y = log_f_x0 - src.unit_exponential();
    let mut state = ShrinkState::new(x0, log_y)?;
    let mut stats = StepStats { n_density_evals: 1, ..StepStats::default() };

    let mut sd = cfg.sigma_c;
    let mut precision_sum = 0.0;
    let mut weighted_offset = vec![0.0; p];
    let mut z = vec![0.0; p];

    loop {
        if state.n_crumbs() >= cfg.max_crumbs {
            return Err(Error::MaxCrumbs {
                target: target.name().to_string(),
                x0: x0.to_vec(),
                sigma_c: cfg.sigma_c,
                theta: cfg.theta,
                max_crumbs: cfg.max_crumbs,
            });
        }

        // crumb: c_k - x0 = P(J, sd z)
        src.fill_std_normal(&mut z);
        let mut crumb: Vec<f64> = z.iter().map(|v| sd * v).collect();
        state.basis.project_in_place(&mut crumb);
        let precision = 1.0 / (sd * sd);
        precision_sum += precision;
        for (w, c) in weighted_offset.iter_mut().zip(&crumb) {
            *w += precision * c;
        }
        state.crumb_offsets.push(crumb);
        state.crumb_sds.push(sd);
        debug_assert!(
            state.schedule_is_valid(cfg.theta, cfg.zero_density_factor),
            "crumb sd schedule violated: {:?}",
            state.crumb_sds
        );

        // proposal: x0 + P(J, mu_x + sigma_x z')
        let var_x = 1.0 / precision_sum;
        let sd_x = var_x.sqrt();
        src.fill_std_normal(&mut z);
        let mut offset: Vec<f64> = weighted_offset.iter().zip(&z).map(|(w, zi)| var_x * w + sd_x * zi).collect();
        state.basis.project_in_place(&mut offset);
        let proposal: Vec<f64> = x0.iter().zip(&offset).map(|(a, b)| a + b).collect();

        let log_f = target.log_density(&proposal);
        stats.n_density_evals += 1;
        stats.n_crumbs += 1;
        state.basis_sizes.push(state.basis.len());
        state.proposals.push(proposal);

        if log_f >= log_y {
            stats.accepted = true;
            let x = state.proposals.last().expect("just pushed").clone();
            return Ok((StepOutcome { x, log_density: log_f, stats }, state));
        }

        if log_f == f64::NEG_INFINITY || log_f.is_nan() {
            sd *= cfg.theta * cfg.zero_density_factor;
            continue;
        }

        let grad = target.grad_log_density(state.proposals.last().expect("just pushed"));
        stats.n_grad_evals += 1;
        match state.basis.adaptation_direction(&grad, cfg.cos_threshold)? {
            Some(g_star) => match state.basis.extend(&g_star) {
                Ok(()) => {}
                // projected gradient vanished on re-orthogonalization
                Err(Error::ZeroVector) => sd *= cfg.theta,
                Err(e) => return Err(e),
            },
            None => sd *= cfg.theta,
        }
    }
}
