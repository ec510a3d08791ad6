//! Integrated autocorrelation time and sampler efficiency.
//!
//! `τ = 1 + 2 Σ_{t=1..M} ρ̂(t)`, with the window `M` chosen as the smallest
//! lag for which `M > 5 τ̂(M)`. The asymptotic variance of the estimate is
//! `τ² (4M + 2) / n`, which gives a normal-approximation 95% interval.
//! Efficiency is reported as log-density evaluations per independent
//! observation, `total_evals · τ / n`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::chain::Chain;
use crate::error::{Error, Result};

pub const MIN_SERIES_LEN: usize = 100;
pub const MIN_DISTINCT_VALUES: usize = 5;
pub const WINDOW_FACTOR: f64 = 5.0;
pub const DEFAULT_BURN_IN: f64 = 0.1;
const Z_95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEstimate {
    pub tau: f64,
    pub ci: (f64, f64),
    pub window: usize,
}

/// Autocovariances at lags `0..n`, normalized by `n`.
fn autocovariance(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .map(|x| Complex::new(x - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in &mut buf {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / (size as f64 * n as f64);
    buf[..n].iter().map(|c| c.re * scale).collect()
}

fn has_distinct_values(series: &[f64], needed: usize) -> bool {
    let mut seen: Vec<f64> = Vec::with_capacity(needed);
    for &x in series {
        if !seen.iter().any(|s| *s == x) {
            seen.push(x);
            if seen.len() >= needed {
                return true;
            }
        }
    }
    false
}

pub fn autocorrelation_time(series: &[f64]) -> Result<TauEstimate> {
    let n = series.len();
    if n < MIN_SERIES_LEN {
        return Err(Error::Inestimable(format!("series of length {n} is shorter than {MIN_SERIES_LEN}")));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::Inestimable("series contains non-finite values".into()));
    }
    if !has_distinct_values(series, MIN_DISTINCT_VALUES) {
        return Err(Error::Inestimable(format!("fewer than {MIN_DISTINCT_VALUES} distinct values")));
    }
    let acov = autocovariance(series);
    if !(acov[0] > 0.0) {
        return Err(Error::Inestimable("zero sample variance".into()));
    }
    let mut tau = 1.0;
    let max_window = n / 2;
    for m in 1..max_window {
        tau += 2.0 * acov[m] / acov[0];
        if m as f64 > WINDOW_FACTOR * tau {
            let tau = tau.max(1.0);
            let half = Z_95 * tau * ((4 * m + 2) as f64 / n as f64).sqrt();
            return Ok(TauEstimate { tau, ci: ((tau - half).max(1.0), tau + half), window: m });
        }
    }
    Err(Error::Inestimable(format!("no self-consistent window below {max_window} lags")))
}

/// Which function of the state the report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monitored {
    Coordinate(usize),
    LogDensity,
}

impl Monitored {
    pub fn label(&self) -> String {
        match self {
            Monitored::Coordinate(j) => format!("x_{j}"),
            Monitored::LogDensity => "log-density".to_string(),
        }
    }
}

impl std::str::FromStr for Monitored {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-density" => Ok(Monitored::LogDensity),
            other => other
                .trim_start_matches("x_")
                .parse()
                .map(Monitored::Coordinate)
                .map_err(|_| Error::Parse(format!("monitored function `{other}` is not log-density or a coordinate index"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub monitored: String,
    pub n_iterations: usize,
    pub total_density_evals: u64,
    pub tau: f64,
    pub tau_ci: (f64, f64),
    pub ess: f64,
    pub evals_per_indep_obs: f64,
    pub evals_ci: (f64, f64),
}

impl EfficiencyReport {
    pub const CSV_HEADER: &'static str =
        "monitored,n_iterations,total_density_evals,tau,tau_lo,tau_hi,ess,evals_per_indep_obs,evals_lo,evals_hi";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.monitored,
            self.n_iterations,
            self.total_density_evals,
            self.tau,
            self.tau_ci.0,
            self.tau_ci.1,
            self.ess,
            self.evals_per_indep_obs,
            self.evals_ci.0,
            self.evals_ci.1
        )
    }
}

/// Builds a report from a monitored series and the evaluations it cost.
pub fn report_for_series(series: &[f64], total_density_evals: u64, monitored: String) -> Result<EfficiencyReport> {
    let est = autocorrelation_time(series)?;
    let n = series.len() as f64;
    let per_iter = total_density_evals as f64 / n;
    Ok(EfficiencyReport {
        monitored,
        n_iterations: series.len(),
        total_density_evals,
        tau: est.tau,
        tau_ci: est.ci,
        ess: n / est.tau,
        evals_per_indep_obs: per_iter * est.tau,
        evals_ci: (per_iter * est.ci.0, per_iter * est.ci.1),
    })
}

fn burn_in_start(chain: &Chain, burn_in: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&burn_in) {
        return Err(Error::InvalidParameter(format!("burn-in fraction {burn_in} outside [0, 1)")));
    }
    Ok((chain.len() as f64 * burn_in).floor() as usize)
}

fn kept_evals(chain: &Chain, start: usize) -> u64 {
    let cum = chain.cum_density_evals();
    let before = if start == 0 { 0 } else { cum[start - 1] };
    chain.total_density_evals() - before
}

/// Efficiency of one monitored function after discarding the first
/// `burn_in` fraction of the chain.
pub fn efficiency_report(chain: &Chain, monitored: Monitored, burn_in: f64) -> Result<EfficiencyReport> {
    let start = burn_in_start(chain, burn_in)?;
    let series: Vec<f64> = match monitored {
        Monitored::Coordinate(j) => {
            if j >= chain.dim() {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {j} out of range for a {}-dimensional chain",
                    chain.dim()
                )));
            }
            chain.states().skip(start).map(|s| s[j]).collect()
        }
        Monitored::LogDensity => chain
            .log_densities()
            .ok_or_else(|| Error::InvalidParameter("chain has no stored log densities".into()))?[start..]
            .to_vec(),
    };
    report_for_series(&series, kept_evals(chain, start), monitored.label())
}

/// Report for the coordinate with the largest τ (lowest index on ties).
/// Inestimable coordinates are skipped; if all are, the first error is
/// returned.
pub fn worst_coordinate_report(chain: &Chain, burn_in: f64) -> Result<EfficiencyReport> {
    let mut worst: Option<EfficiencyReport> = None;
    let mut first_err = None;
    for j in 0..chain.dim() {
        match efficiency_report(chain, Monitored::Coordinate(j), burn_in) {
            Ok(r) => {
                if worst.as_ref().map_or(true, |w| r.tau > w.tau) {
                    worst = Some(r);
                }
            }
            Err(e @ Error::Inestimable(_)) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    worst.ok_or_else(|| first_err.unwrap_or_else(|| Error::Inestimable("chain has no coordinates".into())))
}
