#![allow(dead_code)]

use std::path::PathBuf;

use shrinkrank::diagnostics::autocorrelation_time;
use shrinkrank::rng::{RandomSource, SeededSource};
use shrinkrank::targets::{
    CorrelatedGaussian, EightSchools, EightSchoolsData, GammaProduct, GpData, GpRegression, LogisticRegression,
    RegressionData, TargetDistribution,
};
use statrs::distribution::{ContinuousCDF, Normal};

pub fn repo_root() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
}

pub fn eight_schools_data() -> EightSchoolsData {
    EightSchoolsData::from_toml_file(repo_root().join("data/eight_schools.toml")).unwrap()
}

/// A suite target plus a generator of interior points for gradient checks.
pub struct SuiteTarget {
    pub target: Box<dyn TargetDistribution>,
    pub interior: Box<dyn Fn(&mut SeededSource) -> Vec<f64>>,
    pub grad_tol: f64,
}

fn jitter(center: Vec<f64>, scale: f64) -> impl Fn(&mut SeededSource) -> Vec<f64> {
    move |src: &mut SeededSource| {
        let z = src.std_normal_vec(center.len()).unwrap();
        center.iter().zip(z).map(|(c, z)| c + scale * z).collect()
    }
}

pub fn suite() -> Vec<SuiteTarget> {
    let n4 = CorrelatedGaussian::new(4, 0.999).unwrap();
    let gamma2 = GammaProduct::new(2).unwrap();
    let gamma20 = GammaProduct::new(20).unwrap();
    let schools = EightSchools::new(eight_schools_data()).unwrap();
    let credit = LogisticRegression::new(RegressionData::synthetic_credit(1));
    let gp_data = GpData::synthetic(30, 2024).unwrap();
    let gp_logged = GpRegression::new(gp_data.clone(), true);
    let gp_unlogged = GpRegression::new(gp_data, false);

    let schools_init = schools.initial_point();
    let credit_init = credit.initial_point();
    let gp_logged_init = gp_logged.initial_point();
    let uniform_box = |dim: usize, lo: f64, hi: f64| {
        move |src: &mut SeededSource| (0..dim).map(|_| lo + (hi - lo) * src.uniform()).collect::<Vec<f64>>()
    };
    vec![
        SuiteTarget { target: Box::new(n4), interior: Box::new(jitter(vec![0.0; 4], 1.0)), grad_tol: 1e-5 },
        SuiteTarget { target: Box::new(gamma2), interior: Box::new(uniform_box(2, 0.3, 5.0)), grad_tol: 1e-5 },
        SuiteTarget { target: Box::new(gamma20), interior: Box::new(uniform_box(20, 0.3, 5.0)), grad_tol: 1e-5 },
        SuiteTarget { target: Box::new(schools), interior: Box::new(jitter(schools_init, 1.0)), grad_tol: 1e-5 },
        SuiteTarget { target: Box::new(credit), interior: Box::new(jitter(credit_init, 0.01)), grad_tol: 1e-5 },
        SuiteTarget { target: Box::new(gp_logged), interior: Box::new(jitter(gp_logged_init, 0.5)), grad_tol: 1e-4 },
        SuiteTarget { target: Box::new(gp_unlogged), interior: Box::new(uniform_box(3, 0.2, 3.0)), grad_tol: 1e-4 },
    ]
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖a - b‖ / ‖b‖`, with the denominator floored at 1e-12.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b).max(1e-12)
}

/// Orthogonal matrix from Gram–Schmidt on a Gaussian matrix (row-major).
pub fn random_orthogonal(p: usize, src: &mut SeededSource) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(p);
    while rows.len() < p {
        let mut v = src.std_normal_vec(p).unwrap();
        for r in &rows {
            let d: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(r).for_each(|(vi, ri)| *vi -= d * ri);
        }
        let n = norm(&v);
        if n > 1e-6 {
            rows.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    rows
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Sample mean and variance with standard errors inflated by the
/// integrated autocorrelation time of `x` and of `(x - mean)²`.
pub struct MomentCheck {
    pub mean: f64,
    pub mean_se: f64,
    pub var: f64,
    pub var_se: f64,
}

pub fn moment_check(xs: &[f64]) -> MomentCheck {
    let n = xs.len() as f64;
    let (mean, var) = mean_var(xs);
    let tau = autocorrelation_time(xs).unwrap().tau;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let (_, sq_var) = mean_var(&sq);
    let tau_sq = autocorrelation_time(&sq).unwrap().tau;
    MomentCheck { mean, mean_se: (var * tau / n).sqrt(), var, var_se: (sq_var * tau_sq / n).sqrt() }
}

/// One-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the KS statistic (Kolmogorov distribution with
/// Stephens' small-sample correction).
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powi(k as i32 - 1) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

pub fn std_normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// CDF of Gamma(2, 1).
pub fn gamma2_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (1.0 + x) * (-x).exp()
    }
}

/// Every `step`-th element.
pub fn thin(xs: &[f64], step: usize) -> Vec<f64> {
    xs.iter().step_by(step.max(1)).copied().collect()
}

