use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TargetDistribution;
use crate::error::{Error, Result};

/// Design matrix (row-major, `n × k`) and binary responses.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    design: Vec<f64>,
    response: Vec<f64>,
    n: usize,
    k: usize,
    standardized: bool,
}

impl RegressionData {
    pub fn new(rows: Vec<Vec<f64>>, response: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("regression data needs at least one row".into()));
        }
        let k = rows[0].len();
        if k == 0 {
            return Err(Error::InvalidParameter("regression data needs at least one covariate".into()));
        }
        if response.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: response.len() });
        }
        if let Some(row) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, found: row.len() });
        }
        if let Some(y) = response.iter().find(|y| **y != 0.0 && **y != 1.0) {
            return Err(Error::InvalidParameter(format!("response must be 0 or 1, found {y}")));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("design matrix entries must be finite".into()));
        }
        Ok(Self { design: rows.concat(), response, n, k, standardized: false })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_covariates(&self) -> usize {
        self.k
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.design[i * self.k..(i + 1) * self.k]
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// 1000 rows and 24 unstandardized covariates shaped like the numeric
    /// German Credit table: small ordinal codes, durations in months,
    /// amounts in hundreds, ages in years and 0/1 indicators.
    ///
    /// Covariates and responses come from a ChaCha8 stream seeded with
    /// `seed`; responses follow a logistic model with fixed coefficients,
    /// so the data are not separable.
    pub fn synthetic_credit(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1000;
        let mut rows = Vec::with_capacity(n);
        let mut response = Vec::with_capacity(n);
        for _ in 0..n {
            let mut row = Vec::with_capacity(24);
            row.push(rng.gen_range(1..=4) as f64); // checking account status
            row.push(rng.gen_range(4..=72) as f64); // duration in months
            row.push(rng.gen_range(0..=4) as f64); // credit history
            let amount: f64 = (rng.gen::<f64>() * 2.5 + 6.0).exp() / 100.0;
            row.push(amount.round().max(2.0)); // credit amount, hundreds
            row.push(rng.gen_range(1..=5) as f64); // savings
            row.push(rng.gen_range(1..=5) as f64); // employment
            row.push(rng.gen_range(1..=4) as f64); // installment rate
            row.push(rng.gen_range(1..=4) as f64); // personal status
            row.push(rng.gen_range(1..=4) as f64); // residence
            row.push(rng.gen_range(1..=4) as f64); // property
            row.push(rng.gen_range(19..=75) as f64); // age
            row.push(rng.gen_range(1..=4) as f64); // existing credits
            row.push(rng.gen_range(1..=2) as f64); // dependents
            row.push(rng.gen_range(1..=2) as f64); // telephone
            for _ in 0..10 {
                row.push(if rng.gen::<f64>() < 0.3 { 1.0 } else { 0.0 });
            }
            let eta = 1.2 - 0.55 * row[0] + 0.025 * row[1] - 0.25 * row[2] + 0.01 * row[3]
                - 0.15 * row[4]
                - 0.01 * row[10]
                + 0.4 * row[14]
                - 0.3 * row[15];
            let p = 1.0 / (1.0 + (-eta).exp());
            response.push(if rng.gen::<f64>() < p { 1.0 } else { 0.0 });
            rows.push(row);
        }
        Self::new(rows, response).expect("generator produces valid data")
    }
}

/// Reads a comma-separated file with one header row; the last column is the
/// binary response and all other columns are covariates, used as-is.
pub fn load_regression_csv(path: impl AsRef<Path>) -> Result<RegressionData> {
    let path = path.as_ref();
    let data_err = |message: String| Error::Data { path: path.to_owned(), message };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let n_cols = reader.headers()?.len();
    if n_cols < 2 {
        return Err(data_err("need at least one covariate column and a response column".into()));
    }
    let mut rows = Vec::new();
    let mut response = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| data_err(e.to_string()))?;
        if record.len() != n_cols {
            return Err(data_err(format!(
                "row {} has {} fields, header has {}",
                line + 2,
                record.len(),
                n_cols
            )));
        }
        let mut values = Vec::with_capacity(n_cols);
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| data_err(format!("row {}: `{field}` is not a number", line + 2)))?;
            values.push(v);
        }
        let y = values.pop().expect("at least two columns");
        if y != 0.0 && y != 1.0 {
            return Err(data_err(format!("row {}: response {y} is not 0 or 1", line + 2)));
        }
        response.push(y);
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(data_err("no data rows".into()));
    }
    RegressionData::new(rows, response).map_err(|e| data_err(e.to_string()))
}

/// Bayesian logistic regression with an intercept and independent
/// `N(0, prior_variance)` priors on all coefficients.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    name: String,
    data: RegressionData,
    prior_precision: f64,
}

pub const DEFAULT_PRIOR_VARIANCE: f64 = 100.0;

/// `log(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn expit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl LogisticRegression {
    pub fn new(data: RegressionData) -> Self {
        Self::with_prior_variance(data, DEFAULT_PRIOR_VARIANCE).expect("default prior is valid")
    }

    pub fn with_prior_variance(data: RegressionData, prior_variance: f64) -> Result<Self> {
        if !(prior_variance > 0.0 && prior_variance.is_finite()) {
            return Err(Error::InvalidParameter("prior variance must be positive".into()));
        }
        Ok(Self {
            name: format!("logistic-regression(n={},k={})", data.n, data.k),
            data,
            prior_precision: 1.0 / prior_variance,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn linear_predictor(&self, beta: &[f64], i: usize) -> f64 {
        beta[0] + self.data.row(i).iter().zip(&beta[1..]).map(|(x, b)| x * b).sum::<f64>()
    }
}

impl TargetDistribution for LogisticRegression {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.data.k + 1
    }

    fn log_density(&self, beta: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.data.n {
            let eta = self.linear_predictor(beta, i);
            acc += self.data.response[i] * eta - softplus(eta);
        }
        acc - 0.5 * self.prior_precision * beta.iter().map(|b| b * b).sum::<f64>()
    }

    fn grad_log_density(&self, beta: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = beta.iter().map(|b| -self.prior_precision * b).collect();
        for i in 0..self.data.n {
            let r = self.data.response[i] - expit(self.linear_predictor(beta, i));
            g[0] += r;
            for (gj, x) in g[1..].iter_mut().zip(self.data.row(i)) {
                *gj += r * x;
            }
        }
        g
    }

    fn initial_point(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }
}
