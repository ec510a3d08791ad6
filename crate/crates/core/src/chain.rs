//! Sampled chains and their CSV form.
//!
//! The CSV has a header row
//! `iteration,x_0,..,x_{p-1},cum_density_evals,cum_grad_evals,n_crumbs`
//! and one row per iteration (numbered from 1). Counters are cumulative
//! except `n_crumbs`, which is per step. Floats are written in Rust's
//! shortest round-trip (`Debug`) form, so reading a file back reproduces every state
//! bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::samplers::StepStats;
use crate::targets::TargetDistribution;

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    dim: usize,
    states: Vec<f64>,
    log_densities: Option<Vec<f64>>,
    cum_density_evals: Vec<u64>,
    cum_grad_evals: Vec<u64>,
    n_crumbs: Vec<u64>,
}

impl Chain {
    pub fn new(dim: usize) -> Self {
        Self::with_capacity(dim, 0)
    }

    pub fn with_capacity(dim: usize, n: usize) -> Self {
        Self {
            dim,
            states: Vec::with_capacity(n * dim),
            log_densities: Some(Vec::with_capacity(n)),
            cum_density_evals: Vec::with_capacity(n),
            cum_grad_evals: Vec::with_capacity(n),
            n_crumbs: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, x: &[f64], log_density: f64, stats: &StepStats) {
        assert_eq!(x.len(), self.dim, "state dimension");
        self.states.extend_from_slice(x);
        if let Some(ld) = &mut self.log_densities {
            ld.push(log_density);
        }
        let prev_d = self.cum_density_evals.last().copied().unwrap_or(0);
        let prev_g = self.cum_grad_evals.last().copied().unwrap_or(0);
        self.cum_density_evals.push(prev_d + stats.n_density_evals);
        self.cum_grad_evals.push(prev_g + stats.n_grad_evals);
        self.n_crumbs.push(stats.n_crumbs);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.n_crumbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_crumbs.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.dim.max(1))
    }

    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.states().map(|s| s[j]).collect()
    }

    /// Log densities of the states; absent for chains read from CSV until
    /// [`Chain::recompute_log_densities`] is called.
    pub fn log_densities(&self) -> Option<&[f64]> {
        self.log_densities.as_deref()
    }

    pub fn recompute_log_densities<T: TargetDistribution + ?Sized>(&mut self, target: &T) -> Result<()> {
        if target.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: target.dim() });
        }
        let ld = self.states().map(|s| target.log_density(s)).collect();
        self.log_densities = Some(ld);
        Ok(())
    }

    pub fn cum_density_evals(&self) -> &[u64] {
        &self.cum_density_evals
    }

    pub fn cum_grad_evals(&self) -> &[u64] {
        &self.cum_grad_evals
    }

    pub fn n_crumbs(&self) -> &[u64] {
        &self.n_crumbs
    }

    pub fn total_density_evals(&self) -> u64 {
        self.cum_density_evals.last().copied().unwrap_or(0)
    }

    pub fn total_grad_evals(&self) -> u64 {
        self.cum_grad_evals.last().copied().unwrap_or(0)
    }

    pub fn mean_crumbs(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.n_crumbs.iter().sum::<u64>() as f64 / self.len() as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = String::from("iteration");
        for j in 0..self.dim {
            header.push_str(&format!(",x_{j}"));
        }
        header.push_str(",cum_density_evals,cum_grad_evals,n_crumbs\n");
        out.write_all(header.as_bytes())?;
        let mut line = String::new();
        for i in 0..self.len() {
            line.clear();
            line.push_str(&(i + 1).to_string());
            for v in self.state(i) {
                line.push(',');
                line.push_str(&format!("{v:?}"));
            }
            line.push_str(&format!(
                ",{},{},{}\n",
                self.cum_density_evals[i], self.cum_grad_evals[i], self.n_crumbs[i]
            ));
            out.write_all(line.as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<Rd: Read>(input: Rd) -> Result<Self> {
        let parse_err = |msg: String| Error::Parse(format!("chain CSV: {msg}"));
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let headers = reader.headers()?.clone();
        let n_cols = headers.len();
        if n_cols < 5 || &headers[0] != "iteration" {
            return Err(parse_err("unexpected header".into()));
        }
        let dim = n_cols - 4;
        for j in 0..dim {
            if headers[j + 1] != format!("x_{j}") {
                return Err(parse_err(format!("column {} should be x_{j}", j + 1)));
            }
        }
        if &headers[n_cols - 3] != "cum_density_evals"
            || &headers[n_cols - 2] != "cum_grad_evals"
            || &headers[n_cols - 1] != "n_crumbs"
        {
            return Err(parse_err("missing counter columns".into()));
        }
        let mut chain = Chain::new(dim);
        chain.log_densities = None;
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| parse_err(e.to_string()))?;
            if record.len() != n_cols {
                return Err(parse_err(format!("row {} has {} fields", row + 1, record.len())));
            }
            let iteration: usize = record[0].parse().map_err(|_| parse_err(format!("row {}: bad iteration", row + 1)))?;
            if iteration != row + 1 {
                return Err(parse_err(format!("row {}: iteration {iteration} out of sequence", row + 1)));
            }
            for j in 0..dim {
                let v: f64 = record[j + 1]
                    .parse()
                    .map_err(|_| parse_err(format!("row {}: bad value `{}`", row + 1, &record[j + 1])))?;
                chain.states.push(v);
            }
            let counter = |k: usize| -> Result<u64> {
                record[k].parse().map_err(|_| parse_err(format!("row {}: bad counter `{}`", row + 1, &record[k])))
            };
            chain.cum_density_evals.push(counter(n_cols - 3)?);
            chain.cum_grad_evals.push(counter(n_cols - 2)?);
            chain.n_crumbs.push(counter(n_cols - 1)?);
        }
        Ok(chain)
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}
